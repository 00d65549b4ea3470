#include "seqdenoise/model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <fstream>

#include "seqdenoise/rng.hpp"

namespace seqdenoise {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using WMap = Eigen::Map<const RowMat>;
using MutWMap = Eigen::Map<RowMat>;
using VMap = Eigen::Map<const VectorXd>;
using MutVMap = Eigen::Map<VectorXd>;

struct CellOffsets {
  std::size_t wz = 0, uz = 0, bz = 0, wc = 0, uc = 0, bc = 0;
  std::size_t in_size = 0;
};

struct Layout {
  bool has_encoder = false;
  std::size_t src_embed = 0;
  std::size_t tgt_embed = 0;
  std::vector<CellOffsets> enc, dec;
  std::size_t out_w = 0, out_b = 0;
  std::size_t feat = 0;
  std::size_t total = 0;
};

Layout make_layout(const ModelConfig& cfg) {
  Layout lay;
  std::size_t off = 0;
  const std::size_t h = cfg.hidden_size, e = cfg.embedding_size;
  auto add_cells = [&](std::vector<CellOffsets>& cells) {
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
      CellOffsets c;
      c.in_size = (l == 0) ? e : h;
      c.wz = off; off += h * c.in_size;
      c.uz = off; off += h * h;
      c.bz = off; off += h;
      c.wc = off; off += h * c.in_size;
      c.uc = off; off += h * h;
      c.bc = off; off += h;
      cells.push_back(c);
    }
  };
  if (cfg.mode == ModelMode::kSeq2Seq) {
    lay.has_encoder = true;
    lay.src_embed = off;
    off += cfg.source_vocab_size * e;
    add_cells(lay.enc);
  }
  lay.tgt_embed = off;
  off += cfg.target_vocab_size * e;
  add_cells(lay.dec);
  lay.feat = (cfg.mode == ModelMode::kSeq2Seq) ? 2 * h : h;
  lay.out_w = off;
  off += cfg.target_vocab_size * lay.feat;
  lay.out_b = off;
  off += cfg.target_vocab_size;
  lay.total = off;
  return lay;
}

std::vector<ParamBlock> make_blocks(const ModelConfig& cfg, const Layout& lay) {
  std::vector<ParamBlock> blocks;
  const std::size_t h = cfg.hidden_size, e = cfg.embedding_size;
  auto add_cells = [&](const char* prefix, const std::vector<CellOffsets>& cells) {
    for (std::size_t l = 0; l < cells.size(); ++l) {
      const auto& c = cells[l];
      const std::string base = std::string(prefix) + std::to_string(l) + ".";
      blocks.push_back({base + "wz", c.wz, h, c.in_size});
      blocks.push_back({base + "uz", c.uz, h, h});
      blocks.push_back({base + "bz", c.bz, h, 1});
      blocks.push_back({base + "wc", c.wc, h, c.in_size});
      blocks.push_back({base + "uc", c.uc, h, h});
      blocks.push_back({base + "bc", c.bc, h, 1});
    }
  };
  if (lay.has_encoder) {
    blocks.push_back({"src_embed", lay.src_embed, cfg.source_vocab_size, e});
    add_cells("enc", lay.enc);
  }
  blocks.push_back({"tgt_embed", lay.tgt_embed, cfg.target_vocab_size, e});
  add_cells("dec", lay.dec);
  blocks.push_back({"out_w", lay.out_w, cfg.target_vocab_size, lay.feat});
  blocks.push_back({"out_b", lay.out_b, cfg.target_vocab_size, 1});
  return blocks;
}

// Cached activations for one recurrent stack: per layer an H x T matrix
// whose column t is the state after consuming input t.
struct StackCache {
  std::vector<MatrixXd> z, c, h;
};

void run_stack(const double* p, const std::vector<CellOffsets>& cells, std::size_t h,
               std::size_t embed_off, std::size_t e, std::span<const TokenId> ids,
               StackCache* cache) {
  const std::size_t steps = ids.size();
  const std::size_t layers = cells.size();
  cache->z.assign(layers, MatrixXd(h, steps));
  cache->c.assign(layers, MatrixXd(h, steps));
  cache->h.assign(layers, MatrixXd(h, steps));
  const VectorXd zero = VectorXd::Zero(h);
  VectorXd zraw(h), craw(h), zt(h), ct(h);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t l = 0; l < layers; ++l) {
      const auto& c = cells[l];
      WMap wz(p + c.wz, h, c.in_size), uz(p + c.uz, h, h);
      WMap wc(p + c.wc, h, c.in_size), uc(p + c.uc, h, h);
      VMap bz(p + c.bz, h), bc(p + c.bc, h);
      const VectorXd hprev = (t == 0) ? zero : VectorXd(cache->h[l].col(t - 1));
      if (l == 0) {
        VMap in(p + embed_off + static_cast<std::size_t>(ids[t]) * e, e);
        zraw.noalias() = wz * in;
        craw.noalias() = wc * in;
      } else {
        zraw.noalias() = wz * cache->h[l - 1].col(t);
        craw.noalias() = wc * cache->h[l - 1].col(t);
      }
      zraw.noalias() += uz * hprev;
      zraw += bz;
      craw.noalias() += uc * hprev;
      craw += bc;
      zt = (1.0 / (1.0 + (-zraw.array()).exp())).matrix();
      ct = craw.array().tanh().matrix();
      cache->z[l].col(t) = zt;
      cache->c[l].col(t) = ct;
      cache->h[l].col(t) = zt.cwiseProduct(ct) + (1.0 - zt.array()).matrix().cwiseProduct(hprev);
    }
  }
}

// Backward through one stack. d_top holds dL/d(top state) per step (H x T);
// parameter and embedding gradients accumulate into `g`.
void backprop_stack(const double* p, const std::vector<CellOffsets>& cells, std::size_t h,
                    std::size_t embed_off, std::size_t e, std::span<const TokenId> ids,
                    const StackCache& cache, const MatrixXd& d_top, std::vector<double>& g) {
  const std::size_t steps = ids.size();
  const std::size_t layers = cells.size();
  const VectorXd zero = VectorXd::Zero(h);
  std::vector<VectorXd> carry(layers, VectorXd::Zero(h));
  VectorXd dh(h), dz(h), dc(h), dzraw(h), dcraw(h), dhprev(h), din(h), din_above;
  for (std::size_t ti = steps; ti-- > 0;) {
    for (std::size_t li = layers; li-- > 0;) {
      const auto& c = cells[li];
      WMap wz(p + c.wz, h, c.in_size), uz(p + c.uz, h, h);
      WMap wc(p + c.wc, h, c.in_size), uc(p + c.uc, h, h);
      dh = (li == layers - 1) ? VectorXd(d_top.col(ti) + carry[li])
                              : VectorXd(din_above + carry[li]);
      const VectorXd hprev = (ti == 0) ? zero : VectorXd(cache.h[li].col(ti - 1));
      const VectorXd zt = cache.z[li].col(ti);
      const VectorXd ct = cache.c[li].col(ti);
      dz = dh.cwiseProduct(ct - hprev);
      dc = dh.cwiseProduct(zt);
      dhprev = dh.cwiseProduct((1.0 - zt.array()).matrix());
      dzraw = (dz.array() * zt.array() * (1.0 - zt.array())).matrix();
      dcraw = (dc.array() * (1.0 - ct.array().square())).matrix();

      MutWMap gwz(g.data() + c.wz, h, c.in_size), guz(g.data() + c.uz, h, h);
      MutWMap gwc(g.data() + c.wc, h, c.in_size), guc(g.data() + c.uc, h, h);
      MutVMap gbz(g.data() + c.bz, h), gbc(g.data() + c.bc, h);
      if (li == 0) {
        VMap in(p + embed_off + static_cast<std::size_t>(ids[ti]) * e, e);
        gwz.noalias() += dzraw * in.transpose();
        gwc.noalias() += dcraw * in.transpose();
      } else {
        gwz.noalias() += dzraw * cache.h[li - 1].col(ti).transpose();
        gwc.noalias() += dcraw * cache.h[li - 1].col(ti).transpose();
      }
      guz.noalias() += dzraw * hprev.transpose();
      guc.noalias() += dcraw * hprev.transpose();
      gbz += dzraw;
      gbc += dcraw;

      din.noalias() = wz.transpose() * dzraw;
      din.noalias() += wc.transpose() * dcraw;
      dhprev.noalias() += uz.transpose() * dzraw;
      dhprev.noalias() += uc.transpose() * dcraw;
      carry[li] = dhprev;
      din_above = din;
    }
    MutVMap gembed(g.data() + embed_off + static_cast<std::size_t>(ids[ti]) * e, e);
    gembed += din_above;
  }
}

struct ForwardCache {
  StackCache enc, dec;
  std::vector<TokenId> dec_in, dec_tgt;
  MatrixXd attn;  // S x n, seq2seq only
  MatrixXd ctx;   // H x n, seq2seq only
  MatrixXd prob;  // Vt x n
  std::vector<double> logp;
};

void validate_pair(const ModelConfig& cfg, const SentencePair& pair) {
  if (pair.target.empty()) throw ValidationError("log_prob requires a non-empty target");
  if (cfg.mode == ModelMode::kSeq2Seq) {
    if (pair.source.empty()) throw ValidationError("log_prob requires a non-empty source");
    for (TokenId id : pair.source) {
      if (id >= cfg.source_vocab_size) {
        throw ValidationError("source token id " + std::to_string(id) +
                              " out of bounds for vocab size " +
                              std::to_string(cfg.source_vocab_size));
      }
    }
  }
  for (TokenId id : pair.target) {
    if (id >= cfg.target_vocab_size) {
      throw ValidationError("target token id " + std::to_string(id) +
                            " out of bounds for vocab size " +
                            std::to_string(cfg.target_vocab_size));
    }
  }
}

// Teacher-forced forward pass; fills the cache and returns the total
// log-probability of the target (end token included).
double forward(const Seq2SeqModel& model, const Layout& lay, const SentencePair& pair,
               ForwardCache* f) {
  const ModelConfig& cfg = model.config();
  validate_pair(cfg, pair);
  const double* p = model.parameters().data();
  const std::size_t h = cfg.hidden_size, e = cfg.embedding_size;
  const std::size_t vt = cfg.target_vocab_size;

  if (lay.has_encoder) {
    run_stack(p, lay.enc, h, lay.src_embed, e, pair.source, &f->enc);
  }

  const std::size_t n = pair.target.size() + 1;
  f->dec_in.resize(n);
  f->dec_tgt.resize(n);
  f->dec_in[0] = cfg.bos_id;
  for (std::size_t k = 0; k + 1 < n; ++k) f->dec_in[k + 1] = pair.target[k];
  for (std::size_t k = 0; k + 1 < n; ++k) f->dec_tgt[k] = pair.target[k];
  f->dec_tgt[n - 1] = cfg.eos_id;

  run_stack(p, lay.dec, h, lay.tgt_embed, e, f->dec_in, &f->dec);
  const MatrixXd& dec_top = f->dec.h.back();

  WMap out_w(p + lay.out_w, vt, lay.feat);
  VMap out_b(p + lay.out_b, vt);

  f->prob.resize(vt, n);
  f->logp.resize(n);
  VectorXd feature(lay.feat), logits(vt), escore, attn_w;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (lay.has_encoder) {
      const MatrixXd& enc_top = f->enc.h.back();
      if (k == 0) {
        f->attn.resize(static_cast<Eigen::Index>(pair.source.size()), n);
        f->ctx.resize(h, n);
      }
      escore.noalias() = enc_top.transpose() * dec_top.col(k);
      const double m = escore.maxCoeff();
      attn_w = (escore.array() - m).exp();
      attn_w /= attn_w.sum();
      f->attn.col(k) = attn_w;
      f->ctx.col(k).noalias() = enc_top * attn_w;
      feature.head(h) = dec_top.col(k);
      feature.tail(h) = f->ctx.col(k);
    } else {
      feature = dec_top.col(k);
    }
    logits.noalias() = out_w * feature;
    logits += out_b;
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    f->prob.col(k) = (logits.array() - lse).exp();
    f->logp[k] = logits[f->dec_tgt[k]] - lse;
    total += f->logp[k];
  }
  return total;
}

// Backward pass matching `forward`. Accumulates scale * d(-logp)/d(params).
void backward(const Seq2SeqModel& model, const Layout& lay, const SentencePair& pair,
              const ForwardCache& f, double scale, std::vector<double>& g) {
  const ModelConfig& cfg = model.config();
  const double* p = model.parameters().data();
  const std::size_t h = cfg.hidden_size, e = cfg.embedding_size;
  const std::size_t vt = cfg.target_vocab_size;
  const std::size_t n = f.dec_in.size();

  WMap out_w(p + lay.out_w, vt, lay.feat);
  MutWMap g_out_w(g.data() + lay.out_w, vt, lay.feat);
  MutVMap g_out_b(g.data() + lay.out_b, vt);

  const MatrixXd& dec_top = f.dec.h.back();
  MatrixXd d_dec_top = MatrixXd::Zero(h, n);
  MatrixXd d_enc_top;
  if (lay.has_encoder) {
    d_enc_top = MatrixXd::Zero(h, static_cast<Eigen::Index>(pair.source.size()));
  }

  VectorXd dlogits(vt), dfeat(lay.feat), ds(h), dctx(h), da, de;
  for (std::size_t k = 0; k < n; ++k) {
    dlogits = f.prob.col(k) * scale;
    dlogits[f.dec_tgt[k]] -= scale;
    g_out_b += dlogits;

    if (lay.has_encoder) {
      const MatrixXd& enc_top = f.enc.h.back();
      VectorXd feature(lay.feat);
      feature.head(h) = dec_top.col(k);
      feature.tail(h) = f.ctx.col(k);
      g_out_w.noalias() += dlogits * feature.transpose();
      dfeat.noalias() = out_w.transpose() * dlogits;
      ds = dfeat.head(h);
      dctx = dfeat.tail(h);
      // attention backward: ctx = Enc * a, a = softmax(Enc^T s)
      const VectorXd a = f.attn.col(k);
      da.noalias() = enc_top.transpose() * dctx;
      const double adot = a.dot(da);
      de = (a.array() * (da.array() - adot)).matrix();
      ds.noalias() += enc_top * de;
      d_enc_top.noalias() += dctx * a.transpose();
      d_enc_top.noalias() += VectorXd(dec_top.col(k)) * de.transpose();
    } else {
      g_out_w.noalias() += dlogits * dec_top.col(k).transpose();
      ds.noalias() = out_w.transpose() * dlogits;
    }
    d_dec_top.col(k) += ds;
  }

  backprop_stack(p, lay.dec, h, lay.tgt_embed, e, f.dec_in, f.dec, d_dec_top, g);
  if (lay.has_encoder) {
    backprop_stack(p, lay.enc, h, lay.src_embed, e, pair.source, f.enc, d_enc_top, g);
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (hidden_size < 1 || embedding_size < 1 || n_layers < 1) {
    throw ValidationError("model sizes must all be >= 1");
  }
  if (target_vocab_size < 1) throw ValidationError("target_vocab_size must be >= 1");
  if (mode == ModelMode::kSeq2Seq && source_vocab_size < 1) {
    throw ValidationError("source_vocab_size must be >= 1 in seq2seq mode");
  }
  if (bos_id >= target_vocab_size || eos_id >= target_vocab_size) {
    throw ValidationError("bos/eos ids must lie inside the target vocabulary");
  }
}

std::size_t ModelConfig::param_count() const { return make_layout(*this).total; }

Seq2SeqModel::Seq2SeqModel(const ModelConfig& config) : config_(config) {
  config_.validate();
  const Layout lay = make_layout(config_);
  blocks_ = make_blocks(config_, lay);
  params_.assign(lay.total, 0.0);
}

bool Seq2SeqModel::all_finite() const {
  for (double v : params_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Seq2SeqModel init_model(const ModelConfig& config, std::uint64_t seed) {
  Seq2SeqModel model(config);
  Rng rng(mix_seed(seed, 0x1417));
  for (double& v : model.parameters()) v = rng.next_real(-0.08, 0.08);
  return model;
}

double log_prob(const Seq2SeqModel& model, const SentencePair& pair) {
  ForwardCache f;
  return forward(model, make_layout(model.config()), pair, &f);
}

Prediction predict_teacher_forced(const Seq2SeqModel& model, const SentencePair& pair) {
  ForwardCache f;
  forward(model, make_layout(model.config()), pair, &f);
  Prediction pred;
  pred.position_logprob = f.logp;
  pred.argmax.resize(f.dec_in.size());
  for (std::size_t k = 0; k < pred.argmax.size(); ++k) {
    Eigen::Index best = 0;
    f.prob.col(k).maxCoeff(&best);
    pred.argmax[k] = static_cast<TokenId>(best);
  }
  return pred;
}

std::vector<double> grad(const Seq2SeqModel& model, std::span<const SentencePair* const> batch,
                         double* mean_nll) {
  if (batch.empty()) throw ValidationError("grad requires a non-empty batch");
  const Layout lay = make_layout(model.config());
  std::vector<double> g(lay.total, 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  ForwardCache f;
  double total_logp = 0.0;
  for (const SentencePair* pair : batch) {
    total_logp += forward(model, lay, *pair, &f);
    backward(model, lay, *pair, f, scale, g);
  }
  if (mean_nll != nullptr) *mean_nll = -total_logp * scale;
  return g;
}

std::vector<double> grad(const Seq2SeqModel& model, std::span<const SentencePair> batch,
                         double* mean_nll) {
  std::vector<const SentencePair*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& pair : batch) ptrs.push_back(&pair);
  return grad(model, std::span<const SentencePair* const>(ptrs), mean_nll);
}

std::vector<TokenId> greedy_decode(const Seq2SeqModel& model, std::span<const TokenId> source,
                                   std::size_t max_len) {
  const ModelConfig& cfg = model.config();
  if (cfg.mode != ModelMode::kSeq2Seq) {
    throw ValidationError("greedy_decode requires a seq2seq model");
  }
  const Layout lay = make_layout(cfg);
  const double* p = model.parameters().data();
  const std::size_t h = cfg.hidden_size, e = cfg.embedding_size;
  const std::size_t vt = cfg.target_vocab_size;

  SentencePair probe;
  probe.source.assign(source.begin(), source.end());
  probe.target = {cfg.eos_id};
  validate_pair(cfg, probe);

  StackCache enc;
  run_stack(p, lay.enc, h, lay.src_embed, e, source, &enc);
  const MatrixXd& enc_top = enc.h.back();

  WMap out_w(p + lay.out_w, vt, lay.feat);
  VMap out_b(p + lay.out_b, vt);

  std::vector<VectorXd> state(cfg.n_layers, VectorXd::Zero(h));
  std::vector<TokenId> out;
  TokenId prev = cfg.bos_id;
  VectorXd zraw(h), craw(h), zt(h), ct(h), escore, attn_w, feature(lay.feat), logits(vt);
  for (std::size_t step = 0; step < max_len; ++step) {
    VectorXd in = VMap(p + lay.tgt_embed + static_cast<std::size_t>(prev) * e, e);
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
      const auto& c = lay.dec[l];
      WMap wz(p + c.wz, h, c.in_size), uz(p + c.uz, h, h);
      WMap wc(p + c.wc, h, c.in_size), uc(p + c.uc, h, h);
      VMap bz(p + c.bz, h), bc(p + c.bc, h);
      zraw.noalias() = wz * in;
      zraw.noalias() += uz * state[l];
      zraw += bz;
      craw.noalias() = wc * in;
      craw.noalias() += uc * state[l];
      craw += bc;
      zt = (1.0 / (1.0 + (-zraw.array()).exp())).matrix();
      ct = craw.array().tanh().matrix();
      state[l] = zt.cwiseProduct(ct) + (1.0 - zt.array()).matrix().cwiseProduct(state[l]);
      in = state[l];
    }
    escore.noalias() = enc_top.transpose() * state.back();
    const double m = escore.maxCoeff();
    attn_w = (escore.array() - m).exp();
    attn_w /= attn_w.sum();
    feature.head(h) = state.back();
    feature.tail(h).noalias() = enc_top * attn_w;
    logits.noalias() = out_w * feature;
    logits += out_b;
    Eigen::Index best = 0;
    logits.maxCoeff(&best);
    if (static_cast<TokenId>(best) == cfg.eos_id) break;
    out.push_back(static_cast<TokenId>(best));
    prev = static_cast<TokenId>(best);
  }
  return out;
}

namespace {
constexpr char kCheckpointMagic[8] = {'S', 'D', 'N', 'C', 'K', 'P', '0', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace

void save_checkpoint(const Seq2SeqModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write checkpoint: " + path.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  const ModelConfig& cfg = model.config();
  write_pod(out, static_cast<std::uint32_t>(cfg.mode == ModelMode::kLm ? 1 : 0));
  write_pod(out, static_cast<std::uint64_t>(cfg.hidden_size));
  write_pod(out, static_cast<std::uint64_t>(cfg.embedding_size));
  write_pod(out, static_cast<std::uint64_t>(cfg.n_layers));
  write_pod(out, static_cast<std::uint64_t>(cfg.source_vocab_size));
  write_pod(out, static_cast<std::uint64_t>(cfg.target_vocab_size));
  write_pod(out, cfg.bos_id);
  write_pod(out, cfg.eos_id);
  write_pod(out, static_cast<std::uint64_t>(model.blocks().size()));
  for (const auto& b : model.blocks()) {
    write_pod(out, static_cast<std::uint32_t>(b.name.size()));
    out.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
    write_pod(out, static_cast<std::uint64_t>(b.offset));
    write_pod(out, static_cast<std::uint64_t>(b.rows));
    write_pod(out, static_cast<std::uint64_t>(b.cols));
  }
  write_pod(out, static_cast<std::uint64_t>(model.parameters().size()));
  out.write(reinterpret_cast<const char*>(model.parameters().data()),
            static_cast<std::streamsize>(model.parameters().size() * sizeof(double)));
  if (!out) throw ValidationError("checkpoint write failed: " + path.string());
}

Seq2SeqModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw ValidationError("bad checkpoint magic: " + path.string());
  }
  ModelConfig cfg;
  cfg.mode = read_pod<std::uint32_t>(in) == 1 ? ModelMode::kLm : ModelMode::kSeq2Seq;
  cfg.hidden_size = read_pod<std::uint64_t>(in);
  cfg.embedding_size = read_pod<std::uint64_t>(in);
  cfg.n_layers = read_pod<std::uint64_t>(in);
  cfg.source_vocab_size = read_pod<std::uint64_t>(in);
  cfg.target_vocab_size = read_pod<std::uint64_t>(in);
  cfg.bos_id = read_pod<TokenId>(in);
  cfg.eos_id = read_pod<TokenId>(in);

  Seq2SeqModel model(cfg);
  const auto n_blocks = read_pod<std::uint64_t>(in);
  if (n_blocks != model.blocks().size()) {
    throw ValidationError("checkpoint block table does not match config: " + path.string());
  }
  for (const auto& expected : model.blocks()) {
    const auto name_len = read_pod<std::uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto offset = read_pod<std::uint64_t>(in);
    const auto rows = read_pod<std::uint64_t>(in);
    const auto cols = read_pod<std::uint64_t>(in);
    if (!in || name != expected.name || offset != expected.offset || rows != expected.rows ||
        cols != expected.cols) {
      throw ValidationError("checkpoint block '" + name + "' does not match config layout");
    }
  }
  const auto total = read_pod<std::uint64_t>(in);
  if (total != model.parameters().size()) {
    throw ValidationError("checkpoint parameter count mismatch: " + path.string());
  }
  in.read(reinterpret_cast<char*>(model.parameters().data()),
          static_cast<std::streamsize>(total * sizeof(double)));
  if (!in) throw ValidationError("checkpoint truncated: " + path.string());
  return model;
}

}  // namespace seqdenoise
