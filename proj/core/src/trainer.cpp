#include "seqdenoise/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "seqdenoise/eval.hpp"
#include "seqdenoise/rng.hpp"

namespace seqdenoise {

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw ValidationError("learning_rate must be > 0");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (patience < 1) throw ValidationError("patience must be >= 1");
  if (lr_halving_period < 1) throw ValidationError("lr_halving_period must be >= 1");
  if (eval_every < 1) throw ValidationError("eval_every must be >= 1");
}

void FinetuneConfig::validate() const {
  if (dev_fraction <= 0.0 || dev_fraction >= 1.0) {
    throw ValidationError("dev_fraction must be in (0,1)");
  }
  if (patience < 1) throw ValidationError("patience must be >= 1");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (eval_every < 1) throw ValidationError("eval_every must be >= 1");
}

double finetune_lr(const FinetuneConfig& cfg, double main_learning_rate) {
  return cfg.learning_rate > 0.0 ? cfg.learning_rate : main_learning_rate / 1000.0;
}

double lr_at(std::uint64_t t, const TrainConfig& cfg) {
  if (t < cfg.lr_halving_start) return cfg.learning_rate;
  const std::uint64_t halvings = (t - cfg.lr_halving_start) / cfg.lr_halving_period + 1;
  if (halvings > 1000) return 0.0;
  return std::ldexp(cfg.learning_rate, -static_cast<int>(halvings));
}

void apply_sgd_update(Seq2SeqModel& model, std::span<const double> gradient, double lr) {
  if (gradient.size() != model.parameters().size()) {
    throw ValidationError("gradient size does not match parameter count");
  }
  for (double v : gradient) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("non-finite gradient encountered; aborting training");
    }
  }
  double* p = model.parameters().data();
  for (std::size_t i = 0; i < gradient.size(); ++i) p[i] -= lr * gradient[i];
}

void sgd_step(Seq2SeqModel& model, std::span<const SentencePair* const> batch, double lr) {
  if (lr < 0.0) throw ValidationError("learning rate must be >= 0");
  apply_sgd_update(model, grad(model, batch), lr);
}

void sgd_step(Seq2SeqModel& model, std::span<const SentencePair> batch, double lr) {
  if (lr < 0.0) throw ValidationError("learning rate must be >= 0");
  apply_sgd_update(model, grad(model, batch), lr);
}

void write_trace(const std::filesystem::path& path, std::span<const TraceRow> trace) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write trace: " + path.string());
  out << "step,lr,train_loss,dev_ppl,r_t\n";
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
  };
  for (const auto& row : trace) {
    out << row.step << ',' << fmt(row.lr) << ',' << fmt(row.train_loss) << ',';
    if (row.dev_ppl) out << fmt(*row.dev_ppl);
    out << ',';
    if (row.r_t) out << fmt(*row.r_t);
    out << '\n';
  }
}

TrainResult train_loop(Seq2SeqModel model, const ParallelCorpus& data, const ParallelCorpus* dev,
                       const TrainConfig& cfg, const BatchSelector& select) {
  cfg.validate();
  if (data.empty()) throw ValidationError("training corpus is empty");

  TrainResult result{std::move(model)};
  std::vector<double> best_params;
  std::uint64_t evals_since_best = 0;
  bool stopped_early = false;

  auto evaluate = [&](std::uint64_t step) {
    const double ppl = perplexity(result.model, *dev);
    if (ppl < result.best_dev_ppl) {
      result.best_dev_ppl = ppl;
      result.best_step = step;
      best_params.assign(result.model.parameters().begin(), result.model.parameters().end());
      evals_since_best = 0;
    } else {
      ++evals_since_best;
    }
    return ppl;
  };

  if (dev != nullptr) evaluate(0);

  std::vector<const SentencePair*> batch;
  std::uint64_t step = 0;
  for (; step < cfg.max_steps; ++step) {
    BatchPlan plan = select(step, result.model);
    if (plan.ids.empty()) throw ValidationError("batch selector returned an empty batch");
    batch.clear();
    for (PairId id : plan.ids) {
      if (id >= data.size()) {
        throw ValidationError("batch id " + std::to_string(id) + " out of corpus range");
      }
      batch.push_back(&data.pairs[id]);
    }

    const double lr = lr_at(step, cfg);
    double loss = 0.0;
    std::vector<double> g = grad(result.model, std::span<const SentencePair* const>(batch), &loss);
    try {
      apply_sgd_update(result.model, g, lr);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(std::string(e.what()) + " (step " + std::to_string(step) + ")");
    }

    TraceRow row{step, lr, loss, std::nullopt, plan.r_t};
    if (dev != nullptr && (step + 1) % cfg.eval_every == 0) {
      row.dev_ppl = evaluate(step + 1);
    }
    result.trace.push_back(std::move(row));
    result.selected_ids.push_back(std::move(plan.ids));

    if (dev != nullptr && evals_since_best >= cfg.patience) {
      stopped_early = true;
      ++step;
      break;
    }
  }
  result.budget_exhausted = !stopped_early && step >= cfg.max_steps;

  if (cfg.return_best && dev != nullptr && !best_params.empty()) {
    std::copy(best_params.begin(), best_params.end(), result.model.parameters().begin());
  }
  return result;
}

TrainResult train_random(const ParallelCorpus& corpus, const ParallelCorpus* dev,
                         const TrainConfig& cfg, const ModelConfig& model_cfg,
                         std::uint64_t model_seed) {
  if (corpus.empty()) throw ValidationError("train_random: corpus is empty");
  Seq2SeqModel model = init_model(model_cfg, model_seed);
  auto rng = std::make_shared<Rng>(mix_seed(cfg.seed, 0xBA7C4));
  const std::size_t n = corpus.size();
  const std::size_t batch_size = cfg.batch_size;
  BatchSelector uniform = [rng, n, batch_size](std::uint64_t, const Seq2SeqModel&) {
    BatchPlan plan;
    plan.ids.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
      plan.ids.push_back(static_cast<PairId>(rng->next_below(n)));
    }
    return plan;
  };
  return train_loop(std::move(model), corpus, dev, cfg, uniform);
}

ParallelCorpus subset_corpus(const ParallelCorpus& corpus, std::span<const PairId> ids) {
  ParallelCorpus out;
  out.source_vocab = corpus.source_vocab;
  out.target_vocab = corpus.target_vocab;
  out.pairs.reserve(ids.size());
  for (PairId id : ids) {
    if (id >= corpus.size()) {
      throw ValidationError("subset id " + std::to_string(id) + " out of corpus range");
    }
    SentencePair pair = corpus.pairs[id];
    pair.id = static_cast<PairId>(out.pairs.size());
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

TrainResult finetune(const Seq2SeqModel& base, const ParallelCorpus& data,
                     const ParallelCorpus& dev, const FinetuneConfig& cfg) {
  cfg.validate();
  if (cfg.learning_rate <= 0.0) {
    throw ValidationError("finetune learning_rate unresolved; apply finetune_lr() first");
  }
  if (data.empty()) throw ValidationError("finetune: data is empty");
  if (dev.empty()) throw ValidationError("finetune: dev set is empty");

  TrainConfig loop_cfg;
  loop_cfg.learning_rate = cfg.learning_rate;
  loop_cfg.lr_halving_start = std::numeric_limits<std::uint64_t>::max();  // constant rate
  loop_cfg.max_steps = cfg.max_steps;
  loop_cfg.batch_size = cfg.batch_size;
  loop_cfg.eval_every = cfg.eval_every;
  loop_cfg.patience = cfg.patience;
  loop_cfg.seed = cfg.seed;
  loop_cfg.return_best = true;

  Seq2SeqModel model = base;  // input model is not modified
  auto rng = std::make_shared<Rng>(mix_seed(cfg.seed, 0xF17E));
  const std::size_t n = data.size();
  const std::size_t batch_size = cfg.batch_size;
  BatchSelector uniform = [rng, n, batch_size](std::uint64_t, const Seq2SeqModel&) {
    BatchPlan plan;
    plan.ids.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
      plan.ids.push_back(static_cast<PairId>(rng->next_below(n)));
    }
    return plan;
  };
  return train_loop(std::move(model), data, &dev, loop_cfg, uniform);
}

TrainResult denoise(const Seq2SeqModel& model, const ParallelCorpus& trusted,
                    const FinetuneConfig& cfg) {
  cfg.validate();
  if (trusted.empty()) throw ValidationError("denoise: trusted set is empty");

  // Random trusted split: dev_fraction held out for early stopping.
  std::vector<PairId> ids(trusted.size());
  std::iota(ids.begin(), ids.end(), 0u);
  Rng rng(mix_seed(cfg.seed, 0x5B117));
  rng.shuffle(ids);
  const auto dev_n = static_cast<std::size_t>(
      std::ceil(cfg.dev_fraction * static_cast<double>(trusted.size())));
  if (dev_n < 1 || dev_n >= trusted.size()) {
    throw ValidationError("dev_fraction leaves an empty split for trusted size " +
                          std::to_string(trusted.size()));
  }
  const std::span<const PairId> dev_ids(ids.data(), dev_n);
  const std::span<const PairId> ft_ids(ids.data() + dev_n, trusted.size() - dev_n);
  const ParallelCorpus dev = subset_corpus(trusted, dev_ids);
  const ParallelCorpus ft = subset_corpus(trusted, ft_ids);

  if (cfg.max_steps == 0) {
    // No updates possible: the denoised model is the input model.
    TrainResult result{model};
    result.best_dev_ppl = perplexity(model, dev);
    result.budget_exhausted = true;
    return result;
  }
  return finetune(model, ft, dev, cfg);
}

}  // namespace seqdenoise
