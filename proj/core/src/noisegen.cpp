#include "seqdenoise/noisegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

namespace seqdenoise {

namespace {

std::string alphabet_token(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%02zu", i);
  return buf;
}

std::size_t lcs_length(std::span<const TokenId> a, std::span<const TokenId> b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// Token count affected by a fraction parameter, at least one.
std::size_t fraction_count(double fraction, std::size_t len) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(len))));
}

TokenId random_target_token(const Vocabulary& vocab, Rng& rng) {
  const std::size_t n_real = vocab.size() - Vocabulary::kNumReserved;
  return static_cast<TokenId>(Vocabulary::kNumReserved + rng.next_below(n_real));
}

}  // namespace

void NoiseKind::validate() const {
  const bool has_fraction = type == Type::kTargetInsertion || type == Type::kTargetTruncation ||
                            type == Type::kTokenShuffle;
  if (has_fraction && (fraction <= 0.0 || fraction > 1.0)) {
    throw ValidationError(std::string(noise_kind_name(type)) +
                          " fraction must be in (0,1], got " + std::to_string(fraction));
  }
}

const char* noise_kind_name(NoiseKind::Type type) {
  switch (type) {
    case NoiseKind::Type::kClean: return "clean";
    case NoiseKind::Type::kTargetInsertion: return "target_insertion";
    case NoiseKind::Type::kTargetTruncation: return "target_truncation";
    case NoiseKind::Type::kMisalignedTarget: return "misaligned_target";
    case NoiseKind::Type::kSourceCopy: return "source_copy";
    case NoiseKind::Type::kTokenShuffle: return "token_shuffle";
  }
  return "?";
}

void NoiseSpec::validate() const {
  if (mixture.empty()) throw ValidationError("noise mixture is empty");
  double sum = 0.0;
  for (const auto& [kind, prob] : mixture) {
    kind.validate();
    if (prob < 0.0) throw ValidationError("noise mixture probability must be nonnegative");
    sum += prob;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("noise mixture probabilities must sum to 1, got " + std::to_string(sum));
  }
}

void TaskShape::validate() const {
  if (alphabet_size < 2) throw ValidationError("alphabet_size must be >= 2");
  if (alphabet_size > 100) throw ValidationError("alphabet_size must be <= 100 (token format)");
  if (min_len < 1 || max_len < min_len) throw ValidationError("need 1 <= min_len <= max_len");
}

ParallelCorpus make_clean_task(std::size_t n_pairs, std::uint64_t seed, TaskKind task,
                               const TaskShape& shape) {
  if (n_pairs < 1) throw ValidationError("n_pairs must be >= 1");
  shape.validate();

  Rng rng(mix_seed(seed, 0xC1EA));
  std::vector<std::vector<std::string>> src_tok, tgt_tok;
  std::set<std::vector<std::size_t>> used;
  src_tok.reserve(n_pairs);
  tgt_tok.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    std::vector<std::size_t> letters;
    bool fresh = false;
    for (int attempt = 0; attempt < 1000 && !fresh; ++attempt) {
      const std::size_t len =
          shape.min_len + static_cast<std::size_t>(rng.next_below(shape.max_len - shape.min_len + 1));
      letters.clear();
      for (std::size_t k = 0; k < len; ++k) {
        letters.push_back(static_cast<std::size_t>(rng.next_below(shape.alphabet_size)));
      }
      fresh = used.insert(letters).second;
    }
    if (!fresh) {
      throw ValidationError("could not generate " + std::to_string(n_pairs) +
                            " distinct source sentences; enlarge alphabet or lengths");
    }

    std::vector<std::string> src, tgt;
    for (std::size_t letter : letters) src.push_back(alphabet_token(letter));
    switch (task) {
      case TaskKind::kReverse:
        tgt.assign(src.rbegin(), src.rend());
        break;
      case TaskKind::kShiftCipher:
        for (std::size_t letter : letters) {
          tgt.push_back(alphabet_token((letter + shape.cipher_shift) % shape.alphabet_size));
        }
        break;
    }
    src_tok.push_back(std::move(src));
    tgt_tok.push_back(std::move(tgt));
  }

  ParallelCorpus corpus;
  corpus.source_vocab = Vocabulary::build(src_tok, shape.alphabet_size);
  corpus.target_vocab = Vocabulary::build(tgt_tok, shape.alphabet_size);
  corpus.pairs.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    SentencePair pair;
    pair.id = static_cast<PairId>(i);
    pair.source = corpus.source_vocab.encode(src_tok[i]);
    pair.target = corpus.target_vocab.encode(tgt_tok[i]);
    pair.noise_label = 4;
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

double aligned_fraction(std::span<const TokenId> clean_target,
                        std::span<const TokenId> corrupted_target) {
  const std::size_t denom = std::max(clean_target.size(), corrupted_target.size());
  if (denom == 0) return 0.0;
  return static_cast<double>(lcs_length(clean_target, corrupted_target)) /
         static_cast<double>(denom);
}

int label_from_fraction(double fraction) {
  if (fraction >= 0.9) return 4;
  if (fraction >= 0.7) return 3;
  if (fraction >= 0.3) return 2;
  if (fraction >= 0.1) return 1;
  return 0;
}

SentencePair inject_noise(const SentencePair& pair, const NoiseKind& kind, Rng& rng,
                          const ParallelCorpus& context) {
  kind.validate();
  if (!pair.noise_label || *pair.noise_label != 4) {
    throw ValidationError("inject_noise expects a clean (label 4) pair");
  }

  SentencePair out = pair;
  switch (kind.type) {
    case NoiseKind::Type::kClean:
      out.noise_label = 4;
      return out;

    case NoiseKind::Type::kMisalignedTarget: {
      if (context.size() < 2) {
        throw ValidationError("misaligned_target needs a corpus with at least 2 pairs");
      }
      // Donor drawn from the other pairs, never this one.
      PairId donor = static_cast<PairId>(rng.next_below(context.size() - 1));
      if (donor >= pair.id) ++donor;
      out.target = context.pairs[donor].target;
      out.noise_label = 0;
      return out;
    }

    case NoiseKind::Type::kSourceCopy:
      out.target.clear();
      for (TokenId id : pair.source) {
        out.target.push_back(context.target_vocab.encode(context.source_vocab.decode(id)));
      }
      out.noise_label = 0;
      return out;

    case NoiseKind::Type::kTargetInsertion: {
      const std::size_t k = fraction_count(kind.fraction, pair.target.size());
      for (std::size_t i = 0; i < k; ++i) {
        out.target.push_back(random_target_token(context.target_vocab, rng));
      }
      out.noise_label = label_from_fraction(aligned_fraction(pair.target, out.target));
      return out;
    }

    case NoiseKind::Type::kTargetTruncation: {
      double fraction = kind.fraction;
      for (int attempt = 0;; ++attempt) {
        const std::size_t k = fraction_count(fraction, pair.target.size());
        if (k < pair.target.size()) {
          out.target.assign(pair.target.begin(), pair.target.end() - static_cast<long>(k));
          break;
        }
        if (attempt >= 3) {
          throw ValidationError("target_truncation would empty a length-" +
                                std::to_string(pair.target.size()) + " target even after retries");
        }
        fraction /= 2.0;
      }
      out.noise_label = label_from_fraction(aligned_fraction(pair.target, out.target));
      return out;
    }

    case NoiseKind::Type::kTokenShuffle: {
      const std::size_t k =
          std::min(pair.target.size(),
                   std::max<std::size_t>(2, fraction_count(kind.fraction, pair.target.size())));
      std::vector<std::uint32_t> positions = rng.sample_without_replacement(
          static_cast<std::uint32_t>(pair.target.size()), static_cast<std::uint32_t>(k));
      // Rotate the selected tokens one slot so every chosen position moves.
      for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
        out.target[positions[i]] = pair.target[positions[i + 1]];
      }
      out.target[positions.back()] = pair.target[positions.front()];
      out.noise_label = label_from_fraction(aligned_fraction(pair.target, out.target));
      return out;
    }
  }
  throw ValidationError("unknown noise kind");
}

ParallelCorpus make_noisy_corpus(const ParallelCorpus& clean, const NoiseSpec& spec) {
  spec.validate();
  ParallelCorpus noisy;
  noisy.source_vocab = clean.source_vocab;
  noisy.target_vocab = clean.target_vocab;
  noisy.pairs.reserve(clean.size());
  for (const auto& pair : clean.pairs) {
    Rng rng(mix_seed(spec.seed, pair.id));
    const double u = rng.next_real01();
    double cum = 0.0;
    const NoiseKind* chosen = &spec.mixture.back().first;
    for (const auto& [kind, prob] : spec.mixture) {
      cum += prob;
      if (u < cum) {
        chosen = &kind;
        break;
      }
    }
    noisy.pairs.push_back(inject_noise(pair, *chosen, rng, clean));
  }
  return noisy;
}

}  // namespace seqdenoise
