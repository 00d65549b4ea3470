#ifndef SEQDENOISE_NOISEGEN_HPP_
#define SEQDENOISE_NOISEGEN_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "seqdenoise/corpus.hpp"
#include "seqdenoise/rng.hpp"

namespace seqdenoise {

// A corruption applied to the target side of a clean pair. Fraction-bearing
// kinds scale with target length; misaligned_target and source_copy replace
// the target wholesale.
struct NoiseKind {
  enum class Type {
    kClean,
    kTargetInsertion,
    kTargetTruncation,
    kMisalignedTarget,
    kSourceCopy,
    kTokenShuffle,
  };

  Type type = Type::kClean;
  double fraction = 0.0;  // in (0,1] for insertion/truncation/shuffle

  static NoiseKind clean() { return {Type::kClean, 0.0}; }
  static NoiseKind target_insertion(double f) { return {Type::kTargetInsertion, f}; }
  static NoiseKind target_truncation(double f) { return {Type::kTargetTruncation, f}; }
  static NoiseKind misaligned_target() { return {Type::kMisalignedTarget, 0.0}; }
  static NoiseKind source_copy() { return {Type::kSourceCopy, 0.0}; }
  static NoiseKind token_shuffle(double f) { return {Type::kTokenShuffle, f}; }

  void validate() const;
};

const char* noise_kind_name(NoiseKind::Type type);

// Mixture over noise kinds (clean included); probabilities must sum to 1.
struct NoiseSpec {
  std::vector<std::pair<NoiseKind, double>> mixture;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class TaskKind { kReverse, kShiftCipher };

// Shape of the synthetic clean task: sentences over a closed token alphabet
// "w00".."wNN" with lengths drawn uniformly from [min_len, max_len]. Source
// sentences are distinct across the corpus, which makes sentence identity a
// provenance key for the trusted-isolation audit.
struct TaskShape {
  std::size_t alphabet_size = 30;
  std::size_t min_len = 4;
  std::size_t max_len = 9;
  std::size_t cipher_shift = 7;  // shift_cipher task: w[i] -> w[(i+shift) % alphabet]

  void validate() const;
};

// Clean synthetic corpus: target = token reversal of the source (reverse) or
// per-token dictionary substitution (shift_cipher). All labels are 4.
ParallelCorpus make_clean_task(std::size_t n_pairs, std::uint64_t seed, TaskKind task,
                               const TaskShape& shape = {});

// Fraction of target information retained by a corruption, measured as
// LCS(clean, corrupted) / max(|clean|, |corrupted|). Appending k junk tokens
// gives n/(n+k); truncating k gives (n-k)/n.
double aligned_fraction(std::span<const TokenId> clean_target,
                        std::span<const TokenId> corrupted_target);

// Rating from the retained fraction: [0.9,1] -> 4, [0.7,0.9) -> 3,
// [0.3,0.7) -> 2, [0.1,0.3) -> 1, below -> 0.
int label_from_fraction(double fraction);

// Corrupts one clean (label 4) pair. `context` supplies donor targets for
// misaligned_target and the target vocabulary for insertion sampling.
// Corruptions that would empty the target are retried with halved fraction,
// at most 3 times.
SentencePair inject_noise(const SentencePair& pair, const NoiseKind& kind, Rng& rng,
                          const ParallelCorpus& context);

// Independently assigns each pair a kind drawn from the mixture, with a
// per-pair rng stream derived from (spec.seed, pair id). Order preserved.
ParallelCorpus make_noisy_corpus(const ParallelCorpus& clean, const NoiseSpec& spec);

}  // namespace seqdenoise

#endif  // SEQDENOISE_NOISEGEN_HPP_
