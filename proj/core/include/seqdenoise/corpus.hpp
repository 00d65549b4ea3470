#ifndef SEQDENOISE_CORPUS_HPP_
#define SEQDENOISE_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqdenoise/errors.hpp"

namespace seqdenoise {

using TokenId = std::uint32_t;
using PairId = std::uint32_t;

// Token <-> id bijection with four reserved ids. Corpus text never maps onto
// a reserved id: the reserved surface forms are filtered out when building
// and encode as <unk> like any other out-of-vocabulary token.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kBos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr TokenId kUnk = 3;
  static constexpr std::size_t kNumReserved = 4;

  Vocabulary();

  // Builds from tokenized sentences, keeping the `limit` most frequent
  // tokens; ties broken by first occurrence. Ids are assigned in that order,
  // starting after the reserved block.
  static Vocabulary build(const std::vector<std::vector<std::string>>& sentences,
                          std::size_t limit);

  TokenId encode(std::string_view token) const;
  std::vector<TokenId> encode(const std::vector<std::string>& tokens) const;
  const std::string& decode(TokenId id) const;  // throws on out-of-range id
  std::string decode_joined(std::span<const TokenId> ids) const;

  bool contains(std::string_view token) const;
  std::size_t size() const { return id_to_token_.size(); }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

// One source/target example. Token ids are always within the bounds of the
// owning corpus' vocabularies; source and target are non-empty.
struct SentencePair {
  PairId id = 0;
  std::vector<TokenId> source;
  std::vector<TokenId> target;
  std::optional<int> noise_label;     // 0..4 when present
  std::optional<double> noise_score;  // cached ranking key, if scored
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;  // ids dense: pairs[i].id == i
  Vocabulary source_vocab;
  Vocabulary target_vocab;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

// Lowercased whitespace splitting; throws ValidationError if nothing remains.
std::vector<std::string> tokenize(std::string_view line);

// TSV loader: `source \t target [\t label]`, one pair per line. Vocabularies
// are built per side from the `vocab_limit` most frequent tokens. Malformed
// lines and labels outside 0..4 raise ValidationError naming the line.
ParallelCorpus load_corpus(const std::filesystem::path& path, std::size_t vocab_limit);

// Writes the same TSV format (label column only for labeled pairs).
void save_corpus(const ParallelCorpus& corpus, const std::filesystem::path& path);

// Per-pair contrastive score record. `noise` is the raw logprob difference;
// `noise_per_token` divides by target length including the end token.
struct NoiseScore {
  PairId pair_id = 0;
  double logprob_noisy = 0.0;
  double logprob_denoised = 0.0;
  double noise = 0.0;
  double noise_per_token = 0.0;
};

// A corpus plus its persisted score table, aligned so scores[i].pair_id == i.
// `rank_per_token` selects which column downstream ranking uses; both are
// always stored.
struct ScoredCorpus {
  ParallelCorpus corpus;
  std::vector<NoiseScore> scores;
  bool rank_per_token = false;

  double ranking_score(PairId id) const {
    const NoiseScore& s = scores[id];
    return rank_per_token ? s.noise_per_token : s.noise;
  }
};

// Score table TSV with header `id\tlogprob_noisy\tlogprob_denoised\tnoise\t
// noise_per_token`, sorted by id. Values round-trip bit-exactly.
void save_scores(const ScoredCorpus& corpus, const std::filesystem::path& path);
std::vector<NoiseScore> load_scores(const std::filesystem::path& path);

// Validates coverage (no missing, duplicate, or unknown ids) and attaches.
ScoredCorpus attach_scores(ParallelCorpus corpus, std::vector<NoiseScore> scores,
                           bool rank_per_token = false);

}  // namespace seqdenoise

#endif  // SEQDENOISE_CORPUS_HPP_
