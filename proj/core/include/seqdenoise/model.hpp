#ifndef SEQDENOISE_MODEL_HPP_
#define SEQDENOISE_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "seqdenoise/corpus.hpp"

namespace seqdenoise {

enum class ModelMode { kSeq2Seq, kLm };

// Sizes and mode of a model. lm mode drops the encoder and attention and
// conditions on nothing; the source side of a pair is then ignored.
struct ModelConfig {
  std::size_t hidden_size = 32;
  std::size_t embedding_size = 16;
  std::size_t n_layers = 1;
  ModelMode mode = ModelMode::kSeq2Seq;
  std::size_t source_vocab_size = 0;
  std::size_t target_vocab_size = 0;
  TokenId bos_id = Vocabulary::kBos;
  TokenId eos_id = Vocabulary::kEos;

  void validate() const;
  std::size_t param_count() const;
  bool operator==(const ModelConfig&) const = default;
};

// One named view into the flat parameter vector (row-major rows x cols).
struct ParamBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// Gated recurrent encoder-decoder. Each layer is a single-gate cell
//   z = sigmoid(Wz x + Uz h + bz), c = tanh(Wc x + Uc h + bc),
//   h' = z .* c + (1 - z) .* h
// with dot-product attention from the top decoder state over the top
// encoder states (seq2seq mode). Output logits come from [state; context].
// Parameters live in one flat vector; the model is an immutable value for
// scoring and may be read concurrently.
class Seq2SeqModel {
 public:
  explicit Seq2SeqModel(const ModelConfig& config);  // all parameters zero

  const ModelConfig& config() const { return config_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  bool all_finite() const;

 private:
  ModelConfig config_;
  std::vector<ParamBlock> blocks_;
  std::vector<double> params_;
};

// Parameters drawn uniformly from [-0.08, 0.08]; deterministic in the seed.
Seq2SeqModel init_model(const ModelConfig& config, std::uint64_t seed);

// Teacher-forced sum of log p(y_i | y_<i, x) over all target positions,
// including the end-of-sequence token. Always <= 0.
double log_prob(const Seq2SeqModel& model, const SentencePair& pair);

// Per-position teacher-forced log-probabilities and argmax predictions.
// position_logprob.size() == target length + 1 (end token included).
struct Prediction {
  std::vector<double> position_logprob;
  std::vector<TokenId> argmax;
};
Prediction predict_teacher_forced(const Seq2SeqModel& model, const SentencePair& pair);

// Gradient of the mean negative log-likelihood over the batch, in the
// model's flat parameter layout. mean_nll, when given, receives the loss
// from the same forward pass.
std::vector<double> grad(const Seq2SeqModel& model, std::span<const SentencePair* const> batch,
                         double* mean_nll = nullptr);
std::vector<double> grad(const Seq2SeqModel& model, std::span<const SentencePair> batch,
                         double* mean_nll = nullptr);

// Greedy argmax decoding until the end token or max_len (seq2seq mode).
std::vector<TokenId> greedy_decode(const Seq2SeqModel& model, std::span<const TokenId> source,
                                   std::size_t max_len);

// Binary checkpoint: config header, named block table, raw parameter array.
// Round-trips bit-exactly.
void save_checkpoint(const Seq2SeqModel& model, const std::filesystem::path& path);
Seq2SeqModel load_checkpoint(const std::filesystem::path& path);

}  // namespace seqdenoise

#endif  // SEQDENOISE_MODEL_HPP_
