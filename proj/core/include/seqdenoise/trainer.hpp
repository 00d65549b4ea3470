#ifndef SEQDENOISE_TRAINER_HPP_
#define SEQDENOISE_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "seqdenoise/corpus.hpp"
#include "seqdenoise/model.hpp"

namespace seqdenoise {

// Online SGD settings. The learning rate is halved once per
// lr_halving_period steps from lr_halving_start onward.
struct TrainConfig {
  double learning_rate = 0.3;
  std::uint64_t lr_halving_start = 3000;
  std::uint64_t lr_halving_period = 600;
  std::uint64_t max_steps = 4000;
  std::size_t batch_size = 16;
  std::uint64_t eval_every = 200;
  std::uint64_t patience = 1000000;  // evaluations without improvement before stopping
  std::uint64_t seed = 1;
  bool return_best = true;  // best-dev checkpoint instead of the final one

  void validate() const;
};

// Fine-tuning settings for denoise() and subset fine-tunes. dev_fraction of
// the given data is held out for early stopping when no explicit dev set is
// supplied.
struct FinetuneConfig {
  double learning_rate = 0.0;  // resolved via finetune_lr() when <= 0
  double dev_fraction = 0.2;
  std::uint64_t patience = 10;
  std::uint64_t max_steps = 2000;
  std::size_t batch_size = 16;
  std::uint64_t eval_every = 20;
  std::uint64_t seed = 1;

  void validate() const;
};

// Default fine-tune rate convention: 1/1000 of the main rate unless the
// config sets an explicit positive value.
double finetune_lr(const FinetuneConfig& cfg, double main_learning_rate);

// Learning rate at step t: base before lr_halving_start, then
// lr * 0.5^(floor((t - start) / period) + 1).
double lr_at(std::uint64_t t, const TrainConfig& cfg);

// parameters <- parameters - lr * gradient. Throws std::runtime_error on a
// non-finite gradient; training aborts rather than clips.
void apply_sgd_update(Seq2SeqModel& model, std::span<const double> gradient, double lr);
void sgd_step(Seq2SeqModel& model, std::span<const SentencePair* const> batch, double lr);
void sgd_step(Seq2SeqModel& model, std::span<const SentencePair> batch, double lr);

struct TraceRow {
  std::uint64_t step = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  std::optional<double> dev_ppl;
  std::optional<double> r_t;
};

// CSV trace: `step,lr,train_loss,dev_ppl,r_t` with blanks for absent fields.
void write_trace(const std::filesystem::path& path, std::span<const TraceRow> trace);

struct TrainResult {
  Seq2SeqModel model;
  std::vector<TraceRow> trace;
  std::vector<std::vector<PairId>> selected_ids;  // batch ids per step, for audit
  double best_dev_ppl = std::numeric_limits<double>::infinity();
  std::uint64_t best_step = 0;
  bool budget_exhausted = false;  // hit max_steps before early stopping fired
};

// The ids (into `data`) to train on at one step, plus the selection ratio
// when a curriculum produced them. Selectors see the current parameters so
// curricula can rescore against the live model.
struct BatchPlan {
  std::vector<PairId> ids;
  std::optional<double> r_t;
};
using BatchSelector = std::function<BatchPlan(std::uint64_t step, const Seq2SeqModel& current)>;

// Shared training loop: runs `select` each step, applies SGD with lr_at,
// evaluates dev perplexity at step 0 and every eval_every updates, and keeps
// the best-dev snapshot. Dev data is optional; without it the loop runs the
// full budget and returns the final model.
TrainResult train_loop(Seq2SeqModel model, const ParallelCorpus& data, const ParallelCorpus* dev,
                       const TrainConfig& cfg, const BatchSelector& select);

// Baseline: uniformly random batches with replacement from the corpus.
TrainResult train_random(const ParallelCorpus& corpus, const ParallelCorpus* dev,
                         const TrainConfig& cfg, const ModelConfig& model_cfg,
                         std::uint64_t model_seed);

// Fine-tunes a copy of `base` on `data` with early stopping on `dev`.
TrainResult finetune(const Seq2SeqModel& base, const ParallelCorpus& data,
                     const ParallelCorpus& dev, const FinetuneConfig& cfg);

// denoise: fine-tune on the trusted set, early-stopped on a held-out split
// of the trusted data itself (dev_fraction). The input model is untouched;
// the returned model is the best-dev checkpoint.
TrainResult denoise(const Seq2SeqModel& model, const ParallelCorpus& trusted,
                    const FinetuneConfig& cfg);

// Dense-id subset view used for splits and nested subsets; pair order
// follows `ids`.
ParallelCorpus subset_corpus(const ParallelCorpus& corpus, std::span<const PairId> ids);

}  // namespace seqdenoise

#endif  // SEQDENOISE_TRAINER_HPP_
