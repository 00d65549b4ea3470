#include "seqdenoise/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace seqdenoise {

namespace {

const char* const kReservedTokens[Vocabulary::kNumReserved] = {"<pad>", "<s>", "</s>", "<unk>"};

std::string lowercased(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool is_reserved_surface(const std::string& tok) {
  for (const char* r : kReservedTokens) {
    if (tok == r) return true;
  }
  return false;
}

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t lineno,
                            const std::string& msg) {
  throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + msg);
}

}  // namespace

Vocabulary::Vocabulary() {
  for (const char* r : kReservedTokens) {
    token_to_id_.emplace(r, static_cast<TokenId>(id_to_token_.size()));
    id_to_token_.emplace_back(r);
  }
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sentences,
                             std::size_t limit) {
  struct Entry {
    std::size_t count = 0;
    std::size_t first_seen = 0;
  };
  std::unordered_map<std::string, Entry> stats;
  std::size_t position = 0;
  for (const auto& sent : sentences) {
    for (const auto& tok : sent) {
      if (is_reserved_surface(tok)) continue;
      auto [it, inserted] = stats.try_emplace(tok);
      if (inserted) it->second.first_seen = position;
      ++it->second.count;
      ++position;
    }
  }

  std::vector<std::pair<std::string, Entry>> ranked(stats.begin(), stats.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.first_seen < b.second.first_seen;
  });
  if (ranked.size() > limit) ranked.resize(limit);

  Vocabulary vocab;
  for (const auto& [tok, entry] : ranked) {
    vocab.token_to_id_.emplace(tok, static_cast<TokenId>(vocab.id_to_token_.size()));
    vocab.id_to_token_.push_back(tok);
  }
  return vocab;
}

TokenId Vocabulary::encode(std::string_view token) const {
  const auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end() || it->second < kNumReserved) return kUnk;
  return it->second;
}

std::vector<TokenId> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& tok : tokens) ids.push_back(encode(tok));
  return ids;
}

const std::string& Vocabulary::decode(TokenId id) const {
  if (id >= id_to_token_.size()) {
    throw ValidationError("token id " + std::to_string(id) + " out of vocabulary range " +
                          std::to_string(id_to_token_.size()));
  }
  return id_to_token_[id];
}

std::string Vocabulary::decode_joined(std::span<const TokenId> ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += decode(ids[i]);
  }
  return out;
}

bool Vocabulary::contains(std::string_view token) const {
  const auto it = token_to_id_.find(std::string(token));
  return it != token_to_id_.end() && it->second >= kNumReserved;
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(lowercased(line.substr(start, i - start)));
  }
  if (tokens.empty()) throw ValidationError("empty line after tokenization");
  return tokens;
}

ParallelCorpus load_corpus(const std::filesystem::path& path, std::size_t vocab_limit) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus file: " + path.string());

  std::vector<std::vector<std::string>> src_tok, tgt_tok;
  std::vector<std::optional<int>> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cols = split_tsv(line);
    if (cols.size() < 2 || cols.size() > 3) {
      fail_line(path, lineno,
                "expected 2 or 3 tab-separated columns, got " + std::to_string(cols.size()));
    }
    try {
      src_tok.push_back(tokenize(cols[0]));
      tgt_tok.push_back(tokenize(cols[1]));
    } catch (const ValidationError& e) {
      fail_line(path, lineno, e.what());
    }
    if (cols.size() == 3) {
      int label = -1;
      try {
        std::size_t consumed = 0;
        label = std::stoi(cols[2], &consumed);
        if (consumed != cols[2].size()) label = -1;
      } catch (const std::exception&) {
        label = -1;
      }
      if (label < 0 || label > 4) {
        fail_line(path, lineno, "noise label must be an integer in 0..4, got '" + cols[2] + "'");
      }
      labels.emplace_back(label);
    } else {
      labels.emplace_back(std::nullopt);
    }
  }

  ParallelCorpus corpus;
  corpus.source_vocab = Vocabulary::build(src_tok, vocab_limit);
  corpus.target_vocab = Vocabulary::build(tgt_tok, vocab_limit);
  corpus.pairs.reserve(src_tok.size());
  for (std::size_t i = 0; i < src_tok.size(); ++i) {
    SentencePair pair;
    pair.id = static_cast<PairId>(i);
    pair.source = corpus.source_vocab.encode(src_tok[i]);
    pair.target = corpus.target_vocab.encode(tgt_tok[i]);
    pair.noise_label = labels[i];
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

void save_corpus(const ParallelCorpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write corpus file: " + path.string());
  for (const auto& pair : corpus.pairs) {
    out << corpus.source_vocab.decode_joined(pair.source) << '\t'
        << corpus.target_vocab.decode_joined(pair.target);
    if (pair.noise_label) out << '\t' << *pair.noise_label;
    out << '\n';
  }
  if (!out) throw ValidationError("write failed: " + path.string());
}

namespace {
constexpr char kScoreHeader[] = "id\tlogprob_noisy\tlogprob_denoised\tnoise\tnoise_per_token";

// 17 significant digits round-trips IEEE doubles exactly.
std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void save_scores(const ScoredCorpus& corpus, const std::filesystem::path& path) {
  if (corpus.scores.size() != corpus.corpus.size()) {
    std::string missing;
    std::set<PairId> have;
    for (const auto& s : corpus.scores) have.insert(s.pair_id);
    for (PairId id = 0; id < corpus.corpus.size(); ++id) {
      if (!have.count(id)) {
        if (!missing.empty()) missing += ",";
        missing += std::to_string(id);
        if (missing.size() > 200) break;
      }
    }
    throw ValidationError("cannot save scores: missing scores for ids [" + missing + "]");
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write score file: " + path.string());
  out << kScoreHeader << '\n';
  for (const auto& s : corpus.scores) {
    out << s.pair_id << '\t' << fmt_double(s.logprob_noisy) << '\t'
        << fmt_double(s.logprob_denoised) << '\t' << fmt_double(s.noise) << '\t'
        << fmt_double(s.noise_per_token) << '\n';
  }
  if (!out) throw ValidationError("write failed: " + path.string());
}

std::vector<NoiseScore> load_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open score file: " + path.string());
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ValidationError("empty score file: " + path.string());
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kScoreHeader) fail_line(path, lineno, "bad score file header");

  std::vector<NoiseScore> scores;
  std::set<PairId> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    NoiseScore s;
    std::uint32_t id = 0;
    if (std::sscanf(line.c_str(), "%" SCNu32 "\t%lf\t%lf\t%lf\t%lf", &id, &s.logprob_noisy,
                    &s.logprob_denoised, &s.noise, &s.noise_per_token) != 5) {
      fail_line(path, lineno, "malformed score row");
    }
    s.pair_id = id;
    if (!seen.insert(id).second) {
      fail_line(path, lineno, "duplicate id " + std::to_string(id));
    }
    scores.push_back(s);
  }
  std::sort(scores.begin(), scores.end(),
            [](const NoiseScore& a, const NoiseScore& b) { return a.pair_id < b.pair_id; });
  return scores;
}

ScoredCorpus attach_scores(ParallelCorpus corpus, std::vector<NoiseScore> scores,
                           bool rank_per_token) {
  std::sort(scores.begin(), scores.end(),
            [](const NoiseScore& a, const NoiseScore& b) { return a.pair_id < b.pair_id; });
  for (const auto& s : scores) {
    if (s.pair_id >= corpus.size()) {
      throw ValidationError("score table references unknown id " + std::to_string(s.pair_id) +
                            " (corpus has " + std::to_string(corpus.size()) + " pairs)");
    }
  }
  if (scores.size() != corpus.size()) {
    std::string missing;
    std::size_t k = 0;
    for (PairId id = 0; id < corpus.size(); ++id) {
      if (k < scores.size() && scores[k].pair_id == id) {
        ++k;
      } else {
        if (!missing.empty()) missing += ",";
        missing += std::to_string(id);
        if (missing.size() > 200) break;
      }
    }
    throw ValidationError("score table missing ids [" + missing + "]");
  }
  ScoredCorpus out;
  out.corpus = std::move(corpus);
  out.scores = std::move(scores);
  out.rank_per_token = rank_per_token;
  for (const auto& s : out.scores) {
    out.corpus.pairs[s.pair_id].noise_score =
        rank_per_token ? s.noise_per_token : s.noise;
  }
  return out;
}

}  // namespace seqdenoise
