#pragma once

#include <memory>
#include <string>
#include <vector>

#include "trace.hpp"

namespace bingo {

/// Assigns a significance score in [0, 1] to each token of a sequence.
class TokenScorer {
 public:
  virtual ~TokenScorer() = default;
  virtual std::vector<double> score(const std::vector<std::string>& tokens) const = 0;
};

/// Deterministic lexical scorer. Filler/connector words from the stop list
/// score below 0.5; tokens carrying digits, operators, or brackets score at
/// or above 0.5. Other words land in [0.5, 0.7]. The per-token value is
/// stable across runs and platforms (FNV-1a jitter, no global state).
class HeuristicScorer final : public TokenScorer {
 public:
  HeuristicScorer();
  explicit HeuristicScorer(std::vector<std::string> stopwords);

  std::vector<double> score(const std::vector<std::string>& tokens) const override;

  /// The built-in filler/connector list.
  static const std::vector<std::string>& default_stopwords();

 private:
  std::vector<std::string> stopwords_;
};

/// Replays scores recorded in a trace file: a sequence is matched against the
/// stored traces by exact token texts and the stored scores are returned.
/// Unknown sequences raise DataError.
class TraceFileScorer final : public TokenScorer {
 public:
  explicit TraceFileScorer(const std::string& trace_path);
  explicit TraceFileScorer(std::vector<TokenTrace> traces);

  std::vector<double> score(const std::vector<std::string>& tokens) const override;

 private:
  std::vector<TokenTrace> traces_;
};

/// Attach scorer output to bare token texts as a scored trace.
TokenTrace make_scored_trace(const TokenScorer& scorer, std::string prompt_id,
                             const std::vector<std::string>& tokens, bool correct);

}  // namespace bingo
