#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace bingo {

/// One generated token with its significance score in [0, 1].
struct Token {
  std::string text;
  double score = 0.0;
};

/// A scored model response: token sequence, correctness flag, opaque id.
struct TokenTrace {
  std::string prompt_id;
  bool correct = false;
  std::vector<Token> tokens;

  std::size_t length() const { return tokens.size(); }
};

/// Token counts split at the significance threshold.
struct SignificanceCounts {
  std::size_t significant = 0;
  std::size_t insignificant = 0;
  double threshold = 0.0;

  std::size_t total() const { return significant + insignificant; }
};

/// Where reference lengths come from.
enum class RefSource {
  kFixedConstant,
  kFrozenBaselineMean,
  kPerBatchMean,
};

/// Reference lengths the length rewards normalise against. Both must be > 0.
struct ReferenceStats {
  double ref_significant = 0.0;
  double ref_insignificant = 0.0;
  RefSource source = RefSource::kFrozenBaselineMean;
};

/// Split a trace's tokens at `threshold`: score >= threshold counts as
/// significant (the boundary is significant). threshold must lie in (0, 1).
/// An empty trace yields counts (0, 0).
SignificanceCounts classify_tokens(const TokenTrace& trace, double threshold);

/// Validate a reference: both lengths strictly positive, else ConfigError.
void validate_reference(const ReferenceStats& ref);

/// Read traces from a JSON-lines file:
///   {"prompt_id": "...", "correct": 0|1, "tokens": [{"t": "...", "s": 0.93}, ...]}
/// Malformed lines raise ParseError naming the line; scores outside [0, 1]
/// and empty token texts are rejected the same way.
std::vector<TokenTrace> load_traces(const std::string& path);

/// Write traces in the same wire format, one record per line. Scores keep
/// full round-trip precision.
void save_traces(const std::string& path, const std::vector<TokenTrace>& traces);

/// Serialise one trace to its wire-format line (no trailing newline).
std::string trace_to_json_line(const TokenTrace& trace);

}  // namespace bingo
