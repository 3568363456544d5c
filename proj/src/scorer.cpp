#include "scorer.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

#include "errors.hpp"

namespace bingo {

namespace {

// FNV-1a, folded to a unit-interval jitter so equal tokens always get equal
// scores without any run-to-run or platform dependence.
double unit_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::string lowered(const std::string& text) {
  std::string out = text;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_operator_char(char c) {
  static const std::string kOps = "+-*/=<>^%~|&$";
  return kOps.find(c) != std::string::npos;
}

bool is_bracket_char(char c) {
  static const std::string kBrackets = "()[]{}";
  return kBrackets.find(c) != std::string::npos;
}

bool has_digit(const std::string& text) {
  return std::any_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool all_symbolic(const std::string& text) {
  return !text.empty() &&
         std::all_of(text.begin(), text.end(), [](unsigned char c) {
           return std::isdigit(c) != 0 || is_operator_char(static_cast<char>(c)) ||
                  is_bracket_char(static_cast<char>(c)) || c == '.' || c == ',';
         });
}

bool has_bracket(const std::string& text) {
  return std::any_of(text.begin(), text.end(),
                     [](char c) { return is_bracket_char(c); });
}

bool has_operator(const std::string& text) {
  return std::any_of(text.begin(), text.end(),
                     [](char c) { return is_operator_char(c); });
}

bool is_punctuation(const std::string& text) {
  return !text.empty() &&
         std::all_of(text.begin(), text.end(), [](unsigned char c) {
           return std::ispunct(c) != 0 && !is_operator_char(static_cast<char>(c)) &&
                  !is_bracket_char(static_cast<char>(c));
         });
}

}  // namespace

const std::vector<std::string>& HeuristicScorer::default_stopwords() {
  static const std::vector<std::string> kStopwords = {
      "okay",   "ok",      "so",     "hmm",    "well",    "let",     "lets",
      "me",     "think",   "wait",   "just",   "really",  "basically",
      "actually", "alright", "anyway", "oh",    "like",    "maybe",  "perhaps",
      "now",    "then",    "and",    "but",    "or",      "the",     "a",
      "an",     "of",      "to",     "in",     "on",      "is",      "are",
      "was",    "that",    "this",   "it",     "its",     "i",       "we",
      "you",    "also",    "very",   "quite",  "some",    "thing",   "going",
      "right",  "yeah",    "yes",    "no",     "um",      "uh",      "see",
      "note",   "recall",  "remember", "again", "here",   "there",
  };
  return kStopwords;
}

HeuristicScorer::HeuristicScorer() : stopwords_(default_stopwords()) {}

HeuristicScorer::HeuristicScorer(std::vector<std::string> stopwords)
    : stopwords_(std::move(stopwords)) {}

std::vector<double> HeuristicScorer::score(
    const std::vector<std::string>& tokens) const {
  std::vector<double> scores;
  scores.reserve(tokens.size());
  for (const std::string& token : tokens) {
    const std::string low = lowered(token);
    const double jitter = unit_hash(low);
    double value;
    if (all_symbolic(token)) {
      value = 0.78 + 0.18 * jitter;               // pure numbers/operators
    } else if (has_digit(token) || has_bracket(token) || has_operator(token)) {
      value = 0.62 + 0.20 * jitter;               // mixed symbolic content
    } else if (std::find(stopwords_.begin(), stopwords_.end(), low) !=
                   stopwords_.end() ||
               is_punctuation(token)) {
      value = 0.05 + 0.35 * jitter;               // fillers and connectors
    } else {
      value = 0.50 + 0.10 * jitter;               // ordinary content words
    }
    scores.push_back(std::clamp(value, 0.0, 1.0));
  }
  return scores;
}

TraceFileScorer::TraceFileScorer(const std::string& trace_path)
    : traces_(load_traces(trace_path)) {}

TraceFileScorer::TraceFileScorer(std::vector<TokenTrace> traces)
    : traces_(std::move(traces)) {}

std::vector<double> TraceFileScorer::score(
    const std::vector<std::string>& tokens) const {
  for (const TokenTrace& trace : traces_) {
    if (trace.tokens.size() != tokens.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (trace.tokens[i].text != tokens[i]) {
        match = false;
        break;
      }
    }
    if (match) {
      std::vector<double> scores;
      scores.reserve(tokens.size());
      for (const Token& tok : trace.tokens) scores.push_back(tok.score);
      return scores;
    }
  }
  throw DataError("no stored trace matches the requested token sequence (" +
                  std::to_string(tokens.size()) + " tokens)");
}

TokenTrace make_scored_trace(const TokenScorer& scorer, std::string prompt_id,
                             const std::vector<std::string>& tokens, bool correct) {
  const std::vector<double> scores = scorer.score(tokens);
  TokenTrace trace;
  trace.prompt_id = std::move(prompt_id);
  trace.correct = correct;
  trace.tokens.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    trace.tokens.push_back(Token{tokens[i], scores[i]});
  }
  return trace;
}

}  // namespace bingo
