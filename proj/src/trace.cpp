#include "trace.hpp"

#include <fstream>
#include "json.hpp"

#include "errors.hpp"

namespace bingo {

using nlohmann::json;

SignificanceCounts classify_tokens(const TokenTrace& trace, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("significance threshold must lie in (0, 1), got " +
                                std::to_string(threshold));
  }
  SignificanceCounts counts;
  counts.threshold = threshold;
  for (const Token& tok : trace.tokens) {
    if (tok.score >= threshold) {
      ++counts.significant;
    } else {
      ++counts.insignificant;
    }
  }
  return counts;
}

void validate_reference(const ReferenceStats& ref) {
  if (!(ref.ref_significant > 0.0) || !(ref.ref_insignificant > 0.0)) {
    throw ConfigError("reference lengths must be strictly positive, got (" +
                      std::to_string(ref.ref_significant) + ", " +
                      std::to_string(ref.ref_insignificant) + ")");
  }
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
}

TokenTrace parse_trace_line(const std::string& path, std::size_t line_no,
                            const std::string& line) {
  json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (rec.is_discarded()) parse_fail(path, line_no, "invalid JSON record");
  if (!rec.is_object()) parse_fail(path, line_no, "record is not a JSON object");

  TokenTrace trace;
  if (!rec.contains("prompt_id") || !rec["prompt_id"].is_string()) {
    parse_fail(path, line_no, "missing or non-string 'prompt_id'");
  }
  trace.prompt_id = rec["prompt_id"].get<std::string>();

  if (!rec.contains("correct") || !rec["correct"].is_number_integer()) {
    parse_fail(path, line_no, "missing or non-integer 'correct'");
  }
  const auto correct = rec["correct"].get<std::int64_t>();
  if (correct != 0 && correct != 1) {
    parse_fail(path, line_no, "'correct' must be 0 or 1, got " + std::to_string(correct));
  }
  trace.correct = correct == 1;

  if (!rec.contains("tokens") || !rec["tokens"].is_array()) {
    parse_fail(path, line_no, "missing or non-array 'tokens'");
  }
  trace.tokens.reserve(rec["tokens"].size());
  for (const auto& tok : rec["tokens"]) {
    if (!tok.is_object() || !tok.contains("t") || !tok["t"].is_string() ||
        !tok.contains("s") || !tok["s"].is_number()) {
      parse_fail(path, line_no, "token records need a string 't' and numeric 's'");
    }
    Token parsed{tok["t"].get<std::string>(), tok["s"].get<double>()};
    if (parsed.text.empty()) parse_fail(path, line_no, "token text must be non-empty");
    if (!(parsed.score >= 0.0 && parsed.score <= 1.0)) {
      parse_fail(path, line_no,
                 "token score must lie in [0, 1], got " + std::to_string(parsed.score));
    }
    trace.tokens.push_back(std::move(parsed));
  }
  return trace;
}

}  // namespace

std::vector<TokenTrace> load_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path);

  std::vector<TokenTrace> traces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      // Tolerate a final newline; an empty line elsewhere is a broken record.
      if (in.peek() == std::char_traits<char>::eof()) break;
      parse_fail(path, line_no, "empty line inside record stream");
    }
    traces.push_back(parse_trace_line(path, line_no, line));
  }
  return traces;
}

std::string trace_to_json_line(const TokenTrace& trace) {
  json rec;
  rec["prompt_id"] = trace.prompt_id;
  rec["correct"] = trace.correct ? 1 : 0;
  json toks = json::array();
  for (const Token& tok : trace.tokens) {
    toks.push_back(json{{"t", tok.text}, {"s", tok.score}});
  }
  rec["tokens"] = std::move(toks);
  return rec.dump();
}

void save_traces(const std::string& path, const std::vector<TokenTrace>& traces) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace file: " + path);
  for (const TokenTrace& trace : traces) {
    out << trace_to_json_line(trace) << '\n';
  }
  if (!out) throw IoError("short write to trace file: " + path);
}

}  // namespace bingo
