#include "heatmap.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/core.h>

#include "errors.hpp"

namespace bingo {

std::string escape_html(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_heatmap_html(const std::vector<TokenTrace>& traces, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ConfigError(fmt::format("threshold must lie in (0, 1), got {}", tau));
  }

  std::ostringstream out;
  out << "<!doctype html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  out << "<title>Token significance</title>\n<style>\n";
  out << "body { font-family: system-ui, sans-serif; margin: 2rem; "
         "background: #fafafa; color: #222; }\n";
  out << ".trace { background: #fff; border: 1px solid #ddd; border-radius: "
         "6px; padding: 0.75rem 1rem; margin-bottom: 1rem; }\n";
  out << ".trace header { font-weight: 600; margin-bottom: 0.5rem; }\n";
  out << ".tokens { line-height: 1.9; }\n";
  out << ".tok { padding: 0.1rem 0.25rem; margin: 0 0.1rem; border-radius: "
         "3px; white-space: pre-wrap; }\n";
  out << ".legend span { padding: 0.1rem 0.4rem; border-radius: 3px; }\n";
  out << "</style>\n</head>\n<body>\n<h1>Token significance</h1>\n";
  out << fmt::format(
      "<p class=\"legend\">threshold = {} &mdash; "
      "<span style=\"background: rgba(229,57,53,0.55)\">significant (score "
      "&ge; threshold)</span> "
      "<span style=\"background: rgba(30,136,229,0.55)\">insignificant</span>"
      "</p>\n",
      tau);

  for (const TokenTrace& trace : traces) {
    const SignificanceCounts counts = classify_tokens(trace, tau);
    const double percent =
        counts.total() > 0
            ? 100.0 * static_cast<double>(counts.significant) /
                  static_cast<double>(counts.total())
            : 0.0;
    out << "<section class=\"trace\">\n";
    out << fmt::format("<header>{} &mdash; {} &mdash; {} tokens, {:.1f}% "
                       "significant</header>\n",
                       escape_html(trace.prompt_id),
                       trace.correct ? "correct" : "incorrect", trace.length(),
                       percent);
    out << "<p class=\"tokens\">";
    for (const Token& token : trace.tokens) {
      double alpha;
      const char* base;
      if (token.score >= tau) {
        alpha = 0.15 + 0.75 * (token.score - tau) / (1.0 - tau);
        base = "229,57,53";  // warm: significant
      } else {
        alpha = 0.15 + 0.75 * (tau - token.score) / tau;
        base = "30,136,229";  // cool: insignificant
      }
      out << fmt::format(
          "<span class=\"tok\" style=\"background: rgba({},{:.3f})\" "
          "title=\"score {}\">{}</span>",
          base, alpha, token.score, escape_html(token.text));
    }
    out << "</p>\n</section>\n";
  }
  out << "</body>\n</html>\n";
  return out.str();
}

void write_heatmap_html(const std::string& path,
                        const std::vector<TokenTrace>& traces, double tau) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << render_heatmap_html(traces, tau);
  out.flush();
  if (!out.good()) throw IoError(fmt::format("failed writing '{}'", path));
}

}  // namespace bingo
