#pragma once

#include <string>
#include <vector>

#include "trace.hpp"

namespace bingo {

/// Escape &, <, >, " and ' for safe embedding in HTML text and attributes.
std::string escape_html(const std::string& text);

/// Render traces as a self-contained HTML page: one block per trace with a
/// header line (id, correctness, token count, significant percentage) and the
/// tokens coloured by score — warm shades above the threshold, cool shades
/// below, intensity tracking the distance from the threshold.
std::string render_heatmap_html(const std::vector<TokenTrace>& traces, double tau);

void write_heatmap_html(const std::string& path,
                        const std::vector<TokenTrace>& traces, double tau);

}  // namespace bingo
