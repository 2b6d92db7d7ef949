#pragma once

#include <string>
#include <utility>
#include <vector>

namespace spvcap::svg {

/// Horizontal bar chart: one labeled bar per entry, value printed at the bar
/// end. Output is plain deterministic SVG text (fixed layout, shortest
/// round-trip number formatting), so identical inputs give identical bytes.
std::string bar_chart(const std::string& title,
                      const std::vector<std::pair<std::string, double>>& entries,
                      const std::string& unit = "");

/// Waterfall chart of an additive explanation: starts at the base value,
/// applies each (label, delta) step (positive steps one color, negative the
/// other), and ends at the final value.
std::string waterfall(const std::string& title, double base_value,
                      const std::vector<std::pair<std::string, double>>& steps,
                      double final_value);

}  // namespace spvcap::svg
