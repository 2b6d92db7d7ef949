#include "spvcap/svg.hpp"

#include "spvcap/csv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spvcap::svg {

namespace {

constexpr const char* kPositiveColor = "#d1495b";
constexpr const char* kNegativeColor = "#1f7a8c";
constexpr const char* kNeutralColor = "#4f6d7a";

std::string escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    // one decimal of pixel precision keeps layout text short and deterministic
    const double rounded = std::round(v * 10.0) / 10.0;
    return csv::format_double(rounded == 0.0 ? 0.0 : rounded);
}

void open_svg(std::ostringstream& out, int width, int height, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"monospace\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"16\" y=\"24\" font-size=\"15\" fill=\"#222222\">" << escape(title)
        << "</text>\n";
}

}  // namespace

std::string bar_chart(const std::string& title,
                      const std::vector<std::pair<std::string, double>>& entries,
                      const std::string& unit) {
    const int label_width = 220;
    const int plot_width = 420;
    const int bar_height = 18;
    const int gap = 8;
    const int top = 48;
    const int width = label_width + plot_width + 140;
    const int height = top + static_cast<int>(entries.size()) * (bar_height + gap) + 24;

    double max_abs = 0.0;
    for (const auto& [_, v] : entries) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) max_abs = 1.0;

    std::ostringstream out;
    open_svg(out, width, height, title);
    int y = top;
    for (const auto& [label, value] : entries) {
        const double w = std::abs(value) / max_abs * plot_width;
        out << "<text x=\"" << label_width - 8 << "\" y=\"" << y + bar_height - 4
            << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#222222\">" << escape(label)
            << "</text>\n";
        out << "<rect x=\"" << label_width << "\" y=\"" << y << "\" width=\"" << num(w)
            << "\" height=\"" << bar_height << "\" fill=\""
            << (value < 0 ? kNegativeColor : kNeutralColor) << "\"/>\n";
        out << "<text x=\"" << num(label_width + w + 6) << "\" y=\"" << y + bar_height - 4
            << "\" font-size=\"12\" fill=\"#222222\">" << csv::format_double(value)
            << escape(unit.empty() ? "" : " " + unit) << "</text>\n";
        y += bar_height + gap;
    }
    out << "</svg>\n";
    return out.str();
}

std::string waterfall(const std::string& title, double base_value,
                      const std::vector<std::pair<std::string, double>>& steps,
                      double final_value) {
    const int label_width = 220;
    const int plot_width = 420;
    const int bar_height = 18;
    const int gap = 8;
    const int top = 48;
    const int rows = static_cast<int>(steps.size()) + 2;  // base + steps + final
    const int width = label_width + plot_width + 140;
    const int height = top + rows * (bar_height + gap) + 24;

    // value range over the running total
    double lo = base_value, hi = base_value, running = base_value;
    for (const auto& [_, delta] : steps) {
        running += delta;
        lo = std::min(lo, running);
        hi = std::max(hi, running);
    }
    lo = std::min({lo, final_value, 0.0});
    hi = std::max({hi, final_value, 0.0});
    if (hi == lo) hi = lo + 1.0;
    const auto x_of = [&](double v) {
        return label_width + (v - lo) / (hi - lo) * plot_width;
    };

    std::ostringstream out;
    open_svg(out, width, height, title);

    int y = top;
    const auto marker_row = [&](const std::string& label, double v) {
        out << "<text x=\"" << label_width - 8 << "\" y=\"" << y + bar_height - 4
            << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#222222\">" << escape(label)
            << "</text>\n";
        out << "<rect x=\"" << num(x_of(std::min(v, 0.0))) << "\" y=\"" << y << "\" width=\""
            << num(std::abs(x_of(v) - x_of(0.0))) << "\" height=\"" << bar_height
            << "\" fill=\"" << kNeutralColor << "\"/>\n";
        out << "<text x=\"" << num(x_of(std::max(v, 0.0)) + 6) << "\" y=\"" << y + bar_height - 4
            << "\" font-size=\"12\" fill=\"#222222\">" << csv::format_double(v) << "</text>\n";
        y += bar_height + gap;
    };

    marker_row("base value", base_value);
    running = base_value;
    for (const auto& [label, delta] : steps) {
        const double from = running;
        running += delta;
        const double x0 = std::min(x_of(from), x_of(running));
        const double w = std::abs(x_of(running) - x_of(from));
        out << "<text x=\"" << label_width - 8 << "\" y=\"" << y + bar_height - 4
            << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#222222\">" << escape(label)
            << "</text>\n";
        out << "<rect x=\"" << num(x0) << "\" y=\"" << y << "\" width=\"" << num(std::max(w, 1.0))
            << "\" height=\"" << bar_height << "\" fill=\""
            << (delta >= 0 ? kPositiveColor : kNegativeColor) << "\"/>\n";
        out << "<text x=\"" << num(std::max(x_of(from), x_of(running)) + 6) << "\" y=\""
            << y + bar_height - 4 << "\" font-size=\"12\" fill=\"#222222\">"
            << (delta >= 0 ? "+" : "") << csv::format_double(delta) << "</text>\n";
        y += bar_height + gap;
    }
    marker_row("prediction", final_value);

    out << "</svg>\n";
    return out.str();
}

}  // namespace spvcap::svg
