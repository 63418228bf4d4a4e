#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "muzero/run.hpp"

namespace muzero {

namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 70, kRight = 180, kTop = 40, kBottom = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Round tick spacing of 1, 2 or 5 times a power of ten, aiming for ~6 ticks.
double tick_step(double span) {
    if (span <= 0) return 1.0;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

std::string tick_label(double v) {
    char buf[32];
    if (std::abs(v - std::round(v)) < 1e-9) std::snprintf(buf, sizeof buf, "%.0f", v);
    else std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::string render_reward_plot(const std::vector<PlotSeries>& series, const std::string& title) {
    if (series.empty()) throw std::invalid_argument("plot needs at least one series");
    double x_max = 0.0;
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    for (const auto& s : series) {
        if (s.points.empty()) throw std::invalid_argument("series '" + s.label + "' has no points");
        for (const auto& p : s.points) {
            x_max = std::max(x_max, static_cast<double>(p.step));
            y_min = std::min(y_min, p.mean);
            y_max = std::max(y_max, p.mean);
        }
    }
    if (x_max <= 0) x_max = 1;
    y_min = std::min(y_min, 0.0);
    if (y_max <= y_min) y_max = y_min + 1;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + x / x_max * pw; };
    auto sy = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * ph; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape(title) << "</text>\n";

    svg << "<g class=\"axes\" stroke=\"#333\">\n"
        << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(kLeft + pw)
        << "\" y2=\"" << num(kTop + ph) << "\"/>\n"
        << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
        << num(kTop + ph) << "\"/>\n</g>\n";

    const double xs = tick_step(x_max);
    for (double x = 0; x <= x_max + 1e-9; x += xs)
        svg << "<text class=\"xtick\" x=\"" << num(sx(x)) << "\" y=\"" << num(kTop + ph + 18)
            << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
    const double ys = tick_step(y_max - y_min);
    for (double y = std::ceil(y_min / ys) * ys; y <= y_max + 1e-9; y += ys)
        svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(sy(y)) << "\" x2=\"" << num(kLeft + pw)
            << "\" y2=\"" << num(sy(y)) << "\" stroke=\"#ddd\"/>\n"
            << "<text class=\"ytick\" x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(y) + 4)
            << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";

    svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 14)
        << "\" text-anchor=\"middle\">Training step</text>\n"
        << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num(kTop + ph / 2) << ")\">Total episode reward</text>\n";
    svg << "<metadata>x_range=0," << tick_label(x_max) << " y_range=" << tick_label(y_min) << ","
        << tick_label(y_max) << "</metadata>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kColors[i % std::size(kColors)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < series[i].points.size(); ++j) {
            const auto& p = series[i].points[j];
            svg << (j ? " " : "") << num(sx(static_cast<double>(p.step))) << ',' << num(sy(p.mean));
        }
        svg << "\"><title>" << escape(series[i].label) << "</title></polyline>\n";
        const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
        svg << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kLeft + pw + 32)
            << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
            << "<text class=\"label\" x=\"" << num(kLeft + pw + 38) << "\" y=\"" << num(ly + 4) << "\">"
            << escape(series[i].label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace muzero
