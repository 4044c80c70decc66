#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qrb {

// Minimal line plot rendered straight to SVG markup.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool log_axes)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)), log_(log_axes) {}

    void add_series(std::string label, std::vector<std::pair<double, double>> points, bool markers,
                    bool dashed = false) {
        series_.push_back({std::move(label), std::move(points), markers, dashed});
    }

    std::string render() const {
        constexpr double W = 640, H = 420, L = 70, R = 150, Tm = 40, B = 50;
        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
        double ymin = xmin, ymax = -xmin;
        for (const auto& s : series_) {
            for (auto [x, y] : s.points) {
                if (!usable(x) || !usable(y)) continue;
                xmin = std::min(xmin, tx(x));
                xmax = std::max(xmax, tx(x));
                ymin = std::min(ymin, tx(y));
                ymax = std::max(ymax, tx(y));
            }
        }
        if (!(xmin <= xmax)) xmin = 0, xmax = 1;
        if (!(ymin <= ymax)) ymin = 0, ymax = 1;
        if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
        if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
        const double pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
        auto px = [&](double x) { return L + (tx(x) - xmin) / (xmax - xmin) * (W - L - R); };
        auto py = [&](double y) { return H - B - (tx(y) - ymin) / (ymax - ymin) * (H - Tm - B); };

        static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
        std::ostringstream o;
        o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
        o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title_ << "</text>\n";
        o << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << W - L - R << "\" height=\"" << H - Tm - B
          << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double fx = xmin + i * (xmax - xmin) / 4, fy = ymin + i * (ymax - ymin) / 4;
            const double gx = L + i * (W - L - R) / 4, gy = H - B - i * (H - Tm - B) / 4;
            o << "<text x=\"" << gx << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"10\">"
              << tick(fx) << "</text>\n";
            o << "<text x=\"" << L - 6 << "\" y=\"" << gy + 3 << "\" text-anchor=\"end\" font-size=\"10\">"
              << tick(fy) << "</text>\n";
        }
        o << "<text x=\"" << (W - R + L) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
          << xlabel_ << "</text>\n";
        o << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
          << ")\" text-anchor=\"middle\" font-size=\"12\">" << ylabel_ << "</text>\n";
        for (std::size_t k = 0; k < series_.size(); ++k) {
            const auto& s = series_[k];
            const char* c = colors[k % 6];
            o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\""
              << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
            for (auto [x, y] : s.points) {
                if (usable(x) && usable(y)) o << px(x) << ',' << py(y) << ' ';
            }
            o << "\"/>\n";
            if (s.markers) {
                for (auto [x, y] : s.points) {
                    if (usable(x) && usable(y)) {
                        o << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
                    }
                }
            }
            const double ly = Tm + 16 + 18 * static_cast<double>(k);
            o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly
              << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
            o << "<text x=\"" << W - R + 36 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << s.label << "</text>\n";
        }
        o << "</svg>\n";
        return o.str();
    }

private:
    struct Series {
        std::string label;
        std::vector<std::pair<double, double>> points;
        bool markers;
        bool dashed;
    };

    bool usable(double v) const { return std::isfinite(v) && (!log_ || v > 0.0); }
    double tx(double v) const { return log_ ? std::log10(v) : v; }
    std::string tick(double v) const {
        std::ostringstream s;
        s.precision(3);
        if (log_) {
            s << "1e" << std::lround(v * 10) / 10.0;
        } else {
            s << v;
        }
        return s.str();
    }

    std::string title_, xlabel_, ylabel_;
    bool log_;
    std::vector<Series> series_;
};

}  // namespace qrb
