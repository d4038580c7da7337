#pragma once

// Small self-contained SVG emitter for the two standard views: tracking
// error curves over time and the per-agent communication raster.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "detcon/engine.hpp"

namespace detcon::svg {

namespace detail {

constexpr double kWidth = 860.0;
constexpr double kHeight = 380.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 20.0;
constexpr double kTop = 24.0;
constexpr double kBottom = 46.0;

struct Frame {
    double t0, t1, y0, y1;
    double sx(double t) const {
        return kLeft + (t - t0) / (t1 - t0) * (kWidth - kLeft - kRight);
    }
    double sy(double y) const {
        return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
    }
};

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline void open_doc(std::ostream& os, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kLeft << "\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">"
       << title << "</text>\n";
}

inline void axes(std::ostream& os, const Frame& f, const std::string& xlabel,
                 const std::string& ylabel) {
    os << "<g stroke=\"#444\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<line x1=\"" << f.sx(f.t0) << "\" y1=\"" << f.sy(f.y0) << "\" x2=\"" << f.sx(f.t1)
       << "\" y2=\"" << f.sy(f.y0) << "\"/>\n";
    os << "<line x1=\"" << f.sx(f.t0) << "\" y1=\"" << f.sy(f.y0) << "\" x2=\"" << f.sx(f.t0)
       << "\" y2=\"" << f.sy(f.y1) << "\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double t = f.t0 + (f.t1 - f.t0) * k / 5.0;
        const double y = f.y0 + (f.y1 - f.y0) * k / 5.0;
        os << "<line x1=\"" << f.sx(t) << "\" y1=\"" << f.sy(f.y0) << "\" x2=\"" << f.sx(t)
           << "\" y2=\"" << f.sy(f.y0) + 4 << "\"/>\n";
        os << "<text x=\"" << f.sx(t) << "\" y=\"" << f.sy(f.y0) + 18
           << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">" << fmt(t) << "</text>\n";
        os << "<line x1=\"" << f.sx(f.t0) - 4 << "\" y1=\"" << f.sy(y) << "\" x2=\"" << f.sx(f.t0)
           << "\" y2=\"" << f.sy(y) << "\"/>\n";
        os << "<text x=\"" << f.sx(f.t0) - 7 << "\" y=\"" << f.sy(y) + 4
           << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#222\">" << fmt(y) << "</text>\n";
    }
    os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10
       << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">" << xlabel << "</text>\n";
    os << "<text x=\"14\" y=\"" << (kTop + kHeight - kBottom) / 2
       << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\" transform=\"rotate(-90 14 "
       << (kTop + kHeight - kBottom) / 2 << ")\">" << ylabel << "</text>\n";
    os << "</g>\n";
}

inline void polyline(std::ostream& os, const Frame& f, const std::vector<double>& ts,
                     const std::vector<double>& ys, const std::string& color, bool dashed) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.1\"";
    if (dashed) os << " stroke-dasharray=\"5 3\"";
    os << " points=\"";
    const std::size_t stride = std::max<std::size_t>(1, ts.size() / 2000);
    for (std::size_t k = 0; k < ts.size(); k += stride) {
        os << fmt(f.sx(ts[k])) << ',' << fmt(f.sy(ys[k])) << ' ';
    }
    if ((ts.size() - 1) % stride != 0) {
        os << fmt(f.sx(ts.back())) << ',' << fmt(f.sy(ys.back()));
    }
    os << "\"/>\n";
}

inline std::ofstream open_file(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

inline const char* run_color(std::size_t idx) {
    static const char* palette[] = {"#111111", "#888888", "#c05020", "#2060c0", "#20a060"};
    return palette[idx % 5];
}

}  // namespace detail

/// Tracking-error curves of one or more runs on a shared time axis, with
/// optional +/- reference band lines.
inline void plot_error_curves(const std::vector<const RunRecord*>& runs, const std::string& path,
                              std::optional<double> reference_band = std::nullopt) {
    if (runs.empty()) throw std::invalid_argument("no runs to plot");
    for (const auto* r : runs) {
        if (r == nullptr || r->times.empty()) throw std::invalid_argument("empty run record");
    }
    using namespace detail;
    double t1 = 0.0;
    double ymax = 1e-12;
    for (const auto* r : runs) {
        t1 = std::max(t1, r->times.back());
        ymax = std::max(ymax, r->error.maxCoeff());
    }
    if (reference_band) ymax = std::max(ymax, std::abs(*reference_band));
    Frame f{0.0, t1, 0.0, 1.05 * ymax};

    auto out = open_file(path);
    open_doc(out, "tracking error |x_i - mean input|");
    axes(out, f, "time [s]", "error");
    for (std::size_t ridx = 0; ridx < runs.size(); ++ridx) {
        const RunRecord& rec = *runs[ridx];
        std::vector<double> ys(rec.times.size());
        for (int i = 0; i < rec.agents(); ++i) {
            for (std::size_t k = 0; k < rec.times.size(); ++k) {
                ys[k] = rec.error(static_cast<Eigen::Index>(k), i);
            }
            polyline(out, f, rec.times, ys, run_color(ridx), ridx % 2 == 1);
        }
        out << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << kTop + 14 * (ridx + 1)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
            << run_color(ridx) << "\">" << rec.scenario_name << "</text>\n";
    }
    if (reference_band) {
        const double b = std::abs(*reference_band);
        out << "<line x1=\"" << f.sx(f.t0) << "\" y1=\"" << f.sy(b) << "\" x2=\"" << f.sx(f.t1)
            << "\" y2=\"" << f.sy(b)
            << "\" stroke=\"#b02020\" stroke-width=\"1\" stroke-dasharray=\"2 3\"/>\n";
        out << "<text x=\"" << f.sx(f.t0) + 4 << "\" y=\"" << f.sy(b) - 3
            << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#b02020\">bound "
            << fmt(b) << "</text>\n";
    }
    out << "</svg>\n";
}

/// Communication raster: one row per agent, an x marker per sample and a
/// + marker per switch-time rebroadcast.
inline void plot_event_raster(const RunRecord& rec, const std::string& path) {
    if (rec.times.empty()) throw std::invalid_argument("empty run record");
    using namespace detail;
    const int n = rec.agents();
    Frame f{0.0, rec.times.back(), 0.5, static_cast<double>(n) + 0.5};

    auto out = open_file(path);
    open_doc(out, "communication times (" + rec.scenario_name + ")");
    axes(out, f, "time [s]", "agent");
    out << "<g stroke=\"#111\" stroke-width=\"1\">\n";
    for (const auto& ev : rec.events) {
        const double cx = f.sx(ev.time);
        const double cy = f.sy(static_cast<double>(ev.agent + 1));
        constexpr double m = 3.0;
        if (ev.kind == EventKind::Sample) {
            out << "<line x1=\"" << cx - m << "\" y1=\"" << cy - m << "\" x2=\"" << cx + m
                << "\" y2=\"" << cy + m << "\"/>\n";
            out << "<line x1=\"" << cx - m << "\" y1=\"" << cy + m << "\" x2=\"" << cx + m
                << "\" y2=\"" << cy - m << "\"/>\n";
        } else {
            out << "<line x1=\"" << cx - m << "\" y1=\"" << cy << "\" x2=\"" << cx + m
                << "\" y2=\"" << cy << "\" stroke=\"#b02020\"/>\n";
            out << "<line x1=\"" << cx << "\" y1=\"" << cy - m << "\" x2=\"" << cx << "\" y2=\""
                << cy + m << "\" stroke=\"#b02020\"/>\n";
        }
    }
    out << "</g>\n</svg>\n";
}

}  // namespace detcon::svg
