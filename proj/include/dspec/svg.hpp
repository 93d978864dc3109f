#pragma once

// Deterministic SVG diagrams: formation energy vs Fermi level, and spin
// levels vs magnetic field. No timestamps, fixed element ordering, pinned
// number formatting, so repeated runs are byte-identical.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "dspec/errors.hpp"
#include "dspec/spin_hamiltonian.hpp"
#include "dspec/thermo.hpp"

namespace dspec {

namespace svg_detail {

inline std::string fmt(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.6g", v);
    return buffer;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                   "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
constexpr int palette_size = 10;

struct Frame {
    double x_min, x_max, y_min, y_max;            // data ranges
    static constexpr double left = 70.0, right = 620.0, top = 40.0, bottom = 430.0;

    double px(double x) const { return left + (x - x_min) / (x_max - x_min) * (right - left); }
    double py(double y) const { return bottom - (y - y_min) / (y_max - y_min) * (bottom - top); }
};

inline void pad_range(double& lo, double& hi) {
    if (hi - lo <= 0.0) {
        lo -= 1.0;
        hi += 1.0;
        return;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
}

inline void open_document(std::string& out, const std::string& title, const Frame& frame,
                          const std::string& x_label, const std::string& y_label) {
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
    out += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
           "</text>\n";
    out += "<rect x=\"" + fmt(Frame::left) + "\" y=\"" + fmt(Frame::top) + "\" width=\"" +
           fmt(Frame::right - Frame::left) + "\" height=\"" + fmt(Frame::bottom - Frame::top) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    // 5 ticks per axis
    for (int k = 0; k <= 4; ++k) {
        const double xv = frame.x_min + k * (frame.x_max - frame.x_min) / 4.0;
        const double xp = frame.px(xv);
        out += "<line x1=\"" + fmt(xp) + "\" y1=\"" + fmt(Frame::bottom) + "\" x2=\"" + fmt(xp) +
               "\" y2=\"" + fmt(Frame::bottom + 5.0) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(xp) + "\" y=\"" + fmt(Frame::bottom + 18.0) +
               "\" text-anchor=\"middle\">" + fmt(xv) + "</text>\n";
        const double yv = frame.y_min + k * (frame.y_max - frame.y_min) / 4.0;
        const double yp = frame.py(yv);
        out += "<line x1=\"" + fmt(Frame::left - 5.0) + "\" y1=\"" + fmt(yp) + "\" x2=\"" +
               fmt(Frame::left) + "\" y2=\"" + fmt(yp) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(Frame::left - 8.0) + "\" y=\"" + fmt(yp + 4.0) +
               "\" text-anchor=\"end\">" + fmt(yv) + "</text>\n";
    }
    out += "<text x=\"345\" y=\"468\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"235\" text-anchor=\"middle\" transform=\"rotate(-90 16 235)\">" +
           escape(y_label) + "</text>\n";
}

}  // namespace svg_detail

/// Formation-energy diagram: one segment per charge-state line over
/// [0, gap], optional markers at envelope crossings.
inline std::string formation_diagram_svg(const std::string& title,
                                         const std::vector<FormationLine>& lines, double gap_eV,
                                         const std::vector<std::pair<double, double>>& markers = {}) {
    if (lines.empty()) throw EmptyData("formation diagram: no lines");
    if (gap_eV <= 0.0) throw ValidationError("formation diagram: gap must be positive");

    svg_detail::Frame frame{0.0, gap_eV, 0.0, 0.0};
    frame.y_min = lines.front().at(0.0);
    frame.y_max = frame.y_min;
    for (const auto& line : lines) {
        for (double f : {0.0, gap_eV}) {
            frame.y_min = std::min(frame.y_min, line.at(f));
            frame.y_max = std::max(frame.y_max, line.at(f));
        }
    }
    svg_detail::pad_range(frame.y_min, frame.y_max);

    std::string out;
    svg_detail::open_document(out, title, frame, "Fermi level (eV)", "Formation energy (eV)");
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const char* color = svg_detail::palette[k % svg_detail::palette_size];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + svg_detail::fmt(frame.px(0.0)) + "," +
               svg_detail::fmt(frame.py(lines[k].at(0.0))) + " " +
               svg_detail::fmt(frame.px(gap_eV)) + "," +
               svg_detail::fmt(frame.py(lines[k].at(gap_eV))) + "\"/>\n";
        const char sign = lines[k].charge >= 0 ? '+' : '-';
        out += "<text x=\"" + svg_detail::fmt(svg_detail::Frame::left + 10.0) + "\" y=\"" +
               svg_detail::fmt(svg_detail::Frame::top + 16.0 + 14.0 * k) + "\" fill=\"" + color +
               "\">" + svg_detail::escape(lines[k].label) + " q=" + sign +
               std::to_string(std::abs(lines[k].charge)) + "</text>\n";
    }
    for (const auto& [x, y] : markers)
        out += "<circle cx=\"" + svg_detail::fmt(frame.px(x)) + "\" cy=\"" +
               svg_detail::fmt(frame.py(y)) + "\" r=\"3.5\" fill=\"white\" stroke=\"black\"/>\n";
    out += "</svg>\n";
    return out;
}

/// Level-vs-field diagram: one polyline per adiabatically connected track.
/// A single field point renders as horizontal lines.
inline std::string levels_diagram_svg(const std::string& title, const ZeemanSweep& sweep) {
    if (sweep.diagrams.empty() || sweep.tracks.empty())
        throw EmptyData("levels diagram: empty sweep");

    svg_detail::Frame frame{sweep.field_T.front(), sweep.field_T.back(), 0.0, 0.0};
    const bool single = sweep.field_T.size() == 1;
    if (single) {
        frame.x_min -= 0.5;
        frame.x_max += 0.5;
    }
    frame.y_min = sweep.diagrams.front().eigenvalues_MHz.minCoeff();
    frame.y_max = sweep.diagrams.front().eigenvalues_MHz.maxCoeff();
    for (const auto& d : sweep.diagrams) {
        frame.y_min = std::min(frame.y_min, d.eigenvalues_MHz.minCoeff());
        frame.y_max = std::max(frame.y_max, d.eigenvalues_MHz.maxCoeff());
    }
    svg_detail::pad_range(frame.y_min, frame.y_max);

    std::string out;
    svg_detail::open_document(out, title, frame, "B (T)", "Level energy (MHz)");
    for (std::size_t t = 0; t < sweep.tracks.size(); ++t) {
        const char* color = svg_detail::palette[t % svg_detail::palette_size];
        std::string points;
        if (single) {
            const double y = sweep.diagrams[0].eigenvalues_MHz(static_cast<Eigen::Index>(
                sweep.tracks[t][0]));
            points = svg_detail::fmt(svg_detail::Frame::left) + "," + svg_detail::fmt(frame.py(y)) +
                     " " + svg_detail::fmt(svg_detail::Frame::right) + "," +
                     svg_detail::fmt(frame.py(y));
        } else {
            for (std::size_t k = 0; k < sweep.field_T.size(); ++k) {
                const double y = sweep.diagrams[k].eigenvalues_MHz(
                    static_cast<Eigen::Index>(sweep.tracks[t][k]));
                if (k) points += ' ';
                points += svg_detail::fmt(frame.px(sweep.field_T[k])) + "," +
                          svg_detail::fmt(frame.py(y));
            }
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.2\" points=\"" + points + "\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

}
