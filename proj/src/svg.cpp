#include "kefdr/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "kefdr/errors.hpp"

namespace kefdr::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct Panel {
    double x0, y0, w, h;  // plot area in svg coordinates
    double xmin, xmax, ymin, ymax;
    double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
    double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void draw_axes(std::ofstream& out, const Panel& p, const std::string& title,
               const std::string& ylab, const std::vector<double>& xticks) {
    out << "<rect x='" << num(p.x0) << "' y='" << num(p.y0) << "' width='" << num(p.w)
        << "' height='" << num(p.h) << "' fill='none' stroke='black'/>\n";
    out << "<text x='" << num(p.x0 + p.w / 2) << "' y='" << num(p.y0 - 8)
        << "' text-anchor='middle' font-size='13'>" << title << "</text>\n";
    out << "<text x='" << num(p.x0 - 34) << "' y='" << num(p.y0 + p.h / 2)
        << "' text-anchor='middle' font-size='11' transform='rotate(-90 " << num(p.x0 - 34)
        << " " << num(p.y0 + p.h / 2) << ")'>" << ylab << "</text>\n";
    for (double t : xticks) {
        out << "<line x1='" << num(p.px(t)) << "' y1='" << num(p.y0 + p.h) << "' x2='"
            << num(p.px(t)) << "' y2='" << num(p.y0 + p.h + 4) << "' stroke='black'/>\n";
        out << "<text x='" << num(p.px(t)) << "' y='" << num(p.y0 + p.h + 16)
            << "' text-anchor='middle' font-size='10'>" << num(t) << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double y = p.ymin + (p.ymax - p.ymin) * i / 4.0;
        out << "<line x1='" << num(p.x0 - 4) << "' y1='" << num(p.py(y)) << "' x2='"
            << num(p.x0) << "' y2='" << num(p.py(y)) << "' stroke='black'/>\n";
        out << "<text x='" << num(p.x0 - 6) << "' y='" << num(p.py(y) + 3)
            << "' text-anchor='end' font-size='10'>" << num(y) << "</text>\n";
    }
}

void draw_series(std::ofstream& out, const Panel& p, const std::vector<double>& x,
                 const std::vector<Series>& series) {
    for (size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % 8];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (size_t i = 0; i < x.size(); ++i)
            out << num(p.px(x[i])) << "," << num(p.py(series[s].y[i])) << " ";
        out << "'/>\n";
        for (size_t i = 0; i < x.size(); ++i)
            out << "<circle cx='" << num(p.px(x[i])) << "' cy='" << num(p.py(series[s].y[i]))
                << "' r='2.4' fill='" << color << "'/>\n";
    }
}

} // namespace

void write_fdr_power_chart(const std::string& path, const std::string& title,
                           const std::vector<double>& x, const std::vector<Series>& fdr,
                           const std::vector<Series>& power, double alpha) {
    if (x.empty() || fdr.empty() || fdr.size() != power.size())
        throw Error("write_fdr_power_chart: inconsistent inputs");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write SVG: " + path);

    const double width = 760, height = 330;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' font-family='sans-serif'>\n";
    out << "<text x='" << num(width / 2) << "' y='18' text-anchor='middle' font-size='14'>"
        << title << "</text>\n";

    const double xmin = x.front(), xmax = x.back();
    double fdr_max = alpha * 1.5;
    for (const auto& s : fdr)
        for (double v : s.y) fdr_max = std::max(fdr_max, v * 1.1);
    Panel pf{60, 50, 280, 210, xmin, xmax, 0.0, fdr_max};
    Panel pp{440, 50, 280, 210, xmin, xmax, 0.0, 1.0};

    draw_axes(out, pf, "Empirical FDR", "FDR", x);
    draw_axes(out, pp, "Empirical power", "power", x);

    out << "<line x1='" << num(pf.px(xmin)) << "' y1='" << num(pf.py(alpha)) << "' x2='"
        << num(pf.px(xmax)) << "' y2='" << num(pf.py(alpha))
        << "' stroke='black' stroke-dasharray='4 3'/>\n";

    draw_series(out, pf, x, fdr);
    draw_series(out, pp, x, power);

    for (size_t s = 0; s < fdr.size(); ++s) {
        const double lx = 60 + 90.0 * s;
        out << "<rect x='" << num(lx) << "' y='296' width='12' height='4' fill='"
            << kPalette[s % 8] << "'/>\n";
        out << "<text x='" << num(lx + 16) << "' y='302' font-size='11'>" << fdr[s].name
            << "</text>\n";
    }
    out << "</svg>\n";
}

void write_selection_bars(const std::string& path, const std::string& title,
                          const std::vector<std::string>& methods,
                          const std::vector<int>& in_panel, const std::vector<int>& novel) {
    if (methods.size() != in_panel.size() || methods.size() != novel.size())
        throw Error("write_selection_bars: inconsistent inputs");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write SVG: " + path);

    const double width = 520, height = 300;
    int total_max = 1;
    for (size_t i = 0; i < methods.size(); ++i)
        total_max = std::max(total_max, in_panel[i] + novel[i]);

    Panel p{60, 50, 420, 200, -0.5, methods.size() - 0.5, 0.0, static_cast<double>(total_max)};
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' font-family='sans-serif'>\n";
    out << "<text x='" << num(width / 2) << "' y='18' text-anchor='middle' font-size='14'>"
        << title << "</text>\n";
    out << "<rect x='60' y='50' width='420' height='200' fill='none' stroke='black'/>\n";

    const double bw = 420.0 / methods.size() * 0.55;
    for (size_t i = 0; i < methods.size(); ++i) {
        const double cx = p.px(static_cast<double>(i));
        const double base = p.py(0.0);
        const double h_panel = base - p.py(in_panel[i]);
        const double h_novel = base - p.py(novel[i]);
        out << "<rect x='" << num(cx - bw / 2) << "' y='" << num(base - h_panel) << "' width='"
            << num(bw) << "' height='" << num(h_panel) << "' fill='#1f77b4'/>\n";
        out << "<rect x='" << num(cx - bw / 2) << "' y='" << num(base - h_panel - h_novel)
            << "' width='" << num(bw) << "' height='" << num(h_novel) << "' fill='#ff7f0e'/>\n";
        out << "<text x='" << num(cx) << "' y='266' text-anchor='middle' font-size='11'>"
            << methods[i] << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double y = total_max * i / 4.0;
        out << "<text x='54' y='" << num(p.py(y) + 3)
            << "' text-anchor='end' font-size='10'>" << num(y) << "</text>\n";
    }
    out << "<rect x='60' y='278' width='12' height='8' fill='#1f77b4'/>"
        << "<text x='76' y='286' font-size='11'>in panel</text>\n";
    out << "<rect x='160' y='278' width='12' height='8' fill='#ff7f0e'/>"
        << "<text x='176' y='286' font-size='11'>novel</text>\n";
    out << "</svg>\n";
}

} // namespace kefdr::svg
