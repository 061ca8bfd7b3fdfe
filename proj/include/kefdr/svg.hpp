#ifndef KEFDR_SVG_HPP
#define KEFDR_SVG_HPP

#include <string>
#include <vector>

namespace kefdr::svg {

struct Series {
    std::string name;
    std::vector<double> y;
};

// Two side-by-side panels (empirical FDR with a reference line at alpha, and
// power), one polyline per method, x = signal strength.
void write_fdr_power_chart(const std::string& path, const std::string& title,
                           const std::vector<double>& x, const std::vector<Series>& fdr,
                           const std::vector<Series>& power, double alpha);

// Grouped stacked bars: one group per method, counts split into panel-backed
// and novel selections.
void write_selection_bars(const std::string& path, const std::string& title,
                          const std::vector<std::string>& methods,
                          const std::vector<int>& in_panel, const std::vector<int>& novel);

} // namespace kefdr::svg

#endif
