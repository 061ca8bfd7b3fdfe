#include "kefdr/knockoff_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kefdr/csv.hpp"
#include "kefdr/errors.hpp"

namespace kefdr {

KnockoffStats knockoff_stats(const LassoPath& path) {
    const int p = static_cast<int>(path.entry_penalty.size());
    if (p % 2 != 0) throw InvalidMatrix("knockoff_stats: augmented path must have 2m columns");
    const int m = p / 2;
    KnockoffStats stats;
    stats.v.resize(m);
    for (int j = 0; j < m; ++j) {
        const double orig = path.entry_penalty[j];
        const double knock = path.entry_penalty[m + j];
        const double mx = std::max(orig, knock);
        stats.v[j] = orig > knock ? mx : -mx;  // ties count for the knockoff
    }
    return stats;
}

double knockoff_threshold(const KnockoffStats& stats, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw BadTuning("knockoff_threshold: level must lie in (0,1)");
    Vector candidates;
    for (double v : stats.v) {
        const double a = std::fabs(v);
        if (a > 0.0) candidates.push_back(a);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    for (double t : candidates) {
        int neg = 0, pos = 0;
        for (double v : stats.v) {
            if (v <= -t) ++neg;
            if (v >= t) ++pos;
        }
        if ((1.0 + neg) / std::max(pos, 1) <= alpha) return t;
    }
    return std::numeric_limits<double>::infinity();
}

DecisionReport knockoff_select(const KnockoffStats& stats, double alpha) {
    const int m = static_cast<int>(stats.v.size());
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const double threshold = knockoff_threshold(stats, alpha);

    DecisionReport rep;
    rep.procedure = "knockoff";
    rep.alpha = alpha;
    rep.adjusted.assign(m, kInf);
    for (int j = 0; j < m; ++j) {
        if (stats.v[j] >= threshold) {
            rep.rejected.push_back(j);
            rep.adjusted[j] = 0.0;
        }
    }
    return rep;
}

void write_filter_csv(const std::string& path, const LassoPath& fit,
                      const KnockoffStats& stats, double threshold) {
    const int m = static_cast<int>(stats.v.size());
    if (static_cast<int>(fit.entry_penalty.size()) != 2 * m)
        throw InvalidMatrix("write_filter_csv: path and statistics disagree on m");
    std::vector<std::vector<std::string>> rows(m);
    for (int j = 0; j < m; ++j)
        rows[j] = {std::to_string(j + 1), csv::fmt(fit.entry_penalty[j]),
                   csv::fmt(fit.entry_penalty[m + j]), csv::fmt(stats.v[j]),
                   csv::fmt(threshold)};
    csv::write(path, {"j", "entry", "knockoff_entry", "V", "T"}, rows);
}

} // namespace kefdr
