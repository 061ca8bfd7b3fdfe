#ifndef KEFDR_KNOCKOFF_FILTER_HPP
#define KEFDR_KNOCKOFF_FILTER_HPP

#include "kefdr/lasso.hpp"
#include "kefdr/procedures.hpp"

namespace kefdr {

// Signed-max statistics V_j = max(L_j, Lt_j) * (2*1{L_j > Lt_j} - 1) from the
// entry penalties of a path on [X Xt]; first half original, second half knockoff.
struct KnockoffStats {
    Vector v;
};

KnockoffStats knockoff_stats(const LassoPath& path);

// T = min{ t in {|V_j|} \ {0} :
//   (1 + #{V_j <= -t}) / max(#{V_j >= t}, 1) <= alpha }, +inf if none qualifies.
double knockoff_threshold(const KnockoffStats& stats, double alpha);

// Selection {j : V_j >= T}.
DecisionReport knockoff_select(const KnockoffStats& stats, double alpha);

// CSV dump of (j, entry penalty, knockoff entry penalty, V_j, T).
void write_filter_csv(const std::string& path, const LassoPath& fit,
                      const KnockoffStats& stats, double threshold);

} // namespace kefdr

#endif
