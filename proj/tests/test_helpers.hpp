#ifndef KEFDR_TEST_HELPERS_HPP
#define KEFDR_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "kefdr/matrix.hpp"
#include "kefdr/numerics.hpp"
#include "kefdr/rng.hpp"

namespace testutil {

// O(m^2) step-up oracle: largest j with p_(j) <= thr(j), reject the j smallest.
inline std::vector<int> step_up_bruteforce(const kefdr::Vector& p,
                                           const std::vector<double>& thresholds) {
    const int m = static_cast<int>(p.size());
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p[a] < p[b]; });
    int j0 = 0;
    for (int j = 1; j <= m; ++j)
        if (p[order[j - 1]] <= thresholds[j - 1]) j0 = j;
    std::vector<int> rejected(order.begin(), order.begin() + j0);
    std::sort(rejected.begin(), rejected.end());
    return rejected;
}

inline std::vector<int> bh_bruteforce(const kefdr::Vector& p, double alpha) {
    const int m = static_cast<int>(p.size());
    std::vector<double> thr(m);
    for (int j = 1; j <= m; ++j) thr[j - 1] = alpha * j / m;
    return step_up_bruteforce(p, thr);
}

// t-distribution density, log-space to survive large nu and |x|.
inline double t_pdf(double x, double nu) {
    const double logc = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                        0.5 * std::log(nu * 3.14159265358979323846);
    return std::exp(logc - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

// Oracle for the upper tail: integrate the density over [x, inf) via the
// substitution t = x + u/(1-u) mapped onto (0,1).
inline double t_sf_quadrature(double x, double nu, double tol = 1e-12) {
    if (x < 0.0) return 1.0 - t_sf_quadrature(-x, nu, tol);
    return kefdr::quad(
        [&](double u) {
            const double denom = 1.0 - u;
            const double t = x + u / denom;
            return t_pdf(t, nu) / (denom * denom);
        },
        tol);
}

// two-sided t critical value: solves 2*t_sf(t, nu) = p
inline double t_two_sided_critical(double p, double nu) {
    double lo = 0.0, hi = 1.0;
    while (2.0 * kefdr::t_sf(hi, nu) > p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (2.0 * kefdr::t_sf(mid, nu) > p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Kolmogorov-Smirnov distance of a sample against Uniform[0,1]; sorts a copy.
inline double ks_uniform(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) {
        const double f = sample[i];
        d = std::max(d, std::fabs((i + 1) / n - f));
        d = std::max(d, std::fabs(f - i / n));
    }
    return d;
}

inline kefdr::Matrix random_matrix(int n, int m, kefdr::Rng& rng) {
    kefdr::Matrix x(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) x(i, j) = rng.gauss();
    return x;
}

inline kefdr::Matrix random_symmetric(int n, kefdr::Rng& rng) {
    kefdr::Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = rng.gauss();
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

} // namespace testutil

#endif
