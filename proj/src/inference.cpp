#include "kefdr/inference.hpp"

#include <cmath>

#include "kefdr/csv.hpp"
#include "kefdr/errors.hpp"

namespace kefdr {

namespace {

struct FitParts {
    Vector beta1, beta2;
    double rss;
};

FitParts augmented_fit(const KnockoffModel& model, const Vector& y) {
    const int n = model.design.n, m = model.design.m;
    if (static_cast<int>(y.size()) != n) throw InvalidMatrix("response has wrong length");
    for (double v : y)
        if (!std::isfinite(v)) throw InvalidMatrix("response has non-finite entry");

    FitParts f;
    f.beta1 = matvec(model.inv_two_sigma_d, tmatvec(model.xsum, y));
    Vector xd_y = tmatvec(model.xdiff, y);
    f.beta2.resize(m);
    for (int j = 0; j < m; ++j) f.beta2[j] = xd_y[j] / model.d[j];

    // fitted = (X+Xt) beta1 / 2 + (X-Xt) beta2 / 2
    Vector fit1 = matvec(model.xsum, f.beta1);
    Vector fit2 = matvec(model.xdiff, f.beta2);
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - 0.5 * fit1[i] - 0.5 * fit2[i];
        rss += r * r;
    }
    f.rss = rss;
    return f;
}

bool residual_degenerate(double rss, const Vector& y) {
    double yss = 0.0;
    for (double v : y) yss += v * v;
    return rss <= 1e-20 * std::max(yss, 1e-300);
}

} // namespace

SigmaEstimate sigma_hat(const KnockoffModel& model, const Vector& y) {
    const int nu = model.design.n - 2 * model.design.m;
    if (nu <= 0)
        throw InsufficientDF("sigma_hat: n - 2m degrees of freedom must be positive");
    FitParts f = augmented_fit(model, y);
    SigmaEstimate est;
    est.nu = nu;
    est.degenerate = residual_degenerate(f.rss, y);
    est.sigma_hat = est.degenerate ? 0.0 : std::sqrt(f.rss / nu);
    return est;
}

std::pair<Vector, Vector> twin_estimators(const KnockoffModel& model, const Vector& y) {
    FitParts f = augmented_fit(model, y);
    return {std::move(f.beta1), std::move(f.beta2)};
}

PairedEvidence paired_pvalues(const KnockoffModel& model, const Vector& y) {
    const int m = model.design.m;
    const int nu = model.design.n - 2 * m;
    if (nu <= 0)
        throw InsufficientDF("paired_pvalues: n - 2m degrees of freedom must be positive");

    FitParts f = augmented_fit(model, y);
    if (residual_degenerate(f.rss, y))
        throw DegenerateFit("paired_pvalues: residual is numerically zero, p-values undefined");
    const double sig = std::sqrt(f.rss / nu);

    PairedEvidence ev;
    ev.m = m;
    ev.nu = nu;
    ev.sigma_hat = sig;
    ev.beta1 = f.beta1;
    ev.beta2 = f.beta2;
    ev.t1.resize(m);
    ev.t2.resize(m);
    ev.p1.resize(m);
    ev.p2.resize(m);
    const double root2 = std::sqrt(2.0);
    for (int j = 0; j < m; ++j) {
        ev.t1[j] = f.beta1[j] / (sig * root2 * std::sqrt(model.inv_two_sigma_d(j, j)));
        ev.t2[j] = f.beta2[j] * std::sqrt(model.d[j]) / (sig * root2);
        ev.p1[j] = 2.0 * t_sf(std::fabs(ev.t1[j]), nu);
        ev.p2[j] = 2.0 * t_sf(std::fabs(ev.t2[j]), nu);
    }
    return ev;
}

void write_evidence_csv(const PairedEvidence& ev, const std::string& path) {
    std::vector<std::vector<std::string>> rows(ev.m);
    for (int j = 0; j < ev.m; ++j)
        rows[j] = {std::to_string(j + 1), csv::fmt(ev.t1[j]), csv::fmt(ev.p1[j]),
                   csv::fmt(ev.t2[j]), csv::fmt(ev.p2[j])};
    csv::write(path, {"j", "T1", "P1", "T2", "P2"}, rows,
               {"sigma_hat=" + csv::fmt(ev.sigma_hat), "nu=" + std::to_string(ev.nu)});
}

} // namespace kefdr
