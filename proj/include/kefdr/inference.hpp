#ifndef KEFDR_INFERENCE_HPP
#define KEFDR_INFERENCE_HPP

#include <string>
#include <utility>

#include "kefdr/knockoff.hpp"

namespace kefdr {

// Per-hypothesis evidence from the two independent coefficient estimators.
// Track 1 is the sum estimator (2 Sigma - D)^{-1} (X + Xt)^T Y, track 2 the
// difference estimator D^{-1} (X - Xt)^T Y.
struct PairedEvidence {
    int m = 0;
    Vector t1, p1;
    Vector t2, p2;
    Vector beta1, beta2;
    double sigma_hat = 0.0;
    int nu = 0;
};

struct SigmaEstimate {
    double sigma_hat;
    int nu;
    bool degenerate;  // residual numerically zero; p-values undefined
};

// Residual scale from the 2m-column augmented fit, nu = n - 2m. The
// augmented projection decomposes along the orthogonal columns of X+Xt and
// X-Xt, so the residual reuses the twin estimators.
SigmaEstimate sigma_hat(const KnockoffModel& model, const Vector& y);

std::pair<Vector, Vector> twin_estimators(const KnockoffModel& model, const Vector& y);

PairedEvidence paired_pvalues(const KnockoffModel& model, const Vector& y);

void write_evidence_csv(const PairedEvidence& ev, const std::string& path);

} // namespace kefdr

#endif
