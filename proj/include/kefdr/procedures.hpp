#ifndef KEFDR_PROCEDURES_HPP
#define KEFDR_PROCEDURES_HPP

#include <optional>
#include <string>
#include <vector>

#include "kefdr/calibrators.hpp"
#include "kefdr/inference.hpp"
#include "kefdr/matrix.hpp"

namespace kefdr {

struct DecisionReport {
    std::string procedure;
    double alpha = 0.0;
    std::optional<double> lambda;
    std::optional<double> null_prop;  // pi0 or delta0 estimate
    std::vector<int> rejected;        // 0-based, sorted ascending
    Vector adjusted;                  // +inf marks never-rejectable entries
    std::string calibrator;           // provenance of the e-values, if any
    std::vector<std::string> fallback_flags;
};

// Step-up rule at thresholds alpha*j/m; accepts entries in [0, +inf],
// stable tie-breaking by original index.
DecisionReport bh(const Vector& p, double alpha);

double storey_pi0(const Vector& p, double lambda);

// Screen on track-1 p-values at sqrt(alpha), then BH at sqrt(alpha).
DecisionReport bon_bh(const PairedEvidence& ev, double alpha);

DecisionReport adaptive_bon_bh(const PairedEvidence& ev, double alpha, double lambda,
                               std::optional<double> forced_pi0 = std::nullopt);

// e-value weighted BH on the ratios p2/g(p1).
DecisionReport calibrated_ep_bh(const PairedEvidence& ev, const Calibrator& cal,
                                double alpha);

// Adaptive variant with the Storey estimate from track-2 p-values.
DecisionReport calibrated_ep_storey(const PairedEvidence& ev, const Calibrator& cal,
                                    double alpha, double lambda,
                                    std::optional<double> forced_pi0 = std::nullopt);

// Normalized e-value weights, weighted null-proportion estimate, and the
// capped step-up thresholds min(delta0*lambda, j*alpha/m).
DecisionReport calibrated_weighted_bh(const PairedEvidence& ev, const Calibrator& cal,
                                      double alpha, double lambda);

// Generic entry point on raw (p, e) vectors.
DecisionReport ep_bh(const Vector& p, const Vector& evalues, double alpha);

void write_report_csv(const DecisionReport& report, const std::string& path);
std::string report_summary_json(const DecisionReport& report);

} // namespace kefdr

#endif
