#ifndef KEFDR_CALIBRATORS_HPP
#define KEFDR_CALIBRATORS_HPP

#include <optional>
#include <string>

#include "kefdr/matrix.hpp"

namespace kefdr {

// Decreasing g: [0,1] -> [0, C] with integral at most one. For the kinds
// whose parameters depend on the testing level, the level is filled in via
// resolved(alpha) at procedure-invocation time.
class Calibrator {
public:
    enum class Kind {
        AllOrNothing,  // alpha^{-r} * 1(t <= alpha^r)
        BoundedPoly,   // C (1 - t^a), a = 1/(C-1)
        Power,         // kappa t^{kappa-1}
        PowerMixture,  // average of the power family over kappa in (0,1)
        InverseSqrt,   // t^{-1/2} - 1
        Constant,      // c (valid only for c <= 1)
    };

    static Calibrator all_or_nothing(double r);
    static Calibrator bounded_poly(double c);
    static Calibrator bounded_poly_at_level();  // C = 1/alpha, resolved later
    static Calibrator power(double kappa);
    static Calibrator power_mixture();
    static Calibrator inverse_sqrt();
    static Calibrator constant(double value);

    Kind kind() const { return kind_; }
    bool needs_alpha() const;
    Calibrator resolved(double alpha) const;

    bool is_bounded() const;
    double bound() const;  // +inf for unbounded kinds

    double operator()(double t) const;
    // g(t) * t with the cancellation-prone kinds evaluated stably; used by
    // the integral certification.
    double eval_times_t(double t) const;

    std::string describe() const;

private:
    Calibrator() = default;
    Kind kind_ = Kind::Constant;
    double r_ = 0.5;
    double c_ = 1.0;
    double kappa_ = 0.5;
    double value_ = 1.0;
    std::optional<double> alpha_;
};

Vector calibrate_vector(const Calibrator& cal, const Vector& p);

// W_j = m S_j / sum_k S_k. All-zero input raises ZeroEvidence. Infinite
// entries absorb the whole weight budget (split equally among them).
Vector normalize_weights(const Vector& evalues);

// Quadrature certificate for the integral of the calibrator over [0,1].
// Unbounded kinds are integrated after the substitution t = exp(1 - 1/u),
// which turns both power-law and logarithmic endpoint singularities into
// smooth integrands.
double certify_integral(const Calibrator& cal, double tol = 1e-10);

struct CalibratorCheck {
    double integral;
    double bound;
    bool monotone;
    bool admissible;  // integral <= 1 + 1e-9
};

CalibratorCheck check_calibrator(const Calibrator& cal, int monotone_samples = 10000);

} // namespace kefdr

#endif
