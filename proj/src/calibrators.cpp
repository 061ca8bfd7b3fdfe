#include "kefdr/calibrators.hpp"

#include <cmath>
#include <limits>

#include "kefdr/errors.hpp"
#include "kefdr/numerics.hpp"
#include "kefdr/rng.hpp"

namespace kefdr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1 - e^L + L e^L = sum_{k>=2} L^k (k-1)/k!, stable for small |L|.
double one_minus_t_plus_t_logt(double logt) {
    const double l = logt;
    if (std::fabs(l) < 1e-2) {
        const double l2 = l * l;
        return l2 * (1.0 / 2.0 + l * (1.0 / 3.0 + l * (1.0 / 8.0 + l * (1.0 / 30.0 + l / 144.0))));
    }
    const double t = std::exp(l);
    return 1.0 - t + t * l;
}

} // namespace

Calibrator Calibrator::all_or_nothing(double r) {
    if (!(r > 0.0 && r < 1.0)) throw BadTuning("all_or_nothing: r must lie in (0,1)");
    Calibrator c;
    c.kind_ = Kind::AllOrNothing;
    c.r_ = r;
    return c;
}

Calibrator Calibrator::bounded_poly(double cbound) {
    if (!(cbound > 1.0)) throw BadTuning("bounded_poly: C must exceed 1");
    Calibrator c;
    c.kind_ = Kind::BoundedPoly;
    c.c_ = cbound;
    c.alpha_ = 0.0;  // marker: C fixed, no level needed
    return c;
}

Calibrator Calibrator::bounded_poly_at_level() {
    Calibrator c;
    c.kind_ = Kind::BoundedPoly;
    c.c_ = 0.0;  // resolved to 1/alpha
    return c;
}

Calibrator Calibrator::power(double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw BadTuning("power: kappa must lie in (0,1)");
    Calibrator c;
    c.kind_ = Kind::Power;
    c.kappa_ = kappa;
    return c;
}

Calibrator Calibrator::power_mixture() {
    Calibrator c;
    c.kind_ = Kind::PowerMixture;
    return c;
}

Calibrator Calibrator::inverse_sqrt() {
    Calibrator c;
    c.kind_ = Kind::InverseSqrt;
    return c;
}

Calibrator Calibrator::constant(double value) {
    if (!(value >= 0.0)) throw BadTuning("constant: value must be nonnegative");
    Calibrator c;
    c.kind_ = Kind::Constant;
    c.value_ = value;
    return c;
}

bool Calibrator::needs_alpha() const {
    if (kind_ == Kind::AllOrNothing) return !alpha_.has_value();
    if (kind_ == Kind::BoundedPoly) return c_ == 0.0 && !alpha_.has_value();
    return false;
}

Calibrator Calibrator::resolved(double alpha) const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw BadTuning("calibrator: level must lie in (0,1)");
    Calibrator c = *this;
    if (kind_ == Kind::AllOrNothing) {
        c.alpha_ = alpha;
    } else if (kind_ == Kind::BoundedPoly && c_ == 0.0) {
        c.c_ = 1.0 / alpha;
        c.alpha_ = alpha;
    }
    return c;
}

bool Calibrator::is_bounded() const {
    switch (kind_) {
        case Kind::AllOrNothing:
        case Kind::BoundedPoly:
        case Kind::Constant:
            return true;
        default:
            return false;
    }
}

double Calibrator::bound() const {
    switch (kind_) {
        case Kind::AllOrNothing:
            if (!alpha_) throw Error("calibrator: level not resolved");
            return std::pow(*alpha_, -r_);
        case Kind::BoundedPoly:
            if (c_ == 0.0) throw Error("calibrator: level not resolved");
            return c_;
        case Kind::Constant:
            return value_;
        default:
            return kInf;
    }
}

double Calibrator::operator()(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("calibrator: argument outside [0,1]");
    switch (kind_) {
        case Kind::AllOrNothing: {
            if (!alpha_) throw Error("calibrator: level not resolved");
            const double cut = std::pow(*alpha_, r_);
            return t <= cut ? 1.0 / cut : 0.0;
        }
        case Kind::BoundedPoly: {
            if (c_ == 0.0) throw Error("calibrator: level not resolved");
            const double a = 1.0 / (c_ - 1.0);
            return c_ * (1.0 - std::pow(t, a));
        }
        case Kind::Power:
            if (t == 0.0) return kInf;
            return kappa_ * std::pow(t, kappa_ - 1.0);
        case Kind::PowerMixture: {
            if (t == 0.0) return kInf;
            if (t == 1.0) return 0.5;
            const double l = std::log(t);
            return one_minus_t_plus_t_logt(l) / (t * l * l);
        }
        case Kind::InverseSqrt:
            if (t == 0.0) return kInf;
            return 1.0 / std::sqrt(t) - 1.0;
        case Kind::Constant:
            return value_;
    }
    throw Error("calibrator: unreachable");
}

double Calibrator::eval_times_t(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("calibrator: argument outside [0,1]");
    switch (kind_) {
        case Kind::Power:
            return kappa_ * std::pow(t, kappa_);
        case Kind::PowerMixture: {
            if (t == 0.0) return 0.0;
            if (t == 1.0) return 0.5;
            const double l = std::log(t);
            return one_minus_t_plus_t_logt(l) / (l * l);
        }
        case Kind::InverseSqrt:
            return std::sqrt(t) - t;
        default:
            return (*this)(t)*t;
    }
}

std::string Calibrator::describe() const {
    char buf[80];
    switch (kind_) {
        case Kind::AllOrNothing:
            if (alpha_)
                std::snprintf(buf, sizeof(buf), "all_or_nothing(r=%g,alpha=%g)", r_, *alpha_);
            else
                std::snprintf(buf, sizeof(buf), "all_or_nothing(r=%g)", r_);
            return buf;
        case Kind::BoundedPoly:
            if (c_ > 0.0)
                std::snprintf(buf, sizeof(buf), "bounded_poly(C=%g)", c_);
            else
                std::snprintf(buf, sizeof(buf), "bounded_poly(C=1/alpha)");
            return buf;
        case Kind::Power:
            std::snprintf(buf, sizeof(buf), "power(kappa=%g)", kappa_);
            return buf;
        case Kind::PowerMixture:
            return "power_mixture";
        case Kind::InverseSqrt:
            return "inverse_sqrt";
        case Kind::Constant:
            std::snprintf(buf, sizeof(buf), "constant(%g)", value_);
            return buf;
    }
    return "?";
}

Vector calibrate_vector(const Calibrator& cal, const Vector& p) {
    Vector s(p.size());
    for (size_t j = 0; j < p.size(); ++j) {
        if (!(p[j] >= 0.0 && p[j] <= 1.0))
            throw DomainError("calibrate_vector: p[" + std::to_string(j) + "] outside [0,1]");
        s[j] = cal(p[j]);
    }
    return s;
}

Vector normalize_weights(const Vector& evalues) {
    const int m = static_cast<int>(evalues.size());
    if (m == 0) throw EmptyInput("normalize_weights: empty input");
    int n_inf = 0;
    double sum = 0.0;
    for (double s : evalues) {
        if (!(s >= 0.0)) throw DomainError("normalize_weights: negative e-value");
        if (std::isinf(s))
            ++n_inf;
        else
            sum += s;
    }
    Vector w(m, 0.0);
    if (n_inf > 0) {
        for (int j = 0; j < m; ++j)
            if (std::isinf(evalues[j])) w[j] = static_cast<double>(m) / n_inf;
        return w;
    }
    if (sum <= 0.0) throw ZeroEvidence("normalize_weights: all e-values are zero");
    for (int j = 0; j < m; ++j) w[j] = m * evalues[j] / sum;
    return w;
}

double certify_integral(const Calibrator& cal, double tol) {
    if (cal.needs_alpha()) throw Error("certify_integral: level not resolved");
    if (cal.is_bounded()) {
        return quad([&](double t) { return cal(t); }, tol);
    }
    // t = exp(1 - 1/u): integral of g over (0,1] equals integral over u in
    // (0,1] of g(t) * t / u^2. For the mixture, t*ln^2(t)*u^2 = (u-1)^2 keeps
    // the transformed integrand finite even when t underflows.
    if (cal.kind() == Calibrator::Kind::PowerMixture) {
        return quad(
            [](double u) {
                if (u < 1e-300) return 1.0;
                const double l = 1.0 - 1.0 / u;
                const double um1 = u - 1.0;
                if (um1 == 0.0) return 0.5;
                return one_minus_t_plus_t_logt(l) / (um1 * um1);
            },
            tol);
    }
    return quad(
        [&](double u) {
            if (u < 1e-150) return 0.0;
            const double t = std::exp(1.0 - 1.0 / u);
            return cal.eval_times_t(t) / (u * u);
        },
        tol);
}

CalibratorCheck check_calibrator(const Calibrator& cal, int monotone_samples) {
    CalibratorCheck out;
    out.integral = certify_integral(cal);
    out.bound = cal.bound();
    out.monotone = true;
    Rng rng(0x5ca1ab1eULL);
    for (int i = 0; i < monotone_samples && out.monotone; ++i) {
        double a = rng.uniform(), b = rng.uniform();
        if (a > b) std::swap(a, b);
        if (a == b) continue;
        if (cal(a) < cal(b)) out.monotone = false;
    }
    out.admissible = out.integral <= 1.0 + 1e-9 && out.monotone;
    return out;
}

} // namespace kefdr
