#include "kefdr/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "kefdr/errors.hpp"

namespace kefdr {

SymMatrix::SymMatrix(Matrix m, double tol) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols()) throw InvalidMatrix("SymMatrix: not square");
    if (mat_.rows() == 0) throw InvalidMatrix("SymMatrix: empty");
    if (!mat_.all_finite()) throw InvalidMatrix("SymMatrix: non-finite entry");
    for (int i = 0; i < mat_.rows(); ++i) {
        for (int j = i + 1; j < mat_.cols(); ++j) {
            const double d = std::fabs(mat_(i, j) - mat_(j, i));
            if (d > tol * std::max(1.0, std::fabs(mat_(i, j))))
                throw InvalidMatrix("SymMatrix: asymmetric entry");
        }
    }
}

SymMatrix SymMatrix::identity(int n) { return SymMatrix(Matrix::identity(n)); }

EigenSym sym_eigen(const SymMatrix& sym) {
    const int n = sym.dim();
    Matrix a = sym.mat();
    Matrix v = Matrix::identity(n);

    double scale = max_abs(a);
    if (scale == 0.0) scale = 1.0;
    const double stop = 1e-15 * scale;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::fabs(a(p, q)));
        if (off <= stop) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= stop * 1e-2) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::fabs(theta) > 1e150) {
                    t = 1.0 / (2.0 * theta);
                } else {
                    t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k != p && k != q) {
                        const double akp = a(k, p), akq = a(k, q);
                        a(k, p) = akp - s * (akq + tau * akp);
                        a(p, k) = a(k, p);
                        a(k, q) = akq + s * (akp - tau * akq);
                        a(q, k) = a(k, q);
                    }
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp - s * (vkq + tau * vkp);
                    v(k, q) = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a(i, i) < a(j, j); });

    EigenSym out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int c = 0; c < n; ++c) {
        const int src = order[c];
        out.values[c] = a(src, src);
        // sign convention: first nonzero component positive
        double sign = 1.0;
        for (int r = 0; r < n; ++r) {
            const double x = v(r, src);
            if (std::fabs(x) > 1e-300) {
                sign = x > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
        for (int r = 0; r < n; ++r) out.vectors(r, c) = sign * v(r, src);
    }
    return out;
}

double min_eigenvalue(const SymMatrix& a) { return sym_eigen(a).values.front(); }

SymMatrix psd_sqrt(const SymMatrix& a) {
    EigenSym e = sym_eigen(a);
    const int n = a.dim();
    double scale = 0.0;
    for (double v : e.values) scale = std::max(scale, std::fabs(v));
    const double band = 1e-10 * std::max(scale, 1e-300);
    // eigenvalues at rounding-noise level are treated as exact zeros, so the
    // square root of a projection stays a projection
    const double noise = 1e-14 * std::max(scale, 1e-300);
    Vector root(n);
    for (int i = 0; i < n; ++i) {
        double lam = e.values[i];
        if (lam < -band) throw NotPSD("psd_sqrt: eigenvalue below tolerance band");
        if (lam < noise) lam = 0.0;
        root[i] = std::sqrt(lam);
    }
    // B = (V L^{1/4})(V L^{1/4})^T = V L^{1/2} V^T, exactly symmetric.
    Matrix w(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) w(r, c) = e.vectors(r, c) * std::sqrt(root[c]);
    Matrix b(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += w(i, k) * w(j, k);
            b(i, j) = s;
            b(j, i) = s;
        }
    }
    return SymMatrix(std::move(b), 1e-9);
}

Cholesky::Cholesky(const SymMatrix& a) : l_(a.dim(), a.dim(), 0.0) {
    const int n = a.dim();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
            if (i == j) {
                if (s <= 0.0) throw NotPSD("Cholesky: non-positive pivot");
                l_(i, i) = std::sqrt(s);
            } else {
                l_(i, j) = s / l_(j, j);
            }
        }
    }
}

Vector Cholesky::solve(const Vector& b) const {
    const int n = l_.rows();
    if (static_cast<int>(b.size()) != n) throw InvalidMatrix("Cholesky::solve: size mismatch");
    Vector y(n);
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l_(i, k) * y[k];
        y[i] = s / l_(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= l_(k, i) * y[k];
        y[i] = s / l_(i, i);
    }
    return y;
}

Matrix Cholesky::solve(const Matrix& b) const {
    Matrix x(b.rows(), b.cols());
    Vector col(b.rows());
    for (int j = 0; j < b.cols(); ++j) {
        for (int i = 0; i < b.rows(); ++i) col[i] = b(i, j);
        Vector sol = solve(col);
        for (int i = 0; i < b.rows(); ++i) x(i, j) = sol[i];
    }
    return x;
}

Matrix Cholesky::inverse() const { return solve(Matrix::identity(l_.rows())); }

namespace {

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Lentz continued fraction for the incomplete beta.
double inc_beta_cf(double x, double a, double b) {
    const double tiny = 1e-300;
    const double eps = 1e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw QuadratureFailure("reg_inc_beta: continued fraction did not converge");
}

} // namespace

double reg_inc_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("reg_inc_beta: a,b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("reg_inc_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * inc_beta_cf(x, a, b) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                     inc_beta_cf(1.0 - x, b, a) / b;
}

double t_sf(double x, double nu) {
    if (!(nu > 0.0)) throw DomainError("t_sf: nu must be positive");
    if (!std::isfinite(x)) throw DomainError("t_sf: x must be finite");
    if (x == 0.0) return 0.5;
    if (x < 0.0) return 1.0 - t_sf(-x, nu);
    const double z = nu / (nu + x * x);
    return 0.5 * reg_inc_beta(z, 0.5 * nu, 0.5);
}

namespace {

// 15-point Kronrod / 7-point Gauss pair on [-1,1].
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

struct GkResult {
    double estimate;
    double err;
};

GkResult gk15(const std::function<double(double)>& g, double a, double b) {
    const double h = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double fk = 0.0, fg = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double f1 = g(mid - dx);
        const double f2 = g(mid + dx);
        fk += kWgk[i] * (f1 + f2);
        if (i % 2 == 1) fg += kWg[i / 2] * (f1 + f2);
    }
    const double fc = g(mid);
    fk += kWgk[7] * fc;
    fg += kWg[3] * fc;
    GkResult r;
    r.estimate = fk * h;
    r.err = std::fabs((fk - fg) * h);
    if (!std::isfinite(r.estimate)) throw QuadratureFailure("quad: non-finite integrand value");
    return r;
}

struct Interval {
    double a, b, estimate, err;
};

struct ByError {
    bool operator()(const Interval& x, const Interval& y) const { return x.err < y.err; }
};

} // namespace

double quad(const std::function<double(double)>& g, double tol, int max_intervals) {
    if (!(tol > 0.0)) throw DomainError("quad: tol must be positive");
    // |K15 - G7| can undershoot the true Kronrod error on singular tails, so
    // the refinement target carries a safety factor
    const double target = 0.25 * tol;
    std::priority_queue<Interval, std::vector<Interval>, ByError> heap;
    GkResult whole = gk15(g, 0.0, 1.0);
    heap.push({0.0, 1.0, whole.estimate, whole.err});
    double total = whole.estimate;
    double total_err = whole.err;
    double stuck_err = 0.0;  // error frozen in intervals too narrow to split

    int used = 1;
    while (total_err + stuck_err > target) {
        if (heap.empty() || used >= max_intervals)
            throw QuadratureFailure("quad: tolerance not reached");
        Interval worst = heap.top();
        heap.pop();
        total_err -= worst.err;

        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // cannot subdivide further in double precision
            stuck_err += worst.err;
            if (stuck_err > target) throw QuadratureFailure("quad: tolerance not reachable");
            continue;
        }
        GkResult left = gk15(g, worst.a, mid);
        GkResult right = gk15(g, mid, worst.b);
        total += left.estimate + right.estimate - worst.estimate;
        total_err += left.err + right.err;
        heap.push({worst.a, mid, left.estimate, left.err});
        heap.push({mid, worst.b, right.estimate, right.err});
        ++used;
    }
    return total;
}

} // namespace kefdr
