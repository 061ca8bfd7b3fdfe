#ifndef KEFDR_NUMERICS_HPP
#define KEFDR_NUMERICS_HPP

#include <functional>

#include "kefdr/matrix.hpp"

namespace kefdr {

// Symmetric matrix wrapper. Construction validates finiteness and symmetry
// within |A_ij - A_ji| <= tol * max(1, |A_ij|).
class SymMatrix {
public:
    explicit SymMatrix(Matrix m, double tol = 1e-12);
    static SymMatrix identity(int n);

    int dim() const { return mat_.rows(); }
    double operator()(int i, int j) const { return mat_(i, j); }
    const Matrix& mat() const { return mat_; }

private:
    Matrix mat_;
};

struct EigenSym {
    Vector values;   // ascending
    Matrix vectors;  // orthonormal columns, vectors.col(i) <-> values[i]
};

// Cyclic Jacobi rotations; deterministic for a given input.
EigenSym sym_eigen(const SymMatrix& a);

double min_eigenvalue(const SymMatrix& a);

// Symmetric PSD square root. Eigenvalues in [-1e-10*||A||, 0) are clamped
// to zero; anything below that band raises NotPSD.
SymMatrix psd_sqrt(const SymMatrix& a);

// Cholesky factorization A = L L^T of a positive definite matrix.
class Cholesky {
public:
    explicit Cholesky(const SymMatrix& a);
    Vector solve(const Vector& b) const;
    Matrix solve(const Matrix& b) const;
    Matrix inverse() const;

private:
    Matrix l_;
};

// Regularized incomplete beta I_x(a, b), continued fraction with the
// symmetry switch at x > (a+1)/(a+b+2).
double reg_inc_beta(double x, double a, double b);

// Student-t upper tail Pr(T_nu > x).
double t_sf(double x, double nu);

// Adaptive Gauss-Kronrod quadrature of g over [0,1]. Endpoints are never
// evaluated, so an integrable singularity at 0 is handled by subdivision.
double quad(const std::function<double(double)>& g, double tol,
            int max_intervals = 100000);

} // namespace kefdr

#endif
