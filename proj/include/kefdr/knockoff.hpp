#ifndef KEFDR_KNOCKOFF_HPP
#define KEFDR_KNOCKOFF_HPP

#include <cstdint>
#include <string>

#include "kefdr/matrix.hpp"
#include "kefdr/numerics.hpp"

namespace kefdr {

// A standardized full-column-rank design with n >= 2m.
struct Design {
    int n = 0;
    int m = 0;
    Matrix x;
    bool standardized = false;
};

// Scale each column to unit Euclidean norm and validate the design:
// no degenerate or duplicate columns, full column rank, n >= 2m.
Design standardize(const Matrix& x_raw);

// Equicorrelated diagonal: s = (1 - 1e-3) * min(1, 2 * lambda_min(Sigma)),
// requiring the unit-diagonal Gram of a standardized design.
Vector choose_equicorrelated(const SymMatrix& sigma);

enum class SRule { Equicorrelated, UserSupplied };

struct KnockoffModel {
    Design design;
    Matrix xtilde;
    SymMatrix sigma;   // X^T X
    Vector d;          // diagonal of D
    SRule s_rule = SRule::Equicorrelated;

    // cached for inference
    Matrix xsum;                 // X + Xt
    Matrix xdiff;                // X - Xt
    Matrix inv_two_sigma_d;      // (2 Sigma - D)^{-1}
};

// X_knock = X Sigma^{-1} (Sigma - D) + U (2D - D Sigma^{-1} D)^{1/2} with U an
// n x m orthonormal basis orthogonal to col(X). The default U comes from the
// trailing columns of a Householder QR of X; a seeded random completion or an
// explicit basis can be supplied instead.
KnockoffModel build_knockoffs(const Design& design, const Vector& d);
KnockoffModel build_knockoffs_seeded(const Design& design, const Vector& d,
                                     std::uint64_t basis_seed);
KnockoffModel build_knockoffs_with_basis(const Design& design, const Vector& d,
                                         const Matrix& basis);

struct GramResiduals {
    double knock_gram;     // max|Xt^T Xt - Sigma|
    double cross_gram;     // max|X^T Xt - (Sigma - D)|
    double twin_orth;      // max|(X+Xt)^T (X-Xt)|
    double min_eig_2sd;    // lambda_min(2 Sigma - D)
    double d_min;
    bool pass(double tol = 1e-8) const {
        return knock_gram <= tol && cross_gram <= tol && twin_orth <= tol &&
               min_eig_2sd > 0.0 && d_min > 0.0;
    }
};

GramResiduals verify_gram(const KnockoffModel& model);

// Orthonormal complement basis of col(X) (n x m), deterministic Householder QR.
Matrix orthonormal_complement(const Matrix& x);
Matrix random_complement(const Matrix& x, std::uint64_t seed);

// CSV bundle (X.csv, Xtilde.csv, D.csv) for cross-checking with other tools.
void write_model_csv(const KnockoffModel& model, const std::string& dir);

} // namespace kefdr

#endif
