#ifndef KEFDR_LASSO_HPP
#define KEFDR_LASSO_HPP

#include "kefdr/knockoff.hpp"
#include "kefdr/matrix.hpp"

namespace kefdr {

// Objective (1/2)||y - Z b||^2 + lambda ||b||_1, no 1/n factor, so on an
// orthogonal design a coefficient enters exactly at |z_j^T y|.
struct LassoPath {
    Vector grid;            // strictly decreasing penalties, grid[0] = lambda_max
    Matrix coefficients;    // grid_size x p
    Vector entry_penalty;   // largest grid penalty with a nonzero coefficient, 0 if never
};

LassoPath lasso_path_design(const Matrix& z, const Vector& y, int grid_size = 100,
                            double grid_ratio = 1e-3);

// Path on the augmented design [X Xt].
LassoPath lasso_path(const KnockoffModel& model, const Vector& y, int grid_size = 100,
                     double grid_ratio = 1e-3);

} // namespace kefdr

#endif
