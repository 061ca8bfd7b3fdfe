#include "kefdr/lasso.hpp"

#include <cmath>

#include "kefdr/errors.hpp"

namespace kefdr {

namespace {

double soft_threshold(double z, double lam) {
    if (z > lam) return z - lam;
    if (z < -lam) return z + lam;
    return 0.0;
}

} // namespace

LassoPath lasso_path_design(const Matrix& z, const Vector& y, int grid_size,
                            double grid_ratio) {
    if (grid_size < 2) throw DomainError("lasso_path: grid_size must be at least 2");
    if (!(grid_ratio > 0.0 && grid_ratio < 1.0))
        throw DomainError("lasso_path: grid_ratio must lie in (0,1)");
    const int p = z.cols();
    if (static_cast<int>(y.size()) != z.rows()) throw InvalidMatrix("lasso_path: length mismatch");

    const Matrix g = gram(z);
    const Vector c = tmatvec(z, y);

    double lambda_max = 0.0;
    for (double v : c) lambda_max = std::max(lambda_max, std::fabs(v));
    if (lambda_max <= 0.0) lambda_max = 1e-12;  // zero response: path is identically zero

    LassoPath path;
    path.grid.resize(grid_size);
    for (int gidx = 0; gidx < grid_size; ++gidx)
        path.grid[gidx] =
            lambda_max * std::pow(grid_ratio, static_cast<double>(gidx) / (grid_size - 1));
    path.coefficients = Matrix(grid_size, p, 0.0);
    path.entry_penalty.assign(p, 0.0);

    Vector b(p, 0.0);
    Vector q(p, 0.0);  // q_j = sum_k G_jk b_k
    std::vector<int> active;
    active.reserve(p);

    auto update = [&](int j, double lam) -> double {
        const double gjj = g(j, j);
        if (gjj <= 0.0) return 0.0;
        const double zj = c[j] - q[j] + gjj * b[j];
        const double bj_new = soft_threshold(zj, lam) / gjj;
        const double delta = bj_new - b[j];
        if (delta != 0.0) {
            const double* grow = g.data() + static_cast<size_t>(j) * p;
            for (int k = 0; k < p; ++k) q[k] += grow[k] * delta;
            b[j] = bj_new;
        }
        return std::fabs(delta);
    };

    const int max_rounds = 10000;
    for (int gidx = 0; gidx < grid_size; ++gidx) {
        const double lam = path.grid[gidx];
        bool converged = false;
        // full sweeps admit new coordinates; inner sweeps polish the active set
        for (int round = 0; round < max_rounds; ++round) {
            double max_delta = 0.0;
            double max_b = 0.0;
            for (int j = 0; j < p; ++j) {
                max_delta = std::max(max_delta, update(j, lam));
                max_b = std::max(max_b, std::fabs(b[j]));
            }
            const double ctol = 1e-8 * std::max(1.0, max_b);
            if (max_delta <= ctol) {
                converged = true;
                break;
            }
            active.clear();
            for (int j = 0; j < p; ++j)
                if (b[j] != 0.0) active.push_back(j);
            for (int sweep = 0; sweep < max_rounds; ++sweep) {
                double md = 0.0;
                for (int j : active) md = std::max(md, update(j, lam));
                if (md <= ctol) break;
            }
        }
        if (!converged)
            throw LassoDiverged("lasso_path: coordinate descent did not converge at grid point " +
                                std::to_string(gidx));
        for (int j = 0; j < p; ++j) {
            path.coefficients(gidx, j) = b[j];
            if (path.entry_penalty[j] == 0.0 && std::fabs(b[j]) > 1e-9)
                path.entry_penalty[j] = lam;
        }
    }
    return path;
}

LassoPath lasso_path(const KnockoffModel& model, const Vector& y, int grid_size,
                     double grid_ratio) {
    return lasso_path_design(hcat(model.design.x, model.xtilde), y, grid_size, grid_ratio);
}

} // namespace kefdr
