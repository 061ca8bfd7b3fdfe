#include "kefdr/knockoff.hpp"

#include <cmath>
#include <filesystem>
#include <string>

#include "kefdr/csv.hpp"
#include "kefdr/errors.hpp"
#include "kefdr/rng.hpp"

namespace kefdr {

Design standardize(const Matrix& x_raw) {
    const int n = x_raw.rows(), m = x_raw.cols();
    if (m < 1) throw InvalidMatrix("standardize: empty design");
    if (!x_raw.all_finite()) throw InvalidMatrix("standardize: non-finite entry");
    if (n < 2 * m)
        throw InsufficientRows(
            "standardize: n >= 2m required (the m < n <= 2m row-augmentation "
            "regime is not supported)");

    Matrix z = x_raw;
    for (int j = 0; j < m; ++j) {
        double ss = 0.0;
        for (int i = 0; i < n; ++i) ss += z(i, j) * z(i, j);
        const double nrm = std::sqrt(ss);
        if (nrm <= 1e-12)
            throw DegenerateColumn("standardize: column " + std::to_string(j) +
                                   " has near-zero norm");
        for (int i = 0; i < n; ++i) z(i, j) /= nrm;
    }

    SymMatrix sigma(gram(z), 1e-9);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            if (std::fabs(sigma(i, j)) >= 1.0 - 1e-12)
                throw RankDeficient("standardize: columns " + std::to_string(i) + " and " +
                                    std::to_string(j) + " are duplicates up to sign");
        }
    }
    if (min_eigenvalue(sigma) <= 1e-10)
        throw RankDeficient("standardize: design is rank deficient");

    return Design{n, m, std::move(z), true};
}

Vector choose_equicorrelated(const SymMatrix& sigma) {
    const int m = sigma.dim();
    for (int j = 0; j < m; ++j)
        if (std::fabs(sigma(j, j) - 1.0) > 1e-8)
            throw InvalidMatrix("choose_equicorrelated: Gram matrix must have unit diagonal");
    const double lam_min = min_eigenvalue(sigma);
    if (lam_min <= 1e-10) throw RankDeficient("choose_equicorrelated: near-singular Gram matrix");
    const double s = (1.0 - 1e-3) * std::min(1.0, 2.0 * lam_min);
    return Vector(m, s);
}

Matrix orthonormal_complement(const Matrix& x) {
    const int n = x.rows(), m = x.cols();
    if (n < 2 * m) throw InsufficientRows("orthonormal_complement: n >= 2m required");

    Matrix a = x;
    // Householder vectors, v[k] has length n-k and unit norm.
    std::vector<Vector> vs(m);
    for (int k = 0; k < m; ++k) {
        double ss = 0.0;
        for (int i = k; i < n; ++i) ss += a(i, k) * a(i, k);
        const double nrm = std::sqrt(ss);
        if (nrm <= 1e-14) throw RankDeficient("orthonormal_complement: rank-deficient design");
        const double alpha = a(k, k) >= 0.0 ? -nrm : nrm;
        Vector v(n - k);
        v[0] = a(k, k) - alpha;
        for (int i = k + 1; i < n; ++i) v[i - k] = a(i, k);
        double vn = 0.0;
        for (double t : v) vn += t * t;
        vn = std::sqrt(vn);
        if (vn <= 1e-300) throw RankDeficient("orthonormal_complement: degenerate reflector");
        for (double& t : v) t /= vn;
        // apply reflector to remaining columns
        for (int j = k; j < m; ++j) {
            double proj = 0.0;
            for (int i = k; i < n; ++i) proj += v[i - k] * a(i, j);
            proj *= 2.0;
            for (int i = k; i < n; ++i) a(i, j) -= proj * v[i - k];
        }
        vs[k] = std::move(v);
    }

    // Columns m..2m-1 of the full Q: apply reflectors to unit vectors.
    Matrix u(n, m, 0.0);
    Vector w(n);
    for (int c = 0; c < m; ++c) {
        std::fill(w.begin(), w.end(), 0.0);
        w[m + c] = 1.0;
        for (int k = m - 1; k >= 0; --k) {
            const Vector& v = vs[k];
            double proj = 0.0;
            for (int i = k; i < n; ++i) proj += v[i - k] * w[i];
            proj *= 2.0;
            for (int i = k; i < n; ++i) w[i] -= proj * v[i - k];
        }
        for (int i = 0; i < n; ++i) u(i, c) = w[i];
    }
    return u;
}

Matrix random_complement(const Matrix& x, std::uint64_t seed) {
    const int n = x.rows(), m = x.cols();
    if (n < 2 * m) throw InsufficientRows("random_complement: n >= 2m required");
    Rng rng(seed);
    Matrix g(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) g(i, j) = rng.gauss();

    // project out col(X), then modified Gram-Schmidt with a second pass
    SymMatrix sigma(gram(x), 1e-9);
    Cholesky chol(sigma);
    for (int pass = 0; pass < 2; ++pass) {
        Matrix xtg = matmul(transpose(x), g);
        Matrix coeff = chol.solve(xtg);
        Matrix xc = matmul(x, coeff);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) g(i, j) -= xc(i, j);
    }
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < j; ++k) {
            double p = 0.0;
            for (int i = 0; i < n; ++i) p += g(i, k) * g(i, j);
            for (int i = 0; i < n; ++i) g(i, j) -= p * g(i, k);
        }
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) nrm += g(i, j) * g(i, j);
        nrm = std::sqrt(nrm);
        if (nrm <= 1e-10) throw RankDeficient("random_complement: degenerate random basis");
        for (int i = 0; i < n; ++i) g(i, j) /= nrm;
    }
    return g;
}

namespace {

KnockoffModel build_impl(const Design& design, const Vector& d, const Matrix& basis,
                         SRule rule) {
    const int n = design.n, m = design.m;
    if (!design.standardized) throw InvalidMatrix("build_knockoffs: design must be standardized");
    if (n < 2 * m)
        throw InsufficientRows(
            "build_knockoffs: n >= 2m required (the m < n <= 2m row-augmentation "
            "regime is not supported)");
    if (static_cast<int>(d.size()) != m) throw InfeasibleD("build_knockoffs: D has wrong length");
    for (int j = 0; j < m; ++j)
        if (!(d[j] > 0.0)) throw InfeasibleD("build_knockoffs: D must be strictly positive");
    if (basis.rows() != n || basis.cols() != m)
        throw InvalidMatrix("build_knockoffs: basis has wrong shape");

    SymMatrix sigma(gram(design.x), 1e-9);

    // feasibility: 0 < D < 2 Sigma
    Matrix two_sigma_d = sigma.mat();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) two_sigma_d(i, j) *= 2.0;
    for (int j = 0; j < m; ++j) two_sigma_d(j, j) -= d[j];
    SymMatrix tsd(std::move(two_sigma_d), 1e-9);
    Matrix inv_tsd;
    try {
        inv_tsd = Cholesky(tsd).inverse();
    } catch (const NotPSD&) {
        throw InfeasibleD("build_knockoffs: 2 Sigma - D is not positive definite");
    }

    Cholesky chol_sigma{sigma};

    // 2D - D Sigma^{-1} D, symmetrized before the square root
    Matrix dm(m, m, 0.0);
    for (int j = 0; j < m; ++j) dm(j, j) = d[j];
    Matrix sinv_d = chol_sigma.solve(dm);
    Matrix core(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double v = -d[i] * sinv_d(i, j);
            if (i == j) v += 2.0 * d[i];
            core(i, j) = v;
        }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double s = 0.5 * (core(i, j) + core(j, i));
            core(i, j) = s;
            core(j, i) = s;
        }
    SymMatrix root(Matrix::identity(m));
    try {
        root = psd_sqrt(SymMatrix(std::move(core), 1e-9));
    } catch (const NotPSD&) {
        throw InfeasibleD("build_knockoffs: 2D - D Sigma^{-1} D is not positive semidefinite");
    }

    // Xt = X Sigma^{-1} (Sigma - D) + U root
    Matrix sigma_d = sigma.mat();
    for (int j = 0; j < m; ++j) sigma_d(j, j) -= d[j];
    Matrix w = chol_sigma.solve(sigma_d);
    Matrix xtilde = matmul(design.x, w);
    Matrix ur = matmul(basis, root.mat());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) xtilde(i, j) += ur(i, j);

    KnockoffModel model{design, std::move(xtilde), sigma, d, rule,
                        Matrix(n, m),  Matrix(n, m), inv_tsd};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            model.xsum(i, j) = design.x(i, j) + model.xtilde(i, j);
            model.xdiff(i, j) = design.x(i, j) - model.xtilde(i, j);
        }

    GramResiduals res = verify_gram(model);
    if (!res.pass())
        throw Error("build_knockoffs: Gram identities violated beyond tolerance");
    return model;
}

} // namespace

KnockoffModel build_knockoffs(const Design& design, const Vector& d) {
    SRule rule = SRule::UserSupplied;
    // tag as equicorrelated when D is constant (matches choose_equicorrelated output)
    bool constant = true;
    for (size_t j = 1; j < d.size(); ++j)
        if (d[j] != d[0]) constant = false;
    if (constant) rule = SRule::Equicorrelated;
    return build_impl(design, d, orthonormal_complement(design.x), rule);
}

KnockoffModel build_knockoffs_seeded(const Design& design, const Vector& d,
                                     std::uint64_t basis_seed) {
    return build_impl(design, d, random_complement(design.x, basis_seed), SRule::Equicorrelated);
}

KnockoffModel build_knockoffs_with_basis(const Design& design, const Vector& d,
                                         const Matrix& basis) {
    // validate orthonormality and orthogonality to col(X)
    Matrix btb = gram(basis);
    for (int i = 0; i < btb.rows(); ++i)
        for (int j = 0; j < btb.cols(); ++j) {
            const double want = i == j ? 1.0 : 0.0;
            if (std::fabs(btb(i, j) - want) > 1e-8)
                throw InvalidMatrix("build_knockoffs: basis columns are not orthonormal");
        }
    Matrix xtb = matmul(transpose(design.x), basis);
    if (max_abs(xtb) > 1e-8)
        throw InvalidMatrix("build_knockoffs: basis is not orthogonal to col(X)");
    return build_impl(design, d, basis, SRule::UserSupplied);
}

GramResiduals verify_gram(const KnockoffModel& model) {
    const int m = model.design.m;
    Matrix xt_xt = gram(model.xtilde);
    Matrix x_xt = matmul(transpose(model.design.x), model.xtilde);

    Matrix sigma_d = model.sigma.mat();
    for (int j = 0; j < m; ++j) sigma_d(j, j) -= model.d[j];

    Matrix cross = matmul(transpose(model.xsum), model.xdiff);

    Matrix two_sigma_d = model.sigma.mat();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) two_sigma_d(i, j) *= 2.0;
    for (int j = 0; j < m; ++j) two_sigma_d(j, j) -= model.d[j];

    GramResiduals r;
    r.knock_gram = max_abs_diff(xt_xt, model.sigma.mat());
    r.cross_gram = max_abs_diff(x_xt, sigma_d);
    r.twin_orth = max_abs(cross);
    r.min_eig_2sd = min_eigenvalue(SymMatrix(std::move(two_sigma_d), 1e-9));
    r.d_min = model.d.empty() ? 0.0 : *std::min_element(model.d.begin(), model.d.end());
    return r;
}

void write_model_csv(const KnockoffModel& model, const std::string& dir) {
    std::filesystem::create_directories(dir);
    csv::write_matrix(dir + "/X.csv", model.design.x);
    csv::write_matrix(dir + "/Xtilde.csv", model.xtilde);
    Matrix dcol(model.design.m, 1);
    for (int j = 0; j < model.design.m; ++j) dcol(j, 0) = model.d[j];
    csv::write_matrix(dir + "/D.csv", dcol);
}

} // namespace kefdr
