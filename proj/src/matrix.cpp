#include "kefdr/matrix.hpp"

#include <cmath>
#include <cstddef>

#include "kefdr/errors.hpp"

namespace kefdr {

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n, 0.0);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw InvalidMatrix("matmul: dimension mismatch");
    Matrix c(a.rows(), b.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Matrix gram(const Matrix& x) {
    const int n = x.rows(), m = x.cols();
    Matrix g(m, m, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += x(k, i) * x(k, j);
            g(i, j) = s;
            g(j, i) = s;
        }
    }
    return g;
}

Matrix sandwich(const Matrix& a, const Matrix& b) {
    Matrix ab = matmul(a, b);
    const int n = a.rows();
    Matrix c(n, n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols(); ++k) s += ab(i, k) * a(j, k);
            c(i, j) = s;
            c(j, i) = s;
        }
    }
    return c;
}

Vector matvec(const Matrix& a, const Vector& v) {
    if (static_cast<int>(v.size()) != a.cols()) throw InvalidMatrix("matvec: dimension mismatch");
    Vector r(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

Vector tmatvec(const Matrix& a, const Vector& v) {
    if (static_cast<int>(v.size()) != a.rows()) throw InvalidMatrix("tmatvec: dimension mismatch");
    Vector r(a.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        const double vi = v[i];
        for (int j = 0; j < a.cols(); ++j) r[j] += a(i, j) * vi;
    }
    return r;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw InvalidMatrix("hcat: row mismatch");
    Matrix c(a.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
        for (int j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
    }
    return c;
}

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j)));
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j) - b(i, j)));
    return m;
}

} // namespace kefdr
