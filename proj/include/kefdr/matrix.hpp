#ifndef KEFDR_MATRIX_HPP
#define KEFDR_MATRIX_HPP

#include <cstddef>
#include <vector>

namespace kefdr {

using Vector = std::vector<double>;

// Dense row-major matrix. Small sizes only (dimensions up to a few thousand).
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool all_finite() const;

    static Matrix identity(int n);

private:
    int rows_ = 0, cols_ = 0;
    Vector data_;
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
// X^T X, exactly symmetric by construction.
Matrix gram(const Matrix& x);
// A B A^T for symmetric results, mirrored to exact symmetry.
Matrix sandwich(const Matrix& a, const Matrix& b);

Vector matvec(const Matrix& a, const Vector& v);   // A v
Vector tmatvec(const Matrix& a, const Vector& v);  // A^T v

Matrix hcat(const Matrix& a, const Matrix& b);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

} // namespace kefdr

#endif
