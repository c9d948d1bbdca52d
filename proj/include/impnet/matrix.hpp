#pragma once

// Dense row-major matrices and the handful of complex vector helpers the
// network code needs. Sizes stay in the low thousands at most, so nothing
// here is blocked or vectorised.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace impnet {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

template <typename T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    const T& operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> data() const noexcept { return data_; }

    std::vector<T> column(std::size_t j) const {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_column(std::size_t j, std::span<const T> values) {
        assert(values.size() == rows_);
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using ComplexMatrix = Matrix<Complex>;
using RealMatrix = Matrix<double>;

template <typename T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
    assert(a.cols() == b.rows());
    Matrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

template <typename T>
std::vector<T> operator*(const Matrix<T>& a, std::span<const T> x) {
    assert(a.cols() == x.size());
    std::vector<T> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T acc{};
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

template <typename T>
std::vector<T> operator*(const Matrix<T>& a, const std::vector<T>& x) {
    return a * std::span<const T>(x);
}

template <typename T>
Matrix<T> transpose(const Matrix<T>& a) {
    Matrix<T> t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

inline ComplexMatrix conj(const ComplexMatrix& a) {
    ComplexMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = std::conj(a(i, j));
    return c;
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) { return conj(transpose(a)); }

template <typename T>
double frobenius_norm(const Matrix<T>& a) {
    double s = 0.0;
    for (const T& x : a.data()) s += std::norm(x);
    return std::sqrt(s);
}

template <typename T>
double max_abs(const Matrix<T>& a) {
    double m = 0.0;
    for (const T& x : a.data()) m = std::max(m, std::abs(x));
    return m;
}

template <typename T>
bool all_finite(const Matrix<T>& a) {
    return std::all_of(a.data().begin(), a.data().end(), [](const T& x) {
        if constexpr (std::is_same_v<T, Complex>)
            return std::isfinite(x.real()) && std::isfinite(x.imag());
        else
            return std::isfinite(x);
    });
}

/// Hermitian inner product (x, y) = x^H y.
inline Complex dot(std::span<const Complex> x, std::span<const Complex> y) {
    assert(x.size() == y.size());
    Complex acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

/// Bilinear product x^T y, no conjugation.
inline Complex bilinear(std::span<const Complex> x, std::span<const Complex> y) {
    assert(x.size() == y.size());
    Complex acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

inline double norm2(std::span<const Complex> x) {
    double s = 0.0;
    for (const Complex& v : x) s += std::norm(v);
    return std::sqrt(s);
}

inline ComplexVector conj(std::span<const Complex> x) {
    ComplexVector c(x.size());
    std::transform(x.begin(), x.end(), c.begin(), [](Complex v) { return std::conj(v); });
    return c;
}

/// Constant unit vector (1, ..., 1)/sqrt(n).
inline ComplexVector constant_unit_vector(std::size_t n) {
    return ComplexVector(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
}

}  // namespace impnet
