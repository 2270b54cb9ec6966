#include "salnet/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace salnet {

namespace {

[[noreturn, gnu::noinline]] void mismatch(const char* what) {
    throw std::invalid_argument(std::string("dimension mismatch: ") + what);
}

inline void require(bool ok, const char* what) {
    if (!ok) [[unlikely]]
        mismatch(what);
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix& Matrix::operator*=(double c) {
    for (auto& x : data_) x *= c;
    return *this;
}

double dot(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "dot");
    const std::size_t n = a.size();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

double squared_norm(std::span<const double> v) { return dot(v, v); }

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double rms(std::span<const double> v) {
    if (v.empty()) return 0.0;
    return std::sqrt(dot(v, v) / static_cast<double>(v.size()));
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    require(x.size() == y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void matvec_into(const Matrix& w, std::span<const double> x, std::span<double> out) {
    require(w.cols() == x.size(), "matvec input");
    require(w.rows() == out.size(), "matvec output");
    for (std::size_t i = 0; i < w.rows(); ++i) out[i] = dot(w.row(i), x);
}

Vector matvec(const Matrix& w, std::span<const double> x) {
    Vector out(w.rows());
    matvec_into(w, x, out);
    return out;
}

void matvec_transposed_into(const Matrix& w, std::span<const double> y, std::span<double> out) {
    require(w.rows() == y.size(), "matvec_transposed input");
    require(w.cols() == out.size(), "matvec_transposed output");
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t cols = w.cols();
    const double* row = w.data().data();
    for (std::size_t i = 0; i < w.rows(); ++i, row += cols) {
        const double c = y[i];
        if (c == 0.0) continue;
        for (std::size_t k = 0; k < cols; ++k) out[k] += c * row[k];
    }
}

Vector matvec_transposed(const Matrix& w, std::span<const double> y) {
    Vector out(w.cols());
    matvec_transposed_into(w, y, out);
    return out;
}

void add_outer(Matrix& w, double a, std::span<const double> u, std::span<const double> v) {
    require(w.rows() == u.size() && w.cols() == v.size(), "add_outer");
    const std::size_t cols = w.cols();
    double* row = w.data().data();
    for (std::size_t i = 0; i < w.rows(); ++i, row += cols) {
        const double c = a * u[i];
        if (c == 0.0) continue;
        for (std::size_t k = 0; k < cols; ++k) row[k] += c * v[k];
    }
}

Vector row_norms(const Matrix& w) {
    Vector out(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) out[i] = norm(w.row(i));
    return out;
}

}  // namespace salnet
