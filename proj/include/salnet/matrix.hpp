#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace salnet {

using Vector = std::vector<double>;

// Dense row-major matrix. Shape is fixed at construction.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    std::vector<double>& data_vector() { return data_; }
    const std::vector<double>& data_vector() const { return data_; }

    Matrix& operator*=(double c);
    friend Matrix operator*(Matrix m, double c) { return m *= c; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Fixed summation order (four interleaved partial sums), so results are
// reproducible bit for bit.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);
double squared_norm(std::span<const double> v);
double rms(std::span<const double> v);

// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

// W x
Vector matvec(const Matrix& w, std::span<const double> x);
void matvec_into(const Matrix& w, std::span<const double> x, std::span<double> out);
// W^T y
Vector matvec_transposed(const Matrix& w, std::span<const double> y);
void matvec_transposed_into(const Matrix& w, std::span<const double> y, std::span<double> out);
// W += a * u v^T
void add_outer(Matrix& w, double a, std::span<const double> u, std::span<const double> v);

// Euclidean norm of each row.
Vector row_norms(const Matrix& w);

}  // namespace salnet
