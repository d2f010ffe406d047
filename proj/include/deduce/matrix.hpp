#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace deduce {

// Dense row-major matrix of doubles. The single numeric container shared by
// the data pipeline, the encoder kernels and the clustering code.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const;

    void fill(double value);
    void scale(double factor);
    void add(const Matrix& other);            // this += other
    void add_scaled(const Matrix& other, double factor);
    void hadamard(const Matrix& other);       // this *= other, entrywise

    double sum() const;
    double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// c = a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// c = a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

std::vector<double> col_sums(const Matrix& a);
std::vector<double> col_means(const Matrix& a);
std::vector<double> row_norms(const Matrix& a);

// Rows of `a` restricted to `index` order. Index values must be in range.
Matrix take_rows(const Matrix& a, const std::vector<std::size_t>& index);
Matrix take_cols(const Matrix& a, std::size_t start, std::size_t width);

void check_shape(const Matrix& a, std::size_t rows, std::size_t cols, const char* what);

}  // namespace deduce
