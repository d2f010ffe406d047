#include "deduce/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deduce/errors.hpp"

namespace deduce {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw Error("from_rows: ragged initializer");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Matrix::fill(double value) {
    for (double& v : data_) v = value;
}

void Matrix::scale(double factor) {
    for (double& v : data_) v *= factor;
}

void Matrix::add(const Matrix& other) {
    if (!same_shape(other)) throw Error("Matrix::add: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

void Matrix::add_scaled(const Matrix& other, double factor) {
    if (!same_shape(other)) throw Error("Matrix::add_scaled: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += factor * other.data_[i];
}

void Matrix::hadamard(const Matrix& other) {
    if (!same_shape(other)) throw Error("Matrix::hadamard: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] *= other.data_[i];
}

double Matrix::sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw Error("matmul: inner dimensions disagree");
    Matrix c(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = a.row(i);
        double* crow = c.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            if (av == 0.0) continue;
            const double* brow = b.row(p);
            for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw Error("matmul_tn: row counts disagree");
    Matrix c(a.cols(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t p = 0; p < n; ++p) {
        const double* arow = a.row(p);
        const double* brow = b.row(p);
        for (std::size_t i = 0; i < k; ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            double* crow = c.row(i);
            for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw Error("matmul_nt: column counts disagree");
    Matrix c(a.rows(), b.rows());
    const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = a.row(i);
        double* crow = c.row(i);
        for (std::size_t j = 0; j < m; ++j) {
            const double* brow = b.row(j);
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
            crow[j] = s;
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

std::vector<double> col_sums(const Matrix& a) {
    std::vector<double> s(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* row = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) s[j] += row[j];
    }
    return s;
}

std::vector<double> col_means(const Matrix& a) {
    std::vector<double> s = col_sums(a);
    if (a.rows() > 0) {
        for (double& v : s) v /= static_cast<double>(a.rows());
    }
    return s;
}

std::vector<double> row_norms(const Matrix& a) {
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* row = a.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += row[j] * row[j];
        out[i] = std::sqrt(s);
    }
    return out;
}

Matrix take_rows(const Matrix& a, const std::vector<std::size_t>& index) {
    Matrix out(index.size(), a.cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] >= a.rows()) throw Error("take_rows: index out of range");
        const double* src = a.row(index[i]);
        double* dst = out.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) dst[j] = src[j];
    }
    return out;
}

Matrix take_cols(const Matrix& a, std::size_t start, std::size_t width) {
    if (start + width > a.cols()) throw Error("take_cols: slice out of range");
    Matrix out(a.rows(), width);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* src = a.row(i) + start;
        double* dst = out.row(i);
        for (std::size_t j = 0; j < width; ++j) dst[j] = src[j];
    }
    return out;
}

void check_shape(const Matrix& a, std::size_t rows, std::size_t cols, const char* what) {
    if (a.rows() != rows || a.cols() != cols) {
        throw Error(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                    std::to_string(cols) + ", got " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
    }
}

}  // namespace deduce
