#pragma once

#include <cstddef>
#include <vector>

#include "fgrnn/errors.hpp"

namespace fgrnn {

// Minimal row-major dense matrix of doubles. The model is small enough
// (26x26 at most) that plain loops beat pulling in a linear algebra library.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    bool operator==(const Matrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) throw DimensionMismatch("ragged row lengths");
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

// y = M * x
inline std::vector<double> matvec(const Matrix& m, const std::vector<double>& x) {
    if (x.size() != m.cols()) throw DimensionMismatch("matvec: size mismatch");
    std::vector<double> y(m.rows(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) acc += m(r, c) * x[c];
        y[r] = acc;
    }
    return y;
}

// y = M^T * x
inline std::vector<double> matvec_t(const Matrix& m, const std::vector<double>& x) {
    if (x.size() != m.rows()) throw DimensionMismatch("matvec_t: size mismatch");
    std::vector<double> y(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) y[c] += m(r, c) * x[r];
    return y;
}

// M += a * b^T
inline void add_outer(Matrix& m, const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != m.rows() || b.size() != m.cols())
        throw DimensionMismatch("add_outer: size mismatch");
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) += a[r] * b[c];
}

}  // namespace fgrnn
