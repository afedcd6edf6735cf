#pragma once

// Compressed sparse row storage with triplet assembly, the only matrix
// format crossing module boundaries.

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace mcrs {

struct Triplet {
    int row;
    int col;
    double value;
};

/// CSR matrix; column indices strictly increasing within each row.
class CsrMatrix {
  public:
    CsrMatrix() = default;
    CsrMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {}

    static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> t) {
        std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        CsrMatrix m(rows, cols);
        m.col_indices_.reserve(t.size());
        m.values_.reserve(t.size());
        for (std::size_t k = 0; k < t.size();) {
            const int r = t[k].row;
            const int c = t[k].col;
            if (r < 0 || r >= rows || c < 0 || c >= cols)
                throw std::out_of_range("CsrMatrix: triplet out of range");
            double v = 0.0;
            while (k < t.size() && t[k].row == r && t[k].col == c) v += t[k++].value;
            m.col_indices_.push_back(c);
            m.values_.push_back(v);
            ++m.row_offsets_[static_cast<std::size_t>(r) + 1];
        }
        for (int r = 0; r < rows; ++r)
            m.row_offsets_[static_cast<std::size_t>(r) + 1] +=
                m.row_offsets_[static_cast<std::size_t>(r)];
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nonzeros() const { return values_.size(); }
    const std::vector<int>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double value_at(int r, int c) const {
        for (int k = row_offsets_[r]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
            if (col_indices_[static_cast<std::size_t>(k)] == c)
                return values_[static_cast<std::size_t>(k)];
        return 0.0;
    }

    void multiply(std::span<const double> x, std::span<double> y) const {
        if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
            throw std::invalid_argument("CsrMatrix::multiply: dimension mismatch");
        for (int r = 0; r < rows_; ++r) {
            double acc = 0.0;
            for (int k = row_offsets_[r]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
                acc += values_[static_cast<std::size_t>(k)] *
                       x[static_cast<std::size_t>(col_indices_[static_cast<std::size_t>(k)])];
            y[static_cast<std::size_t>(r)] = acc;
        }
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(static_cast<std::size_t>(rows_));
        multiply(x, y);
        return y;
    }

    /// y = A^T x (used for the pressure-gradient term B^T p).
    std::vector<double> apply_transpose(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != rows_)
            throw std::invalid_argument("CsrMatrix::apply_transpose: dimension mismatch");
        std::vector<double> y(static_cast<std::size_t>(cols_), 0.0);
        for (int r = 0; r < rows_; ++r)
            for (int k = row_offsets_[r]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
                y[static_cast<std::size_t>(col_indices_[static_cast<std::size_t>(k)])] +=
                    values_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(r)];
        return y;
    }

    double quadratic_form(std::span<const double> x, std::span<const double> y) const {
        double acc = 0.0;
        for (int r = 0; r < rows_; ++r) {
            double row = 0.0;
            for (int k = row_offsets_[r]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
                row += values_[static_cast<std::size_t>(k)] *
                       y[static_cast<std::size_t>(col_indices_[static_cast<std::size_t>(k)])];
            acc += x[static_cast<std::size_t>(r)] * row;
        }
        return acc;
    }

    /// Plain-text triplet dump `i j value` for debugging.
    void dump_triplets(std::ostream& os) const {
        for (int r = 0; r < rows_; ++r)
            for (int k = row_offsets_[r]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
                os << r << " " << col_indices_[static_cast<std::size_t>(k)] << " "
                   << values_[static_cast<std::size_t>(k)] << "\n";
    }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_offsets_;
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

/// alpha*X + beta*Y with pattern union; operands must agree in shape.
inline CsrMatrix csr_add(double alpha, const CsrMatrix& x, double beta, const CsrMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw std::invalid_argument("csr_add: shape mismatch");
    std::vector<Triplet> t;
    t.reserve(x.nonzeros() + y.nonzeros());
    for (int r = 0; r < x.rows(); ++r)
        for (int k = x.row_offsets()[r]; k < x.row_offsets()[static_cast<std::size_t>(r) + 1]; ++k)
            t.push_back({r, x.col_indices()[static_cast<std::size_t>(k)],
                         alpha * x.values()[static_cast<std::size_t>(k)]});
    for (int r = 0; r < y.rows(); ++r)
        for (int k = y.row_offsets()[r]; k < y.row_offsets()[static_cast<std::size_t>(r) + 1]; ++k)
            t.push_back({r, y.col_indices()[static_cast<std::size_t>(k)],
                         beta * y.values()[static_cast<std::size_t>(k)]});
    return CsrMatrix::from_triplets(x.rows(), x.cols(), std::move(t));
}

}  // namespace mcrs
