#pragma once

// Direct solvers for the SPD and saddle-point systems produced by the
// schemes. Backed by Eigen (SimplicialLDLT / SparseLU); every solve
// verifies its own residual bound instead of leaving that to callers.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcrs/sparse.hpp"

namespace mcrs {

class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Eigen::SparseMatrix<double> to_eigen(const CsrMatrix& m) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(m.nonzeros());
    for (int r = 0; r < m.rows(); ++r)
        for (int k = m.row_offsets()[r]; k < m.row_offsets()[static_cast<std::size_t>(r) + 1]; ++k)
            t.emplace_back(r, m.col_indices()[static_cast<std::size_t>(k)],
                           m.values()[static_cast<std::size_t>(k)]);
    Eigen::SparseMatrix<double> out(m.rows(), m.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

inline void check_residual(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& b, double tol, const char* what) {
    const double scale = b.norm();
    const double res = (a * x - b).norm();
    if (!(res <= tol * std::max(scale, 1e-30)) && !(scale == 0.0 && res == 0.0))
        throw SolverError(std::string(what) + ": residual " + std::to_string(res) +
                          " exceeds tolerance (rhs norm " + std::to_string(scale) + ")");
}

}  // namespace detail

/// Cholesky-type factorization for symmetric positive definite systems.
class SpdSolver {
  public:
    explicit SpdSolver(const CsrMatrix& m) : matrix_(detail::to_eigen(m)) {
        solver_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
        solver_->compute(matrix_);
        if (solver_->info() != Eigen::Success)
            throw SolverError("SpdSolver: factorization failed (matrix not SPD?)");
    }

    std::vector<double> solve(std::span<const double> rhs, double tol) const {
        if (static_cast<int>(rhs.size()) != matrix_.rows())
            throw std::invalid_argument("SpdSolver::solve: dimension mismatch");
        Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), matrix_.rows());
        Eigen::VectorXd x = solver_->solve(b);
        detail::check_residual(matrix_, x, b, tol, "SpdSolver");
        return {x.data(), x.data() + x.size()};
    }

    int dimension() const { return static_cast<int>(matrix_.rows()); }

  private:
    Eigen::SparseMatrix<double> matrix_;
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> solver_;
};

/// Sparse LU with pivoting for general square systems (pressure Gram
/// matrices with gauge rows and similar bordered systems).
class LuSolver {
  public:
    explicit LuSolver(const CsrMatrix& m) : matrix_(detail::to_eigen(m)) {
        factorize();
    }
    explicit LuSolver(Eigen::SparseMatrix<double> m) : matrix_(std::move(m)) { factorize(); }

    std::vector<double> solve(std::span<const double> rhs, double tol) const {
        if (static_cast<int>(rhs.size()) != matrix_.rows())
            throw std::invalid_argument("LuSolver::solve: dimension mismatch");
        Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), matrix_.rows());
        Eigen::VectorXd x = solver_->solve(b);
        detail::check_residual(matrix_, x, b, tol, "LuSolver");
        return {x.data(), x.data() + x.size()};
    }

  private:
    void factorize() {
        matrix_.makeCompressed();
        solver_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        solver_->compute(matrix_);
        if (solver_->info() != Eigen::Success)
            throw SolverError("LuSolver: factorization failed (singular system?)");
    }

    Eigen::SparseMatrix<double> matrix_;
    std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> solver_;
};

/// Monolithic saddle-point system
///
///   K u - B^T p = r_u   (velocity dofs in `mask` pinned to zero)
///   B u         = r_c
///   Z^T p       = 0     (pressure zero-mean gauge rows)
///
/// assembled once in the symmetric bordered form and factorized with
/// sparse LU; the factorization is reused across time steps.
class SaddleSolver {
  public:
    SaddleSolver(const CsrMatrix& k, const CsrMatrix& b,
                 const std::vector<std::vector<double>>& gauges,
                 std::span<const std::uint8_t> mask)
        : nv_(k.rows()), np_(b.rows()), ng_(static_cast<int>(gauges.size())) {
        if (k.cols() != nv_ || b.cols() != nv_ || static_cast<int>(mask.size()) != nv_)
            throw std::invalid_argument("SaddleSolver: block dimension mismatch");
        if (np_ > 0 && ng_ == 0)
            throw SolverError(
                "SaddleSolver: pressure block without a zero-mean gauge row is singular");
        const int dim = nv_ + np_ + ng_;
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(k.nonzeros() + 2 * b.nonzeros() + 2 * static_cast<std::size_t>(ng_ * np_) + static_cast<std::size_t>(nv_));
        for (int r = 0; r < nv_; ++r) {
            if (mask[static_cast<std::size_t>(r)]) {
                t.emplace_back(r, r, 1.0);
                continue;
            }
            for (int x = k.row_offsets()[r]; x < k.row_offsets()[static_cast<std::size_t>(r) + 1]; ++x) {
                const int c = k.col_indices()[static_cast<std::size_t>(x)];
                if (!mask[static_cast<std::size_t>(c)])
                    t.emplace_back(r, c, k.values()[static_cast<std::size_t>(x)]);
            }
        }
        for (int q = 0; q < np_; ++q)
            for (int x = b.row_offsets()[q]; x < b.row_offsets()[static_cast<std::size_t>(q) + 1]; ++x) {
                const int v = b.col_indices()[static_cast<std::size_t>(x)];
                if (mask[static_cast<std::size_t>(v)]) continue;
                const double val = b.values()[static_cast<std::size_t>(x)];
                t.emplace_back(v, nv_ + q, -val);   // -B^T in the momentum rows
                t.emplace_back(nv_ + q, v, -val);   // -B in the constraint rows
            }
        for (int g = 0; g < ng_; ++g) {
            if (static_cast<int>(gauges[static_cast<std::size_t>(g)].size()) != np_)
                throw std::invalid_argument("SaddleSolver: gauge vector size mismatch");
            for (int q = 0; q < np_; ++q) {
                const double z = gauges[static_cast<std::size_t>(g)][static_cast<std::size_t>(q)];
                if (z == 0.0) continue;
                t.emplace_back(nv_ + q, nv_ + np_ + g, z);
                t.emplace_back(nv_ + np_ + g, nv_ + q, z);
            }
        }
        matrix_.resize(dim, dim);
        matrix_.setFromTriplets(t.begin(), t.end());
        matrix_.makeCompressed();
        mask_.assign(mask.begin(), mask.end());
        mean_ = gauges.empty() ? std::vector<double>() : gauges.front();
        solver_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        solver_->compute(matrix_);
        if (solver_->info() != Eigen::Success)
            throw SolverError(
                "SaddleSolver: factorization failed; check the inf-sup pair and zero-mean gauge");
    }

    struct Result {
        std::vector<double> velocity;
        std::vector<double> pressure;
        double residual = 0.0;
    };

    Result solve(std::span<const double> rhs_u, std::span<const double> rhs_c, double tol) const {
        if (static_cast<int>(rhs_u.size()) != nv_ || static_cast<int>(rhs_c.size()) != np_)
            throw std::invalid_argument("SaddleSolver::solve: rhs dimension mismatch");
        Eigen::VectorXd b = Eigen::VectorXd::Zero(nv_ + np_ + ng_);
        for (int i = 0; i < nv_; ++i)
            b[i] = mask_[static_cast<std::size_t>(i)] ? 0.0 : rhs_u[static_cast<std::size_t>(i)];
        for (int q = 0; q < np_; ++q) b[nv_ + q] = -rhs_c[static_cast<std::size_t>(q)];
        Eigen::VectorXd x = solver_->solve(b);
        detail::check_residual(matrix_, x, b, tol, "SaddleSolver");
        Result out;
        out.velocity.assign(x.data(), x.data() + nv_);
        out.pressure.assign(x.data() + nv_, x.data() + nv_ + np_);
        out.residual = (matrix_ * x - b).norm();
        if (!mean_.empty()) {
            double mean = 0.0, pn = 0.0;
            for (int q = 0; q < np_; ++q) {
                mean += mean_[static_cast<std::size_t>(q)] * out.pressure[static_cast<std::size_t>(q)];
                pn += out.pressure[static_cast<std::size_t>(q)] * out.pressure[static_cast<std::size_t>(q)];
            }
            if (!(std::abs(mean) <= tol * std::max(1.0, std::sqrt(pn))))
                throw SolverError("SaddleSolver: pressure mean constraint violated");
        }
        return out;
    }

    int velocity_dim() const { return nv_; }
    int pressure_dim() const { return np_; }

  private:
    int nv_, np_, ng_;
    Eigen::SparseMatrix<double> matrix_;
    std::vector<std::uint8_t> mask_;
    std::vector<double> mean_;
    std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> solver_;
};

}  // namespace mcrs
