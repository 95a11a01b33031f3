#include "porodg/linsolve.hpp"

#include <cstdio>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "porodg/errors.hpp"

namespace porodg {

void SolverConfig::validate() const {
  if (!(abs_tol > 0.0)) throw InvalidArgument("abs_tol must be positive");
  if (restart < 1) throw InvalidArgument("restart length must be >= 1");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  if (min_iterations < 0 || min_iterations > max_iterations)
    throw InvalidArgument("min_iterations must be in [0, max_iterations]");
  if (ilu_level < 0) throw InvalidArgument("ILU level must be >= 0");
}

std::string to_string(PreconditionerKind k) {
  switch (k) {
    case PreconditionerKind::Complete: return "complete";
    case PreconditionerKind::Incomplete: return "incomplete";
    case PreconditionerKind::None: return "none";
  }
  return "none";
}

PreconditionerKind preconditioner_from_string(const std::string& s) {
  if (s == "complete") return PreconditionerKind::Complete;
  if (s == "incomplete") return PreconditionerKind::Incomplete;
  if (s == "none") return PreconditionerKind::None;
  throw InvalidArgument("unknown preconditioner '" + s + "'");
}

namespace {

class IdentityPreconditioner final : public Preconditioner {
 public:
  Eigen::VectorXd apply(const Eigen::VectorXd& r) const override { return r; }
};

class CompleteLU final : public Preconditioner {
 public:
  explicit CompleteLU(const SparseMatrix& A) : a_(A) {
    lu_.analyzePattern(a_);
    lu_.factorize(a_);
    if (lu_.info() != Eigen::Success) throw FactorizationError("sparse LU failed: " + lu_.lastErrorMessage());
    // SparseLU does not always flag an exactly zero pivot.
    const double logdet = lu_.logAbsDeterminant();
    if (!std::isfinite(logdet)) throw FactorizationError("sparse LU: matrix is numerically singular");
  }
  Eigen::VectorXd apply(const Eigen::VectorXd& r) const override { return lu_.solve(r); }

 private:
  Eigen::SparseMatrix<double, Eigen::ColMajor, int> a_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>, Eigen::COLAMDOrdering<int>> lu_;
};

// ILU(k): symbolic levels of fill computed row by row (IKJ variant).
class IncompleteLU final : public Preconditioner {
 public:
  IncompleteLU(const SparseMatrix& A, int level) : n_(static_cast<int>(A.rows())) {
    std::vector<double> w(n_, 0.0);
    std::vector<int> lev(n_, std::numeric_limits<int>::max());
    lrow_.assign(n_ + 1, 0);
    urow_.assign(n_ + 1, 0);
    std::vector<std::vector<int>> ulev;  // fill levels of stored U rows
    ulev.reserve(n_);
    for (int i = 0; i < n_; ++i) {
      std::set<int> pattern;
      for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
        const int j = static_cast<int>(it.col());
        w[j] = it.value();
        lev[j] = 0;
        pattern.insert(j);
      }
      pattern.insert(i);
      if (lev[i] == std::numeric_limits<int>::max()) {
        lev[i] = 0;
        w[i] = 0.0;
      }
      for (auto it = pattern.begin(); it != pattern.end() && *it < i; ++it) {
        const int k = *it;
        const double pivot = uval_[udiag_[k]];
        const double f = w[k] / pivot;
        w[k] = f;
        for (int p = udiag_[k] + 1; p < urow_[k + 1]; ++p) {
          const int j = ucol_[p];
          const int nl = lev[k] + ulev[k][p - urow_[k]] + 1;
          if (lev[j] == std::numeric_limits<int>::max()) {
            if (nl > level) continue;
            lev[j] = nl;
            w[j] = 0.0;
            pattern.insert(j);
          } else {
            lev[j] = std::min(lev[j], nl);
          }
          w[j] -= f * uval_[p];
        }
      }
      std::vector<int> row_levels;
      for (int j : pattern) {
        if (j < i) {
          lcol_.push_back(j);
          lval_.push_back(w[j]);
        } else {
          if (j == i) {
            if (w[j] == 0.0 || !std::isfinite(w[j]))
              throw FactorizationError("incomplete LU: zero pivot in row " + std::to_string(i));
            udiag_.push_back(static_cast<int>(ucol_.size()));
          }
          ucol_.push_back(j);
          uval_.push_back(w[j]);
          row_levels.push_back(lev[j]);
        }
        w[j] = 0.0;
        lev[j] = std::numeric_limits<int>::max();
      }
      ulev.push_back(std::move(row_levels));
      lrow_[i + 1] = static_cast<int>(lcol_.size());
      urow_[i + 1] = static_cast<int>(ucol_.size());
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& r) const override {
    Eigen::VectorXd z = r;
    for (int i = 0; i < n_; ++i)
      for (int p = lrow_[i]; p < lrow_[i + 1]; ++p) z[i] -= lval_[p] * z[lcol_[p]];
    for (int i = n_ - 1; i >= 0; --i) {
      for (int p = udiag_[i] + 1; p < urow_[i + 1]; ++p) z[i] -= uval_[p] * z[ucol_[p]];
      z[i] /= uval_[udiag_[i]];
    }
    return z;
  }

 private:
  int n_;
  std::vector<int> lrow_, lcol_, urow_, ucol_, udiag_;
  std::vector<double> lval_, uval_;
};

}  // namespace

std::unique_ptr<Preconditioner> factorize(const SparseMatrix& A, PreconditionerKind kind, int ilu_level) {
  if (A.rows() != A.cols()) throw InvalidArgument("factorize: matrix is not square");
  switch (kind) {
    case PreconditionerKind::Complete: return std::make_unique<CompleteLU>(A);
    case PreconditionerKind::Incomplete: return std::make_unique<IncompleteLU>(A, ilu_level);
    case PreconditionerKind::None: return std::make_unique<IdentityPreconditioner>();
  }
  throw InvalidArgument("unknown preconditioner kind");
}

Eigen::VectorXd residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  if (A.cols() != x.size() || A.rows() != b.size()) throw InvalidArgument("residual: dimension mismatch");
  Eigen::VectorXd r(A.rows());
  for (Eigen::Index i = 0; i < A.outerSize(); ++i) {
    long double acc = b[i];
    for (SparseMatrix::InnerIterator it(A, i); it; ++it)
      acc -= static_cast<long double>(it.value()) * x[it.col()];
    r[i] = static_cast<double>(acc);
  }
  return r;
}

double residual_norm(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  return residual(A, x, b).norm();
}

double attainable_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  if (A.cols() != x.size() || A.rows() != b.size()) throw InvalidArgument("attainable_residual: dimension mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < A.outerSize(); ++i) {
    double row = std::abs(b[i]);
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) row += std::abs(it.value() * x[it.col()]);
    sum += row * row;
  }
  return 32.0 * std::numeric_limits<double>::epsilon() * std::sqrt(sum);
}

namespace {
std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}
}  // namespace

SolveResult gmres(const SparseMatrix& A, const Eigen::VectorXd& b, const Preconditioner& M, const SolverConfig& cfg,
                  const Eigen::VectorXd* x0) {
  cfg.validate();
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n) throw InvalidArgument("gmres: dimension mismatch");
  if (x0 && x0->size() != n) throw InvalidArgument("gmres: initial guess has wrong size");

  SolveResult res;
  res.x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = residual(A, res.x, b);
  double beta = r.norm();
  res.final_residual = beta;
  if (beta == 0.0 || (beta <= cfg.abs_tol && cfg.min_iterations == 0)) return res;

  const int m = cfg.restart;
  Eigen::MatrixXd V(n, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);

  while (res.iterations < cfg.max_iterations) {
    V.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    H.setZero();
    int j = 0;
    for (; j < m && res.iterations < cfg.max_iterations; ++j) {
      ++res.iterations;
      Eigen::VectorXd w = A * M.apply(V.col(j));
      for (int i = 0; i <= j; ++i) {  // modified Gram-Schmidt
        H(i, j) = V.col(i).dot(w);
        w -= H(i, j) * V.col(i);
      }
      const double hnext = w.norm();
      H(j + 1, j) = hnext;
      if (hnext > 0.0) V.col(j + 1) = w / hnext;
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double rho = std::hypot(H(j, j), H(j + 1, j));
      if (rho == 0.0) throw NonConvergence("gmres: breakdown", beta, res.iterations);
      cs[j] = H(j, j) / rho;
      sn[j] = H(j + 1, j) / rho;
      H(j, j) = rho;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if ((std::abs(g[j + 1]) <= cfg.abs_tol && res.iterations >= cfg.min_iterations) || hnext == 0.0) {
        ++j;
        break;
      }
    }
    const Eigen::VectorXd y =
        H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    res.x += M.apply(V.leftCols(j) * y);
    r = residual(A, res.x, b);
    const double prev = beta;
    beta = r.norm();
    res.final_residual = beta;
    if (beta <= cfg.abs_tol && res.iterations >= cfg.min_iterations) return res;
    if (std::isfinite(beta) && !(beta < prev) && beta <= attainable_residual(A, res.x, b)) {
      res.floor_limited = true;
      return res;
    }
    if (!std::isfinite(beta) || !(beta < prev))
      throw NonConvergence("gmres: stagnation, residual " + sci(beta), beta, res.iterations);
  }
  throw NonConvergence("gmres: maximum iterations reached, residual " + sci(beta), beta, res.iterations);
}

SolveResult solve(const SparseMatrix& A, const Eigen::VectorXd& b, const SolverConfig& cfg) {
  cfg.validate();
  const auto M = factorize(A, cfg.preconditioner, cfg.ilu_level);
  return gmres(A, b, *M, cfg, nullptr);
}

}  // namespace porodg
