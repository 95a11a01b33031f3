#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>

#include "porodg/dg.hpp"

namespace porodg {

enum class PreconditionerKind { Complete, Incomplete, None };

struct SolverConfig {
  double abs_tol = 1e-12;
  int restart = 50;
  int max_iterations = 1000;
  /// Iterations taken even when the initial residual already meets abs_tol (unless it is
  /// exactly zero). With a complete factorization one iteration reaches roundoff.
  int min_iterations = 1;
  PreconditionerKind preconditioner = PreconditionerKind::Complete;
  int ilu_level = 1;

  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

std::string to_string(PreconditionerKind k);
PreconditionerKind preconditioner_from_string(const std::string& s);

/// Applies z -> M^{-1} z for an approximation M of A.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual Eigen::VectorXd apply(const Eigen::VectorXd& r) const = 0;
};

/// Throws FactorizationError on structural or numerical singularity.
std::unique_ptr<Preconditioner> factorize(const SparseMatrix& A, PreconditionerKind kind, int ilu_level = 1);

struct SolveResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double final_residual = 0.0;
  /// Stopped above abs_tol because the residual reached the double-precision floor
  /// (see attainable_residual).
  bool floor_limited = false;
};

/// b - A x with extended-precision row accumulation.
Eigen::VectorXd residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b);
double residual_norm(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Roundoff floor of ||b - A x||_2 for x stored in double: 32 eps || |A| |x| + |b| ||_2.
double attainable_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Right-preconditioned restarted GMRES stopped on ||b - A x||_2 <= abs_tol.
/// A restart cycle that fails to reduce the residual ends the solve: with
/// floor_limited set if the residual is within attainable_residual, otherwise with
/// NonConvergence. Also throws NonConvergence on breakdown or when max_iterations is reached.
SolveResult gmres(const SparseMatrix& A, const Eigen::VectorXd& b, const Preconditioner& M, const SolverConfig& cfg,
                  const Eigen::VectorXd* x0 = nullptr);

SolveResult solve(const SparseMatrix& A, const Eigen::VectorXd& b, const SolverConfig& cfg);

}  // namespace porodg
