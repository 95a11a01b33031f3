#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>

#include "porodg/errors.hpp"
#include "porodg/linsolve.hpp"

using namespace porodg;

namespace {

SparseMatrix sparse(const Eigen::MatrixXd& d) { return d.sparseView(); }

Eigen::MatrixXd random_nonsingular(int n, std::mt19937_64& rng, double density) {
  std::uniform_real_distribution<double> u(-1, 1), p(0, 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (p(rng) < density) a(i, j) = u(rng);
    a(i, i) += 2.0 + std::abs(u(rng)) + a.row(i).cwiseAbs().sum();
  }
  return a;
}

}  // namespace

TEST(Solve, IdentityInOneIteration) {
  const SparseMatrix a = sparse(Eigen::MatrixXd::Identity(10, 10));
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(10, -3, 5);
  const SolveResult r = solve(a, b, SolverConfig{});
  EXPECT_LE(r.iterations, 1);
  EXPECT_LT((r.x - b).norm(), 1e-14);
}

TEST(Solve, SmallSpdWithKnownInverse) {
  // tridiag(-1, 2, -1) of size 4 has inverse (1/5) min(i,j)(5 - max(i,j)) (1-based).
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    a(i, i) = 2;
    if (i > 0) a(i, i - 1) = a(i - 1, i) = -1;
  }
  Eigen::MatrixXd inv(4, 4);
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) inv(i - 1, j - 1) = std::min(i, j) * (5.0 - std::max(i, j)) / 5.0;
  const Eigen::VectorXd b(Eigen::Vector4d(1, -2, 0.5, 3));
  for (auto kind : {PreconditionerKind::Complete, PreconditionerKind::Incomplete, PreconditionerKind::None}) {
    SolverConfig cfg;
    cfg.preconditioner = kind;
    const SolveResult r = solve(sparse(a), b, cfg);
    EXPECT_LT((r.x - inv * b).norm(), 1e-12);
  }
}

TEST(Solve, MatchesDenseDirectSolve) {
  std::mt19937_64 rng(42);
  for (int n : {5, 37, 120, 200}) {
    const Eigen::MatrixXd a = random_nonsingular(n, rng, 0.05);
    std::normal_distribution<double> g;
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = g(rng);
    const Eigen::VectorXd ref = a.partialPivLu().solve(b);
    for (auto kind : {PreconditionerKind::Complete, PreconditionerKind::Incomplete, PreconditionerKind::None}) {
      SolverConfig cfg;
      cfg.preconditioner = kind;
      cfg.ilu_level = 0;
      const SolveResult r = solve(sparse(a), b, cfg);
      EXPECT_LT((r.x - ref).norm() / ref.norm(), 1e-9) << n;
      EXPECT_LE(r.final_residual, cfg.abs_tol);
      EXPECT_NEAR(r.final_residual, residual_norm(sparse(a), r.x, b), 1e-14);
    }
  }
}

TEST(Solve, CompleteFactorizationNeedsFewIterations) {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd a = random_nonsingular(150, rng, 0.1);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(150);
  const SolveResult r = solve(sparse(a), b, SolverConfig{});
  EXPECT_LE(r.iterations, 2);
}

TEST(Solve, Deterministic) {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd a = random_nonsingular(80, rng, 0.1);
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(80, 0, 1);
  SolverConfig cfg;
  cfg.preconditioner = PreconditionerKind::None;
  const SolveResult r1 = solve(sparse(a), b, cfg);
  const SolveResult r2 = solve(sparse(a), b, cfg);
  EXPECT_EQ(r1.iterations, r2.iterations);
  for (Eigen::Index i = 0; i < b.size(); ++i) EXPECT_EQ(r1.x[i], r2.x[i]);
}

TEST(Solve, MaxIterationsRaisesWithResidual) {
  std::mt19937_64 rng(10);
  const Eigen::MatrixXd a = random_nonsingular(60, rng, 0.3);
  SolverConfig cfg;
  cfg.preconditioner = PreconditionerKind::None;
  cfg.max_iterations = 2;
  try {
    solve(sparse(a), Eigen::VectorXd::Ones(60), cfg);
    FAIL() << "expected NonConvergence";
  } catch (const NonConvergence& e) {
    EXPECT_GT(e.final_residual, cfg.abs_tol);
    EXPECT_EQ(e.iterations, 2);
  }
}

TEST(Solve, DimensionMismatch) {
  const SparseMatrix a = sparse(Eigen::MatrixXd::Identity(3, 3));
  EXPECT_THROW(solve(a, Eigen::VectorXd::Ones(4), SolverConfig{}), InvalidArgument);
  SolverConfig bad;
  bad.abs_tol = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = SolverConfig{};
  bad.restart = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Factorize, DiagonalDivides) {
  const Eigen::Vector3d d(2, -4, 0.5);
  const SparseMatrix a = sparse(d.asDiagonal().toDenseMatrix());
  for (auto kind : {PreconditionerKind::Complete, PreconditionerKind::Incomplete}) {
    const auto m = factorize(a, kind);
    const Eigen::VectorXd z = m->apply(Eigen::Vector3d(1, 1, 1));
    EXPECT_NEAR((z - Eigen::Vector3d(0.5, -0.25, 2)).norm(), 0.0, 1e-15);
  }
}

TEST(Factorize, TwoByTwoInverse) {
  Eigen::Matrix2d a;
  a << 2, 1, 1, 2;
  Eigen::Matrix2d inv;
  inv << 2.0 / 3, -1.0 / 3, -1.0 / 3, 2.0 / 3;
  const auto m = factorize(sparse(a), PreconditionerKind::Complete);
  for (const Eigen::Vector2d& r : {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(3, -7)})
    EXPECT_NEAR((m->apply(r) - inv * r).norm(), 0.0, 1e-14);
}

TEST(Factorize, SingularRejected) {
  Eigen::Matrix3d a;
  a << 1, 2, 3, 2, 4, 6, 0, 1, 1;
  EXPECT_THROW(factorize(sparse(a), PreconditionerKind::Complete), FactorizationError);
  Eigen::Matrix3d z = Eigen::Matrix3d::Identity();
  z(1, 1) = 0;
  EXPECT_THROW(factorize(sparse(z), PreconditionerKind::Complete), FactorizationError);
  EXPECT_THROW(factorize(sparse(z), PreconditionerKind::Incomplete), FactorizationError);
  EXPECT_THROW(factorize(sparse(Eigen::MatrixXd::Ones(2, 3)), PreconditionerKind::Complete), InvalidArgument);
}

TEST(Factorize, FullLevelIluIsExact) {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd a = random_nonsingular(40, rng, 0.08);
  const auto m = factorize(sparse(a), PreconditionerKind::Incomplete, 40);
  const Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(40, -1, 1);
  EXPECT_LT((a * m->apply(r) - r).norm(), 1e-12);
}

TEST(Factorize, KindNames) {
  for (auto k : {PreconditionerKind::Complete, PreconditionerKind::Incomplete, PreconditionerKind::None})
    EXPECT_EQ(preconditioner_from_string(to_string(k)), k);
  EXPECT_THROW(preconditioner_from_string("amg"), InvalidArgument);
}

TEST(Solve, MinimumIterationsTakenFromAcceptableStart) {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd d = random_nonsingular(12, rng, 0.3);
  const SparseMatrix a = sparse(d);
  const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(12, -1, 1);
  const Eigen::VectorXd b = d * xs;
  Eigen::VectorXd x0 = xs;
  x0[3] += 1e-14;  // residual below abs_tol but nonzero
  const auto M = factorize(a, PreconditionerKind::Complete);
  SolverConfig cfg;
  cfg.abs_tol = 1e-10;
  EXPECT_EQ(gmres(a, b, *M, cfg, &x0).iterations, 1);
  cfg.min_iterations = 0;
  EXPECT_EQ(gmres(a, b, *M, cfg, &x0).iterations, 0);
}

TEST(Solve, ExactStartTakesNoIterations) {
  const SparseMatrix a = sparse(Eigen::MatrixXd::Identity(5, 5) * 2.0);
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(5, 4.0);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(5, 2.0);
  const auto M = factorize(a, PreconditionerKind::None);
  const SolveResult r = gmres(a, b, *M, SolverConfig{}, &x0);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.final_residual, 0.0);
}

TEST(Solve, RoundoffFloorEndsSolveWithFlag) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd d = random_nonsingular(30, rng, 0.2) * 1e8;
  const SparseMatrix a = sparse(d);
  const Eigen::VectorXd b = d * Eigen::VectorXd::Constant(30, 1e6);
  SolverConfig cfg;
  cfg.abs_tol = 1e-30;  // far below what double can represent at this scale
  const SolveResult r = solve(a, b, cfg);
  EXPECT_TRUE(r.floor_limited);
  EXPECT_LE(r.final_residual, attainable_residual(a, r.x, b));
  EXPECT_GT(r.final_residual, cfg.abs_tol);
}

TEST(Solve, NoFloorFlagWhenToleranceMet) {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd d = random_nonsingular(20, rng, 0.3);
  const SolveResult r = solve(sparse(d), Eigen::VectorXd::Ones(20), SolverConfig{});
  EXPECT_FALSE(r.floor_limited);
  EXPECT_LE(r.final_residual, 1e-12);
}

TEST(SolverConfigTest, MinimumIterationsValidated) {
  SolverConfig c;
  c.min_iterations = -1;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.min_iterations = c.max_iterations + 1;
  EXPECT_THROW(c.validate(), InvalidArgument);
}
