#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "porodg/constitutive.hpp"
#include "porodg/dg.hpp"
#include "porodg/linsolve.hpp"
#include "porodg/mesh.hpp"

namespace porodg {

/// t_0 = 0, t_1 = tau0, t_n = t_1 + (n - 1) tau.
struct TimeGrid {
  double tau0 = 0.01;  // s
  double tau = 1.0;    // s
  double T = 1.0;      // s

  void validate() const;
  /// Index of the last time level, N = 1 + ceil((T - t_1) / tau).
  std::size_t num_steps() const;
  double time(std::size_t n) const;
  bool operator==(const TimeGrid&) const = default;
};

struct SimulationState {
  std::size_t n = 0;
  double t = 0.0;
  DGScalarField pw, po;
  DGScalarField pw_prev, po_prev;
  DGVectorField u, u_prev;
  bool has_lag = false;
};

/// Everything that defines one simulation apart from the initial state.
struct Problem {
  std::shared_ptr<const Mesh> mesh;
  MaterialField materials;
  PhysicalParams physics;
  DiscretizationParams disc;
  SolverConfig solver;
  TimeGrid grid;
  FlowPhaseData wetting;
  FlowPhaseData nonwetting;
  MechanicsData mechanics;
  /// Solve each sub-step for the increment with symmetric diagonal scaling; the residual
  /// threshold then applies to the scaled increment system.
  bool jacobi_scaling = true;
  /// Pressure unit (Pa) of the flow increment unknowns. The absolute residual threshold is
  /// unit-dependent; the double-precision floor is about 1e-16 times the scaled increment.
  double pressure_unit = 1.0;
};

struct SubstepStats {
  std::size_t solves = 0;
  int max_iterations = 0;
  long total_iterations = 0;
  double max_residual = 0.0;
  std::size_t factorizations = 0;
  /// Solves that stopped at the roundoff floor above abs_tol.
  std::size_t floor_limited = 0;
};

struct RunStats {
  SubstepStats wetting, nonwetting, displacement;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
};

struct SubstepResult {
  Eigen::VectorXd x;
  SolveResult solve;
};

/// Initial data as spatial functions.
struct InitialData {
  std::function<double(const Vec3&)> pw;
  std::function<double(const Vec3&)> po;
  std::function<Vec3(const Vec3&)> u;
  /// Per-element overrides for data that jumps across material interfaces.
  ElementFunction pw_elem;
  ElementFunction po_elem;
};

class Simulation {
 public:
  explicit Simulation(Problem problem);

  const Problem& problem() const { return problem_; }
  const Mesh& mesh() const { return *problem_.mesh; }
  const RunStats& stats() const { return stats_; }

  /// L2 projections of the initial data; lagged fields unset.
  SimulationState initialize(const InitialData& init) const;
  /// Startup solves with tau0 giving the state at n = 1.
  SimulationState startup_step(const SimulationState& s0);
  /// Steps 1-3 from n >= 1 to n + 1.
  SimulationState step(const SimulationState& s);

  /// Runs to the final time. Snapshots are deep copies at the completed step nearest to each
  /// requested time, in request order. on_step sees every completed state.
  std::vector<SimulationState> run(const InitialData& init, const std::vector<double>& snapshot_times,
                                   const std::function<void(const SimulationState&)>& on_step = {});

  // Sub-steps with explicit inputs. With lagged == current values the time-lag terms vanish,
  // which is how the startup solves reuse them.
  SubstepResult wetting_substep(const DGScalarField& pw_n, const DGScalarField& po_n, const DGScalarField& po_nm1,
                                const DGVectorField& u_n, const DGVectorField& u_nm1, double tau, double t_next);
  SubstepResult nonwetting_substep(const DGScalarField& pw_n, const DGScalarField& po_n,
                                   const DGScalarField& pw_next, const DGVectorField& u_n,
                                   const DGVectorField& u_nm1, double tau, double t_next);
  /// stabilized = false drops the gamma terms (startup form).
  SubstepResult displacement_substep(const DGScalarField& pw_next, const DGScalarField& po_next,
                                     const DGVectorField& u_n, const DGVectorField& u_nm1, double tau,
                                     double t_next, bool stabilized);

  /// Truncated (or raw, if the cut-off is disabled) saturation at every element node.
  DGScalarField saturation_field(const DGScalarField& pw, const DGScalarField& po) const;

 private:
  struct CachedSystem;

  void prepare(CachedSystem& sys, const SparseMatrix& A, SubstepStats& stats, bool keep_matrix);
  SubstepResult solve_system(const SparseMatrix& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                             SubstepStats& stats, CachedSystem* cache);
  /// Same, given the residual r0 = b - A x0 directly.
  SubstepResult solve_residual(const SparseMatrix& A, const Eigen::VectorXd& r0, const Eigen::VectorXd& x0,
                               SubstepStats& stats, double unit);
  SubstepResult solve_increment(const CachedSystem& sys, const Eigen::VectorXd& r0, const Eigen::VectorXd& x0,
                                SubstepStats& stats, double unit);
  Eigen::VectorXd equivalent_pressure_load(const DGScalarField& pw, const DGScalarField& po) const;

  Problem problem_;
  RunStats stats_;
  std::shared_ptr<CachedSystem> elasticity_cache_;
  double elasticity_cache_tau_ = -1.0;
};

/// Pointwise saturation state at a quadrature point.
SaturationPoint saturation_at(const PointContext& p, const DGScalarField& pw, const DGScalarField& po,
                              const MaterialField& materials, const PhysicalParams& params);

}  // namespace porodg
