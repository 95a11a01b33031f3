#include "porodg/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "porodg/errors.hpp"

namespace porodg {

void TimeGrid::validate() const {
  if (!(tau0 > 0.0) || !(tau0 <= tau)) throw InvalidArgument("time steps must satisfy 0 < tau0 <= tau");
  if (!(T >= tau0)) throw InvalidArgument("final time must be >= tau0");
}

std::size_t TimeGrid::num_steps() const {
  validate();
  // Guard against (T - t_1) / tau landing a rounding error above an integer.
  const double r = (T - tau0) / tau;
  const double k = std::ceil(r - 1e-9 * std::max(1.0, r));
  return 1 + static_cast<std::size_t>(std::max(0.0, k));
}

double TimeGrid::time(std::size_t n) const {
  if (n == 0) return 0.0;
  return tau0 + static_cast<double>(n - 1) * tau;
}

SaturationPoint saturation_at(const PointContext& p, const DGScalarField& pw, const DGScalarField& po,
                              const MaterialField& materials, const PhysicalParams& params) {
  return saturation_point(pw.value(p.elem, p.bary), po.value(p.elem, p.bary), materials[p.elem].p_d, params);
}

struct Simulation::CachedSystem {
  Eigen::VectorXd d;
  SparseMatrix scaled;
  std::unique_ptr<Preconditioner> M;
  SparseMatrix A;
  bool valid = false;
};

Simulation::Simulation(Problem problem) : problem_(std::move(problem)) {
  if (!problem_.mesh) throw InvalidArgument("simulation needs a mesh");
  if (problem_.materials.size() != problem_.mesh->num_elements())
    throw InvalidArgument("material field does not cover the mesh");
  problem_.physics.validate();
  problem_.disc.validate();
  problem_.solver.validate();
  problem_.grid.validate();
  if (!(problem_.pressure_unit > 0.0)) throw InvalidArgument("pressure unit must be > 0");
  for (const auto& r : problem_.materials) r.validate();
}

SimulationState Simulation::initialize(const InitialData& init) const {
  const Mesh& m = mesh();
  SimulationState s;
  s.n = 0;
  s.t = 0.0;
  s.pw = init.pw_elem ? l2_project(m, init.pw_elem) : l2_project(m, init.pw);
  s.po = init.po_elem ? l2_project(m, init.po_elem) : l2_project(m, init.po);
  s.u = init.u ? l2_project_vector(m, init.u) : DGVectorField::zeros(m);
  return s;
}

namespace {

bool same(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a.array() == b.array()).all(); }

template <class F>
auto guarded(std::size_t step, const char* label, F&& f) {
  try {
    return f();
  } catch (const StepError&) {
    throw;
  } catch (const std::exception& e) {
    throw StepError("step " + std::to_string(step) + ", " + label + ": " + e.what(), step, label);
  }
}

void record(SubstepStats& st, const SolveResult& r) {
  ++st.solves;
  st.max_iterations = std::max(st.max_iterations, r.iterations);
  st.total_iterations += r.iterations;
  st.max_residual = std::max(st.max_residual, r.final_residual);
  if (r.floor_limited) ++st.floor_limited;
}

}  // namespace

void Simulation::prepare(CachedSystem& sys, const SparseMatrix& A, SubstepStats& stats, bool keep_matrix) {
  if (sys.valid) return;
  const Eigen::Index n = A.rows();
  sys.d = Eigen::VectorXd::Ones(n);
  if (problem_.jacobi_scaling) {
    const Eigen::VectorXd diag = A.diagonal();
    for (Eigen::Index i = 0; i < n; ++i)
      if (diag[i] != 0.0) sys.d[i] = 1.0 / std::sqrt(std::abs(diag[i]));
  }
  sys.scaled = sys.d.asDiagonal() * A * sys.d.asDiagonal();
  sys.scaled.makeCompressed();
  sys.M = factorize(sys.scaled, problem_.solver.preconditioner, problem_.solver.ilu_level);
  ++stats.factorizations;
  if (keep_matrix) sys.A = A;
  sys.valid = true;
}

SubstepResult Simulation::solve_system(const SparseMatrix& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                                       SubstepStats& stats, CachedSystem* cache) {
  CachedSystem local;
  CachedSystem& sys = cache ? *cache : local;
  prepare(sys, A, stats, cache != nullptr);
  return solve_increment(sys, residual(cache ? sys.A : A, x0, b), x0, stats, 1.0);
}

SubstepResult Simulation::solve_residual(const SparseMatrix& A, const Eigen::VectorXd& r0, const Eigen::VectorXd& x0,
                                         SubstepStats& stats, double unit) {
  CachedSystem sys;
  prepare(sys, A, stats, false);
  return solve_increment(sys, r0, x0, stats, unit);
}

SubstepResult Simulation::solve_increment(const CachedSystem& sys, const Eigen::VectorXd& r0,
                                          const Eigen::VectorXd& x0, SubstepStats& stats, double unit) {
  SubstepResult out;
  out.solve = gmres(sys.scaled, sys.d.cwiseProduct(r0) / unit, *sys.M, problem_.solver);
  out.x = x0 + unit * sys.d.cwiseProduct(out.solve.x);
  record(stats, out.solve);
  return out;
}

SubstepResult Simulation::wetting_substep(const DGScalarField& pw_n, const DGScalarField& po_n,
                                          const DGScalarField& po_nm1, const DGVectorField& u_n,
                                          const DGVectorField& u_nm1, double tau, double t_next) {
  const Mesh& m = mesh();
  const auto& mat = problem_.materials;
  const auto& phys = problem_.physics;
  const auto& disc = problem_.disc;
  auto sat = [&](const PointContext& p) { return saturation_at(p, pw_n, po_n, mat, phys); };
  auto storage = [&](const PointContext& p) {
    const RockProps& r = mat[p.elem];
    return storage_coefficients(sat(p), r.phi, r.p_d, phys);
  };
  const CoefficientField lam{[&](const PointContext& p) { return mobilities(sat(p).sw, phys).w * mat[p.elem].K; }, {}};
  const CoefficientField c1{[&](const PointContext& p) { return storage(p).c1; }, {}};

  const SparseMatrix mc1 = assemble_weighted_mass(m, c1, disc);
  const SparseMatrix A = SparseMatrix(mc1 / tau) + assemble_diffusion(m, lam, disc);
  // Residual at x0 = P_w^n; the storage term vanishes there.
  Eigen::VectorXd b = flow_residual(m, problem_.wetting, lam, disc, t_next, pw_n);
  if (!same(po_n.coeffs, po_nm1.coeffs)) {
    const CoefficientField c2{[&](const PointContext& p) { return storage(p).c2; }, {}};
    b -= assemble_weighted_mass(m, c2, disc) * (po_n.coeffs - po_nm1.coeffs) / tau;
  }
  if (!same(u_n.coeffs, u_nm1.coeffs)) {
    const CoefficientField s{[&](const PointContext& p) { return sat(p).sw; },
                             [&](const PointContext& p) {
                               return Vec3(sat(p).dsw_dpc_active *
                                           (po_n.gradient(m, p.elem) - pw_n.gradient(m, p.elem)));
                             }};
    b -= phys.alpha * (assemble_bu(m, s, disc) * (u_n.coeffs - u_nm1.coeffs)) / tau;
  }
  return solve_residual(A, b, pw_n.coeffs, stats_.wetting, problem_.pressure_unit);
}

SubstepResult Simulation::nonwetting_substep(const DGScalarField& pw_n, const DGScalarField& po_n,
                                             const DGScalarField& pw_next, const DGVectorField& u_n,
                                             const DGVectorField& u_nm1, double tau, double t_next) {
  const Mesh& m = mesh();
  const auto& mat = problem_.materials;
  const auto& phys = problem_.physics;
  const auto& disc = problem_.disc;
  auto sat = [&](const PointContext& p) { return saturation_at(p, pw_n, po_n, mat, phys); };
  auto storage = [&](const PointContext& p) {
    const RockProps& r = mat[p.elem];
    return storage_coefficients(sat(p), r.phi, r.p_d, phys);
  };
  const CoefficientField lam{[&](const PointContext& p) { return mobilities(sat(p).sw, phys).o * mat[p.elem].K; }, {}};
  const CoefficientField c3{[&](const PointContext& p) { return storage(p).c3; }, {}};

  const SparseMatrix mc3 = assemble_weighted_mass(m, c3, disc);
  const SparseMatrix A = SparseMatrix(mc3 / tau) + assemble_diffusion(m, lam, disc);
  Eigen::VectorXd b = flow_residual(m, problem_.nonwetting, lam, disc, t_next, po_n);
  if (!same(pw_next.coeffs, pw_n.coeffs)) {
    const CoefficientField c4{[&](const PointContext& p) { return storage(p).c4; }, {}};
    b -= assemble_weighted_mass(m, c4, disc) * (pw_next.coeffs - pw_n.coeffs) / tau;
  }
  if (!same(u_n.coeffs, u_nm1.coeffs)) {
    const CoefficientField so{[&](const PointContext& p) { return 1.0 - sat(p).sw; },
                              [&](const PointContext& p) {
                                return Vec3(-sat(p).dsw_dpc_active *
                                            (po_n.gradient(m, p.elem) - pw_n.gradient(m, p.elem)));
                              }};
    b -= phys.alpha * (assemble_bu(m, so, disc) * (u_n.coeffs - u_nm1.coeffs)) / tau;
  }
  return solve_residual(A, b, po_n.coeffs, stats_.nonwetting, problem_.pressure_unit);
}

Eigen::VectorXd Simulation::equivalent_pressure_load(const DGScalarField& pw, const DGScalarField& po) const {
  const Mesh& m = mesh();
  const auto& mat = problem_.materials;
  const auto& phys = problem_.physics;
  const CoefficientField peq{
      [&](const PointContext& p) {
        const double s = saturation_at(p, pw, po, mat, phys).sw;
        return s * pw.value(p.elem, p.bary) + (1.0 - s) * po.value(p.elem, p.bary);
      },
      [&](const PointContext& p) {
        const SaturationPoint sp = saturation_at(p, pw, po, mat, phys);
        const Vec3 gw = pw.gradient(m, p.elem), go = po.gradient(m, p.elem);
        const Vec3 gs = sp.dsw_dpc_active * (go - gw);
        return Vec3(sp.sw * gw + (1.0 - sp.sw) * go + (pw.value(p.elem, p.bary) - po.value(p.elem, p.bary)) * gs);
      }};
  return assemble_bp_load(m, peq, problem_.disc);
}

SubstepResult Simulation::displacement_substep(const DGScalarField& pw_next, const DGScalarField& po_next,
                                               const DGVectorField& u_n, const DGVectorField& u_nm1, double tau,
                                               double t_next, bool stabilized) {
  const Mesh& m = mesh();
  const auto& phys = problem_.physics;
  const auto& disc = problem_.disc;
  const double g = stabilized ? disc.gamma / tau : 0.0;

  std::shared_ptr<CachedSystem> cache;
  if (stabilized) {
    if (!elasticity_cache_ || elasticity_cache_tau_ != tau) {
      elasticity_cache_ = std::make_shared<CachedSystem>();
      elasticity_cache_tau_ = tau;
    }
    cache = elasticity_cache_;
  }
  SparseMatrix mass;
  if (g != 0.0) mass = assemble_vector_mass(m, CoefficientField::constant(1.0), disc);
  SparseMatrix A;
  if (!cache || !cache->valid) {
    A = assemble_elasticity(m, phys.lame_lambda, phys.lame_mu, disc);
    if (g != 0.0) A += g * mass;
  }
  Eigen::VectorXd b = assemble_rhs_elasticity(m, problem_.mechanics, phys.lame_mu, disc, t_next) -
                      equivalent_pressure_load(pw_next, po_next);
  if (g != 0.0) b += g * (mass * (2.0 * u_n.coeffs - u_nm1.coeffs));
  return solve_system(A, b, u_n.coeffs, stats_.displacement, cache.get());
}

SimulationState Simulation::startup_step(const SimulationState& s0) {
  if (s0.n != 0) throw InvalidArgument("startup step needs the initial state");
  const double tau0 = problem_.grid.tau0;
  const double t1 = problem_.grid.time(1);
  SimulationState s1;
  s1.n = 1;
  s1.t = t1;
  s1.pw.coeffs = guarded(1, "wetting pressure", [&] {
    return wetting_substep(s0.pw, s0.po, s0.po, s0.u, s0.u, tau0, t1).x;
  });
  s1.po.coeffs = guarded(1, "non-wetting pressure", [&] {
    return nonwetting_substep(s0.pw, s0.po, s1.pw, s0.u, s0.u, tau0, t1).x;
  });
  s1.u.coeffs = guarded(1, "displacement", [&] {
    return displacement_substep(s1.pw, s1.po, s0.u, s0.u, tau0, t1, false).x;
  });
  s1.pw_prev = s0.pw;
  s1.po_prev = s0.po;
  s1.u_prev = s0.u;
  s1.has_lag = true;
  ++stats_.steps;
  return s1;
}

SimulationState Simulation::step(const SimulationState& s) {
  if (!s.has_lag || s.n < 1) throw InvalidArgument("regular step needs lagged fields (n >= 1)");
  const double tau = problem_.grid.tau;
  const std::size_t n1 = s.n + 1;
  const double t = problem_.grid.time(n1);
  SimulationState next;
  next.n = n1;
  next.t = t;
  next.pw.coeffs = guarded(n1, "wetting pressure", [&] {
    return wetting_substep(s.pw, s.po, s.po_prev, s.u, s.u_prev, tau, t).x;
  });
  next.po.coeffs = guarded(n1, "non-wetting pressure", [&] {
    return nonwetting_substep(s.pw, s.po, next.pw, s.u, s.u_prev, tau, t).x;
  });
  next.u.coeffs = guarded(n1, "displacement", [&] {
    return displacement_substep(next.pw, next.po, s.u, s.u_prev, tau, t, true).x;
  });
  next.pw_prev = s.pw;
  next.po_prev = s.po;
  next.u_prev = s.u;
  next.has_lag = true;
  ++stats_.steps;
  return next;
}

std::vector<SimulationState> Simulation::run(const InitialData& init, const std::vector<double>& snapshot_times,
                                             const std::function<void(const SimulationState&)>& on_step) {
  const auto start = std::chrono::steady_clock::now();
  const TimeGrid& grid = problem_.grid;
  const std::size_t N = grid.num_steps();

  std::vector<std::size_t> wanted(snapshot_times.size());
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t n = 1; n <= N; ++n)
      if (std::abs(grid.time(n) - snapshot_times[i]) < std::abs(grid.time(best) - snapshot_times[i])) best = n;
    wanted[i] = best;
  }
  std::vector<SimulationState> snaps(snapshot_times.size());
  auto visit = [&](const SimulationState& s) {
    for (std::size_t i = 0; i < wanted.size(); ++i)
      if (wanted[i] == s.n) snaps[i] = s;
    if (on_step) on_step(s);
  };

  SimulationState s = initialize(init);
  visit(s);
  s = startup_step(s);
  visit(s);
  while (s.n < N) {
    s = step(s);
    visit(s);
  }
  stats_.wall_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return snaps;
}

DGScalarField Simulation::saturation_field(const DGScalarField& pw, const DGScalarField& po) const {
  DGScalarField s = DGScalarField::zeros(mesh());
  for (std::size_t e = 0; e < mesh().num_elements(); ++e)
    for (int k = 0; k < 4; ++k)
      s.coeffs[4 * e + k] =
          saturation_point(pw.coeffs[4 * e + k], po.coeffs[4 * e + k], problem_.materials[e].p_d, problem_.physics).sw;
  return s;
}

}  // namespace porodg
