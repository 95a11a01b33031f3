#include "porodg/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "porodg/errors.hpp"

namespace porodg {

namespace {
constexpr double kLambda = 1.0;
constexpr double kMu = 0.6;
constexpr double kPd = 10.0;
}  // namespace

double ManufacturedCase::pw(const Vec3& x) { return std::sin(x.y()) + 5.0; }
double ManufacturedCase::po(const Vec3& x) { return std::cos(x.x()) + 25.0; }
Vec3 ManufacturedCase::u(const Vec3& x) { return {std::cos(x.x()), std::sin(x.y()), std::cos(x.z() + x.x())}; }
Vec3 ManufacturedCase::grad_pw(const Vec3& x) { return {0.0, std::cos(x.y()), 0.0}; }
Vec3 ManufacturedCase::grad_po(const Vec3& x) { return {-std::sin(x.x()), 0.0, 0.0}; }

Eigen::Matrix3d ManufacturedCase::grad_u(const Vec3& x) {
  const double s = std::sin(x.z() + x.x());
  Eigen::Matrix3d g;
  g << -std::sin(x.x()), 0, 0, 0, std::cos(x.y()), 0, -s, 0, -s;
  return g;
}

double ManufacturedCase::pc(const Vec3& x) { return po(x) - pw(x); }
double ManufacturedCase::sw(const Vec3& x) {
  const double r = kPd / pc(x);
  return r * r;
}

double ManufacturedCase::forcing_w(const Vec3& x) {
  const double s = sw(x), c = std::cos(x.y());
  return s * std::sin(x.y()) - 2.0 * s * c * c / pc(x);
}

double ManufacturedCase::forcing_o(const Vec3& x) {
  const double s = sw(x), sn = std::sin(x.x());
  return (1.0 - s) * std::cos(x.x()) - 2.0 * s * sn * sn / pc(x);
}

Vec3 ManufacturedCase::forcing_u(const Vec3& x) {
  const double cx = std::cos(x.x()), sy = std::sin(x.y()), czx = std::cos(x.z() + x.x());
  const Vec3 lap(cx, sy, 2.0 * czx);          // -Laplacian of u
  const Vec3 graddiv(cx + czx, sy, czx);      // -grad div u
  const Vec3 grad_pc(-std::sin(x.x()), -std::cos(x.y()), 0.0);
  // grad(s pw + (1 - s) po) = grad po + s grad pc for s = (pd / pc)^2.
  return kMu * lap + (kLambda + kMu) * graddiv + grad_po(x) + sw(x) * grad_pc;
}

PhysicalParams ManufacturedCase::physics() {
  PhysicalParams p;
  p.mu_w = p.mu_o = 1.0;
  p.inv_K_w = p.inv_K_o = p.inv_K_s = 0.1;
  p.lame_lambda = kLambda;
  p.lame_mu = kMu;
  p.alpha = 0.9;
  p.apply_cutoff = false;
  p.mobility = MobilityModel::Linear;
  return p;
}

RockProps ManufacturedCase::rock() { return RockProps{1.0, 0.3, kPd, 1}; }

DiscretizationParams ManufacturedCase::discretization() {
  DiscretizationParams d;
  d.sigma_p = 20.0;
  d.sigma_u = 14.0;
  d.eps_p = d.eps_u = -1;
  d.gamma = 10.0;
  return d;
}

TimeGrid ManufacturedCase::time_grid() { return TimeGrid{1e-2, 1.0, 5.0}; }

Problem ManufacturedCase::problem(long n, const DiscretizationParams& disc, const TimeGrid& grid,
                                  const SolverConfig& solver) {
  Box box;
  Mesh m = build_structured_tet_mesh(n, n, n, box);
  m = tag_boundary(
      std::move(m), [](const Vec3&) { return PressureTag::Dirichlet; },
      [](const Vec3&) { return DisplacementTag::Dirichlet; });
  Problem p;
  p.mesh = std::make_shared<const Mesh>(std::move(m));
  p.materials.assign(p.mesh->num_elements(), rock());
  p.physics = physics();
  p.disc = disc;
  p.solver = solver;
  p.grid = grid;
  p.wetting.source = [](const Vec3& x, double, int) { return forcing_w(x); };
  p.wetting.dirichlet = [](const Vec3& x, double, int) { return pw(x); };
  p.nonwetting.source = [](const Vec3& x, double, int) { return forcing_o(x); };
  p.nonwetting.dirichlet = [](const Vec3& x, double, int) { return po(x); };
  p.mechanics.body_force = [](const Vec3& x, double, int) { return forcing_u(x); };
  p.mechanics.dirichlet = [](const Vec3& x, double, int) { return u(x); };
  return p;
}

InitialData ManufacturedCase::initial_data() { return InitialData{&pw, &po, &u, {}, {}}; }

double convergence_rate(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) throw InvalidArgument("rates need positive errors");
  return std::log2(coarse / fine);
}

ErrorRow manufactured_errors(long n, const DiscretizationParams& disc, const TimeGrid& grid,
                             const SolverConfig& solver) {
  const auto start = std::chrono::steady_clock::now();
  Simulation sim(ManufacturedCase::problem(n, disc, grid, solver));
  SimulationState last;
  sim.run(ManufacturedCase::initial_data(), {}, [&](const SimulationState& s) {
    if (s.n == grid.num_steps()) last = s;
  });
  const Mesh& m = sim.mesh();
  ErrorRow r;
  r.h = 1.0 / static_cast<double>(n);
  r.steps = last.n;
  r.l2_w = l2_error(m, last.pw, &ManufacturedCase::pw);
  r.grad_w = broken_grad_error(m, last.pw, &ManufacturedCase::grad_pw);
  r.l2_o = l2_error(m, last.po, &ManufacturedCase::po);
  r.grad_o = broken_grad_error(m, last.po, &ManufacturedCase::grad_po);
  r.l2_u = l2_error(m, last.u, &ManufacturedCase::u);
  double g2 = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double e = broken_grad_error(m, last.u.component(c), [c](const Vec3& x) {
      return Vec3(ManufacturedCase::grad_u(x).row(c).transpose());
    });
    g2 += e * e;
  }
  r.grad_u = std::sqrt(g2);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

RateTable convergence_study(const std::vector<long>& ns, const DiscretizationParams& disc, const TimeGrid& grid,
                            const SolverConfig& solver) {
  RateTable t;
  for (long n : ns) t.rows.push_back(manufactured_errors(n, disc, grid, solver));
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
    const ErrorRow &a = t.rows[i], &b = t.rows[i + 1];
    const double k = std::log2(b.h > 0 ? a.h / b.h : 1.0);
    auto rate = [k](double ea, double eb) { return convergence_rate(ea, eb) / k; };
    t.rates.push_back({rate(a.l2_w, b.l2_w), rate(a.grad_w, b.grad_w), rate(a.l2_o, b.l2_o),
                       rate(a.grad_o, b.grad_o), rate(a.l2_u, b.l2_u), rate(a.grad_u, b.grad_u)});
  }
  return t;
}

std::string RateTable::to_csv() const {
  std::ostringstream os;
  os << "h,l2_w,rate_l2_w,grad_w,rate_grad_w,l2_o,rate_l2_o,grad_o,rate_grad_o,l2_u,rate_l2_u,grad_u,rate_grad_u\n";
  os.precision(6);
  os << std::scientific;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ErrorRow& r = rows[i];
    auto rate = [&](double Rates::*f) -> std::string {
      if (i == 0) return "";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", rates[i - 1].*f);
      return buf;
    };
    os << r.h << ',' << r.l2_w << ',' << rate(&Rates::l2_w) << ',' << r.grad_w << ',' << rate(&Rates::grad_w) << ','
       << r.l2_o << ',' << rate(&Rates::l2_o) << ',' << r.grad_o << ',' << rate(&Rates::grad_o) << ',' << r.l2_u
       << ',' << rate(&Rates::l2_u) << ',' << r.grad_u << ',' << rate(&Rates::grad_u) << '\n';
  }
  return os.str();
}

std::string RateTable::to_text() const {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-7s %-10s %-6s %-10s %-6s %-10s %-6s %-10s %-6s %-10s %-6s\n", "h", "|e_w|",
                "rate", "|grad e_w|", "rate", "|e_o|", "rate", "|grad e_o|", "rate", "|e_u|", "rate");
  os << buf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ErrorRow& r = rows[i];
    auto rate = [&](double Rates::*f) {
      if (i == 0) return std::string("-");
      char b[16];
      std::snprintf(b, sizeof b, "%.2f", rates[i - 1].*f);
      return std::string(b);
    };
    std::snprintf(buf, sizeof buf, "1/%-5.0f %-10.2e %-6s %-10.2e %-6s %-10.2e %-6s %-10.2e %-6s %-10.2e %-6s\n",
                  1.0 / r.h, r.l2_w, rate(&Rates::l2_w).c_str(), r.grad_w, rate(&Rates::grad_w).c_str(), r.l2_o,
                  rate(&Rates::l2_o).c_str(), r.grad_o, rate(&Rates::grad_o).c_str(), r.l2_u,
                  rate(&Rates::l2_u).c_str());
    os << buf;
  }
  return os.str();
}

std::optional<double> front_position(const Profile& p, double level) {
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double a = p[i].value, b = p[i + 1].value;
    if (a >= level && b < level) {
      const double w = (a - level) / (a - b);
      return p[i].s + w * (p[i + 1].s - p[i].s);
    }
  }
  return std::nullopt;
}

FrontReport front_checks(const std::vector<Profile>& profiles, double lo, double hi, double tolerance,
                         double level) {
  FrontReport r;
  bool first = true;
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const Profile& p = profiles[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double v = p[i].value;
      if (first) {
        r.min_value = r.max_value = v;
        first = false;
      }
      r.min_value = std::min(r.min_value, v);
      r.max_value = std::max(r.max_value, v);
      if (v < lo || v > hi) {
        if (r.bounded) {
          std::ostringstream os;
          os << "profile " << k << ": value " << v << " at s=" << p[i].s << " outside [" << lo << ", " << hi << "]";
          r.failures.push_back(os.str());
        }
        r.bounded = false;
      }
      if (i > 0) {
        const double rise = v - p[i - 1].value;
        if (rise > r.max_violation) r.max_violation = rise;
        if (rise >= tolerance) {
          std::ostringstream os;
          os << "profile " << k << ": increase of " << rise << " at s=" << p[i].s;
          r.failures.push_back(os.str());
          r.monotone = false;
        }
      }
    }
    r.fronts.push_back(front_position(p, level));
  }
  // A profile that never drops below the level has its front at the far end.
  auto effective = [&](std::size_t k) -> std::optional<double> {
    if (r.fronts[k]) return r.fronts[k];
    const Profile& p = profiles[k];
    if (p.empty()) return std::nullopt;
    if (p.front().value < level) return p.front().s;
    return p.back().s;
  };
  for (std::size_t k = 1; k < profiles.size(); ++k) {
    const auto a = effective(k - 1), b = effective(k);
    if (a && b && *b < *a) {
      std::ostringstream os;
      os << "front recedes between profiles " << k - 1 << " and " << k << ": " << *a << " -> " << *b;
      r.failures.push_back(os.str());
      r.fronts_nondecreasing = false;
    }
  }
  return r;
}

InterfaceReport interface_checks(const Mesh& mesh, const DGScalarField& pw, const DGScalarField& po,
                                 const MaterialField& materials, const PhysicalParams& params) {
  if (materials.size() != mesh.num_elements()) throw InvalidArgument("material field does not cover the mesh");
  const TriRule rule = tri_rule(4);
  InterfaceReport r;
  double s_if = 0, s_same = 0, p_if = 0, pabs_if = 0;
  for (const FaceRecord& f : mesh.faces) {
    if (f.is_boundary()) continue;
    double js = 0, jp = 0, pm = 0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Eigen::Vector3d& fb = rule.bary[q];
      double sw[2], p[2];
      for (int side = 0; side < 2; ++side) {
        const std::size_t e = f.element(side);
        const Eigen::Vector4d b = face_to_element_bary(f, side, fb);
        p[side] = pw.value(e, b);
        sw[side] = saturation_point(p[side], po.value(e, b), materials[e].p_d, params).sw;
      }
      js += rule.weights[q] * std::abs(sw[0] - sw[1]);
      jp += rule.weights[q] * std::abs(p[0] - p[1]);
      pm += rule.weights[q] * 0.5 * std::abs(p[0] + p[1]);
    }
    if (materials[f.e1].rock_id != materials[f.e2].rock_id) {
      ++r.interface_faces;
      s_if += js;
      p_if += jp;
      pabs_if += pm;
    } else {
      ++r.same_rock_faces;
      s_same += js;
    }
  }
  if (r.interface_faces) {
    const double n = static_cast<double>(r.interface_faces);
    r.mean_sat_jump_interface = s_if / n;
    r.mean_pw_jump_interface = p_if / n;
    r.mean_pw_interface = pabs_if / n;
  }
  if (r.same_rock_faces) r.mean_sat_jump_same_rock = s_same / static_cast<double>(r.same_rock_faces);
  return r;
}

double threshold_saturation(double pd_low, double pd_high) {
  if (!(pd_low > 0.0) || !(pd_high >= pd_low))
    throw InvalidArgument("threshold saturation needs 0 < pd_low <= pd_high");
  // pc_low(s) - pd_high is decreasing on (0, 1] and non-positive at s = 1.
  double a = 1e-12, b = 1.0;
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    if (pc_of_saturation(m, pd_low) > pc_of_saturation(1.0, pd_high))
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

double l2_difference(const Mesh& fine, const DGScalarField& f, const Mesh& coarse, const DGScalarField& c) {
  const TetRule rule = tet_rule(4);
  double sum = 0.0;
  for (std::size_t e = 0; e < fine.num_elements(); ++e) {
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Eigen::Vector4d& b = rule.bary[q];
      const Vec3 x = volume_point(fine, e, b);
      const auto ec = coarse.locate(x, 1e-9);
      if (!ec) throw SamplingError("point outside the coarse mesh");
      const double d = f.value(e, b) - c.value(*ec, coarse.barycentric(*ec, x));
      sum += rule.weights[q] * fine.elem_volumes[e] * d * d;
    }
  }
  return std::sqrt(sum);
}

}  // namespace porodg
