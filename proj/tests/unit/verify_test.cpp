#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "porodg/errors.hpp"
#include "porodg/mesh.hpp"
#include "porodg/verify.hpp"

using namespace porodg;

namespace {

using MC = ManufacturedCase;

constexpr double kH = 5e-4;

Vec3 unit(int i) { return Vec3::Unit(i); }

template <class F>
Vec3 fd_grad(const F& f, const Vec3& x, double h = kH) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) g[i] = (f(x + h * unit(i)) - f(x - h * unit(i))) / (2 * h);
  return g;
}

// Divergence of a vector field by central differences.
template <class F>
double fd_div(const F& f, const Vec3& x, double h = kH) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) d += (f(x + h * unit(i))[i] - f(x - h * unit(i))[i]) / (2 * h);
  return d;
}

// Independent saturation and mobility for the verification setup.
double sat(const Vec3& x) {
  const double pd = MC::rock().p_d;
  const double pc = MC::po(x) - MC::pw(x);
  return (pd / pc) * (pd / pc);
}

double strong_w(const Vec3& x) {
  const double K = MC::rock().K;
  auto flux = [&](const Vec3& y) { return Vec3(sat(y) * K * fd_grad(&MC::pw, y)); };
  return -fd_div(flux, x);
}

double strong_o(const Vec3& x) {
  const double K = MC::rock().K;
  auto flux = [&](const Vec3& y) { return Vec3((1.0 - sat(y)) * K * fd_grad(&MC::po, y)); };
  return -fd_div(flux, x);
}

Vec3 strong_u(const Vec3& x) {
  const PhysicalParams p = MC::physics();
  const double lam = p.lame_lambda, mu = p.lame_mu;
  auto div_u = [](const Vec3& y) { return fd_div(&MC::u, y); };
  Vec3 lap;
  for (int c = 0; c < 3; ++c) {
    auto uc = [c](const Vec3& y) { return MC::u(y)[c]; };
    lap[c] = fd_div([&](const Vec3& y) { return fd_grad(uc, y); }, x);
  }
  auto ptot = [](const Vec3& y) { return sat(y) * MC::pw(y) + (1.0 - sat(y)) * MC::po(y); };
  return -mu * lap - (lam + mu) * fd_grad(div_u, x) + fd_grad(ptot, x);
}

Profile linear_profile(double s0, double s1, double v0, double v1, int n) {
  Profile p;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    p.push_back({s0 + t * (s1 - s0), v0 + t * (v1 - v0)});
  }
  return p;
}

}  // namespace

TEST(Manufactured, ForcingSatisfiesStrongEquations) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Vec3 x(u(rng), u(rng), u(rng));
    worst = std::max(worst, std::abs(MC::forcing_w(x) - strong_w(x)));
    worst = std::max(worst, std::abs(MC::forcing_o(x) - strong_o(x)));
    worst = std::max(worst, (MC::forcing_u(x) - strong_u(x)).lpNorm<Eigen::Infinity>());
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Manufactured, GradientsMatchDifferences) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Vec3 x(u(rng), u(rng), u(rng));
    EXPECT_LT((MC::grad_pw(x) - fd_grad(&MC::pw, x, 1e-5)).norm(), 1e-8);
    EXPECT_LT((MC::grad_po(x) - fd_grad(&MC::po, x, 1e-5)).norm(), 1e-8);
    for (int c = 0; c < 3; ++c) {
      const Vec3 g = fd_grad([c](const Vec3& y) { return MC::u(y)[c]; }, x, 1e-5);
      EXPECT_LT((MC::grad_u(x).row(c).transpose() - g).norm(), 1e-8);
    }
    EXPECT_NEAR(MC::sw(x), sat(x), 1e-15);
  }
}

TEST(Manufactured, SaturationInsideUnitInterval) {
  for (double a : {0.0, 0.5, 1.0})
    for (double b : {0.0, 0.5, 1.0}) {
      const double s = MC::sw(Vec3(a, b, 0.3));
      EXPECT_GT(s, 0.0);
      EXPECT_LT(s, 1.0);
    }
}

TEST(Rates, Log2OfRatio) {
  EXPECT_DOUBLE_EQ(convergence_rate(4.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(convergence_rate(1.0, 1.0), 0.0);
  EXPECT_THROW(convergence_rate(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(convergence_rate(1.0, -1.0), InvalidArgument);
}

TEST(Rates, TwoMeshStudyTable) {
  const RateTable t = convergence_study({1, 2}, MC::discretization(), MC::time_grid());
  ASSERT_EQ(t.rows.size(), 2u);
  ASSERT_EQ(t.rates.size(), 1u);
  EXPECT_DOUBLE_EQ(t.rows[1].h, 0.5);
  EXPECT_EQ(t.rows[0].steps, MC::time_grid().num_steps());
  EXPECT_GT(t.rows[0].l2_w, t.rows[1].l2_w);
  EXPECT_DOUBLE_EQ(t.rates[0].l2_w, convergence_rate(t.rows[0].l2_w, t.rows[1].l2_w));
  const std::string csv = t.to_csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.rfind("h,l2_w,", 0), 0u);
}

TEST(Front, LinearCrossingInterpolated) {
  EXPECT_NEAR(*front_position(linear_profile(0, 2, 1, 0, 11)), 1.0, 1e-14);
  EXPECT_NEAR(*front_position(linear_profile(0, 1, 0.9, 0.1, 5), 0.3), 0.75, 1e-14);
  Profile step{{0, 1.0}, {1, 1.0}, {2, 0.0}, {3, 0.0}};
  EXPECT_NEAR(*front_position(step), 1.5, 1e-14);
}

TEST(Front, NoCrossing) {
  EXPECT_FALSE(front_position(linear_profile(0, 1, 0.4, 0.1, 5)).has_value());
  EXPECT_FALSE(front_position(linear_profile(0, 1, 0.9, 0.6, 5)).has_value());
  EXPECT_FALSE(front_position(Profile{}).has_value());
}

TEST(Front, UniformStateTriviallyMonotone) {
  const Profile flat = linear_profile(0, 1, 0.3, 0.3, 20);
  const FrontReport r = front_checks({flat, flat}, 1e-8, 1 - 1e-8);
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.monotone);
  EXPECT_EQ(r.max_violation, 0.0);
}

TEST(Front, AdvancingFrontsAccepted) {
  std::vector<Profile> ps;
  for (int k = 1; k <= 5; ++k) {
    Profile p;
    for (int i = 0; i <= 100; ++i) {
      const double s = i / 100.0;
      p.push_back({s, 0.5 * (1.0 - std::tanh((s - 0.15 * k) / 0.05))});
    }
    ps.push_back(p);
  }
  const FrontReport r = front_checks(ps, 0.0, 1.0);
  EXPECT_TRUE(r.ok());
  ASSERT_EQ(r.fronts.size(), 5u);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(*r.fronts[k], 0.15 * (k + 1), 1e-3);
}

TEST(Front, ViolationsReported) {
  Profile bump = linear_profile(0, 1, 0.9, 0.1, 11);
  bump[5].value += 0.2;  // rises by more than the tolerance
  FrontReport r = front_checks({bump}, 0.0, 1.0);
  EXPECT_FALSE(r.monotone);
  EXPECT_FALSE(r.ok());
  EXPECT_GT(r.max_violation, 1e-3);

  Profile small = linear_profile(0, 1, 0.9, 0.9 - 1e-4, 11);
  small[5].value += 5e-4;
  EXPECT_TRUE(front_checks({small}, 0.0, 1.0).monotone);

  const Profile ahead = linear_profile(0, 1, 1.0, 0.0, 11), behind = linear_profile(0, 1, 0.8, 0.0, 11);
  r = front_checks({ahead, behind}, 0.0, 1.0);
  EXPECT_FALSE(r.fronts_nondecreasing);

  r = front_checks({linear_profile(0, 1, 1.2, 0.0, 11)}, 0.0, 1.0);
  EXPECT_FALSE(r.bounded);
  EXPECT_NEAR(r.max_value, 1.2, 1e-14);
}

TEST(Interface, HomogeneousMediumHasNoInterfaceFaces) {
  const Mesh m = build_structured_tet_mesh(2, 2, 2, Box{});
  const MaterialField mat(m.num_elements(), RockProps{});
  const DGScalarField pw = DGScalarField::constant(m, 1e5), po = DGScalarField::constant(m, 1.2e5);
  const InterfaceReport r = interface_checks(m, pw, po, mat, PhysicalParams{});
  EXPECT_EQ(r.interface_faces, 0u);
  EXPECT_GT(r.same_rock_faces, 0u);
  EXPECT_NEAR(r.mean_sat_jump_same_rock, 0.0, 1e-15);
}

TEST(Interface, ContinuousPressuresGiveSaturationJump) {
  const Mesh m = build_structured_tet_mesh(2, 1, 1, Box{Vec3::Zero(), Vec3(2, 1, 1)});
  MaterialField mat(m.num_elements(), RockProps{1e-10, 0.3, 5000.0, 1});
  for (std::size_t e = 0; e < m.num_elements(); ++e)
    if (m.centroid(e).x() > 1.0) mat[e] = RockProps{2e-10, 0.3, 5000.0 * std::sqrt(2.0), 2};
  const double pc = 8000.0;
  const DGScalarField pw = DGScalarField::constant(m, 1e5), po = DGScalarField::constant(m, 1e5 + pc);
  const InterfaceReport r = interface_checks(m, pw, po, mat, PhysicalParams{});
  EXPECT_EQ(r.interface_faces, 2u);  // the x = 1 plane is two triangles
  const double s1 = std::pow(5000.0 / pc, 2), s2 = std::pow(5000.0 * std::sqrt(2.0) / pc, 2);
  EXPECT_NEAR(r.mean_sat_jump_interface, std::abs(s2 - s1), 1e-12);
  EXPECT_NEAR(r.mean_sat_jump_same_rock, 0.0, 1e-14);
  EXPECT_NEAR(r.mean_pw_jump_interface, 0.0, 1e-15 * 1e5);
  EXPECT_NEAR(r.mean_pw_interface, 1e5, 1e-9);
}

TEST(Threshold, MatchesBrooksCoreyInverse) {
  // p_c1(S) = p_d2 with p_c1 = p_d1 / sqrt(S)
  EXPECT_NEAR(threshold_saturation(5000.0, 5000.0 * std::sqrt(2.0)), 0.5, 1e-10);
  EXPECT_NEAR(threshold_saturation(3.0, 3.0), 1.0, 1e-10);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(100.0, 1e4), r(1.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    const double lo = u(rng), hi = lo * r(rng);
    const double s = threshold_saturation(lo, hi);
    EXPECT_NEAR(lo / std::sqrt(s), hi, 1e-8 * hi);
  }
}

TEST(Threshold, RejectsInvertedEntryPressures) {
  EXPECT_THROW(threshold_saturation(2.0, 1.0), InvalidArgument);
  EXPECT_THROW(threshold_saturation(0.0, 1.0), InvalidArgument);
}

TEST(L2Difference, NestedMeshes) {
  const Box b{};
  const Mesh coarse = build_structured_tet_mesh(2, 2, 2, b), fine = build_structured_tet_mesh(4, 4, 4, b);
  const auto lin = [](const Vec3& x) { return 1.0 + x.x() - 0.5 * x.y() + 2.0 * x.z(); };
  const DGScalarField fc = l2_project(coarse, lin), ff = l2_project(fine, lin);
  EXPECT_NEAR(l2_difference(fine, ff, coarse, fc), 0.0, 1e-12);
  const DGScalarField shifted{ff.coeffs.array() + 0.25};
  EXPECT_NEAR(l2_difference(fine, shifted, coarse, fc), 0.25, 1e-12);
  EXPECT_NEAR(l2_difference(coarse, fc, coarse, fc), 0.0, 1e-14);
}
