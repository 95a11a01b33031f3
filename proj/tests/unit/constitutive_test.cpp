#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "porodg/constitutive.hpp"
#include "porodg/errors.hpp"

using namespace porodg;

TEST(Capillarity, SaturationOfPc) {
  EXPECT_DOUBLE_EQ(saturation_of_pc(5000, 5000), 1.0);
  EXPECT_NEAR(saturation_of_pc(50000, 5000), 0.01, 1e-16);
  EXPECT_DOUBLE_EQ(saturation_of_pc(10000, 5000), 0.25);
  EXPECT_THROW(saturation_of_pc(0.0, 5000), DomainError);
  EXPECT_THROW(saturation_of_pc(-1.0, 5000), DomainError);
}

TEST(Capillarity, SaturationDecreasesWithPc) {
  double prev = 2.0;
  for (double pc = 5000; pc < 1e6; pc *= 1.1) {
    const double s = saturation_of_pc(pc, 5000);
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(Capillarity, InverseRoundTrip) {
  for (double s : {1e-6, 0.01, 0.3, 0.99, 1.0}) EXPECT_NEAR(saturation_of_pc(pc_of_saturation(s, 5000), 5000), s, 1e-14);
  EXPECT_THROW(pc_of_saturation(0.0, 5000), DomainError);
}

TEST(Capillarity, DerivativeExamples) {
  EXPECT_NEAR(dsw_dpc(10000, 5000), -5.0e-5, 1e-20);
  const double h = 1e-3 * 10000;
  auto central = [](double step) {
    return (saturation_of_pc(10000 + step, 5000) - saturation_of_pc(10000 - step, 5000)) / (2 * step);
  };
  // Richardson extrapolation removes the O(h^2) term (2e-6 relative at this step)
  const double fd = (4 * central(h / 2) - central(h)) / 3;
  EXPECT_NEAR(fd / dsw_dpc(10000, 5000), 1.0, 1e-8);
  EXPECT_DOUBLE_EQ(dsw_dpc(5000, 5000), -2.0 / 5000);
  EXPECT_THROW(dsw_dpc(0.0, 5000), DomainError);
}

TEST(Capillarity, DerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1.1, 100.0);
  for (int i = 0; i < 500; ++i) {
    const double pd = 5000;
    const double pc = u(rng) * pd;
    const double h = 1e-4 * pc;
    const double fd = (saturation_of_pc(pc + h, pd) - saturation_of_pc(pc - h, pd)) / (2 * h);
    EXPECT_NEAR(fd / dsw_dpc(pc, pd), 1.0, 1e-6);
    EXPECT_LT(dsw_dpc(pc, pd), 0.0);
  }
}

TEST(Cutoff, Examples) {
  EXPECT_DOUBLE_EQ(cutoff(1.5, 1e-8), 1.0 - 1e-8);
  EXPECT_DOUBLE_EQ(cutoff(-0.2, 1e-8), 1e-8);
  EXPECT_DOUBLE_EQ(cutoff(0.5, 1e-8), 0.5);
}

TEST(Cutoff, AlwaysInRange) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> e(1e-12, 0.49);
  for (int i = 0; i < 2000; ++i) {
    const double eps = e(rng);
    const double v = cutoff(u(rng), eps);
    EXPECT_GE(v, eps);
    EXPECT_LE(v, 1.0 - eps);
  }
}

TEST(TruncatedSaturation, Examples) {
  EXPECT_DOUBLE_EQ(truncated_saturation(195000, 200000, 5000, 1e-8), 1.0 - 1e-8);
  EXPECT_NEAR(truncated_saturation(184000, 234000, 5000, 1e-8), 0.01, 1e-16);
  EXPECT_DOUBLE_EQ(truncated_saturation(0, -100, 5000, 1e-8), 1.0 - 1e-8);
}

TEST(TruncatedSaturation, AlwaysInRange) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> p(-1e6, 1e6);
  for (int i = 0; i < 5000; ++i) {
    const double s = truncated_saturation(p(rng), p(rng), 5000, 1e-8);
    EXPECT_GE(s, 1e-8);
    EXPECT_LE(s, 1.0 - 1e-8);
  }
}

TEST(SaturationPoint, ConsistentCapillaryPressure) {
  PhysicalParams params;
  const auto inside = saturation_point(184000, 234000, 5000, params);
  EXPECT_NEAR(inside.sw, 0.01, 1e-16);
  EXPECT_NEAR(inside.pc, 50000, 1e-9);
  EXPECT_NEAR(inside.dsw_dpc_active, dsw_dpc(50000, 5000), 1e-20);
  const auto clipped = saturation_point(200000, 195000, 5000, params);
  EXPECT_DOUBLE_EQ(clipped.sw, 1.0 - 1e-8);
  EXPECT_NEAR(clipped.pc, 5000 / std::sqrt(1.0 - 1e-8), 1e-9);
  EXPECT_EQ(clipped.dsw_dpc_active, 0.0);
  params.apply_cutoff = false;
  const auto raw = saturation_point(0, 5, 10, params);
  EXPECT_DOUBLE_EQ(raw.sw, 4.0);
  EXPECT_DOUBLE_EQ(raw.pc, 5.0);
}

TEST(RelPerms, Examples) {
  auto r = rel_perms(0.0);
  EXPECT_DOUBLE_EQ(r.k_rw, 0.0);
  EXPECT_DOUBLE_EQ(r.k_ro, 1.0);
  r = rel_perms(1.0);
  EXPECT_DOUBLE_EQ(r.k_rw, 1.0);
  EXPECT_DOUBLE_EQ(r.k_ro, 0.0);
  r = rel_perms(0.5);
  EXPECT_DOUBLE_EQ(r.k_rw, 0.0625);
  EXPECT_DOUBLE_EQ(r.k_ro, 0.25 * 0.75);
  EXPECT_THROW(rel_perms(-0.01), DomainError);
  EXPECT_THROW(rel_perms(1.01), DomainError);
}

TEST(RelPerms, MonotoneAndBounded) {
  RelPerms prev = rel_perms(0.0);
  for (int i = 1; i <= 10000; ++i) {
    const RelPerms r = rel_perms(i / 10000.0);
    EXPECT_GE(r.k_rw, prev.k_rw);
    EXPECT_LE(r.k_ro, prev.k_ro);
    EXPECT_GE(r.k_rw, 0.0);
    EXPECT_LE(r.k_rw, 1.0);
    EXPECT_GE(r.k_ro, 0.0);
    EXPECT_LE(r.k_ro, 1.0);
    prev = r;
  }
}

TEST(Mobilities, Examples) {
  PhysicalParams params;
  params.mu_w = params.mu_o = 0.001;
  const auto m = mobilities(0.5, params);
  EXPECT_NEAR(m.w, 62.5, 1e-12);
  EXPECT_NEAR(m.o, 187.5, 1e-12);
  const double eps = 1e-8;
  const auto low = mobilities(eps, params);
  EXPECT_GT(low.w, 0.0);
  EXPECT_NEAR(low.w, std::pow(eps, 4) / 0.001, 1e-40);
  params.mobility = MobilityModel::Linear;
  const auto lin = mobilities(0.3, params);
  EXPECT_DOUBLE_EQ(lin.w, 0.3);
  EXPECT_DOUBLE_EQ(lin.o, 0.7);
}

TEST(Mobilities, PositiveOnCutoffRange) {
  PhysicalParams params;
  for (double s : {1e-8, 1e-4, 0.5, 1.0 - 1e-4, 1.0 - 1e-8}) {
    const auto m = mobilities(s, params);
    EXPECT_GT(m.w, 0.0);
    EXPECT_GT(m.o, 0.0);
  }
}

TEST(Mobilities, ModelNames) {
  EXPECT_EQ(mobility_model_from_string(to_string(MobilityModel::Linear)), MobilityModel::Linear);
  EXPECT_EQ(mobility_model_from_string(to_string(MobilityModel::BrooksCorey)), MobilityModel::BrooksCorey);
  EXPECT_THROW(mobility_model_from_string("van_genuchten"), InvalidArgument);
}

namespace {

// Storage coefficients written out independently of the library.
struct Oracle {
  double c1, c2, c3, c4;
};

Oracle oracle(double pw, double po, double pd, double phi, double alpha, double iks, double ikw, double iko) {
  const double s = std::clamp(std::pow(pd / (po - pw), 2), 1e-8, 1.0 - 1e-8);
  const double pc = pd / std::sqrt(s);
  const double ds = -2.0 * pd * pd / (pc * pc * pc);
  const double a = (alpha - phi) * iks;
  return {a * s * s + phi * s * ikw + (a * s * pc - phi) * ds, a * s * (1 - s) - (a * s * pc - phi) * ds,
          a * (1 - s) * (1 - s) + phi * (1 - s) * iko - (a * (1 - s) * pc + phi) * ds,
          a * s * (1 - s) + (a * (1 - s) * pc + phi) * ds};
}

}  // namespace

TEST(Storage, McWhorterStateMatchesOracle) {
  PhysicalParams params;
  params.alpha = 1.0;
  params.inv_K_s = 1.0 / 8333333.0;
  params.inv_K_w = params.inv_K_o = 0.0;
  const RockProps rock{1e-10, 0.3, 5000, 1};
  const auto c = storage_coefficients(184000, 234000, rock, params);
  const Oracle o = oracle(184000, 234000, 5000, 0.3, 1.0, 1.0 / 8333333.0, 0.0, 0.0);
  EXPECT_NEAR(c.c1, o.c1, 1e-12 * std::abs(o.c1));
  EXPECT_NEAR(c.c2, o.c2, 1e-12 * std::abs(o.c2));
  EXPECT_NEAR(c.c3, o.c3, 1e-12 * std::abs(o.c3));
  EXPECT_NEAR(c.c4, o.c4, 1e-12 * std::abs(o.c4));
}

TEST(Storage, AlphaEqualsPorosity) {
  PhysicalParams params;
  params.alpha = 0.3;
  const RockProps rock{1e-10, 0.3, 5000, 1};
  const auto c = storage_coefficients(184000, 234000, rock, params);
  const double s = 0.01, ds = dsw_dpc(50000, 5000);
  EXPECT_NEAR(c.c1, 0.3 * s * params.inv_K_w - 0.3 * ds, 1e-20);
  EXPECT_GT(c.c1, 0.0);
}

TEST(Storage, IncompressibleRigid) {
  PhysicalParams params;
  params.inv_K_w = params.inv_K_o = params.inv_K_s = 0.0;
  const RockProps rock{1e-10, 0.25, 5000, 1};
  const auto c = storage_coefficients(190000, 210000, rock, params);
  const double ds = dsw_dpc(20000, 5000);
  EXPECT_NEAR(c.c1, -0.25 * ds, 1e-22);
  EXPECT_NEAR(c.c2, 0.25 * ds, 1e-22);
  EXPECT_NEAR(c.c3, -0.25 * ds, 1e-22);
  EXPECT_NEAR(c.c4, 0.25 * ds, 1e-22);
}

TEST(Storage, PairwiseCancellationIdentity) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pw(1e5, 3e5), pc(1.0, 60.0), phi(0.05, 0.45), alpha(0.5, 1.0);
  std::uniform_real_distribution<double> pd(1000, 20000), lik(-11, -6);
  for (int i = 0; i < 1000; ++i) {
    PhysicalParams params;
    params.alpha = alpha(rng);
    params.inv_K_s = std::pow(10.0, lik(rng));
    params.inv_K_w = std::pow(10.0, lik(rng));
    params.inv_K_o = std::pow(10.0, lik(rng));
    const RockProps rock{1e-10, phi(rng), pd(rng), 1};
    const double p_w = pw(rng);
    const double p_o = p_w + pc(rng) * rock.p_d;
    const auto c = storage_coefficients(p_w, p_o, rock, params);
    const double s = truncated_saturation(p_w, p_o, rock.p_d, params.eps_cut);
    const double b = (params.alpha - rock.phi) * params.inv_K_s;
    const double e12 = b * s + rock.phi * s * params.inv_K_w;
    const double e34 = b * (1 - s) + rock.phi * (1 - s) * params.inv_K_o;
    const double scale12 = std::abs(c.c1) + std::abs(c.c2);
    const double scale34 = std::abs(c.c3) + std::abs(c.c4);
    EXPECT_NEAR(c.c1 + c.c2, e12, 1e-12 * scale12);
    EXPECT_NEAR(c.c3 + c.c4, e34, 1e-12 * scale34);
  }
}

TEST(Storage, NonNegativeUnderStandingAssumption) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pc(1.0, 100.0), phi(0.05, 0.45), unit(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    PhysicalParams params;
    const RockProps rock{1e-10, phi(rng), 5000, 1};
    params.alpha = rock.phi + (1.0 - rock.phi) * unit(rng);  // alpha >= phi
    params.inv_K_s = 1.0 / 8333333.0;
    const double p_o = 2e5 + pc(rng) * rock.p_d;
    const auto sat = saturation_point(2e5, p_o, rock.p_d, params);
    if ((params.alpha - rock.phi) * sat.sw * sat.pc * params.inv_K_s > rock.phi) continue;
    const auto c = storage_coefficients(sat, rock.phi, rock.p_d, params);
    EXPECT_GE(c.c1, 0.0);
    EXPECT_GE(c.c3, 0.0);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Params, Validation) {
  PhysicalParams p;
  EXPECT_NO_THROW(p.validate());
  p.alpha = 1.2;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = PhysicalParams{};
  p.eps_cut = 0.5;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = PhysicalParams{};
  p.inv_K_w = 0.0;
  EXPECT_NO_THROW(p.validate());
  RockProps r;
  r.phi = 1.0;
  EXPECT_THROW(r.validate(), InvalidArgument);
  r = RockProps{};
  r.K = 0.0;
  EXPECT_THROW(r.validate(), InvalidArgument);
}
