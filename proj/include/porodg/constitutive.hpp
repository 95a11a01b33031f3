#pragma once

#include <string>
#include <vector>

namespace porodg {

/// Phase mobility laws. BrooksCorey uses k_rw = s^4, k_ro = (1-s)^2 (1-s^2) divided by the
/// viscosities; Linear is the override lambda_w = s, lambda_o = 1 - s used for verification.
enum class MobilityModel { BrooksCorey, Linear };

/// Fluid, solid and coupling constants. Bulk moduli are stored as inverses so that an
/// incompressible phase (or rigid grain) is an exact zero.
struct PhysicalParams {
  double mu_w = 1e-3;  // Pa s
  double mu_o = 1e-3;  // Pa s
  double inv_K_w = 1e-10;  // 1/Pa
  double inv_K_o = 1e-10;  // 1/Pa
  double inv_K_s = 1.0 / 8333333.0;  // 1/Pa
  double lame_lambda = 7142857.0;  // Pa
  double lame_mu = 1785714.0;  // Pa
  double alpha = 0.8;
  double eps_cut = 1e-8;
  bool apply_cutoff = true;
  MobilityModel mobility = MobilityModel::BrooksCorey;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
  bool operator==(const PhysicalParams&) const = default;
};

struct RockProps {
  double K = 1e-10;  // m^2
  double phi = 0.3;
  double p_d = 5000.0;  // Pa
  int rock_id = 1;

  void validate() const;
  bool operator==(const RockProps&) const = default;
};

/// One RockProps per mesh element.
using MaterialField = std::vector<RockProps>;

/// Brooks-Corey wetting saturation (p_d / p_c)^2. Requires pc > 0.
double saturation_of_pc(double pc, double p_d);

/// Inverse law p_c(s) = p_d / sqrt(s). Requires s > 0.
double pc_of_saturation(double sw, double p_d);

/// d s_w / d p_c = -2 p_d^2 / p_c^3. Requires pc > 0.
double dsw_dpc(double pc, double p_d);

/// Clamp to [eps, 1 - eps].
double cutoff(double q, double eps);

/// Saturation recovered from a pressure pair and clamped; a non-positive capillary
/// pressure maps to 1 - eps.
double truncated_saturation(double pw, double po, double p_d, double eps);

/// Saturation together with what the assembly needs for chain-rule gradients.
struct SaturationPoint {
  double sw = 0.0;
  /// Capillary pressure consistent with sw on the Brooks-Corey curve.
  double pc = 0.0;
  /// d sw / d (po - pw), zero where the cut-off is active.
  double dsw_dpc_active = 0.0;
};

/// Pointwise saturation honouring params.apply_cutoff.
SaturationPoint saturation_point(double pw, double po, double p_d, const PhysicalParams& params);

struct RelPerms {
  double k_rw = 0.0;
  double k_ro = 0.0;
};

/// Requires sw in [0, 1].
RelPerms rel_perms(double sw);

struct Mobilities {
  double w = 0.0;  // 1/(Pa s)
  double o = 0.0;
};

Mobilities mobilities(double sw, const PhysicalParams& params);

struct StorageCoefficients {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;  // 1/Pa
};

/// The four storage coefficients multiplying the pressure time derivatives. Saturation,
/// capillary pressure and ds/dpc come from the same (truncated) saturation.
StorageCoefficients storage_coefficients(double pw, double po, const RockProps& rock, const PhysicalParams& params);

/// Same coefficients from an already evaluated saturation point.
StorageCoefficients storage_coefficients(const SaturationPoint& sat, double phi, double p_d,
                                         const PhysicalParams& params);

std::string to_string(MobilityModel m);
MobilityModel mobility_model_from_string(const std::string& s);

}  // namespace porodg
