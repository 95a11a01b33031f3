#include "porodg/constitutive.hpp"

#include <algorithm>
#include <cmath>

#include "porodg/errors.hpp"

namespace porodg {

void PhysicalParams::validate() const {
  if (!(mu_w > 0.0) || !(mu_o > 0.0)) throw InvalidArgument("viscosities must be positive");
  if (inv_K_w < 0.0 || inv_K_o < 0.0 || inv_K_s < 0.0) throw InvalidArgument("inverse bulk moduli must be >= 0");
  if (!(lame_mu > 0.0) || !(lame_lambda > 0.0)) throw InvalidArgument("Lame parameters must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("Biot-Willis coefficient must be in (0, 1]");
  if (!(eps_cut > 0.0 && eps_cut < 0.5)) throw InvalidArgument("cut-off width must be in (0, 0.5)");
}

void RockProps::validate() const {
  if (!(K > 0.0)) throw InvalidArgument("permeability must be positive");
  if (!(phi > 0.0 && phi < 1.0)) throw InvalidArgument("porosity must be in (0, 1)");
  if (!(p_d > 0.0)) throw InvalidArgument("entry pressure must be positive");
}

double saturation_of_pc(double pc, double p_d) {
  if (!(pc > 0.0)) throw DomainError("capillary pressure must be positive");
  const double r = p_d / pc;
  return r * r;
}

double pc_of_saturation(double sw, double p_d) {
  if (!(sw > 0.0)) throw DomainError("saturation must be positive");
  return p_d / std::sqrt(sw);
}

double dsw_dpc(double pc, double p_d) {
  if (!(pc > 0.0)) throw DomainError("capillary pressure must be positive");
  return -2.0 * p_d * p_d / (pc * pc * pc);
}

double cutoff(double q, double eps) { return std::clamp(q, eps, 1.0 - eps); }

double truncated_saturation(double pw, double po, double p_d, double eps) {
  const double pc = po - pw;
  if (pc <= 0.0) return 1.0 - eps;
  return cutoff(saturation_of_pc(pc, p_d), eps);
}

SaturationPoint saturation_point(double pw, double po, double p_d, const PhysicalParams& params) {
  SaturationPoint out;
  const double pc = po - pw;
  if (!params.apply_cutoff) {
    if (pc <= 0.0) {
      out.sw = 1.0;
      out.pc = p_d;
      return out;
    }
    out.sw = saturation_of_pc(pc, p_d);
    out.pc = pc;
    out.dsw_dpc_active = dsw_dpc(pc, p_d);
    return out;
  }
  const double eps = params.eps_cut;
  if (pc <= 0.0) {
    out.sw = 1.0 - eps;
  } else {
    const double raw = saturation_of_pc(pc, p_d);
    out.sw = cutoff(raw, eps);
    if (raw > eps && raw < 1.0 - eps) out.dsw_dpc_active = dsw_dpc(pc, p_d);
  }
  out.pc = pc_of_saturation(out.sw, p_d);
  return out;
}

RelPerms rel_perms(double sw) {
  if (!(sw >= 0.0 && sw <= 1.0)) throw DomainError("saturation outside [0, 1]");
  const double s2 = sw * sw;
  const double so = 1.0 - sw;
  return {s2 * s2, so * so * (1.0 - s2)};
}

Mobilities mobilities(double sw, const PhysicalParams& params) {
  if (params.mobility == MobilityModel::Linear) return {sw, 1.0 - sw};
  const RelPerms kr = rel_perms(sw);
  return {kr.k_rw / params.mu_w, kr.k_ro / params.mu_o};
}

StorageCoefficients storage_coefficients(const SaturationPoint& sat, double phi, double p_d,
                                         const PhysicalParams& params) {
  const double s = sat.sw;
  const double so = 1.0 - s;
  const double pc = sat.pc;
  const double ds = dsw_dpc(pc, p_d);
  const double b = (params.alpha - phi) * params.inv_K_s;
  StorageCoefficients c;
  c.c1 = b * s * s + phi * s * params.inv_K_w + (b * s * pc - phi) * ds;
  c.c2 = b * s * so - (b * s * pc - phi) * ds;
  c.c3 = b * so * so + phi * so * params.inv_K_o - (b * so * pc + phi) * ds;
  c.c4 = b * s * so + (b * so * pc + phi) * ds;
  return c;
}

StorageCoefficients storage_coefficients(double pw, double po, const RockProps& rock, const PhysicalParams& params) {
  return storage_coefficients(saturation_point(pw, po, rock.p_d, params), rock.phi, rock.p_d, params);
}

std::string to_string(MobilityModel m) { return m == MobilityModel::Linear ? "linear" : "brooks_corey"; }

MobilityModel mobility_model_from_string(const std::string& s) {
  if (s == "linear") return MobilityModel::Linear;
  if (s == "brooks_corey") return MobilityModel::BrooksCorey;
  throw InvalidArgument("unknown mobility model '" + s + "'");
}

}  // namespace porodg
