#pragma once

#include <optional>
#include <string>
#include <vector>

#include "porodg/constitutive.hpp"
#include "porodg/dg.hpp"
#include "porodg/mesh.hpp"
#include "porodg/stepper.hpp"

namespace porodg {

/// Smooth steady solution on the unit cube with closed-form forcing; see docs/manufactured.md.
struct ManufacturedCase {
  static double pw(const Vec3& x);
  static double po(const Vec3& x);
  static Vec3 u(const Vec3& x);
  static Vec3 grad_pw(const Vec3& x);
  static Vec3 grad_po(const Vec3& x);
  static Eigen::Matrix3d grad_u(const Vec3& x);
  static double pc(const Vec3& x);
  static double sw(const Vec3& x);

  static double forcing_w(const Vec3& x);
  static double forcing_o(const Vec3& x);
  static Vec3 forcing_u(const Vec3& x);

  static PhysicalParams physics();
  static RockProps rock();
  static DiscretizationParams discretization();
  static TimeGrid time_grid();

  /// All-Dirichlet problem on an n^3-cell unit cube.
  static Problem problem(long n, const DiscretizationParams& disc, const TimeGrid& grid,
                         const SolverConfig& solver = {});
  static InitialData initial_data();
};

struct ErrorRow {
  double h = 0.0;
  double l2_w = 0.0, grad_w = 0.0;
  double l2_o = 0.0, grad_o = 0.0;
  double l2_u = 0.0, grad_u = 0.0;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
};

struct RateTable {
  std::vector<ErrorRow> rows;
  /// rates[i] compares rows[i] and rows[i + 1]; same field order as ErrorRow.
  struct Rates {
    double l2_w = 0.0, grad_w = 0.0, l2_o = 0.0, grad_o = 0.0, l2_u = 0.0, grad_u = 0.0;
  };
  std::vector<Rates> rates;

  std::string to_csv() const;
  std::string to_text() const;
};

/// log2(coarse / fine).
double convergence_rate(double coarse, double fine);

ErrorRow manufactured_errors(long n, const DiscretizationParams& disc, const TimeGrid& grid,
                             const SolverConfig& solver = {});

/// One row per mesh in `ns` (cells per side), errors measured at the final time.
RateTable convergence_study(const std::vector<long>& ns, const DiscretizationParams& disc,
                            const TimeGrid& grid, const SolverConfig& solver = {});

struct ProfileSample {
  double s = 0.0;
  double value = 0.0;
};
using Profile = std::vector<ProfileSample>;

/// First crossing of `level` along the profile, linearly interpolated. Empty if the
/// profile never reaches the level from above.
std::optional<double> front_position(const Profile& profile, double level = 0.5);

struct FrontReport {
  bool monotone = true;
  double max_violation = 0.0;
  bool bounded = true;
  double min_value = 0.0, max_value = 0.0;
  std::vector<std::optional<double>> fronts;
  bool fronts_nondecreasing = true;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// Monotone non-increasing profiles (up to `tolerance`), values in [lo, hi], fronts not
/// receding. Profiles are in time order.
FrontReport front_checks(const std::vector<Profile>& profiles, double lo, double hi, double tolerance = 1e-3,
                         double level = 0.5);

struct InterfaceReport {
  std::size_t interface_faces = 0;
  std::size_t same_rock_faces = 0;
  double mean_sat_jump_interface = 0.0;
  double mean_sat_jump_same_rock = 0.0;
  double mean_pw_jump_interface = 0.0;
  double mean_pw_interface = 0.0;
};

/// Face-averaged |[S_w]| and |[P_w]| over interior faces, split by whether the two sides
/// carry different rock ids.
InterfaceReport interface_checks(const Mesh& mesh, const DGScalarField& pw, const DGScalarField& po,
                                 const MaterialField& materials, const PhysicalParams& params);

/// Saturation in the rock with the lower entry pressure at which its capillary pressure
/// equals the entry pressure of the other rock, by bisection on the Brooks-Corey curves.
double threshold_saturation(double pd_low, double pd_high);

/// L2 distance between two scalar DG fields on nested box meshes, integrated on `fine`
/// with the coarse field evaluated by point location.
double l2_difference(const Mesh& fine, const DGScalarField& f, const Mesh& coarse, const DGScalarField& c);

}  // namespace porodg
