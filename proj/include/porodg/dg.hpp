#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "porodg/mesh.hpp"
#include "porodg/quadrature.hpp"

namespace porodg {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Piecewise-linear discontinuous scalar field. Coefficients are element-major: the
/// nodal values of element e at its 4 vertices live at 4e..4e+3.
struct DGScalarField {
  Eigen::VectorXd coeffs;

  static DGScalarField zeros(const Mesh& mesh) { return {Eigen::VectorXd::Zero(4 * mesh.num_elements())}; }
  static DGScalarField constant(const Mesh& mesh, double v) {
    return {Eigen::VectorXd::Constant(4 * mesh.num_elements(), v)};
  }
  std::size_t num_elements() const { return static_cast<std::size_t>(coeffs.size() / 4); }
  Eigen::Vector4d local(std::size_t e) const { return coeffs.segment<4>(4 * e); }
  double value(std::size_t e, const Eigen::Vector4d& bary) const { return local(e).dot(bary); }
  Vec3 gradient(const Mesh& mesh, std::size_t e) const {
    return mesh.bary_gradients[e].transpose() * local(e);
  }
};

/// Three scalar components stored as consecutive blocks (component-major).
struct DGVectorField {
  Eigen::VectorXd coeffs;

  static DGVectorField zeros(const Mesh& mesh) { return {Eigen::VectorXd::Zero(12 * mesh.num_elements())}; }
  std::size_t block() const { return static_cast<std::size_t>(coeffs.size() / 3); }
  DGScalarField component(int c) const { return {coeffs.segment(c * block(), block())}; }
  void set_component(int c, const DGScalarField& f) { coeffs.segment(c * block(), block()) = f.coeffs; }
  Vec3 value(std::size_t e, const Eigen::Vector4d& bary) const {
    const std::size_t b = block();
    return {coeffs.segment<4>(4 * e).dot(bary), coeffs.segment<4>(b + 4 * e).dot(bary),
            coeffs.segment<4>(2 * b + 4 * e).dot(bary)};
  }
  /// Row c is the gradient of component c.
  Eigen::Matrix3d gradient(const Mesh& mesh, std::size_t e) const;
};

inline std::size_t scalar_dof(std::size_t elem, int local) { return 4 * elem + static_cast<std::size_t>(local); }
inline std::size_t vector_dof(const Mesh& mesh, int comp, std::size_t elem, int local) {
  return static_cast<std::size_t>(comp) * 4 * mesh.num_elements() + 4 * elem + static_cast<std::size_t>(local);
}

/// Where a coefficient is being evaluated: an element and a point given both physically
/// and in that element's barycentric coordinates.
struct PointContext {
  std::size_t elem = 0;
  Vec3 x = Vec3::Zero();
  Eigen::Vector4d bary = Eigen::Vector4d::Zero();
};

/// Scalar coefficient evaluable at any quadrature point, optionally with its gradient
/// (needed where the product rule is applied, e.g. the divergence coupling form).
struct CoefficientField {
  std::function<double(const PointContext&)> value;
  std::function<Vec3(const PointContext&)> gradient;

  double operator()(const PointContext& p) const { return value(p); }
  Vec3 grad(const PointContext& p) const { return gradient ? gradient(p) : Vec3::Zero(); }

  static CoefficientField constant(double c);
  static CoefficientField per_element(std::vector<double> values);
  static CoefficientField function(std::function<double(const Vec3&)> f,
                                   std::function<Vec3(const Vec3&)> grad = {});
  static CoefficientField from_field(const Mesh& mesh, const DGScalarField& field);
};

struct DiscretizationParams {
  double sigma_p = 20.0;
  double sigma_u = 14.0;
  int eps_p = -1;
  int eps_u = -1;
  double gamma = 10.0;  // Pa s / m^2
  int quad_volume_order = 4;
  int quad_face_order = 4;

  void validate() const;
  bool operator==(const DiscretizationParams&) const = default;
};

/// Boundary and source data are closures of (position, time, face marker).
using ScalarData = std::function<double(const Vec3&, double, int)>;
using VectorData = std::function<Vec3(const Vec3&, double, int)>;

struct FlowPhaseData {
  ScalarData source;     // volumetric source; empty means zero
  ScalarData dirichlet;  // required if any face is pressure-Dirichlet
  ScalarData neumann;    // required if any face is pressure-Neumann
};

struct MechanicsData {
  VectorData body_force;  // empty means zero
  VectorData dirichlet;   // required if any face is displacement-Dirichlet
  VectorData traction;    // required if any face is displacement-Neumann
};

struct JumpAverage {
  double jump = 0.0;
  double average = 0.0;
};

/// Jump side1 - side2 and mean on interior faces; both equal the trace on the boundary.
JumpAverage jump_average(double side1, std::optional<double> side2);

/// Quadrature rules shared by the assembly routines.
struct QuadratureSet {
  TetRule volume;
  TriRule face;
  explicit QuadratureSet(const DiscretizationParams& disc)
      : volume(tet_rule(disc.quad_volume_order)), face(tri_rule(disc.quad_face_order)) {}
  QuadratureSet(int volume_degree, int face_degree) : volume(tet_rule(volume_degree)), face(tri_rule(face_degree)) {}
};

/// Physical points of a volume rule on element e.
Vec3 volume_point(const Mesh& mesh, std::size_t e, const Eigen::Vector4d& bary);
/// Physical point of a face rule point and the barycentric coordinates on each side.
Vec3 face_point(const Mesh& mesh, const FaceRecord& f, const Eigen::Vector3d& fb);
Eigen::Vector4d face_to_element_bary(const FaceRecord& f, int side, const Eigen::Vector3d& fb);

// ---------------------------------------------------------------------------------------
// Bilinear forms. Matrix rows are test functions, columns trial functions.
// ---------------------------------------------------------------------------------------

/// Interior penalty form a(chi; p, q) with penalty and flux terms on interior and
/// pressure-Dirichlet faces. Throws AssemblyError if chi <= 0 at a quadrature point.
SparseMatrix assemble_diffusion(const Mesh& mesh, const CoefficientField& chi, const DiscretizationParams& disc);

/// Elasticity form c(u, v) on the component-major vector space.
SparseMatrix assemble_elasticity(const Mesh& mesh, double lame_lambda, double lame_mu, const DiscretizationParams& disc);

/// Coupling b_u(chi; u, q): rows scalar test dofs, columns vector trial dofs.
SparseMatrix assemble_bu(const Mesh& mesh, const CoefficientField& chi, const DiscretizationParams& disc);

/// Coupling b_p(q, v): rows vector test dofs, columns scalar trial dofs.
SparseMatrix assemble_bp(const Mesh& mesh, const DiscretizationParams& disc);

/// b_p(q, .) for a pointwise scalar q (value + gradient), as a vector over vector test dofs.
Eigen::VectorXd assemble_bp_load(const Mesh& mesh, const CoefficientField& q, const DiscretizationParams& disc);

/// Weighted mass (w phi_j, phi_i) on the scalar space.
SparseMatrix assemble_weighted_mass(const Mesh& mesh, const CoefficientField& w, const DiscretizationParams& disc);

/// Block-diagonal vector mass (w psi_j, psi_i).
SparseMatrix assemble_vector_mass(const Mesh& mesh, const CoefficientField& w, const DiscretizationParams& disc);

/// Right-hand side of a phase mass balance: source, Dirichlet consistency weighted by
/// eps_p and chi, Neumann flux and Dirichlet penalty.
Eigen::VectorXd assemble_rhs_flow(const Mesh& mesh, const FlowPhaseData& data, const CoefficientField& chi,
                                  const DiscretizationParams& disc, double t);

/// l(q) - a(chi; p, q) for every scalar basis function q. Jumps are formed from differences
/// of coinciding vertex values, so a nearly continuous p under a large penalty keeps full
/// precision, unlike rhs - A p with the assembled matrix.
Eigen::VectorXd flow_residual(const Mesh& mesh, const FlowPhaseData& data, const CoefficientField& chi,
                              const DiscretizationParams& disc, double t, const DGScalarField& p);

/// Right-hand side of the momentum balance.
Eigen::VectorXd assemble_rhs_elasticity(const Mesh& mesh, const MechanicsData& data, double lame_mu,
                                        const DiscretizationParams& disc, double t);

// ---------------------------------------------------------------------------------------
// Projection and norms
// ---------------------------------------------------------------------------------------

using ElementFunction = std::function<double(const Vec3&, std::size_t elem)>;

/// Element-wise L2 projection onto the P1 space.
DGScalarField l2_project(const Mesh& mesh, const ElementFunction& f, int degree = 6);
DGScalarField l2_project(const Mesh& mesh, const std::function<double(const Vec3&)>& f, int degree = 6);
DGVectorField l2_project_vector(const Mesh& mesh, const std::function<Vec3(const Vec3&)>& f, int degree = 6);

enum class NormBoundary { Pressure, Displacement };

/// Broken H1 seminorm plus h_e^{-1}-weighted jumps over interior faces and the
/// Dirichlet faces of the chosen kind.
double dg_norm(const Mesh& mesh, const DGScalarField& q, NormBoundary which = NormBoundary::Pressure);
double dg_norm(const Mesh& mesh, const DGVectorField& v);
double broken_grad_norm(const Mesh& mesh, const DGScalarField& q);
double l2_norm(const Mesh& mesh, const DGScalarField& q);
double l2_norm(const Mesh& mesh, const DGVectorField& v);

double l2_error(const Mesh& mesh, const DGScalarField& q, const std::function<double(const Vec3&)>& exact, int degree = 6);
double l2_error(const Mesh& mesh, const DGVectorField& v, const std::function<Vec3(const Vec3&)>& exact, int degree = 6);
double broken_grad_error(const Mesh& mesh, const DGScalarField& q, const std::function<Vec3(const Vec3&)>& exact_grad,
                         int degree = 6);

}  // namespace porodg
