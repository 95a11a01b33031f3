#include <cmath>
#include <string>

#include "porodg/dg.hpp"
#include "porodg/errors.hpp"

namespace porodg {

DGScalarField l2_project(const Mesh& mesh, const ElementFunction& f, int degree) {
  const TetRule rule = tet_rule(degree);
  DGScalarField out = DGScalarField::zeros(mesh);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const double vol = mesh.elem_volumes[e];
    if (!(vol > 0.0)) throw AssemblyError("singular local mass matrix in element " + std::to_string(e));
    // Moments (f, phi_i) / vol, then the inverse of the P1 mass (vol/20)(I + 11^T), i.e. (20/vol)(I - 11^T/5).
    Eigen::Vector4d b = Eigen::Vector4d::Zero();
    for (std::size_t k = 0; k < rule.size(); ++k)
      b += rule.weights[k] * f(volume_point(mesh, e, rule.bary[k]), e) * rule.bary[k];
    out.coeffs.segment<4>(4 * e) = 20.0 * (b - Eigen::Vector4d::Constant(b.sum() / 5.0));
  }
  return out;
}

DGScalarField l2_project(const Mesh& mesh, const std::function<double(const Vec3&)>& f, int degree) {
  return l2_project(mesh, [&f](const Vec3& x, std::size_t) { return f(x); }, degree);
}

DGVectorField l2_project_vector(const Mesh& mesh, const std::function<Vec3(const Vec3&)>& f, int degree) {
  DGVectorField out = DGVectorField::zeros(mesh);
  for (int c = 0; c < 3; ++c)
    out.set_component(c, l2_project(mesh, [&f, c](const Vec3& x, std::size_t) { return f(x)[c]; }, degree));
  return out;
}

namespace {

bool norm_face(const FaceRecord& f, NormBoundary which) {
  if (!f.is_boundary()) return true;
  return which == NormBoundary::Pressure ? f.pressure_tag == PressureTag::Dirichlet
                                         : f.displacement_tag == DisplacementTag::Dirichlet;
}

// h_e^{-1} ||[q]||^2 summed over the selected faces; q is linear so degree 2 is exact.
double jump_term(const Mesh& mesh, const DGScalarField& q, NormBoundary which) {
  const TriRule rule = tri_rule(2);
  double sum = 0.0;
  for (const FaceRecord& f : mesh.faces) {
    if (!norm_face(f, which)) continue;
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      double jump = q.value(f.e1, face_to_element_bary(f, 0, rule.bary[k]));
      if (!f.is_boundary()) jump -= q.value(f.e2, face_to_element_bary(f, 1, rule.bary[k]));
      acc += rule.weights[k] * jump * jump;
    }
    sum += acc * f.area / f.diameter;
  }
  return sum;
}

double grad_sq(const Mesh& mesh, const DGScalarField& q) {
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) sum += mesh.elem_volumes[e] * q.gradient(mesh, e).squaredNorm();
  return sum;
}

double l2_sq(const Mesh& mesh, const DGScalarField& q) {
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    // Exact P1 mass: (vol/20)(|c|^2 + (sum c)^2).
    const Eigen::Vector4d c = q.local(e);
    sum += mesh.elem_volumes[e] / 20.0 * (c.squaredNorm() + c.sum() * c.sum());
  }
  return sum;
}

}  // namespace

double dg_norm(const Mesh& mesh, const DGScalarField& q, NormBoundary which) {
  return std::sqrt(grad_sq(mesh, q) + jump_term(mesh, q, which));
}

double dg_norm(const Mesh& mesh, const DGVectorField& v) {
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    const DGScalarField comp = v.component(c);
    sum += grad_sq(mesh, comp) + jump_term(mesh, comp, NormBoundary::Displacement);
  }
  return std::sqrt(sum);
}

double broken_grad_norm(const Mesh& mesh, const DGScalarField& q) { return std::sqrt(grad_sq(mesh, q)); }

double l2_norm(const Mesh& mesh, const DGScalarField& q) { return std::sqrt(l2_sq(mesh, q)); }

double l2_norm(const Mesh& mesh, const DGVectorField& v) {
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) sum += l2_sq(mesh, v.component(c));
  return std::sqrt(sum);
}

double l2_error(const Mesh& mesh, const DGScalarField& q, const std::function<double(const Vec3&)>& exact, int degree) {
  const TetRule rule = tet_rule(degree);
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double d = exact(volume_point(mesh, e, rule.bary[k])) - q.value(e, rule.bary[k]);
      acc += rule.weights[k] * d * d;
    }
    sum += acc * mesh.elem_volumes[e];
  }
  return std::sqrt(sum);
}

double l2_error(const Mesh& mesh, const DGVectorField& v, const std::function<Vec3(const Vec3&)>& exact, int degree) {
  const TetRule rule = tet_rule(degree);
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k)
      acc += rule.weights[k] * (exact(volume_point(mesh, e, rule.bary[k])) - v.value(e, rule.bary[k])).squaredNorm();
    sum += acc * mesh.elem_volumes[e];
  }
  return std::sqrt(sum);
}

double broken_grad_error(const Mesh& mesh, const DGScalarField& q, const std::function<Vec3(const Vec3&)>& exact_grad,
                         int degree) {
  const TetRule rule = tet_rule(degree);
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Vec3 g = q.gradient(mesh, e);
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k)
      acc += rule.weights[k] * (exact_grad(volume_point(mesh, e, rule.bary[k])) - g).squaredNorm();
    sum += acc * mesh.elem_volumes[e];
  }
  return std::sqrt(sum);
}

}  // namespace porodg
