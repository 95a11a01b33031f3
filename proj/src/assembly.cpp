#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "porodg/dg.hpp"
#include "porodg/errors.hpp"

namespace porodg {

namespace {

using Triplets = std::vector<Eigen::Triplet<double, int>>;

SparseMatrix from_triplets(std::size_t rows, std::size_t cols, const Triplets& t) {
  SparseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

constexpr double side_sign(int s) { return s == 0 ? 1.0 : -1.0; }

bool pressure_face(const FaceRecord& f) { return !f.is_boundary() || f.pressure_tag == PressureTag::Dirichlet; }
bool displacement_face(const FaceRecord& f) {
  return !f.is_boundary() || f.displacement_tag == DisplacementTag::Dirichlet;
}

struct FaceSide {
  std::size_t elem = kNoElement;
  Eigen::Vector4d phi = Eigen::Vector4d::Zero();
  Eigen::Vector4d dphi_n = Eigen::Vector4d::Zero();  // grad(phi_k) . n_e
};

void check_positive(double chi, std::size_t elem) {
  if (!(chi > 0.0))
    throw AssemblyError("non-positive diffusion coefficient (" + std::to_string(chi) + ") in element " +
                        std::to_string(elem));
}

}  // namespace

Eigen::Matrix3d DGVectorField::gradient(const Mesh& mesh, std::size_t e) const {
  Eigen::Matrix3d g;
  for (int c = 0; c < 3; ++c) {
    const Eigen::Vector4d loc = coeffs.segment<4>(c * block() + 4 * e);
    g.row(c) = (mesh.bary_gradients[e].transpose() * loc).transpose();
  }
  return g;
}

CoefficientField CoefficientField::constant(double c) {
  return {[c](const PointContext&) { return c; }, {}};
}

CoefficientField CoefficientField::per_element(std::vector<double> values) {
  return {[v = std::move(values)](const PointContext& p) { return v[p.elem]; }, {}};
}

CoefficientField CoefficientField::function(std::function<double(const Vec3&)> f, std::function<Vec3(const Vec3&)> grad) {
  CoefficientField c;
  c.value = [f = std::move(f)](const PointContext& p) { return f(p.x); };
  if (grad) c.gradient = [g = std::move(grad)](const PointContext& p) { return g(p.x); };
  return c;
}

CoefficientField CoefficientField::from_field(const Mesh& mesh, const DGScalarField& field) {
  const Mesh* m = &mesh;
  return {[field](const PointContext& p) { return field.value(p.elem, p.bary); },
          [field, m](const PointContext& p) { return field.gradient(*m, p.elem); }};
}

void DiscretizationParams::validate() const {
  if (!(sigma_p > 0.0) || !(sigma_u > 0.0)) throw InvalidArgument("penalty parameters must be positive");
  if ((eps_p != -1 && eps_p != 1) || (eps_u != -1 && eps_u != 1)) throw InvalidArgument("eps_p, eps_u must be -1 or +1");
  if (gamma < 0.0) throw InvalidArgument("stabilization constant must be >= 0");
  if (quad_volume_order < 1 || quad_face_order < 1) throw InvalidArgument("quadrature orders must be >= 1");
}

JumpAverage jump_average(double side1, std::optional<double> side2) {
  if (!side2) return {side1, side1};
  return {side1 - *side2, 0.5 * (side1 + *side2)};
}

Vec3 volume_point(const Mesh& mesh, std::size_t e, const Eigen::Vector4d& bary) {
  const auto& t = mesh.tets[e];
  return bary[0] * mesh.vertices[t[0]] + bary[1] * mesh.vertices[t[1]] + bary[2] * mesh.vertices[t[2]] +
         bary[3] * mesh.vertices[t[3]];
}

Vec3 face_point(const Mesh& mesh, const FaceRecord& f, const Eigen::Vector3d& fb) {
  return fb[0] * mesh.vertices[f.vertices[0]] + fb[1] * mesh.vertices[f.vertices[1]] +
         fb[2] * mesh.vertices[f.vertices[2]];
}

Eigen::Vector4d face_to_element_bary(const FaceRecord& f, int side, const Eigen::Vector3d& fb) {
  Eigen::Vector4d b = Eigen::Vector4d::Zero();
  for (int k = 0; k < 3; ++k) b[f.local_vertex[side][k]] = fb[k];
  return b;
}

namespace {

// Evaluates both sides of a face at one face quadrature point.
int face_sides(const Mesh& mesh, const FaceRecord& f, const Eigen::Vector3d& fb, std::array<FaceSide, 2>& sides,
               PointContext* ctx = nullptr) {
  const int ns = f.is_boundary() ? 1 : 2;
  const Vec3 x = face_point(mesh, f, fb);
  for (int s = 0; s < ns; ++s) {
    FaceSide& fs = sides[s];
    fs.elem = f.element(s);
    fs.phi = face_to_element_bary(f, s, fb);
    fs.dphi_n = mesh.bary_gradients[fs.elem] * f.normal;
    if (ctx) ctx[s] = {fs.elem, x, fs.phi};
  }
  return ns;
}

}  // namespace

SparseMatrix assemble_diffusion(const Mesh& mesh, const CoefficientField& chi, const DiscretizationParams& disc) {
  const QuadratureSet q(disc);
  const std::size_t ne = mesh.num_elements();
  Triplets trip;
  trip.reserve(16 * ne + 64 * mesh.num_faces());

  for (std::size_t e = 0; e < ne; ++e) {
    double integral = 0.0;
    for (std::size_t k = 0; k < q.volume.size(); ++k) {
      const PointContext p{e, volume_point(mesh, e, q.volume.bary[k]), q.volume.bary[k]};
      const double c = chi(p);
      check_positive(c, e);
      integral += q.volume.weights[k] * c;
    }
    integral *= mesh.elem_volumes[e];
    const Eigen::Matrix<double, 4, 3>& g = mesh.bary_gradients[e];
    const Eigen::Matrix4d local = integral * g * g.transpose();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        trip.emplace_back(static_cast<int>(scalar_dof(e, i)), static_cast<int>(scalar_dof(e, j)), local(i, j));
  }

  const double eps = disc.eps_p;
  for (const FaceRecord& f : mesh.faces) {
    if (!pressure_face(f)) continue;
    const double pen = disc.sigma_p / f.diameter;
    const double avg = f.is_boundary() ? 1.0 : 0.5;
    Eigen::Matrix<double, 8, 8> local = Eigen::Matrix<double, 8, 8>::Zero();
    std::array<FaceSide, 2> sides;
    std::array<PointContext, 2> ctx;
    int ns = 1;
    for (std::size_t k = 0; k < q.face.size(); ++k) {
      ns = face_sides(mesh, f, q.face.bary[k], sides, ctx.data());
      std::array<double, 2> c{};
      for (int s = 0; s < ns; ++s) {
        c[s] = chi(ctx[s]);
        check_positive(c[s], sides[s].elem);
      }
      const double w = q.face.weights[k] * f.area;
      for (int si = 0; si < ns; ++si)
        for (int sj = 0; sj < ns; ++sj)
          for (int i = 0; i < 4; ++i) {
            const double jump_i = side_sign(si) * sides[si].phi[i];
            const double flux_i = avg * c[si] * sides[si].dphi_n[i];
            for (int j = 0; j < 4; ++j) {
              const double jump_j = side_sign(sj) * sides[sj].phi[j];
              const double flux_j = avg * c[sj] * sides[sj].dphi_n[j];
              local(4 * si + i, 4 * sj + j) += w * (pen * jump_j * jump_i - flux_j * jump_i + eps * flux_i * jump_j);
            }
          }
    }
    for (int si = 0; si < ns; ++si)
      for (int sj = 0; sj < ns; ++sj)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            trip.emplace_back(static_cast<int>(scalar_dof(f.element(si), i)), static_cast<int>(scalar_dof(f.element(sj), j)),
                              local(4 * si + i, 4 * sj + j));
  }
  return from_triplets(4 * ne, 4 * ne, trip);
}

SparseMatrix assemble_elasticity(const Mesh& mesh, double lame_lambda, double lame_mu, const DiscretizationParams& disc) {
  const QuadratureSet q(disc);
  const std::size_t ne = mesh.num_elements();
  const double mu = lame_mu;
  const double lm = lame_lambda + lame_mu;
  Triplets trip;
  trip.reserve(144 * ne + 576 * mesh.num_faces());

  for (std::size_t e = 0; e < ne; ++e) {
    const double vol = mesh.elem_volumes[e];
    const Eigen::Matrix<double, 4, 3>& g = mesh.bary_gradients[e];
    const Eigen::Matrix4d lap = vol * g * g.transpose();
    for (int ci = 0; ci < 3; ++ci)
      for (int cj = 0; cj < 3; ++cj)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            double v = lm * vol * g(i, ci) * g(j, cj);
            if (ci == cj) v += mu * lap(i, j);
            trip.emplace_back(static_cast<int>(vector_dof(mesh, ci, e, i)), static_cast<int>(vector_dof(mesh, cj, e, j)), v);
          }
  }

  const double eps = disc.eps_u;
  using Local = Eigen::Matrix<double, 24, 24>;
  auto idx = [](int s, int c, int k) { return 12 * s + 4 * c + k; };
  for (const FaceRecord& f : mesh.faces) {
    if (!displacement_face(f)) continue;
    const double pen = mu * disc.sigma_u / f.diameter;
    const double avg = f.is_boundary() ? 1.0 : 0.5;
    Local local = Local::Zero();
    std::array<FaceSide, 2> sides;
    int ns = 1;
    for (std::size_t k = 0; k < q.face.size(); ++k) {
      ns = face_sides(mesh, f, q.face.bary[k], sides);
      const double w = q.face.weights[k] * f.area;
      for (int si = 0; si < ns; ++si)
        for (int sj = 0; sj < ns; ++sj) {
          const Eigen::Matrix<double, 4, 3>& gj = mesh.bary_gradients[sides[sj].elem];
          for (int i = 0; i < 4; ++i) {
            const double jump_i = side_sign(si) * sides[si].phi[i];
            const double flux_i = avg * mu * sides[si].dphi_n[i];
            for (int j = 0; j < 4; ++j) {
              const double jump_j = side_sign(sj) * sides[sj].phi[j];
              const double flux_j = avg * mu * sides[sj].dphi_n[j];
              const double same = pen * jump_j * jump_i - flux_j * jump_i + eps * flux_i * jump_j;
              for (int ci = 0; ci < 3; ++ci) {
                local(idx(si, ci, i), idx(sj, ci, j)) += w * same;
                // -(lambda + mu) ({div u}, [v . n])
                for (int cj = 0; cj < 3; ++cj)
                  local(idx(si, ci, i), idx(sj, cj, j)) -= w * lm * avg * gj(j, cj) * jump_i * f.normal[ci];
              }
            }
          }
        }
    }
    for (int si = 0; si < ns; ++si)
      for (int sj = 0; sj < ns; ++sj)
        for (int ci = 0; ci < 3; ++ci)
          for (int cj = 0; cj < 3; ++cj)
            for (int i = 0; i < 4; ++i)
              for (int j = 0; j < 4; ++j) {
                const double v = local(idx(si, ci, i), idx(sj, cj, j));
                if (v != 0.0)
                  trip.emplace_back(static_cast<int>(vector_dof(mesh, ci, f.element(si), i)),
                                    static_cast<int>(vector_dof(mesh, cj, f.element(sj), j)), v);
              }
  }
  return from_triplets(12 * ne, 12 * ne, trip);
}

SparseMatrix assemble_bu(const Mesh& mesh, const CoefficientField& chi, const DiscretizationParams& disc) {
  const QuadratureSet q(disc);
  const std::size_t ne = mesh.num_elements();
  Triplets trip;
  trip.reserve(48 * ne + 192 * mesh.num_faces());

  // -(u, grad(chi q))_E with grad(chi q) = chi grad q + q grad chi.
  for (std::size_t e = 0; e < ne; ++e) {
    const double vol = mesh.elem_volumes[e];
    const Eigen::Matrix<double, 4, 3>& g = mesh.bary_gradients[e];
    Eigen::Matrix<double, 4, 12> local = Eigen::Matrix<double, 4, 12>::Zero();
    for (std::size_t k = 0; k < q.volume.size(); ++k) {
      const Eigen::Vector4d& b = q.volume.bary[k];
      const PointContext p{e, volume_point(mesh, e, b), b};
      const double c = chi(p);
      const Vec3 gc = chi.grad(p);
      const double w = q.volume.weights[k] * vol;
      for (int i = 0; i < 4; ++i)
        for (int cj = 0; cj < 3; ++cj) {
          const double d = c * g(i, cj) + b[i] * gc[cj];
          for (int j = 0; j < 4; ++j) local(i, 4 * cj + j) -= w * b[j] * d;
        }
    }
    for (int i = 0; i < 4; ++i)
      for (int cj = 0; cj < 3; ++cj)
        for (int j = 0; j < 4; ++j)
          trip.emplace_back(static_cast<int>(scalar_dof(e, i)), static_cast<int>(vector_dof(mesh, cj, e, j)),
                            local(i, 4 * cj + j));
  }

  // ({u . n_e}, [chi q])_e on every face.
  for (const FaceRecord& f : mesh.faces) {
    const double avg = f.is_boundary() ? 1.0 : 0.5;
    Eigen::Matrix<double, 8, 24> local = Eigen::Matrix<double, 8, 24>::Zero();
    std::array<FaceSide, 2> sides;
    std::array<PointContext, 2> ctx;
    int ns = 1;
    for (std::size_t k = 0; k < q.face.size(); ++k) {
      ns = face_sides(mesh, f, q.face.bary[k], sides, ctx.data());
      const double w = q.face.weights[k] * f.area;
      for (int si = 0; si < ns; ++si) {
        const double c = chi(ctx[si]);
        for (int i = 0; i < 4; ++i) {
          const double jump_i = side_sign(si) * c * sides[si].phi[i];
          for (int sj = 0; sj < ns; ++sj)
            for (int cj = 0; cj < 3; ++cj)
              for (int j = 0; j < 4; ++j)
                local(4 * si + i, 12 * sj + 4 * cj + j) += w * avg * sides[sj].phi[j] * f.normal[cj] * jump_i;
        }
      }
    }
    for (int si = 0; si < ns; ++si)
      for (int i = 0; i < 4; ++i)
        for (int sj = 0; sj < ns; ++sj)
          for (int cj = 0; cj < 3; ++cj)
            for (int j = 0; j < 4; ++j) {
              const double v = local(4 * si + i, 12 * sj + 4 * cj + j);
              if (v != 0.0)
                trip.emplace_back(static_cast<int>(scalar_dof(f.element(si), i)),
                                  static_cast<int>(vector_dof(mesh, cj, f.element(sj), j)), v);
            }
  }
  return from_triplets(4 * ne, 12 * ne, trip);
}

SparseMatrix assemble_bp(const Mesh& mesh, const DiscretizationParams& disc) {
  const QuadratureSet q(disc);
  const std::size_t ne = mesh.num_elements();
  Triplets trip;
  trip.reserve(48 * ne + 192 * mesh.num_faces());

  // (grad q, v)_E: integral of phi_i over a tet is vol / 4.
  for (std::size_t e = 0; e < ne; ++e) {
    const double vol = mesh.elem_volumes[e];
    const Eigen::Matrix<double, 4, 3>& g = mesh.bary_gradients[e];
    for (int ci = 0; ci < 3; ++ci)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          trip.emplace_back(static_cast<int>(vector_dof(mesh, ci, e, i)), static_cast<int>(scalar_dof(e, j)),
                            0.25 * vol * g(j, ci));
  }

  // -([q], {v . n_e})_e on interior faces only.
  for (const FaceRecord& f : mesh.faces) {
    if (f.is_boundary()) continue;
    Eigen::Matrix<double, 24, 8> local = Eigen::Matrix<double, 24, 8>::Zero();
    std::array<FaceSide, 2> sides;
    for (std::size_t k = 0; k < q.face.size(); ++k) {
      face_sides(mesh, f, q.face.bary[k], sides);
      const double w = q.face.weights[k] * f.area;
      for (int si = 0; si < 2; ++si)
        for (int ci = 0; ci < 3; ++ci)
          for (int i = 0; i < 4; ++i) {
            const double avg_vn = 0.5 * sides[si].phi[i] * f.normal[ci];
            for (int sj = 0; sj < 2; ++sj)
              for (int j = 0; j < 4; ++j)
                local(12 * si + 4 * ci + i, 4 * sj + j) -= w * side_sign(sj) * sides[sj].phi[j] * avg_vn;
          }
    }
    for (int si = 0; si < 2; ++si)
      for (int ci = 0; ci < 3; ++ci)
        for (int i = 0; i < 4; ++i)
          for (int sj = 0; sj < 2; ++sj)
            for (int j = 0; j < 4; ++j) {
              const double v = local(12 * si + 4 * ci + i, 4 * sj + j);
              if (v != 0.0)
                trip.emplace_back(static_cast<int>(vector_dof(mesh, ci, f.element(si), i)),
                                  static_cast<int>(scalar_dof(f.element(sj), j)), v);
            }
  }
  return from_triplets(12 * ne, 4 * ne, trip);
}

Eigen::VectorXd assemble_bp_load(const Mesh& mesh, const CoefficientField& qf, const DiscretizationParams& disc) {
  const QuadratureSet q(disc);
  const std::size_t ne = mesh.num_elements();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(12 * ne));
  for (std::size_t e = 0; e < ne; ++e) {
    const double vol = mesh.elem_volumes[e];
    for (std::size_t k = 0; k < q.volume.size(); ++k) {
      const Eigen::Vector4d& b = q.volume.bary[k];
      const PointContext p{e, volume_point(mesh, e, b), b};
      const Vec3 gq = qf.grad(p);
      const double w = q.volume.weights[k] * vol;
      for (int ci = 0; ci < 3; ++ci)
        for (int i = 0; i < 4; ++i) out[static_cast<Eigen::Index>(vector_dof(mesh, ci, e, i))] += w * gq[ci] * b[i];
    }
  }
  for (const FaceRecord& f : mesh.faces) {
    if (f.is_boundary()) continue;
    std::array<FaceSide, 2> sides;
    std::array<PointContext, 2> ctx;
    for (std::size_t k = 0; k < q.face.size(); ++k) {
      face_sides(mesh, f, q.face.bary[k], sides, ctx.data());
      const double w = q.face.weights[k] * f.area;
      const double jump = qf(ctx[0]) - qf(ctx[1]);
      for (int si = 0; si < 2; ++si)
        for (int ci = 0; ci < 3; ++ci)
          for (int i = 0; i < 4; ++i)
            out[static_cast<Eigen::Index>(vector_dof(mesh, ci, sides[si].elem, i))] -=
                w * jump * 0.5 * sides[si].phi[i] * f.normal[ci];
    }
  }
  return out;
}

SparseMatrix assemble_weighted_mass(const Mesh& mesh, const CoefficientField& wf, const DiscretizationParams& disc) {
  const QuadratureSet q(disc);
  const std::size_t ne = mesh.num_elements();
  Triplets trip;
  trip.reserve(16 * ne);
  for (std::size_t e = 0; e < ne; ++e) {
    Eigen::Matrix4d local = Eigen::Matrix4d::Zero();
    for (std::size_t k = 0; k < q.volume.size(); ++k) {
      const Eigen::Vector4d& b = q.volume.bary[k];
      const PointContext p{e, volume_point(mesh, e, b), b};
      local += (q.volume.weights[k] * wf(p)) * b * b.transpose();
    }
    local *= mesh.elem_volumes[e];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        trip.emplace_back(static_cast<int>(scalar_dof(e, i)), static_cast<int>(scalar_dof(e, j)), local(i, j));
  }
  return from_triplets(4 * ne, 4 * ne, trip);
}

SparseMatrix assemble_vector_mass(const Mesh& mesh, const CoefficientField& w, const DiscretizationParams& disc) {
  const SparseMatrix m = assemble_weighted_mass(mesh, w, disc);
  const Eigen::Index n = m.rows();
  Triplets trip;
  trip.reserve(3 * static_cast<std::size_t>(m.nonZeros()));
  for (int c = 0; c < 3; ++c)
    for (Eigen::Index r = 0; r < n; ++r)
      for (SparseMatrix::InnerIterator it(m, r); it; ++it)
        trip.emplace_back(static_cast<int>(c * n + r), static_cast<int>(c * n + it.col()), it.value());
  return from_triplets(static_cast<std::size_t>(3 * n), static_cast<std::size_t>(3 * n), trip);
}

Eigen::VectorXd assemble_rhs_flow(const Mesh& mesh, const FlowPhaseData& data, const CoefficientField& chi,
                                  const DiscretizationParams& disc, double t) {
  const QuadratureSet q(disc);
  const std::size_t ne = mesh.num_elements();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(4 * ne));
  if (data.source) {
    for (std::size_t e = 0; e < ne; ++e)
      for (std::size_t k = 0; k < q.volume.size(); ++k) {
        const Eigen::Vector4d& b = q.volume.bary[k];
        const double w = q.volume.weights[k] * mesh.elem_volumes[e] * data.source(volume_point(mesh, e, b), t, -1);
        out.segment<4>(static_cast<Eigen::Index>(4 * e)) += w * b;
      }
  }
  for (const FaceRecord& f : mesh.faces) {
    if (!f.is_boundary()) continue;
    const bool dirichlet = f.pressure_tag == PressureTag::Dirichlet;
    if (dirichlet && !data.dirichlet) throw ConfigError("pressure-Dirichlet face without Dirichlet data");
    if (!dirichlet && !data.neumann) throw ConfigError("pressure-Neumann face without flux data");
    const double pen = disc.sigma_p / f.diameter;
    std::array<FaceSide, 2> sides;
    std::array<PointContext, 2> ctx;
    for (std::size_t k = 0; k < q.face.size(); ++k) {
      face_sides(mesh, f, q.face.bary[k], sides, ctx.data());
      const double w = q.face.weights[k] * f.area;
      auto seg = out.segment<4>(static_cast<Eigen::Index>(4 * f.e1));
      if (dirichlet) {
        const double pd = data.dirichlet(ctx[0].x, t, f.marker);
        const double c = chi(ctx[0]);
        seg += (w * pd) * (disc.eps_p * c * sides[0].dphi_n + pen * sides[0].phi);
      } else {
        seg += (w * data.neumann(ctx[0].x, t, f.marker)) * sides[0].phi;
      }
    }
  }
  return out;
}

Eigen::VectorXd flow_residual(const Mesh& mesh, const FlowPhaseData& data, const CoefficientField& chi,
                              const DiscretizationParams& disc, double t, const DGScalarField& p) {
  const QuadratureSet q(disc);
  const std::size_t ne = mesh.num_elements();
  if (p.num_elements() != ne) throw InvalidArgument("flow_residual: field does not match the mesh");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(4 * ne));
  auto grad = [&](std::size_t e) {
    // Differences against one vertex value keep the gradient of a flat field exact.
    const Eigen::Vector4d loc = p.local(e);
    return Vec3(mesh.bary_gradients[e].transpose() * (loc.array() - loc[0]).matrix());
  };

  for (std::size_t e = 0; e < ne; ++e) {
    double integral = 0.0;
    for (std::size_t k = 0; k < q.volume.size(); ++k) {
      const Eigen::Vector4d& b = q.volume.bary[k];
      const PointContext pc{e, volume_point(mesh, e, b), b};
      const double c = chi(pc);
      check_positive(c, e);
      integral += q.volume.weights[k] * c;
      if (data.source) out.segment<4>(static_cast<Eigen::Index>(4 * e)) +=
          (q.volume.weights[k] * mesh.elem_volumes[e] * data.source(pc.x, t, -1)) * b;
    }
    out.segment<4>(static_cast<Eigen::Index>(4 * e)) -=
        (integral * mesh.elem_volumes[e]) * (mesh.bary_gradients[e] * grad(e));
  }

  for (const FaceRecord& f : mesh.faces) {
    const bool boundary = f.is_boundary();
    const bool dirichlet = boundary && f.pressure_tag == PressureTag::Dirichlet;
    if (boundary && !dirichlet) {
      if (!data.neumann) throw ConfigError("pressure-Neumann face without flux data");
      for (std::size_t k = 0; k < q.face.size(); ++k) {
        std::array<FaceSide, 2> sides;
        face_sides(mesh, f, q.face.bary[k], sides);
        const double g = data.neumann(face_point(mesh, f, q.face.bary[k]), t, f.marker);
        out.segment<4>(static_cast<Eigen::Index>(4 * f.e1)) += (q.face.weights[k] * f.area * g) * sides[0].phi;
      }
      continue;
    }
    if (dirichlet && !data.dirichlet) throw ConfigError("pressure-Dirichlet face without Dirichlet data");
    const double pen = disc.sigma_p / f.diameter;
    const double avg = boundary ? 1.0 : 0.5;
    const int ns = boundary ? 1 : 2;
    std::array<Vec3, 2> gr{grad(f.e1), boundary ? Vec3::Zero().eval() : grad(f.e2)};
    for (std::size_t k = 0; k < q.face.size(); ++k) {
      const Eigen::Vector3d& fb = q.face.bary[k];
      std::array<FaceSide, 2> sides;
      std::array<PointContext, 2> ctx;
      face_sides(mesh, f, fb, sides, ctx.data());
      // Jump from vertex-paired differences; the two sides share the face vertices.
      double jump = 0.0;
      if (boundary) {
        jump = p.value(f.e1, sides[0].phi) - data.dirichlet(ctx[0].x, t, f.marker);
      } else {
        for (int v = 0; v < 3; ++v)
          jump += fb[v] * (p.coeffs[static_cast<Eigen::Index>(4 * f.e1 + f.local_vertex[0][v])] -
                           p.coeffs[static_cast<Eigen::Index>(4 * f.e2 + f.local_vertex[1][v])]);
      }
      std::array<double, 2> c{};
      double flux = 0.0;
      for (int s = 0; s < ns; ++s) {
        c[s] = chi(ctx[s]);
        check_positive(c[s], sides[s].elem);
        flux += avg * c[s] * gr[s].dot(f.normal);
      }
      const double w = q.face.weights[k] * f.area;
      for (int s = 0; s < ns; ++s) {
        const Eigen::Vector4d jump_i = side_sign(s) * sides[s].phi;
        const Eigen::Vector4d flux_i = (avg * c[s]) * sides[s].dphi_n;
        out.segment<4>(static_cast<Eigen::Index>(4 * sides[s].elem)) +=
            w * ((flux - pen * jump) * jump_i - (disc.eps_p * jump) * flux_i);
      }
    }
  }
  return out;
}

Eigen::VectorXd assemble_rhs_elasticity(const Mesh& mesh, const MechanicsData& data, double lame_mu,
                                        const DiscretizationParams& disc, double t) {
  const QuadratureSet q(disc);
  const std::size_t ne = mesh.num_elements();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(12 * ne));
  auto add = [&](std::size_t e, const Vec3& v, const Eigen::Vector4d& phi) {
    for (int c = 0; c < 3; ++c) out.segment<4>(static_cast<Eigen::Index>(vector_dof(mesh, c, e, 0))) += v[c] * phi;
  };
  if (data.body_force) {
    for (std::size_t e = 0; e < ne; ++e)
      for (std::size_t k = 0; k < q.volume.size(); ++k) {
        const Eigen::Vector4d& b = q.volume.bary[k];
        const double w = q.volume.weights[k] * mesh.elem_volumes[e];
        add(e, w * data.body_force(volume_point(mesh, e, b), t, -1), b);
      }
  }
  for (const FaceRecord& f : mesh.faces) {
    if (!f.is_boundary()) continue;
    const bool dirichlet = f.displacement_tag == DisplacementTag::Dirichlet;
    if (dirichlet && !data.dirichlet) throw ConfigError("displacement-Dirichlet face without Dirichlet data");
    const double pen = lame_mu * disc.sigma_u / f.diameter;
    if (!dirichlet && !data.traction) throw ConfigError("displacement-Neumann face without traction data");
    std::array<FaceSide, 2> sides;
    for (std::size_t k = 0; k < q.face.size(); ++k) {
      face_sides(mesh, f, q.face.bary[k], sides);
      const Vec3 x = face_point(mesh, f, q.face.bary[k]);
      const double w = q.face.weights[k] * f.area;
      if (dirichlet) {
        const Vec3 ud = w * data.dirichlet(x, t, f.marker);
        for (int c = 0; c < 3; ++c)
          out.segment<4>(static_cast<Eigen::Index>(vector_dof(mesh, c, f.e1, 0))) +=
              ud[c] * (disc.eps_u * lame_mu * sides[0].dphi_n + pen * sides[0].phi);
      } else {
        add(f.e1, w * data.traction(x, t, f.marker), sides[0].phi);
      }
    }
  }
  return out;
}

}  // namespace porodg
