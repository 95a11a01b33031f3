#include "porodg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>

#include "porodg/errors.hpp"

namespace porodg {

namespace {

struct TripleHash {
  std::size_t operator()(const std::array<std::size_t, 3>& k) const noexcept {
    std::size_t h = k[0];
    h = h * 1000003u ^ k[1];
    h = h * 1000003u ^ k[2];
    return h;
  }
};

// Local vertex triples of the faces opposite local vertex 0..3.
constexpr std::array<std::array<int, 3>, 4> kFaceLocal = {{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

double longest_edge(const std::vector<Vec3>& pts) {
  double h = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) h = std::max(h, (pts[i] - pts[j]).norm());
  return h;
}

}  // namespace

bool Box::contains(const Vec3& x, double tol) const {
  return (x.array() >= lo.array() - tol).all() && (x.array() <= hi.array() + tol).all();
}

bool on_plane(const Box& box, BoxPlane plane, const Vec3& x) {
  const int p = static_cast<int>(plane);
  const int axis = p / 2;
  const double value = (p % 2 == 0) ? box.lo[axis] : box.hi[axis];
  return std::abs(x[axis] - value) <= box.plane_tolerance();
}

std::optional<BoxPlane> plane_of(const Box& box, const Vec3& x) {
  for (int p = 0; p < 6; ++p)
    if (on_plane(box, static_cast<BoxPlane>(p), x)) return static_cast<BoxPlane>(p);
  return std::nullopt;
}

Vec3 Mesh::centroid(std::size_t elem) const {
  const auto& t = tets[elem];
  return 0.25 * (vertices[t[0]] + vertices[t[1]] + vertices[t[2]] + vertices[t[3]]);
}

Eigen::Vector4d Mesh::barycentric(std::size_t elem, const Vec3& x) const {
  const Eigen::Matrix<double, 4, 3>& g = bary_gradients[elem];
  const Vec3 d = x - vertices[tets[elem][0]];
  Eigen::Vector4d b;
  b.tail<3>() = g.bottomRows<3>() * d;
  b[0] = 1.0 - b.tail<3>().sum();
  return b;
}

Vec3 Mesh::outward_normal(std::size_t elem, int local_face) const {
  // The gradient of the barycentric coordinate of the opposite vertex points inward.
  return -bary_gradients[elem].row(local_face).transpose().normalized();
}

std::optional<std::size_t> Mesh::locate(const Vec3& x, double tol) const {
  auto inside = [&](std::size_t e) { return barycentric(e, x).minCoeff() >= -tol; };
  if (grid) {
    const Box& b = grid->box;
    const Vec3 h = b.extent().cwiseQuotient(Vec3(grid->nx, grid->ny, grid->nz));
    const std::array<std::size_t, 3> n = {grid->nx, grid->ny, grid->nz};
    std::array<long, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      const double s = (x[a] - b.lo[a]) / h[a];
      const double slack = 1e-8 + tol;
      lo[a] = std::max(0L, static_cast<long>(std::floor(s - slack)));
      hi[a] = std::min(static_cast<long>(n[a]) - 1, static_cast<long>(std::floor(s + slack)));
      if (lo[a] > hi[a]) return std::nullopt;
    }
    std::optional<std::size_t> best;
    for (long k = lo[2]; k <= hi[2]; ++k)
      for (long j = lo[1]; j <= hi[1]; ++j)
        for (long i = lo[0]; i <= hi[0]; ++i) {
          const std::size_t cell = static_cast<std::size_t>(i) + n[0] * (static_cast<std::size_t>(j) + n[1] * static_cast<std::size_t>(k));
          for (std::size_t t = 0; t < 6; ++t) {
            const std::size_t e = 6 * cell + t;
            if ((!best || e < *best) && inside(e)) best = e;
          }
        }
    return best;
  }
  for (std::size_t e = 0; e < num_elements(); ++e)
    if (inside(e)) return e;
  return std::nullopt;
}

Mesh compute_geometry(Mesh mesh) {
  const std::size_t ne = mesh.tets.size();
  mesh.elem_volumes.assign(ne, 0.0);
  mesh.elem_diameters.assign(ne, 0.0);
  mesh.bary_gradients.assign(ne, Eigen::Matrix<double, 4, 3>::Zero());
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& t = mesh.tets[e];
    for (auto v : t)
      if (v >= mesh.vertices.size()) throw InvalidArgument("tet references missing vertex " + std::to_string(v));
    Eigen::Matrix3d jac;
    for (int k = 0; k < 3; ++k) jac.col(k) = mesh.vertices[t[k + 1]] - mesh.vertices[t[0]];
    const double det = jac.determinant();
    if (!(det > 0.0)) throw InvalidArgument("tet " + std::to_string(e) + " has non-positive volume");
    mesh.elem_volumes[e] = det / 6.0;
    const Eigen::Matrix3d inv = jac.inverse();
    Eigen::Matrix<double, 4, 3>& g = mesh.bary_gradients[e];
    g.bottomRows<3>() = inv;
    g.row(0) = -inv.colwise().sum();
    mesh.elem_diameters[e] = longest_edge({mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], mesh.vertices[t[3]]});
  }
  return mesh;
}

Mesh build_face_topology(Mesh mesh) {
  if (mesh.bary_gradients.size() != mesh.tets.size()) mesh = compute_geometry(std::move(mesh));
  const std::size_t ne = mesh.tets.size();
  std::unordered_map<std::array<std::size_t, 3>, std::size_t, TripleHash> index;
  index.reserve(4 * ne);
  mesh.faces.clear();
  mesh.elem_faces.assign(ne, {kNoElement, kNoElement, kNoElement, kNoElement});

  for (std::size_t e = 0; e < ne; ++e) {
    const auto& t = mesh.tets[e];
    for (int lf = 0; lf < 4; ++lf) {
      std::array<std::size_t, 3> key = {t[kFaceLocal[lf][0]], t[kFaceLocal[lf][1]], t[kFaceLocal[lf][2]]};
      std::sort(key.begin(), key.end());
      auto [it, inserted] = index.try_emplace(key, mesh.faces.size());
      if (inserted) {
        FaceRecord f;
        f.vertices = key;
        f.e1 = e;
        mesh.faces.push_back(f);
      } else {
        FaceRecord& f = mesh.faces[it->second];
        if (f.e2 != kNoElement)
          throw TopologyError("face shared by more than two tets (element " + std::to_string(e) + ")");
        // Elements are visited in increasing id, so the first owner has the lower id.
        f.e2 = e;
      }
      mesh.elem_faces[e][lf] = it->second;
    }
  }

  for (FaceRecord& f : mesh.faces) {
    for (int s = 0; s < 2; ++s) {
      const std::size_t e = f.element(s);
      if (e == kNoElement) continue;
      for (int k = 0; k < 3; ++k) {
        const auto& t = mesh.tets[e];
        f.local_vertex[s][k] = static_cast<int>(std::find(t.begin(), t.end(), f.vertices[k]) - t.begin());
      }
    }
    const Vec3& a = mesh.vertices[f.vertices[0]];
    const Vec3& b = mesh.vertices[f.vertices[1]];
    const Vec3& c = mesh.vertices[f.vertices[2]];
    Vec3 n = (b - a).cross(c - a);
    f.area = 0.5 * n.norm();
    if (!(f.area > 0.0)) throw TopologyError("degenerate face");
    n.normalize();
    // Orient away from the vertex of e1 not on the face.
    const int opposite = 6 - f.local_vertex[0][0] - f.local_vertex[0][1] - f.local_vertex[0][2];
    if (n.dot(mesh.vertex(f.e1, opposite) - a) > 0.0) n = -n;
    f.normal = n;
    f.centroid = (a + b + c) / 3.0;
    f.diameter = longest_edge({a, b, c});
    f.pressure_tag = PressureTag::Interior;
    f.displacement_tag = DisplacementTag::Interior;
    f.marker = -1;
  }
  return mesh;
}

Mesh make_mesh(std::vector<Vec3> vertices, std::vector<std::array<std::size_t, 4>> tets) {
  Mesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.tets = std::move(tets);
  return build_face_topology(compute_geometry(std::move(mesh)));
}

Mesh build_structured_tet_mesh(long nx, long ny, long nz, const Box& box) {
  if (nx < 1 || ny < 1 || nz < 1) throw InvalidArgument("mesh counts must be >= 1");
  if (!((box.hi - box.lo).minCoeff() > 0.0)) throw InvalidArgument("box extents must be positive");
  const std::size_t mx = static_cast<std::size_t>(nx), my = static_cast<std::size_t>(ny),
                    mz = static_cast<std::size_t>(nz);
  std::vector<Vec3> verts;
  verts.reserve((mx + 1) * (my + 1) * (mz + 1));
  const Vec3 h = box.extent().cwiseQuotient(Vec3(double(mx), double(my), double(mz)));
  for (std::size_t k = 0; k <= mz; ++k)
    for (std::size_t j = 0; j <= my; ++j)
      for (std::size_t i = 0; i <= mx; ++i)
        verts.emplace_back(box.lo + Vec3(i * h[0], j * h[1], k * h[2]));
  // Exact top faces regardless of roundoff in i*h.
  for (Vec3& v : verts)
    for (int a = 0; a < 3; ++a)
      if (std::abs(v[a] - box.hi[a]) < 1e-12 * box.extent()[a]) v[a] = box.hi[a];

  auto vid = [&](std::size_t i, std::size_t j, std::size_t k) { return i + (mx + 1) * (j + (my + 1) * k); };
  // Kuhn triangulation: one tet per axis permutation, walking 000 -> 111.
  constexpr std::array<std::array<int, 3>, 6> perms = {{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  std::vector<std::array<std::size_t, 4>> tets;
  tets.reserve(6 * mx * my * mz);
  for (std::size_t k = 0; k < mz; ++k)
    for (std::size_t j = 0; j < my; ++j)
      for (std::size_t i = 0; i < mx; ++i)
        for (const auto& p : perms) {
          std::array<std::size_t, 3> c = {0, 0, 0};
          std::array<std::size_t, 4> t{};
          t[0] = vid(i, j, k);
          for (int s = 0; s < 3; ++s) {
            c[p[s]] = 1;
            t[s + 1] = vid(i + c[0], j + c[1], k + c[2]);
          }
          // Odd permutations give negative orientation.
          const Vec3 d1 = verts[t[1]] - verts[t[0]], d2 = verts[t[2]] - verts[t[0]], d3 = verts[t[3]] - verts[t[0]];
          if (d1.cross(d2).dot(d3) < 0.0) std::swap(t[1], t[2]);
          tets.push_back(t);
        }

  Mesh mesh = make_mesh(std::move(verts), std::move(tets));
  mesh.grid = StructuredGrid{mx, my, mz, box};
  for (FaceRecord& f : mesh.faces)
    if (f.is_boundary())
      if (auto p = plane_of(box, f.centroid)) f.marker = static_cast<int>(*p);
  return mesh;
}

Mesh tag_boundary(Mesh mesh, const PressureRule& pressure_rule, const DisplacementRule& displacement_rule) {
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    FaceRecord& f = mesh.faces[i];
    if (!f.is_boundary()) {
      f.pressure_tag = PressureTag::Interior;
      f.displacement_tag = DisplacementTag::Interior;
      continue;
    }
    auto p = pressure_rule(f.centroid);
    auto d = displacement_rule(f.centroid);
    auto where = [&] {
      return "boundary face " + std::to_string(i) + " at (" + std::to_string(f.centroid.x()) + ", " +
             std::to_string(f.centroid.y()) + ", " + std::to_string(f.centroid.z()) + ")";
    };
    if (!p || *p == PressureTag::Interior) throw ConfigError(where() + " matches no pressure rule");
    if (!d || *d == DisplacementTag::Interior) throw ConfigError(where() + " matches no displacement rule");
    f.pressure_tag = *p;
    f.displacement_tag = *d;
  }
  return mesh;
}

}  // namespace porodg
