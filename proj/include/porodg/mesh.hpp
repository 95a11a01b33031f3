#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace porodg {

using Vec3 = Eigen::Vector3d;

inline constexpr std::size_t kNoElement = std::numeric_limits<std::size_t>::max();

enum class PressureTag : std::uint8_t { Interior, Dirichlet, Neumann };
enum class DisplacementTag : std::uint8_t { Interior, Dirichlet, Neumann };

/// Axis-aligned box [lo, hi].
struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();

  Vec3 extent() const { return hi - lo; }
  double volume() const { return extent().prod(); }
  /// Plane-membership tolerance, 1e-9 times the largest extent.
  double plane_tolerance() const { return 1e-9 * extent().maxCoeff(); }
  bool contains(const Vec3& x, double tol = 0.0) const;
};

/// Box boundary planes, used as face markers on structured meshes.
enum class BoxPlane : int { XMin = 0, XMax, YMin, YMax, ZMin, ZMax };

struct FaceRecord {
  std::array<std::size_t, 3> vertices{};
  std::size_t e1 = kNoElement;
  std::size_t e2 = kNoElement;
  /// local_vertex[s][k]: position of face vertex k inside the vertex list of side s (0 -> e1, 1 -> e2).
  std::array<std::array<int, 3>, 2> local_vertex{};
  /// Unit normal pointing from e1 into e2, or outward on the boundary.
  Vec3 normal = Vec3::Zero();
  Vec3 centroid = Vec3::Zero();
  double area = 0.0;
  /// Longest edge of the triangle.
  double diameter = 0.0;
  PressureTag pressure_tag = PressureTag::Interior;
  DisplacementTag displacement_tag = DisplacementTag::Interior;
  /// BoxPlane index for boundary faces of box meshes, -1 otherwise.
  int marker = -1;

  bool is_boundary() const { return e2 == kNoElement; }
  std::size_t element(int side) const { return side == 0 ? e1 : e2; }
};

struct StructuredGrid {
  std::size_t nx = 0, ny = 0, nz = 0;
  Box box;
};

/// Conforming tetrahedral mesh with DG face topology.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::size_t, 4>> tets;
  std::vector<FaceRecord> faces;
  std::vector<double> elem_diameters;
  std::vector<double> elem_volumes;
  /// Row k holds the (constant) gradient of barycentric coordinate k.
  std::vector<Eigen::Matrix<double, 4, 3>> bary_gradients;
  /// elem_faces[e][k] is the face opposite local vertex k.
  std::vector<std::array<std::size_t, 4>> elem_faces;
  std::optional<StructuredGrid> grid;

  std::size_t num_elements() const { return tets.size(); }
  std::size_t num_faces() const { return faces.size(); }
  Vec3 vertex(std::size_t elem, int local) const { return vertices[tets[elem][local]]; }
  Vec3 centroid(std::size_t elem) const;
  Eigen::Vector4d barycentric(std::size_t elem, const Vec3& x) const;
  /// Outward unit normal of element `elem` on its local face `local_face`.
  Vec3 outward_normal(std::size_t elem, int local_face) const;
  /// Lowest element id whose closure contains x (within tol in barycentric terms).
  std::optional<std::size_t> locate(const Vec3& x, double tol = 1e-10) const;
};

/// Splits every cell of an nx*ny*nz grid into the 6 Kuhn tetrahedra.
Mesh build_structured_tet_mesh(long nx, long ny, long nz, const Box& box);

/// Computes per-element geometry (volume, diameter, barycentric gradients).
Mesh compute_geometry(Mesh mesh);

/// Builds oriented faces: e1 is the lower element id and the normal points e1 -> e2.
Mesh build_face_topology(Mesh mesh);

/// Geometry + topology for an arbitrary tet list.
Mesh make_mesh(std::vector<Vec3> vertices, std::vector<std::array<std::size_t, 4>> tets);

using PressureRule = std::function<std::optional<PressureTag>(const Vec3& centroid)>;
using DisplacementRule = std::function<std::optional<DisplacementTag>(const Vec3& centroid)>;

/// Tags every boundary face; a face matched by no rule is a ConfigError.
Mesh tag_boundary(Mesh mesh, const PressureRule& pressure_rule,
                  const DisplacementRule& displacement_rule);

/// True if x lies on the given plane of the box (tolerance Box::plane_tolerance()).
bool on_plane(const Box& box, BoxPlane plane, const Vec3& x);

/// The box plane a point lies on, if any; planes are tested in BoxPlane order.
std::optional<BoxPlane> plane_of(const Box& box, const Vec3& x);

}  // namespace porodg
