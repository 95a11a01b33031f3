#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "porodg/errors.hpp"
#include "porodg/mesh.hpp"

using namespace porodg;

namespace {

Box unit_box() { return Box{Vec3::Zero(), Vec3::Ones()}; }

// Independent face counter: hash sorted vertex triples.
std::map<std::array<std::size_t, 3>, int> face_hash(const Mesh& m) {
  std::map<std::array<std::size_t, 3>, int> count;
  for (const auto& t : m.tets)
    for (int skip = 0; skip < 4; ++skip) {
      std::array<std::size_t, 3> f{};
      int k = 0;
      for (int i = 0; i < 4; ++i)
        if (i != skip) f[k++] = t[i];
      std::sort(f.begin(), f.end());
      ++count[f];
    }
  return count;
}

}  // namespace

TEST(StructuredMesh, TwoByTwoByTwoCounts) {
  const Mesh m = build_structured_tet_mesh(2, 2, 2, unit_box());
  EXPECT_EQ(m.num_elements(), 48u);
  EXPECT_EQ(m.vertices.size(), 27u);
}

TEST(StructuredMesh, McWhorterColumnCount) {
  const Mesh m = build_structured_tet_mesh(80, 2, 1, Box{Vec3::Zero(), Vec3(2.6, 0.065, 0.0325)});
  EXPECT_EQ(m.num_elements(), 960u);
}

TEST(StructuredMesh, SingleCubeVolume) {
  const Mesh m = build_structured_tet_mesh(1, 1, 1, unit_box());
  ASSERT_EQ(m.num_elements(), 6u);
  double vol = 0.0;
  for (double v : m.elem_volumes) {
    EXPECT_NEAR(v, 1.0 / 6.0, 1e-15);
    vol += v;
  }
  EXPECT_NEAR(vol, 1.0, 1e-12);
}

TEST(StructuredMesh, RejectsBadArguments) {
  EXPECT_THROW(build_structured_tet_mesh(0, 1, 1, unit_box()), InvalidArgument);
  EXPECT_THROW(build_structured_tet_mesh(1, -2, 1, unit_box()), InvalidArgument);
  EXPECT_THROW(build_structured_tet_mesh(1, 1, 1, Box{Vec3::Zero(), Vec3(1, 0, 1)}), InvalidArgument);
}

TEST(StructuredMesh, VolumeAdditivityOnAnisotropicBox) {
  const Box box{Vec3(-1, 2, 0.5), Vec3(3, 2.5, 4)};
  const Mesh m = build_structured_tet_mesh(5, 3, 4, box);
  double vol = 0.0;
  for (double v : m.elem_volumes) {
    EXPECT_GT(v, 0.0);
    vol += v;
  }
  EXPECT_NEAR(vol / box.volume(), 1.0, 1e-12);
  for (const auto& f : m.faces) EXPECT_GT(f.area, 0.0);
}

TEST(FaceTopology, MatchesHashingOracle) {
  const Mesh m = build_structured_tet_mesh(1, 1, 1, unit_box());
  const auto oracle = face_hash(m);
  std::size_t boundary = 0, interior = 0;
  for (const auto& [k, c] : oracle) (c == 1 ? boundary : interior)++;
  std::size_t mb = 0, mi = 0;
  for (const auto& f : m.faces) (f.is_boundary() ? mb : mi)++;
  EXPECT_EQ(boundary, 12u);  // two triangles per cube side
  EXPECT_EQ(mb, boundary);
  EXPECT_EQ(mi, interior);
  EXPECT_EQ(m.num_faces(), oracle.size());
}

TEST(FaceTopology, SingleTet) {
  const Mesh m = make_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}, {{0, 1, 2, 3}});
  EXPECT_EQ(m.num_faces(), 4u);
  for (const auto& f : m.faces) EXPECT_TRUE(f.is_boundary());
}

TEST(FaceTopology, TwoTetsShareOrientedFace) {
  const Mesh m = make_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)},
                           {{0, 1, 2, 3}, {0, 2, 1, 4}});
  int interior = 0;
  for (const auto& f : m.faces)
    if (!f.is_boundary()) {
      ++interior;
      EXPECT_EQ(f.e1, 0u);
      EXPECT_EQ(f.e2, 1u);
      EXPECT_NEAR(f.normal.z(), -1.0, 1e-14);  // from element 0 (z >= 0) into element 1
    }
  EXPECT_EQ(interior, 1);
}

TEST(FaceTopology, NonManifoldRejected) {
  std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1), Vec3(1, 1, 1)};
  EXPECT_THROW(make_mesh(v, {{0, 1, 2, 3}, {0, 2, 1, 4}, {0, 1, 2, 5}}), TopologyError);
}

TEST(FaceTopology, NormalsAndClosedSurfaces) {
  const Mesh m = build_structured_tet_mesh(3, 2, 2, Box{Vec3::Zero(), Vec3(3, 1, 2)});
  std::vector<Vec3> closure(m.num_elements(), Vec3::Zero());
  for (const auto& f : m.faces) {
    EXPECT_NEAR(f.normal.norm(), 1.0, 1e-14);
    // The normal is E1's outward normal on this face.
    int local = -1;
    for (int k = 0; k < 4; ++k)
      if (m.elem_faces[f.e1][k] == static_cast<std::size_t>(&f - m.faces.data())) local = k;
    ASSERT_GE(local, 0);
    EXPECT_NEAR(f.normal.dot(m.outward_normal(f.e1, local)), 1.0, 1e-12);
    closure[f.e1] += f.area * f.normal;
    if (!f.is_boundary()) closure[f.e2] -= f.area * f.normal;
  }
  for (const auto& c : closure) EXPECT_LT(c.norm(), 1e-12);
}

TEST(FaceTopology, DiameterIsLongestEdge) {
  const Mesh m = build_structured_tet_mesh(1, 1, 1, unit_box());
  for (const auto& f : m.faces) {
    double longest = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        longest = std::max(longest, (m.vertices[f.vertices[a]] - m.vertices[f.vertices[b]]).norm());
    EXPECT_DOUBLE_EQ(f.diameter, longest);
  }
  for (double h : m.elem_diameters) EXPECT_NEAR(h, std::sqrt(3.0), 1e-14);
}

TEST(BoundaryTagging, McWhorterRules) {
  const Box box{Vec3::Zero(), Vec3(2.6, 0.065, 0.0325)};
  Mesh m = build_structured_tet_mesh(8, 2, 1, box);
  m = tag_boundary(
      m, [&](const Vec3& c) { return on_plane(box, BoxPlane::XMin, c) ? PressureTag::Dirichlet : PressureTag::Neumann; },
      [&](const Vec3& c) {
        return on_plane(box, BoxPlane::XMin, c) || on_plane(box, BoxPlane::XMax, c) ? DisplacementTag::Dirichlet
                                                                                     : DisplacementTag::Neumann;
      });
  for (const auto& f : m.faces) {
    if (!f.is_boundary()) {
      EXPECT_EQ(f.pressure_tag, PressureTag::Interior);
      EXPECT_EQ(f.displacement_tag, DisplacementTag::Interior);
      continue;
    }
    const bool left = std::abs(f.centroid.x()) < 1e-12;
    const bool right = std::abs(f.centroid.x() - 2.6) < 1e-12;
    EXPECT_EQ(f.pressure_tag == PressureTag::Dirichlet, left);
    EXPECT_EQ(f.displacement_tag == DisplacementTag::Dirichlet, left || right);
  }
}

TEST(BoundaryTagging, AllDirichletHasNoNeumann) {
  Mesh m = build_structured_tet_mesh(2, 2, 2, unit_box());
  m = tag_boundary(
      m, [](const Vec3&) { return PressureTag::Dirichlet; }, [](const Vec3&) { return DisplacementTag::Dirichlet; });
  for (const auto& f : m.faces)
    if (f.is_boundary()) {
      EXPECT_EQ(f.pressure_tag, PressureTag::Dirichlet);
      EXPECT_EQ(f.displacement_tag, DisplacementTag::Dirichlet);
    }
}

TEST(BoundaryTagging, LeftDirichletCountMatchesCentroidScan) {
  const Box box{Vec3::Zero(), Vec3(100, 100, 2.5)};
  Mesh m = build_structured_tet_mesh(10, 10, 1, box);
  m = tag_boundary(
      m, [&](const Vec3& c) { return on_plane(box, BoxPlane::XMin, c) ? PressureTag::Dirichlet : PressureTag::Neumann; },
      [](const Vec3&) { return DisplacementTag::Neumann; });
  std::size_t tagged = 0, scanned = 0;
  for (const auto& f : m.faces) {
    if (!f.is_boundary()) continue;
    tagged += f.pressure_tag == PressureTag::Dirichlet;
    scanned += f.centroid.x() < 1e-12;
  }
  EXPECT_EQ(tagged, scanned);
  EXPECT_EQ(tagged, 2u * 10u * 1u);
}

TEST(BoundaryTagging, UnmatchedFaceIsConfigError) {
  const Box box = unit_box();
  const Mesh m = build_structured_tet_mesh(1, 1, 1, box);
  EXPECT_THROW(tag_boundary(
                   m,
                   [&](const Vec3& c) -> std::optional<PressureTag> {
                     if (on_plane(box, BoxPlane::XMin, c)) return PressureTag::Dirichlet;
                     return std::nullopt;
                   },
                   [](const Vec3&) { return DisplacementTag::Neumann; }),
               ConfigError);
}

TEST(BoundaryTagging, MarkersIdentifyPlanes) {
  const Box box{Vec3::Zero(), Vec3(2, 3, 4)};
  const Mesh m = build_structured_tet_mesh(2, 3, 2, box);
  for (const auto& f : m.faces) {
    if (!f.is_boundary()) {
      EXPECT_EQ(f.marker, -1);
      continue;
    }
    const auto p = plane_of(box, f.centroid);
    ASSERT_TRUE(p.has_value());
    EXPECT_EQ(f.marker, static_cast<int>(*p));
  }
}

TEST(Locate, LowestElementAndBarycentrics) {
  const Mesh m = build_structured_tet_mesh(3, 3, 3, unit_box());
  for (std::size_t e = 0; e < m.num_elements(); e += 7) {
    const Vec3 c = m.centroid(e);
    const auto found = m.locate(c);
    ASSERT_TRUE(found.has_value());
    EXPECT_EQ(*found, e);
    const Eigen::Vector4d b = m.barycentric(e, c);
    EXPECT_NEAR((b - Eigen::Vector4d::Constant(0.25)).norm(), 0.0, 1e-12);
  }
  // A cube corner is shared by many elements; the lowest id wins.
  const auto corner = m.locate(Vec3(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0));
  ASSERT_TRUE(corner.has_value());
  std::size_t brute = kNoElement;
  for (std::size_t e = 0; e < m.num_elements() && brute == kNoElement; ++e)
    if (m.barycentric(e, Vec3(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)).minCoeff() >= -1e-10) brute = e;
  EXPECT_EQ(*corner, brute);
  EXPECT_FALSE(m.locate(Vec3(1.5, 0.5, 0.5)).has_value());
}
