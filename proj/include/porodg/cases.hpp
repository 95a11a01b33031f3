#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "porodg/constitutive.hpp"
#include "porodg/dg.hpp"
#include "porodg/linsolve.hpp"
#include "porodg/mesh.hpp"
#include "porodg/stepper.hpp"
#include "porodg/verify.hpp"

namespace porodg {

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr int kCaseSchemaVersion = 1;

struct PressureBC {
  PressureTag type = PressureTag::Neumann;
  double pw = 0.0, po = 0.0;  // Dirichlet values, Pa
  double gw = 0.0, go = 0.0;  // Neumann fluxes
  bool operator==(const PressureBC&) const = default;
};

struct DisplacementBC {
  DisplacementTag type = DisplacementTag::Neumann;
  /// Dirichlet displacement, or the constant part of the traction.
  Vec3 value = Vec3::Zero();
  /// Traction ramp: adds ramp * t / T (Neumann only).
  Vec3 ramp = Vec3::Zero();
  bool operator==(const DisplacementBC&) const = default;
};

struct PlaneBC {
  PressureBC pressure;
  DisplacementBC displacement;
  bool operator==(const PlaneBC&) const = default;
};

/// Indexed by BoxPlane.
using BoundarySpec = std::array<PlaneBC, 6>;

struct RegionBox {
  Box box;
  RockProps rock;
  bool operator==(const RegionBox& o) const {
    return box.lo == o.box.lo && box.hi == o.box.hi && rock == o.rock;
  }
};

struct RasterSpec {
  std::array<long, 3> dims{1, 1, 1};
  std::string permeability;  // path, relative to the case file
  std::string porosity;      // path; empty keeps the background porosity
  bool operator==(const RasterSpec&) const = default;
};

struct MaterialSpec {
  enum class Kind { Uniform, Regions, Raster };
  Kind kind = Kind::Uniform;
  /// Uniform rock, or the background for regions and raster.
  RockProps background;
  /// Later boxes override earlier ones.
  std::vector<RegionBox> regions;
  RasterSpec raster;
  bool operator==(const MaterialSpec&) const = default;
};

struct InitialSpec {
  double po = 0.0;
  /// Used when sw_by_rock is empty.
  double pw = 0.0;
  /// Initial wetting saturation per rock id; pw = po - p_d / sqrt(s).
  std::map<int, double> sw_by_rock;
  bool operator==(const InitialSpec&) const = default;
};

enum class SampleField { Sw, Pw, Po, Ux, Uy, Uz };

struct LineSpec {
  std::string name;
  SampleField field = SampleField::Sw;
  Vec3 start = Vec3::Zero();
  Vec3 end = Vec3::Zero();
  int points = 101;
  bool operator==(const LineSpec&) const = default;
};

struct OutputPlan {
  std::vector<double> times;  // s
  bool vtk = true;
  double scale = 0.0;
  std::vector<LineSpec> lines;
  bool operator==(const OutputPlan&) const = default;
};

struct CaseConfig {
  int schema_version = kCaseSchemaVersion;
  std::string name;
  Box domain;
  std::array<long, 3> cells{1, 1, 1};
  PhysicalParams physics;
  DiscretizationParams disc;
  SolverConfig solver;
  bool jacobi_scaling = true;
  double pressure_unit = 1.0;  // Pa
  TimeGrid grid;  // s
  MaterialSpec materials;
  BoundarySpec boundary;
  InitialSpec initial;
  OutputPlan output;
  /// Directory that relative raster paths are resolved against.
  std::string base_dir;

  void validate() const;
  bool operator==(const CaseConfig& o) const;
};

/// Parses a case file. Raises ParseError naming the file and key.
CaseConfig parse_case(const std::filesystem::path& path);
CaseConfig parse_case_string(const std::string& text, const std::string& source = "<string>",
                             const std::string& base_dir = ".");
/// Canonical form: time unit seconds, all keys present.
std::string emit_case(const CaseConfig& c);

std::string to_string(SampleField f);
SampleField sample_field_from_string(const std::string& s);

struct RasterField {
  std::array<long, 3> dims{0, 0, 0};
  std::vector<double> values;  // x fastest, then y, then z
  double at(long i, long j, long k) const { return values[static_cast<std::size_t>(i + dims[0] * (j + dims[1] * k))]; }
};

/// Whitespace-separated values; FormatError on a count mismatch or a bad token.
RasterField load_raster(const std::filesystem::path& path, const std::array<long, 3>& dims);

/// One RockProps per element, by centroid. `domain` positions raster cells.
MaterialField assign_materials(const Mesh& mesh, const MaterialSpec& spec, const Box& domain,
                               const std::filesystem::path& base_dir = ".");

/// Tagged mesh (markers are BoxPlane indices).
Mesh build_case_mesh(const CaseConfig& c);

struct CaseSetup {
  Problem problem;
  InitialData initial;
};
CaseSetup build_case(const CaseConfig& c);
CaseSetup build_case(const CaseConfig& c, std::shared_ptr<const Mesh> mesh, MaterialField materials);

// Built-in scenarios. `coarse` selects the quarter-resolution desk preset.
CaseConfig mcwhorter_case(bool coarse = false);
enum class InclusionsVariant { Case1, Case2 };
CaseConfig inclusions_case(InclusionsVariant v, bool coarse = false);
enum class LoadKind { None, X, Y };
CaseConfig load_case(LoadKind k, bool coarse = false);
CaseConfig heterogeneous_case(bool coarse, const std::string& permeability, const std::string& porosity,
                              const std::array<long, 3>& dims);

/// Bundled case file name for each built-in scenario.
std::string bundled_name(const CaseConfig& c);

/// Value of the requested field at a point inside element e.
double field_value(const Mesh& mesh, const SimulationState& s, const Simulation& sim, SampleField f, std::size_t e,
                   const Vec3& x);

/// npts equispaced points from start to end; at shared element boundaries the lowest element id
/// wins. Throws SamplingError for a point outside the mesh.
Profile sample_line(const Mesh& mesh, const std::function<double(std::size_t, const Vec3&)>& field, const Vec3& start,
                    const Vec3& end, int npts);
Profile sample_line(const Mesh& mesh, const DGScalarField& field, const Vec3& start, const Vec3& end, int npts);

std::string profile_csv(const Profile& p);

/// Legacy ASCII VTK with 4 points per tet. Geometry warped by scale * U.
void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const SimulationState& s,
               const DGScalarField& sw, const MaterialField& materials, double scale);

struct Snapshot {
  double requested_time = 0.0;
  SimulationState state;
  DGScalarField sw;
};

struct CaseRun {
  std::shared_ptr<const Mesh> mesh;
  MaterialField materials;
  std::vector<Snapshot> snapshots;
  /// Profiles[line][snapshot].
  std::vector<std::vector<Profile>> profiles;
  RunStats stats;
};

/// Runs the case and, if out_dir is non-empty, writes VTK files, line CSVs and summary.txt.
CaseRun run_case(const CaseConfig& c, const std::filesystem::path& out_dir = {});

std::string run_summary(const CaseConfig& c, const CaseRun& r);

}  // namespace porodg
