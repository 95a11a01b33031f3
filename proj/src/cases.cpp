#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "porodg/cases.hpp"
#include "porodg/errors.hpp"

namespace porodg {

namespace fs = std::filesystem;

RasterField load_raster(const fs::path& path, const std::array<long, 3>& dims) {
  for (long d : dims)
    if (d < 1) throw InvalidArgument("raster dimensions must be >= 1");
  std::ifstream in(path);
  if (!in) throw FormatError("file not found: " + path.string());
  RasterField r;
  r.dims = dims;
  const std::size_t want = static_cast<std::size_t>(dims[0] * dims[1] * dims[2]);
  r.values.reserve(want);
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(v))
      throw FormatError(path.string() + ": bad value '" + tok + "' at position " + std::to_string(r.values.size()));
    r.values.push_back(v);
  }
  if (r.values.size() != want)
    throw FormatError(path.string() + ": expected " + std::to_string(want) + " values (" + std::to_string(dims[0]) +
                      "x" + std::to_string(dims[1]) + "x" + std::to_string(dims[2]) + "), found " +
                      std::to_string(r.values.size()));
  return r;
}

namespace {

// Index of the raster cell containing x along one axis; the upper face belongs to the last cell.
long cell_index(double x, double lo, double hi, long n) {
  const long i = static_cast<long>(std::floor((x - lo) / (hi - lo) * static_cast<double>(n)));
  return std::clamp(i, 0L, n - 1);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

}  // namespace

MaterialField assign_materials(const Mesh& mesh, const MaterialSpec& spec, const Box& domain, const fs::path& base_dir) {
  MaterialField out(mesh.num_elements(), spec.background);
  switch (spec.kind) {
    case MaterialSpec::Kind::Uniform: break;
    case MaterialSpec::Kind::Regions:
      for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const Vec3 c = mesh.centroid(e);
        for (const RegionBox& r : spec.regions)
          if (r.box.contains(c)) out[e] = r.rock;
      }
      break;
    case MaterialSpec::Kind::Raster: {
      const RasterField perm = load_raster(resolve(base_dir, spec.raster.permeability), spec.raster.dims);
      std::optional<RasterField> poro;
      if (!spec.raster.porosity.empty()) poro = load_raster(resolve(base_dir, spec.raster.porosity), spec.raster.dims);
      for (double v : perm.values)
        if (!(v > 0.0)) throw FormatError("raster permeability values must be > 0");
      if (poro)
        for (double v : poro->values)
          if (!(v > 0.0 && v < 1.0)) throw FormatError("raster porosity values must be in (0, 1)");
      const auto& d = spec.raster.dims;
      for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const Vec3 c = mesh.centroid(e);
        if (!domain.contains(c, domain.plane_tolerance()))
          throw ConfigError("element " + std::to_string(e) + " lies outside the raster domain");
        const long i = cell_index(c.x(), domain.lo.x(), domain.hi.x(), d[0]);
        const long j = cell_index(c.y(), domain.lo.y(), domain.hi.y(), d[1]);
        const long k = cell_index(c.z(), domain.lo.z(), domain.hi.z(), d[2]);
        out[e].K = perm.at(i, j, k);
        if (poro) out[e].phi = poro->at(i, j, k);
      }
      break;
    }
  }
  for (const RockProps& r : out) r.validate();
  return out;
}

Mesh build_case_mesh(const CaseConfig& c) {
  Mesh m = build_structured_tet_mesh(c.cells[0], c.cells[1], c.cells[2], c.domain);
  const Box box = c.domain;
  const BoundarySpec bs = c.boundary;
  return tag_boundary(
      std::move(m),
      [&](const Vec3& x) -> std::optional<PressureTag> {
        if (auto p = plane_of(box, x)) return bs[static_cast<int>(*p)].pressure.type;
        return std::nullopt;
      },
      [&](const Vec3& x) -> std::optional<DisplacementTag> {
        if (auto p = plane_of(box, x)) return bs[static_cast<int>(*p)].displacement.type;
        return std::nullopt;
      });
}

CaseSetup build_case(const CaseConfig& c) {
  auto mesh = std::make_shared<const Mesh>(build_case_mesh(c));
  MaterialField mat = assign_materials(*mesh, c.materials, c.domain, c.base_dir.empty() ? "." : c.base_dir);
  return build_case(c, std::move(mesh), std::move(mat));
}

CaseSetup build_case(const CaseConfig& c, std::shared_ptr<const Mesh> mesh, MaterialField materials) {
  c.validate();
  CaseSetup s;
  Problem& p = s.problem;
  p.mesh = std::move(mesh);
  p.materials = std::move(materials);
  p.physics = c.physics;
  p.disc = c.disc;
  p.solver = c.solver;
  p.grid = c.grid;
  p.jacobi_scaling = c.jacobi_scaling;
  p.pressure_unit = c.pressure_unit;

  const BoundarySpec bs = c.boundary;
  auto plane = [bs](int marker) -> const PlaneBC& {
    if (marker < 0 || marker > 5) throw ConfigError("boundary face without a box-plane marker");
    return bs[marker];
  };
  p.wetting.dirichlet = [plane](const Vec3&, double, int m) { return plane(m).pressure.pw; };
  p.wetting.neumann = [plane](const Vec3&, double, int m) { return plane(m).pressure.gw; };
  p.nonwetting.dirichlet = [plane](const Vec3&, double, int m) { return plane(m).pressure.po; };
  p.nonwetting.neumann = [plane](const Vec3&, double, int m) { return plane(m).pressure.go; };
  p.mechanics.dirichlet = [plane](const Vec3&, double, int m) { return plane(m).displacement.value; };
  const double T = c.grid.T;
  p.mechanics.traction = [plane, T](const Vec3&, double t, int m) {
    const DisplacementBC& d = plane(m).displacement;
    return Vec3(d.value + d.ramp * (t / T));
  };

  const InitialSpec init = c.initial;
  s.initial.po = [init](const Vec3&) { return init.po; };
  s.initial.u = [](const Vec3&) { return Vec3::Zero().eval(); };
  if (init.sw_by_rock.empty()) {
    s.initial.pw = [init](const Vec3&) { return init.pw; };
  } else {
    std::vector<double> pw_e(p.materials.size());
    for (std::size_t e = 0; e < p.materials.size(); ++e) {
      const RockProps& r = p.materials[e];
      const auto it = init.sw_by_rock.find(r.rock_id);
      if (it == init.sw_by_rock.end())
        throw ConfigError("no initial saturation for rock id " + std::to_string(r.rock_id));
      pw_e[e] = init.po - pc_of_saturation(it->second, r.p_d);
    }
    s.initial.pw = [](const Vec3&) -> double { throw ConfigError("per-element initial data only"); };
    s.initial.pw_elem = [pw_e](const Vec3&, std::size_t e) { return pw_e[e]; };
  }
  return s;
}

// ---------------------------------------------------------------------------------------
// Built-in scenarios
// ---------------------------------------------------------------------------------------

namespace {

PlaneBC no_flow_free() { return PlaneBC{}; }

PlaneBC no_flow_clamped() {
  PlaneBC b;
  b.displacement.type = DisplacementTag::Dirichlet;
  return b;
}

LineSpec line(std::string name, SampleField f, Vec3 a, Vec3 b, int n) { return LineSpec{std::move(name), f, a, b, n}; }

// Defaults shared by the physical cases.
CaseConfig physical_base() {
  CaseConfig c;
  c.physics = PhysicalParams{};
  c.disc.eps_p = c.disc.eps_u = -1;
  c.pressure_unit = 1e5;
  return c;
}

}  // namespace

CaseConfig mcwhorter_case(bool coarse) {
  CaseConfig c = physical_base();
  c.name = coarse ? "mcwhorter-coarse" : "mcwhorter";
  c.domain = Box{Vec3(0, 0, 0), Vec3(2.6, 0.065, 0.0325)};
  c.cells = coarse ? std::array<long, 3>{40, 1, 1} : std::array<long, 3>{80, 2, 1};
  c.physics.inv_K_w = c.physics.inv_K_o = 0.0;
  c.physics.alpha = 1.0;
  c.disc.sigma_p = 400;
  c.disc.sigma_u = 1000;
  c.disc.gamma = 1e5;
  c.grid = TimeGrid{0.01, 1.0, coarse ? 1000.0 : 5000.0};
  c.materials.background = RockProps{1e-10, 0.3, 5000.0, 1};
  for (auto& b : c.boundary) b = no_flow_free();
  PlaneBC left = no_flow_clamped();
  left.pressure = PressureBC{PressureTag::Dirichlet, 194970.0, 200000.0, 0.0, 0.0};
  c.boundary[static_cast<int>(BoxPlane::XMin)] = left;
  c.boundary[static_cast<int>(BoxPlane::XMax)] = no_flow_clamped();
  c.initial.po = 234000.0;
  c.initial.pw = 184000.0;
  c.output.times = coarse ? std::vector<double>{200, 400, 600, 800, 1000}
                          : std::vector<double>{1000, 2000, 3000, 4000, 5000};
  const double ym = 0.0325, zm = 0.01625;
  c.output.lines = {line("sw_axis", SampleField::Sw, Vec3(0, ym, zm), Vec3(2.6, ym, zm), 261),
                    line("ux_axis", SampleField::Ux, Vec3(0, ym, zm), Vec3(2.6, ym, zm), 261)};
  return c;
}

CaseConfig inclusions_case(InclusionsVariant v, bool coarse) {
  CaseConfig c = physical_base();
  const bool one = v == InclusionsVariant::Case1;
  c.name = std::string(one ? "inclusions-case1" : "inclusions-case2") + (coarse ? "-coarse" : "");
  c.domain = Box{Vec3(0, 0, 0), Vec3(100, 100, 2.5)};
  c.cells = coarse ? std::array<long, 3>{20, 20, 1} : std::array<long, 3>{40, 40, 1};
  c.disc.sigma_p = 800;
  c.disc.sigma_u = 800;
  c.disc.gamma = 1e5;
  c.grid = TimeGrid{0.05 * kSecondsPerDay, 5 * kSecondsPerDay, 1000 * kSecondsPerDay};
  RockProps r1, r2;
  if (one) {
    r2 = RockProps{2 * 4.2e-11, 0.3, 5000.0, 2};
    r1 = RockProps{4.2e-11, 0.3, std::sqrt(2.0) * 5000.0, 1};
  } else {
    r1 = RockProps{8.4e-11, 0.3, 5000.0, 1};
    r2 = RockProps{8.4e-11 / 2, 0.3, std::sqrt(2.0) * 5000.0, 2};
  }
  c.materials.kind = MaterialSpec::Kind::Regions;
  c.materials.background = r1;
  c.materials.regions = {RegionBox{Box{Vec3(20, 50, 0), Vec3(40, 70, 2.5)}, r2},
                         RegionBox{Box{Vec3(50, 20, 0), Vec3(90, 50, 2.5)}, r2}};
  for (auto& b : c.boundary) b = no_flow_free();
  PlaneBC left = no_flow_clamped();
  left.pressure = PressureBC{PressureTag::Dirichlet, 195000.0, 200000.0, 0.0, 0.0};
  c.boundary[static_cast<int>(BoxPlane::XMin)] = left;
  c.boundary[static_cast<int>(BoxPlane::XMax)] = no_flow_clamped();
  c.initial.po = 200000.0;
  c.initial.sw_by_rock = one ? std::map<int, double>{{1, 0.1}, {2, 0.05}} : std::map<int, double>{{1, 0.1}, {2, 0.2}};
  for (double d : {50.0, 125.0, 250.0, 375.0, 500.0, 1000.0}) c.output.times.push_back(d * kSecondsPerDay);
  c.output.scale = 1200;
  c.output.lines = {line("sw_y35", SampleField::Sw, Vec3(0, 35, 2.5), Vec3(100, 35, 2.5), 201),
                    line("sw_y60", SampleField::Sw, Vec3(0, 60, 2.5), Vec3(100, 60, 2.5), 201)};
  return c;
}

CaseConfig load_case(LoadKind k, bool coarse) {
  CaseConfig c = physical_base();
  const char* tag = k == LoadKind::X ? "x" : k == LoadKind::Y ? "y" : "none";
  c.name = std::string("load-") + tag + (coarse ? "-coarse" : "");
  c.domain = Box{Vec3(0, 0, 0), Vec3(100, 100, 5)};
  c.cells = coarse ? std::array<long, 3>{10, 10, 1} : std::array<long, 3>{20, 20, 1};
  c.physics.inv_K_w = c.physics.inv_K_o = 1e-4;
  c.physics.lame_lambda = c.physics.lame_mu = 4e5;
  c.physics.inv_K_s = 1.0 / 666666.0;
  c.disc.sigma_p = 800;
  c.disc.sigma_u = 800;
  c.disc.gamma = 1e5;
  c.grid = TimeGrid{0.05 * kSecondsPerDay, 5 * kSecondsPerDay, 500 * kSecondsPerDay};
  c.materials.background = RockProps{8e-11, 0.3, 5000.0, 1};
  for (auto& b : c.boundary) b = no_flow_free();
  c.boundary[static_cast<int>(BoxPlane::XMin)].pressure =
      PressureBC{PressureTag::Dirichlet, 195000.0, 200000.0, 0.0, 0.0};
  c.boundary[static_cast<int>(BoxPlane::YMin)].displacement.type = DisplacementTag::Dirichlet;
  if (k == LoadKind::Y) c.boundary[static_cast<int>(BoxPlane::YMax)].displacement.ramp = Vec3(0, -50000, 0);
  if (k == LoadKind::X) c.boundary[static_cast<int>(BoxPlane::XMin)].displacement.ramp = Vec3(50000, 0, 0);
  c.initial.po = 200000.0;
  c.initial.sw_by_rock = {{1, 0.1}};
  for (double d : {250.0, 375.0, 500.0}) c.output.times.push_back(d * kSecondsPerDay);
  for (double y : {0.0, 50.0, 100.0}) {
    char name[16];
    std::snprintf(name, sizeof name, "sw_y%.0f", y);
    c.output.lines.push_back(line(name, SampleField::Sw, Vec3(0, y, 2.5), Vec3(100, y, 2.5), 201));
  }
  return c;
}

CaseConfig heterogeneous_case(bool coarse, const std::string& permeability, const std::string& porosity,
                              const std::array<long, 3>& dims) {
  CaseConfig c = physical_base();
  c.name = coarse ? "heterogeneous-coarse" : "heterogeneous";
  c.domain = Box{Vec3(0, 0, 0), Vec3(80, 80, 7.5)};
  c.cells = coarse ? std::array<long, 3>{16, 16, 3} : std::array<long, 3>{32, 32, 3};
  c.disc.sigma_p = 800;
  c.disc.sigma_u = 800;
  c.disc.gamma = 1e5;
  c.grid = TimeGrid{0.2 * kSecondsPerDay, 20 * kSecondsPerDay, 4000 * kSecondsPerDay};
  c.materials.kind = MaterialSpec::Kind::Raster;
  c.materials.background = RockProps{1e-13, 0.2, 50000.0, 1};
  c.materials.raster = RasterSpec{dims, permeability, porosity};
  for (auto& b : c.boundary) b = no_flow_free();
  PlaneBC left = no_flow_clamped();
  left.pressure = PressureBC{PressureTag::Dirichlet, 1950000.0, 2000000.0, 0.0, 0.0};
  c.boundary[static_cast<int>(BoxPlane::XMin)] = left;
  c.boundary[static_cast<int>(BoxPlane::XMax)] = no_flow_clamped();
  c.initial.po = 2000000.0;
  c.initial.sw_by_rock = {{1, 0.1}};
  for (double d : {1000.0, 2000.0, 3000.0, 4000.0}) c.output.times.push_back(d * kSecondsPerDay);
  for (double z : {1.25, 3.75, 6.25}) {
    char name[24];
    std::snprintf(name, sizeof name, "sw_y40_z%.2f", z);
    c.output.lines.push_back(line(name, SampleField::Sw, Vec3(0, 40, z), Vec3(80, 40, z), 161));
  }
  return c;
}

std::string bundled_name(const CaseConfig& c) { return c.name + ".json"; }

// ---------------------------------------------------------------------------------------
// Sampling and output
// ---------------------------------------------------------------------------------------

double field_value(const Mesh& mesh, const SimulationState& s, const Simulation& sim, SampleField f, std::size_t e,
                   const Vec3& x) {
  const Eigen::Vector4d b = mesh.barycentric(e, x);
  switch (f) {
    case SampleField::Sw: {
      const auto& p = sim.problem();
      return saturation_point(s.pw.value(e, b), s.po.value(e, b), p.materials[e].p_d, p.physics).sw;
    }
    case SampleField::Pw: return s.pw.value(e, b);
    case SampleField::Po: return s.po.value(e, b);
    case SampleField::Ux: return s.u.value(e, b)[0];
    case SampleField::Uy: return s.u.value(e, b)[1];
    case SampleField::Uz: return s.u.value(e, b)[2];
  }
  return 0.0;
}

Profile sample_line(const Mesh& mesh, const std::function<double(std::size_t, const Vec3&)>& field, const Vec3& start,
                    const Vec3& end, int npts) {
  if (npts < 2) throw InvalidArgument("sample_line needs at least 2 points");
  Profile out;
  out.reserve(static_cast<std::size_t>(npts));
  const double len = (end - start).norm();
  for (int i = 0; i < npts; ++i) {
    const double w = static_cast<double>(i) / (npts - 1);
    const Vec3 x = start + w * (end - start);
    const auto e = mesh.locate(x, 1e-9);
    if (!e) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "sample point (%g, %g, %g) is outside the mesh", x.x(), x.y(), x.z());
      throw SamplingError(buf);
    }
    out.push_back({w * len, field(*e, x)});
  }
  return out;
}

Profile sample_line(const Mesh& mesh, const DGScalarField& field, const Vec3& start, const Vec3& end, int npts) {
  return sample_line(
      mesh, [&](std::size_t e, const Vec3& x) { return field.value(e, mesh.barycentric(e, x)); }, start, end, npts);
}

std::string profile_csv(const Profile& p) {
  std::string out = "s,value\n";
  char buf[64];
  for (const auto& r : p) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", r.s, r.value);
    out += buf;
  }
  return out;
}

void write_vtk(const fs::path& path, const Mesh& mesh, const SimulationState& s, const DGScalarField& sw,
               const MaterialField& materials, double scale) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  const std::size_t ne = mesh.num_elements();
  const std::size_t np = 4 * ne;
  char buf[128];
  os << "# vtk DataFile Version 3.0\nporodg t=";
  std::snprintf(buf, sizeof buf, "%.10g", s.t);
  os << buf << "\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS " << np << " double\n";
  for (std::size_t e = 0; e < ne; ++e)
    for (int k = 0; k < 4; ++k) {
      Eigen::Vector4d b = Eigen::Vector4d::Zero();
      b[k] = 1.0;
      const Vec3 x = mesh.vertex(e, k) + (scale != 0.0 ? Vec3(scale * s.u.value(e, b)) : Vec3::Zero());
      std::snprintf(buf, sizeof buf, "%.10g %.10g %.10g\n", x.x(), x.y(), x.z());
      os << buf;
    }
  os << "CELLS " << ne << ' ' << 5 * ne << '\n';
  for (std::size_t e = 0; e < ne; ++e) os << "4 " << 4 * e << ' ' << 4 * e + 1 << ' ' << 4 * e + 2 << ' ' << 4 * e + 3 << '\n';
  os << "CELL_TYPES " << ne << '\n';
  for (std::size_t e = 0; e < ne; ++e) os << "10\n";
  os << "CELL_DATA " << ne << "\nSCALARS rock_id int 1\nLOOKUP_TABLE default\n";
  for (std::size_t e = 0; e < ne; ++e) os << materials[e].rock_id << '\n';
  os << "SCALARS permeability double 1\nLOOKUP_TABLE default\n";
  for (std::size_t e = 0; e < ne; ++e) {
    std::snprintf(buf, sizeof buf, "%.10g\n", materials[e].K);
    os << buf;
  }
  os << "SCALARS porosity double 1\nLOOKUP_TABLE default\n";
  for (std::size_t e = 0; e < ne; ++e) {
    std::snprintf(buf, sizeof buf, "%.10g\n", materials[e].phi);
    os << buf;
  }
  os << "POINT_DATA " << np << '\n';
  auto scalar = [&](const char* name, const Eigen::VectorXd& v) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.10g\n", v[i]);
      os << buf;
    }
  };
  scalar("Pw", s.pw.coeffs);
  scalar("Po", s.po.coeffs);
  scalar("Sw", sw.coeffs);
  os << "VECTORS U double\n";
  const std::size_t blk = s.u.block();
  for (std::size_t i = 0; i < np; ++i) {
    std::snprintf(buf, sizeof buf, "%.10g %.10g %.10g\n", s.u.coeffs[i], s.u.coeffs[blk + i], s.u.coeffs[2 * blk + i]);
    os << buf;
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

CaseRun run_case(const CaseConfig& c, const fs::path& out_dir) {
  CaseSetup setup = build_case(c);
  Simulation sim(setup.problem);
  CaseRun run;
  run.mesh = sim.problem().mesh;
  run.materials = sim.problem().materials;
  const std::vector<SimulationState> states = sim.run(setup.initial, c.output.times);
  const Mesh& m = *run.mesh;
  for (std::size_t i = 0; i < states.size(); ++i)
    run.snapshots.push_back({c.output.times[i], states[i], sim.saturation_field(states[i].pw, states[i].po)});
  for (const LineSpec& l : c.output.lines) {
    std::vector<Profile> per;
    for (const Snapshot& s : run.snapshots)
      per.push_back(sample_line(
          m, [&](std::size_t e, const Vec3& x) { return field_value(m, s.state, sim, l.field, e, x); }, l.start,
          l.end, l.points));
    run.profiles.push_back(std::move(per));
  }
  run.stats = sim.stats();

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    char idx[16];
    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
      std::snprintf(idx, sizeof idx, "%03zu", i);
      if (c.output.vtk)
        write_vtk(out_dir / (c.name + "_" + idx + ".vtk"), m, run.snapshots[i].state, run.snapshots[i].sw,
                  run.materials, c.output.scale);
      for (std::size_t l = 0; l < c.output.lines.size(); ++l) {
        std::ofstream os(out_dir / (c.output.lines[l].name + "_" + idx + ".csv"));
        os << profile_csv(run.profiles[l][i]);
        if (!os) throw std::runtime_error("cannot write profile output in " + out_dir.string());
      }
    }
    std::ofstream sum(out_dir / "summary.txt");
    sum << run_summary(c, run);
  }
  return run;
}

std::string run_summary(const CaseConfig& c, const CaseRun& r) {
  std::ostringstream os;
  char buf[160];
  os << "case: " << c.name << "\n";
  os << "elements: " << r.mesh->num_elements() << "\n";
  os << "steps: " << r.stats.steps << "\n";
  auto line = [&](const char* label, const SubstepStats& s) {
    std::snprintf(buf, sizeof buf,
                  "%-13s solves %6zu  iterations max %3d total %8ld  residual max %.3e  factorizations %zu  "
                  "floor-limited %zu\n",
                  label, s.solves, s.max_iterations, s.total_iterations, s.max_residual, s.factorizations,
                  s.floor_limited);
    os << buf;
  };
  line("wetting", r.stats.wetting);
  line("non-wetting", r.stats.nonwetting);
  line("displacement", r.stats.displacement);
  std::snprintf(buf, sizeof buf, "wall time: %.2f s\n", r.stats.wall_seconds);
  os << buf;
  os << "snapshots:\n";
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    const auto& s = r.snapshots[i];
    std::snprintf(buf, sizeof buf, "  %03zu requested t=%.6g s, stored step %zu at t=%.6g s\n", i, s.requested_time,
                  s.state.n, s.state.t);
    os << buf;
  }
  return os.str();
}

}  // namespace porodg
