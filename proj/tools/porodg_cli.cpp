#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "porodg/cases.hpp"
#include "porodg/errors.hpp"
#include "porodg/verify.hpp"

namespace fs = std::filesystem;
using namespace porodg;

namespace {

struct CommonOptions {
  std::string out;
  bool coarse = false;
  std::string snapshots;
  std::optional<double> scale;
  bool emit = false;
  bool no_vtk = false;
};

void add_common(CLI::App* sub, CommonOptions& o, bool with_coarse = true) {
  sub->add_option("--out", o.out, "Output directory (default: out/<case name>)");
  if (with_coarse) sub->add_flag("--coarse", o.coarse, "Quarter-resolution desk-scale preset");
  sub->add_option("--snapshots", o.snapshots, "Comma-separated output times in seconds, or days with a 'd' suffix");
  sub->add_option("--scale", o.scale, "Displacement warp factor for VTK output");
  sub->add_flag("--emit", o.emit, "Print the case file instead of running it");
  sub->add_flag("--no-vtk", o.no_vtk, "Skip VTK output");
}

double parse_time(const std::string& tok) {
  std::string t = tok;
  double factor = 1.0;
  if (!t.empty() && (t.back() == 'd' || t.back() == 's')) {
    if (t.back() == 'd') factor = kSecondsPerDay;
    t.pop_back();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size() || !(v >= 0.0)) throw CLI::ValidationError("--snapshots", "bad time '" + tok + "'");
  return v * factor;
}

std::vector<double> parse_times(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(parse_time(tok));
  if (out.empty()) throw CLI::ValidationError("--snapshots", "no times given");
  return out;
}

Vec3 parse_point(const std::string& s, const char* what) {
  std::stringstream ss(s);
  std::string tok;
  std::vector<double> v;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    try {
      v.push_back(std::stod(tok, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw CLI::ValidationError(what, "bad coordinate '" + tok + "'");
  }
  if (v.size() != 3) throw CLI::ValidationError(what, "expected x,y,z");
  return {v[0], v[1], v[2]};
}

void apply_common(CaseConfig& c, const CommonOptions& o) {
  if (!o.snapshots.empty()) c.output.times = parse_times(o.snapshots);
  if (o.scale) c.output.scale = *o.scale;
  if (o.no_vtk) c.output.vtk = false;
}

void print_fronts(const CaseConfig& c, const CaseRun& r) {
  for (std::size_t l = 0; l < c.output.lines.size(); ++l) {
    if (c.output.lines[l].field != SampleField::Sw) continue;
    std::printf("front (s_w = 0.5) along %s:", c.output.lines[l].name.c_str());
    for (const Profile& p : r.profiles[l]) {
      const auto f = front_position(p);
      if (f)
        std::printf(" %.4g", *f);
      else
        std::printf(" -");
    }
    std::printf("\n");
  }
}

int run_config(CaseConfig c, const CommonOptions& o) {
  apply_common(c, o);
  if (o.emit) {
    std::cout << emit_case(c);
    return 0;
  }
  const fs::path out = o.out.empty() ? fs::path("out") / c.name : fs::path(o.out);
  const CaseRun r = run_case(c, out);
  std::cout << run_summary(c, r);
  print_fronts(c, r);
  std::cout << "outputs: " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential interior-penalty DG simulator for two-phase flow in deformable porous media"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* run = app.add_subcommand("run", "Run a case file");
  std::string case_file;
  run->add_option("case", case_file, "Case file (JSON)")->required();
  add_common(run, common, false);

  auto* conv = app.add_subcommand("convergence", "Manufactured-solution convergence study");
  std::vector<long> conv_n{2, 4, 8};
  std::string conv_out;
  conv->add_option("--n", conv_n, "Cells per side of each mesh")->delimiter(',');
  conv->add_option("--out", conv_out, "Directory for rates.csv");

  auto* mcw = app.add_subcommand("mcwhorter", "Counter-current imbibition in a thin slab");
  add_common(mcw, common);

  auto* inc = app.add_subcommand("inclusions", "Two box inclusions with a discontinuous capillary pressure");
  std::string inc_variant;
  inc->add_option("variant", inc_variant, "case1 or case2")->required()->check(CLI::IsMember({"case1", "case2"}));
  add_common(inc, common);

  auto* load = app.add_subcommand("load", "Medium under a linearly ramped boundary load");
  std::string load_kind;
  load->add_option("kind", load_kind, "x, y or none")->required()->check(CLI::IsMember({"x", "y", "none"}));
  add_common(load, common);

  auto* het = app.add_subcommand("heterogeneous", "Layered medium with raster permeability and porosity");
  std::string perm = "cases/raster/permeability.txt", poro = "cases/raster/porosity.txt";
  std::vector<long> dims{32, 32, 3};
  het->add_option("permeability", perm, "Permeability raster (m^2)");
  het->add_option("porosity", poro, "Porosity raster; empty keeps the background value");
  het->add_option("--dims", dims, "Raster dimensions nx,ny,nz")->delimiter(',')->expected(3);
  add_common(het, common);

  auto* smp = app.add_subcommand("sample", "Run a case file and print one field along a line as CSV");
  std::string smp_case, smp_field = "Sw", smp_from, smp_to, smp_time;
  int smp_points = 101;
  smp->add_option("case", smp_case, "Case file (JSON)")->required();
  smp->add_option("--field", smp_field, "Sw, Pw, Po, Ux, Uy or Uz");
  smp->add_option("--from", smp_from, "Start point x,y,z")->required();
  smp->add_option("--to", smp_to, "End point x,y,z")->required();
  smp->add_option("--points", smp_points, "Number of samples")->check(CLI::Range(2, 1000000));
  smp->add_option("--time", smp_time, "Sample time (s, or days with a 'd' suffix); default final time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) return run_config(parse_case(case_file), common);
    if (*conv) {
      const RateTable t = convergence_study(conv_n, ManufacturedCase::discretization(), ManufacturedCase::time_grid());
      std::cout << t.to_text();
      if (!conv_out.empty()) {
        fs::create_directories(conv_out);
        std::ofstream os(fs::path(conv_out) / "rates.csv");
        os << t.to_csv();
        if (!os) throw std::runtime_error("cannot write " + conv_out + "/rates.csv");
      }
      return 0;
    }
    if (*mcw) return run_config(mcwhorter_case(common.coarse), common);
    if (*inc)
      return run_config(
          inclusions_case(inc_variant == "case1" ? InclusionsVariant::Case1 : InclusionsVariant::Case2, common.coarse),
          common);
    if (*load) {
      const LoadKind k = load_kind == "x" ? LoadKind::X : load_kind == "y" ? LoadKind::Y : LoadKind::None;
      return run_config(load_case(k, common.coarse), common);
    }
    if (*het) {
      // relative raster paths resolve against the working directory
      return run_config(heterogeneous_case(common.coarse, perm, poro, {dims[0], dims[1], dims[2]}), common);
    }
    if (*smp) {
      CaseConfig c = parse_case(smp_case);
      const SampleField f = sample_field_from_string(smp_field);
      const Vec3 a = parse_point(smp_from, "--from"), b = parse_point(smp_to, "--to");
      c.output.times = {smp_time.empty() ? c.grid.T : parse_time(smp_time)};
      c.output.vtk = false;
      c.output.lines = {LineSpec{"sample", f, a, b, smp_points}};
      const CaseRun r = run_case(c);
      std::cout << profile_csv(r.profiles[0][0]);
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
