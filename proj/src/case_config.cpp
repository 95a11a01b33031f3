#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "porodg/cases.hpp"
#include "porodg/errors.hpp"

namespace porodg {

using nlohmann::json;

namespace {

const char* kPlaneNames[6] = {"x_min", "x_max", "y_min", "y_max", "z_min", "z_max"};

// Thin wrapper that remembers where it is in the document for error messages.
class Node {
 public:
  Node(const json& j, std::string where, std::string source) : j_(j), where_(std::move(where)), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(source_ + ": " + (where_.empty() ? "<root>" : where_) + ": " + msg);
  }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) child_path(it.key()).fail_here("unknown key");
  }

  bool has(const char* key) const { return j_.contains(key); }

  Node at(const char* key) const {
    if (!j_.contains(key)) child_path(key).fail_here("missing required key");
    return Node(j_.at(key), join(key), source_);
  }

  Node at(std::size_t i) const { return Node(j_.at(i), where_ + "[" + std::to_string(i) + "]", source_); }
  std::size_t size() const { return j_.size(); }
  const json& raw() const { return j_; }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  long integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<long>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  Vec3 vec3() const {
    if (!j_.is_array() || j_.size() != 3) fail("expected an array of 3 numbers");
    return {at(std::size_t{0}).number(), at(std::size_t{1}).number(), at(std::size_t{2}).number()};
  }
  std::array<long, 3> ivec3() const {
    if (!j_.is_array() || j_.size() != 3) fail("expected an array of 3 integers");
    return {at(std::size_t{0}).integer(), at(std::size_t{1}).integer(), at(std::size_t{2}).integer()};
  }

  double number(const char* key, double fallback) const { return has(key) ? at(key).number() : fallback; }
  long integer(const char* key, long fallback) const { return has(key) ? at(key).integer() : fallback; }
  bool boolean(const char* key, bool fallback) const { return has(key) ? at(key).boolean() : fallback; }

 private:
  struct Path {
    std::string where, source;
    [[noreturn]] void fail_here(const std::string& msg) const { throw ParseError(source + ": " + where + ": " + msg); }
  };
  Path child_path(const std::string& key) const { return {join(key), source_}; }
  std::string join(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  const json& j_;
  std::string where_;
  std::string source_;
};

RockProps read_rock(const Node& n, const RockProps& fallback) {
  n.expect_object({"K", "phi", "p_d", "rock_id"});
  RockProps r = fallback;
  r.K = n.number("K", r.K);
  r.phi = n.number("phi", r.phi);
  r.p_d = n.number("p_d", r.p_d);
  r.rock_id = static_cast<int>(n.integer("rock_id", r.rock_id));
  try {
    r.validate();
  } catch (const std::exception& e) {
    n.fail(e.what());
  }
  return r;
}

json write_rock(const RockProps& r) { return {{"K", r.K}, {"phi", r.phi}, {"p_d", r.p_d}, {"rock_id", r.rock_id}}; }
json write_vec(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

PhysicalParams read_physics(const Node& n) {
  n.expect_object({"mu_w", "mu_o", "inv_K_w", "inv_K_o", "inv_K_s", "lame_lambda", "lame_mu", "alpha", "eps_cut",
                   "apply_cutoff", "mobility"});
  PhysicalParams p;
  p.mu_w = n.number("mu_w", p.mu_w);
  p.mu_o = n.number("mu_o", p.mu_o);
  p.inv_K_w = n.number("inv_K_w", p.inv_K_w);
  p.inv_K_o = n.number("inv_K_o", p.inv_K_o);
  p.inv_K_s = n.number("inv_K_s", p.inv_K_s);
  p.lame_lambda = n.number("lame_lambda", p.lame_lambda);
  p.lame_mu = n.number("lame_mu", p.lame_mu);
  p.alpha = n.number("alpha", p.alpha);
  p.eps_cut = n.number("eps_cut", p.eps_cut);
  p.apply_cutoff = n.boolean("apply_cutoff", p.apply_cutoff);
  if (n.has("mobility")) {
    try {
      p.mobility = mobility_model_from_string(n.at("mobility").string());
    } catch (const InvalidArgument& e) {
      n.at("mobility").fail(e.what());
    }
  }
  try {
    p.validate();
  } catch (const std::exception& e) {
    n.fail(e.what());
  }
  return p;
}

json write_physics(const PhysicalParams& p) {
  return {{"mu_w", p.mu_w},
          {"mu_o", p.mu_o},
          {"inv_K_w", p.inv_K_w},
          {"inv_K_o", p.inv_K_o},
          {"inv_K_s", p.inv_K_s},
          {"lame_lambda", p.lame_lambda},
          {"lame_mu", p.lame_mu},
          {"alpha", p.alpha},
          {"eps_cut", p.eps_cut},
          {"apply_cutoff", p.apply_cutoff},
          {"mobility", to_string(p.mobility)}};
}

DiscretizationParams read_disc(const Node& n) {
  n.expect_object({"sigma_p", "sigma_u", "eps_p", "eps_u", "gamma", "quad_volume_order", "quad_face_order"});
  DiscretizationParams d;
  d.sigma_p = n.number("sigma_p", d.sigma_p);
  d.sigma_u = n.number("sigma_u", d.sigma_u);
  d.eps_p = static_cast<int>(n.integer("eps_p", d.eps_p));
  d.eps_u = static_cast<int>(n.integer("eps_u", d.eps_u));
  d.gamma = n.number("gamma", d.gamma);
  d.quad_volume_order = static_cast<int>(n.integer("quad_volume_order", d.quad_volume_order));
  d.quad_face_order = static_cast<int>(n.integer("quad_face_order", d.quad_face_order));
  try {
    d.validate();
  } catch (const std::exception& e) {
    n.fail(e.what());
  }
  return d;
}

json write_disc(const DiscretizationParams& d) {
  return {{"sigma_p", d.sigma_p},
          {"sigma_u", d.sigma_u},
          {"eps_p", d.eps_p},
          {"eps_u", d.eps_u},
          {"gamma", d.gamma},
          {"quad_volume_order", d.quad_volume_order},
          {"quad_face_order", d.quad_face_order}};
}

void read_solver(const Node& n, CaseConfig& c) {
  n.expect_object({"abs_tol", "restart", "max_iterations", "min_iterations", "preconditioner", "ilu_level", "jacobi_scaling",
                   "pressure_unit"});
  SolverConfig& s = c.solver;
  s.abs_tol = n.number("abs_tol", s.abs_tol);
  s.restart = static_cast<int>(n.integer("restart", s.restart));
  s.max_iterations = static_cast<int>(n.integer("max_iterations", s.max_iterations));
  s.min_iterations = static_cast<int>(n.integer("min_iterations", s.min_iterations));
  s.ilu_level = static_cast<int>(n.integer("ilu_level", s.ilu_level));
  if (n.has("preconditioner")) {
    try {
      s.preconditioner = preconditioner_from_string(n.at("preconditioner").string());
    } catch (const InvalidArgument& e) {
      n.at("preconditioner").fail(e.what());
    }
  }
  c.jacobi_scaling = n.boolean("jacobi_scaling", c.jacobi_scaling);
  c.pressure_unit = n.number("pressure_unit", c.pressure_unit);
  if (!(c.pressure_unit > 0.0)) n.at("pressure_unit").fail("must be > 0");
  try {
    s.validate();
  } catch (const std::exception& e) {
    n.fail(e.what());
  }
}

json write_solver(const CaseConfig& c) {
  const SolverConfig& s = c.solver;
  return {{"abs_tol", s.abs_tol},
          {"restart", s.restart},
          {"max_iterations", s.max_iterations},
          {"min_iterations", s.min_iterations},
          {"preconditioner", to_string(s.preconditioner)},
          {"ilu_level", s.ilu_level},
          {"jacobi_scaling", c.jacobi_scaling},
          {"pressure_unit", c.pressure_unit}};
}

double time_factor(const Node& n) {
  const std::string unit = n.has("unit") ? n.at("unit").string() : "s";
  if (unit == "s") return 1.0;
  if (unit == "days") return kSecondsPerDay;
  n.at("unit").fail("unit must be \"s\" or \"days\"");
}

Box read_box(const Node& n) {
  n.expect_object({"lo", "hi"});
  Box b{n.at("lo").vec3(), n.at("hi").vec3()};
  if (!(b.hi.array() > b.lo.array()).all()) n.fail("box needs lo < hi in every direction");
  return b;
}

json write_box(const Box& b) { return {{"lo", write_vec(b.lo)}, {"hi", write_vec(b.hi)}}; }

MaterialSpec read_materials(const Node& n) {
  n.expect_object({"kind", "rock", "background", "regions", "raster"});
  MaterialSpec m;
  const std::string kind = n.at("kind").string();
  if (kind == "uniform") {
    m.kind = MaterialSpec::Kind::Uniform;
    m.background = read_rock(n.at("rock"), RockProps{});
    if (n.has("regions") || n.has("raster") || n.has("background")) n.fail("uniform materials take only \"rock\"");
  } else if (kind == "regions") {
    m.kind = MaterialSpec::Kind::Regions;
    if (n.has("rock") || n.has("raster")) n.fail("region materials take \"background\" and \"regions\"");
    m.background = read_rock(n.at("background"), RockProps{});
    const Node rs = n.at("regions");
    if (!rs.raw().is_array()) rs.fail("expected an array");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const Node r = rs.at(i);
      r.expect_object({"lo", "hi", "rock"});
      RegionBox rb;
      rb.box = Box{r.at("lo").vec3(), r.at("hi").vec3()};
      rb.rock = read_rock(r.at("rock"), m.background);
      m.regions.push_back(rb);
    }
  } else if (kind == "raster") {
    m.kind = MaterialSpec::Kind::Raster;
    if (n.has("rock") || n.has("regions")) n.fail("raster materials take \"background\" and \"raster\"");
    m.background = read_rock(n.at("background"), RockProps{});
    const Node r = n.at("raster");
    r.expect_object({"dims", "permeability", "porosity"});
    m.raster.dims = r.at("dims").ivec3();
    for (long d : m.raster.dims)
      if (d < 1) r.at("dims").fail("raster dimensions must be >= 1");
    m.raster.permeability = r.at("permeability").string();
    if (r.has("porosity")) m.raster.porosity = r.at("porosity").string();
  } else {
    n.at("kind").fail("kind must be uniform, regions or raster");
  }
  return m;
}

json write_materials(const MaterialSpec& m) {
  switch (m.kind) {
    case MaterialSpec::Kind::Uniform: return {{"kind", "uniform"}, {"rock", write_rock(m.background)}};
    case MaterialSpec::Kind::Regions: {
      json rs = json::array();
      for (const auto& r : m.regions)
        rs.push_back({{"lo", write_vec(r.box.lo)}, {"hi", write_vec(r.box.hi)}, {"rock", write_rock(r.rock)}});
      return {{"kind", "regions"}, {"background", write_rock(m.background)}, {"regions", rs}};
    }
    case MaterialSpec::Kind::Raster: {
      json r = {{"dims", json::array({m.raster.dims[0], m.raster.dims[1], m.raster.dims[2]})},
                {"permeability", m.raster.permeability}};
      if (!m.raster.porosity.empty()) r["porosity"] = m.raster.porosity;
      return {{"kind", "raster"}, {"background", write_rock(m.background)}, {"raster", r}};
    }
  }
  return {};
}

PlaneBC read_plane(const Node& n) {
  n.expect_object({"pressure", "displacement"});
  PlaneBC bc;
  const Node p = n.at("pressure");
  const std::string pt = p.at("type").string();
  if (pt == "dirichlet") {
    p.expect_object({"type", "pw", "po"});
    bc.pressure.type = PressureTag::Dirichlet;
    bc.pressure.pw = p.at("pw").number();
    bc.pressure.po = p.at("po").number();
  } else if (pt == "neumann") {
    p.expect_object({"type", "gw", "go"});
    bc.pressure.type = PressureTag::Neumann;
    bc.pressure.gw = p.number("gw", 0.0);
    bc.pressure.go = p.number("go", 0.0);
  } else {
    p.at("type").fail("pressure type must be dirichlet or neumann");
  }
  const Node d = n.at("displacement");
  const std::string dt = d.at("type").string();
  if (dt == "dirichlet") {
    d.expect_object({"type", "value"});
    bc.displacement.type = DisplacementTag::Dirichlet;
    if (d.has("value")) bc.displacement.value = d.at("value").vec3();
  } else if (dt == "traction") {
    d.expect_object({"type", "value", "ramp"});
    bc.displacement.type = DisplacementTag::Neumann;
    if (d.has("value")) bc.displacement.value = d.at("value").vec3();
    if (d.has("ramp")) bc.displacement.ramp = d.at("ramp").vec3();
  } else {
    d.at("type").fail("displacement type must be dirichlet or traction");
  }
  return bc;
}

json write_plane(const PlaneBC& bc) {
  json p = bc.pressure.type == PressureTag::Dirichlet
               ? json{{"type", "dirichlet"}, {"pw", bc.pressure.pw}, {"po", bc.pressure.po}}
               : json{{"type", "neumann"}, {"gw", bc.pressure.gw}, {"go", bc.pressure.go}};
  json d = bc.displacement.type == DisplacementTag::Dirichlet
               ? json{{"type", "dirichlet"}, {"value", write_vec(bc.displacement.value)}}
               : json{{"type", "traction"},
                      {"value", write_vec(bc.displacement.value)},
                      {"ramp", write_vec(bc.displacement.ramp)}};
  return {{"pressure", p}, {"displacement", d}};
}

InitialSpec read_initial(const Node& n) {
  n.expect_object({"po", "pw", "sw_by_rock"});
  InitialSpec s;
  s.po = n.at("po").number();
  if (n.has("pw") == n.has("sw_by_rock")) n.fail("give exactly one of \"pw\" and \"sw_by_rock\"");
  if (n.has("pw")) {
    s.pw = n.at("pw").number();
  } else {
    const Node m = n.at("sw_by_rock");
    if (!m.raw().is_object() || m.raw().empty()) m.fail("expected a non-empty object of rock id -> saturation");
    for (auto it = m.raw().begin(); it != m.raw().end(); ++it) {
      int id = 0;
      std::size_t used = 0;
      try {
        id = std::stoi(it.key(), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != it.key().size()) m.fail("rock id '" + it.key() + "' is not an integer");
      if (!it.value().is_number()) m.fail("saturation for rock " + it.key() + " must be a number");
      const double sw = it.value().get<double>();
      if (!(sw > 0.0 && sw <= 1.0)) m.fail("saturation for rock " + it.key() + " must be in (0, 1]");
      s.sw_by_rock[id] = sw;
    }
  }
  return s;
}

json write_initial(const InitialSpec& s) {
  json j = {{"po", s.po}};
  if (s.sw_by_rock.empty()) {
    j["pw"] = s.pw;
  } else {
    json m = json::object();
    for (const auto& [id, sw] : s.sw_by_rock) m[std::to_string(id)] = sw;
    j["sw_by_rock"] = m;
  }
  return j;
}

OutputPlan read_output(const Node& n, double tf) {
  n.expect_object({"times", "vtk", "scale", "lines"});
  OutputPlan o;
  if (n.has("times")) {
    const Node t = n.at("times");
    if (!t.raw().is_array()) t.fail("expected an array");
    for (std::size_t i = 0; i < t.size(); ++i) o.times.push_back(t.at(i).number() * tf);
  }
  o.vtk = n.boolean("vtk", o.vtk);
  o.scale = n.number("scale", o.scale);
  if (n.has("lines")) {
    const Node ls = n.at("lines");
    if (!ls.raw().is_array()) ls.fail("expected an array");
    for (std::size_t i = 0; i < ls.size(); ++i) {
      const Node l = ls.at(i);
      l.expect_object({"name", "field", "start", "end", "points"});
      LineSpec s;
      s.name = l.at("name").string();
      try {
        s.field = sample_field_from_string(l.at("field").string());
      } catch (const InvalidArgument& e) {
        l.at("field").fail(e.what());
      }
      s.start = l.at("start").vec3();
      s.end = l.at("end").vec3();
      s.points = static_cast<int>(l.integer("points", s.points));
      if (s.points < 2) l.at("points").fail("need at least 2 points");
      o.lines.push_back(s);
    }
  }
  return o;
}

json write_output(const OutputPlan& o) {
  json lines = json::array();
  for (const auto& l : o.lines)
    lines.push_back({{"name", l.name},
                     {"field", to_string(l.field)},
                     {"start", write_vec(l.start)},
                     {"end", write_vec(l.end)},
                     {"points", l.points}});
  return {{"times", o.times}, {"vtk", o.vtk}, {"scale", o.scale}, {"lines", lines}};
}

}  // namespace

std::string to_string(SampleField f) {
  switch (f) {
    case SampleField::Sw: return "sw";
    case SampleField::Pw: return "pw";
    case SampleField::Po: return "po";
    case SampleField::Ux: return "ux";
    case SampleField::Uy: return "uy";
    case SampleField::Uz: return "uz";
  }
  return "sw";
}

SampleField sample_field_from_string(const std::string& s) {
  for (SampleField f : {SampleField::Sw, SampleField::Pw, SampleField::Po, SampleField::Ux, SampleField::Uy,
                        SampleField::Uz})
    if (to_string(f) == s) return f;
  throw InvalidArgument("unknown field '" + s + "' (expected sw, pw, po, ux, uy or uz)");
}

void CaseConfig::validate() const {
  if (schema_version != kCaseSchemaVersion) throw ConfigError("unsupported schema_version");
  for (long n : cells)
    if (n < 1) throw ConfigError("mesh cells must be >= 1 in every direction");
  if (!(domain.hi.array() > domain.lo.array()).all()) throw ConfigError("domain needs lo < hi");
  physics.validate();
  disc.validate();
  solver.validate();
  grid.validate();
  if (!(pressure_unit > 0.0)) throw ConfigError("pressure_unit must be > 0");
  for (double t : output.times)
    if (t < 0.0) throw ConfigError("output times must be >= 0");
}

bool CaseConfig::operator==(const CaseConfig& o) const {
  return schema_version == o.schema_version && name == o.name && domain.lo == o.domain.lo &&
         domain.hi == o.domain.hi && cells == o.cells && physics == o.physics && disc == o.disc &&
         solver.abs_tol == o.solver.abs_tol && solver.restart == o.solver.restart &&
         solver.max_iterations == o.solver.max_iterations &&
         solver.min_iterations == o.solver.min_iterations && solver.preconditioner == o.solver.preconditioner &&
         solver.ilu_level == o.solver.ilu_level && jacobi_scaling == o.jacobi_scaling &&
         pressure_unit == o.pressure_unit && grid == o.grid &&
         materials == o.materials && boundary == o.boundary && initial == o.initial && output == o.output;
}

CaseConfig parse_case_string(const std::string& text, const std::string& source, const std::string& base_dir) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ParseError(source + ": empty case file");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": invalid JSON: " + e.what());
  }
  const Node root(doc, "", source);
  root.expect_object({"schema_version", "name", "domain", "mesh", "time", "physics", "discretization", "solver",
                      "materials", "boundary", "initial", "output"});
  CaseConfig c;
  c.base_dir = base_dir;
  c.schema_version = static_cast<int>(root.at("schema_version").integer());
  if (c.schema_version != kCaseSchemaVersion)
    root.at("schema_version").fail("unsupported version " + std::to_string(c.schema_version));
  c.name = root.has("name") ? root.at("name").string() : std::string();
  c.domain = read_box(root.at("domain"));
  {
    const Node m = root.at("mesh");
    m.expect_object({"cells"});
    c.cells = m.at("cells").ivec3();
    for (long n : c.cells)
      if (n < 1) m.at("cells").fail("cells must be >= 1");
  }
  const Node t = root.at("time");
  t.expect_object({"unit", "tau0", "tau", "T"});
  const double tf = time_factor(t);
  c.grid = TimeGrid{t.at("tau0").number() * tf, t.at("tau").number() * tf, t.at("T").number() * tf};
  try {
    c.grid.validate();
  } catch (const std::exception& e) {
    t.fail(e.what());
  }
  if (root.has("physics")) c.physics = read_physics(root.at("physics"));
  if (root.has("discretization")) c.disc = read_disc(root.at("discretization"));
  if (root.has("solver")) read_solver(root.at("solver"), c);
  c.materials = read_materials(root.at("materials"));
  {
    const Node b = root.at("boundary");
    b.expect_object({"x_min", "x_max", "y_min", "y_max", "z_min", "z_max"});
    for (int p = 0; p < 6; ++p) c.boundary[p] = read_plane(b.at(kPlaneNames[p]));
  }
  c.initial = read_initial(root.at("initial"));
  if (root.has("output")) c.output = read_output(root.at("output"), tf);
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
  return c;
}

CaseConfig parse_case(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("file not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string base = path.parent_path().string();
  if (base.empty()) base = ".";
  return parse_case_string(ss.str(), path.string(), base);
}

std::string emit_case(const CaseConfig& c) {
  json b = json::object();
  for (int p = 0; p < 6; ++p) b[kPlaneNames[p]] = write_plane(c.boundary[p]);
  json j = {{"schema_version", c.schema_version},
            {"name", c.name},
            {"domain", write_box(c.domain)},
            {"mesh", {{"cells", json::array({c.cells[0], c.cells[1], c.cells[2]})}}},
            {"time", {{"unit", "s"}, {"tau0", c.grid.tau0}, {"tau", c.grid.tau}, {"T", c.grid.T}}},
            {"physics", write_physics(c.physics)},
            {"discretization", write_disc(c.disc)},
            {"solver", write_solver(c)},
            {"materials", write_materials(c.materials)},
            {"boundary", b},
            {"initial", write_initial(c.initial)},
            {"output", write_output(c.output)}};
  return j.dump(2) + "\n";
}

}  // namespace porodg
