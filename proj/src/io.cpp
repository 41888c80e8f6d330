#include "sweep/io.hpp"

#include "sweep/errors.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace sweep {

namespace {

void reject_unknown(const Json& object, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) throw FormatError("unknown field '" + item.key() + "' in " + where);
  }
}

const Json& field(const Json& object, const std::string& key, const std::string& where) {
  if (!object.contains(key)) throw FormatError("missing field '" + key + "' in " + where);
  return object.at(key);
}

double number(const Json& value, const std::string& name) {
  if (!value.is_number()) throw FormatError("field '" + name + "' must be a number");
  return value.get<double>();
}

int integer(const Json& value, const std::string& name) {
  if (!value.is_number_integer()) throw FormatError("field '" + name + "' must be an integer");
  return value.get<int>();
}

void expect_object(const Json& value, const std::string& where) {
  if (!value.is_object()) throw FormatError(where + " must be a JSON object");
}

void expect_version(const Json& object, const std::string& where) {
  const int version = integer(field(object, "version", where), "version");
  if (version != kFormatVersion) {
    throw FormatError("unsupported " + where + " version " + std::to_string(version) + ", expected " +
                      std::to_string(kFormatVersion));
  }
}

Json point_json(const Vec3& p) { return Json::array({p.x(), p.y(), p.z()}); }

}  // namespace

Json config_echo(const FitConfig& c) {
  Json j;
  j["K"] = c.K;
  j["n"] = c.n;
  j["k"] = c.k;
  j["iterations"] = c.iterations;
  j["lambda1"] = c.lambda1;
  j["alpha"] = c.alpha;
  j["lambda2"] = c.lambda2;
  j["beta"] = c.beta;
  j["beta_eff"] = c.beta_eff;
  j["lambda3"] = c.lambda3;
  j["lambda4"] = c.lambda4;
  j["lambda4_decay"] = c.lambda4_decay;
  j["learning_rate"] = c.learning_rate;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_epsilon"] = c.adam_epsilon;
  j["seed"] = c.seed;
  j["test_cells"] = c.test_cells;
  j["surface_points"] = c.surface_points;
  j["surface_band_cells"] = c.surface_band_cells;
  j["overlap_mode"] = to_string(c.overlap_mode);
  j["gate_threshold"] = c.gate_threshold;
  j["axis_gate_min"] = c.axis_gate_min;
  j["axis_samples"] = c.axis_samples;
  j["prune_ratio"] = c.prune_ratio;
  j["skeleton_cap"] = c.skeleton_cap;
  j["field"] = {{"frames", c.field.frames},
                {"sharpness", c.field.sharpness},
                {"profile_sharpness", c.field.profile_sharpness},
                {"slab_resolution", c.field.slab_resolution}};
  j["straight_axis"] = c.straight_axis;
  return j;
}

Json primitive_to_json(const SweepPrimitive& p, double gate) {
  Json j;
  j["version"] = kFormatVersion;
  j["n"] = p.n();
  j["k"] = p.k();
  Json ctrl = Json::array();
  for (const Vec3& c : p.axis.control_points()) ctrl.push_back(point_json(c));
  j["control_points"] = std::move(ctrl);
  j["profile"] = {{"a", p.profile.a}, {"b", p.profile.b}, {"d", p.profile.d}};
  j["scaling"] = p.scaling.coeffs;
  j["gate"] = gate;
  return j;
}

SweepPrimitive primitive_from_json(const Json& r, double* gate) {
  const std::string where = "primitive";
  expect_object(r, where);
  reject_unknown(r, {"version", "n", "k", "control_points", "profile", "scaling", "gate"}, where);
  expect_version(r, where);
  const int n = integer(field(r, "n", where), "n");
  const int k = integer(field(r, "k", where), "k");
  if (n < 3 || k < 0) throw FormatError("invalid primitive shape n = " + std::to_string(n) + ", k = " + std::to_string(k));
  const Json& ctrl = field(r, "control_points", where);
  if (!ctrl.is_array() || ctrl.size() != static_cast<std::size_t>(n)) {
    throw FormatError("field 'control_points' must hold n = " + std::to_string(n) + " points");
  }
  std::vector<double> packed;
  for (const Json& c : ctrl) {
    if (!c.is_array() || c.size() != 3) throw FormatError("each control point must be an [x, y, z] array");
    for (const Json& v : c) packed.push_back(number(v, "control_points"));
  }
  const Json& prof = field(r, "profile", where);
  expect_object(prof, "profile");
  reject_unknown(prof, {"a", "b", "d"}, "profile");
  for (const char* key : {"a", "b", "d"}) packed.push_back(number(field(prof, key, "profile"), std::string("profile.") + key));
  const Json& scaling = field(r, "scaling", where);
  if (!scaling.is_array() || scaling.size() != static_cast<std::size_t>(k)) {
    throw FormatError("field 'scaling' must hold k = " + std::to_string(k) + " coefficients");
  }
  for (const Json& v : scaling) packed.push_back(number(v, "scaling"));
  double g = 1.0;
  if (r.contains("gate")) g = number(r.at("gate"), "gate");
  if (!(g >= 0.0 && g <= 1.0)) {
    std::ostringstream msg;
    msg << "gate = " << g << " not in [0, 1]";
    throw BoundsError(msg.str());
  }
  SweepPrimitive p = unpack_params(packed, n, k);
  validate_bounds(p);
  if (gate) *gate = g;
  return p;
}

Json assembly_to_json(const AssemblyFile& file) {
  const Assembly& a = file.assembly;
  check_assembly(a);
  if (a.K() < 1) throw DomainError("an assembly needs at least one primitive");
  Json j;
  j["version"] = kFormatVersion;
  j["K"] = a.K();
  j["n"] = a.primitives[0].n();
  j["k"] = a.primitives[0].k();
  Json prims = Json::array();
  for (int i = 0; i < a.K(); ++i) prims.push_back(primitive_to_json(a.primitives[i], a.gates[i]));
  j["primitives"] = std::move(prims);
  j["fit_config_echo"] = file.fit_config_echo;
  return j;
}

AssemblyFile assembly_from_json(const Json& d) {
  const std::string where = "assembly";
  expect_object(d, where);
  reject_unknown(d, {"version", "K", "n", "k", "primitives", "fit_config_echo"}, where);
  expect_version(d, where);
  const int K = integer(field(d, "K", where), "K");
  const int n = integer(field(d, "n", where), "n");
  const int k = integer(field(d, "k", where), "k");
  const Json& prims = field(d, "primitives", where);
  if (!prims.is_array() || prims.size() != static_cast<std::size_t>(K) || K < 1) {
    throw FormatError("field 'primitives' must hold K = " + std::to_string(K) + " >= 1 records");
  }
  AssemblyFile file;
  for (std::size_t i = 0; i < prims.size(); ++i) {
    double gate = 1.0;
    SweepPrimitive p;
    try {
      p = primitive_from_json(prims[i], &gate);
    } catch (const FormatError& e) {
      throw FormatError("primitives[" + std::to_string(i) + "]: " + e.what());
    } catch (const BoundsError& e) {
      throw BoundsError("primitives[" + std::to_string(i) + "]: " + e.what());
    }
    if (p.n() != n || p.k() != k) {
      throw FormatError("primitives[" + std::to_string(i) + "] has n = " + std::to_string(p.n()) + ", k = " +
                        std::to_string(p.k()) + " but the assembly declares n = " + std::to_string(n) +
                        ", k = " + std::to_string(k));
    }
    file.assembly.primitives.push_back(std::move(p));
    file.assembly.gates.push_back(gate);
  }
  file.fit_config_echo = d.contains("fit_config_echo") ? d.at("fit_config_echo") : Json::object();
  return file;
}

std::string write_assembly(const AssemblyFile& file) { return assembly_to_json(file).dump(2) + "\n"; }

AssemblyFile read_assembly(const std::string& text) {
  Json d;
  try {
    d = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("malformed assembly JSON: ") + e.what());
  }
  return assembly_from_json(d);
}

void write_assembly_file(const std::string& path, const AssemblyFile& file) {
  write_text_file(path, write_assembly(file));
}

AssemblyFile read_assembly_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return read_assembly(text);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

Json skeleton_to_json(const SkeletonPoints& s) {
  Json pts = Json::array();
  for (const Vec3& p : s.points) pts.push_back(point_json(p));
  Json j;
  j["points"] = std::move(pts);
  j["radii"] = s.radii;
  return j;
}

Json report_to_json(const MetricReport& r) {
  Json j;
  j["iou"] = r.iou;
  j["chamfer"] = r.chamfer;
  j["f1"] = r.f1;
  j["threshold"] = r.threshold;
  return j;
}

std::string trace_line(const TraceRecord& r) {
  Json j;
  j["iter"] = r.iter;
  j["total"] = r.total;
  j["recon"] = r.recon;
  j["overlap"] = r.overlap;
  j["parsimony"] = r.parsimony;
  j["axis"] = r.axis;
  j["q_soft"] = r.q_soft;
  return j.dump();
}

std::string write_xyz(const PointList& points) {
  std::string out;
  char buf[96];
  for (const Vec3& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out += buf;
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
  if (!out) throw FormatError("failed writing " + path);
}

}  // namespace sweep
