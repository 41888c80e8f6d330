#include "sweep/cli.hpp"

#include "sweep/edit.hpp"
#include "sweep/errors.hpp"
#include "sweep/fitter.hpp"
#include "sweep/fixtures.hpp"
#include "sweep/io.hpp"
#include "sweep/keypoints.hpp"
#include "sweep/log.hpp"
#include "sweep/metrics.hpp"
#include "sweep/mesh.hpp"
#include "sweep/skeleton.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace sweep {

namespace {

struct Options {
  std::string input, second, out, trace;
  int primitives = 8, iterations = 2000, threads = 1;
  std::uint64_t seed = 0;
  std::string overlap_mode = "hinge";
  bool straight_axis = false;
  int frames = 64, contour = 32;
  std::optional<int> primitive;
  double tau = 0.05;
  std::size_t samples = 16384;
  std::string rotate, translate, scale_coeff, profile;
  double prune = kDefaultPruneRatio;
  std::size_t max_points = kDefaultSkeletonCap;
  int resolution = 64;
};

std::vector<double> parse_numbers(const std::string& text, std::size_t count, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw FormatError(flag + " expects numbers, got '" + text + "'");
    out.push_back(v);
  }
  if (out.size() != count) {
    throw FormatError(flag + " expects " + std::to_string(count) + " comma-separated values, got '" + text + "'");
  }
  return out;
}

std::pair<std::string, double> parse_assignment(const std::string& text, const std::string& flag) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw FormatError(flag + " expects name=value, got '" + text + "'");
  return {text.substr(0, eq), parse_numbers(text.substr(eq + 1), 1, flag)[0]};
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

int cmd_fit(const Options& o, std::ostream& out) {
  const VoxelGrid grid = read_sweepvox_file(o.input);
  FitConfig cfg = FitConfig::defaults(o.primitives);
  cfg.iterations = o.iterations;
  cfg.seed = o.seed;
  cfg.overlap_mode = parse_overlap_mode(o.overlap_mode);
  cfg.straight_axis = o.straight_axis;
  cfg.threads = o.threads;
  const FitResult result = fit(grid, cfg);
  AssemblyFile file;
  file.assembly = result.assembly;
  file.fit_config_echo = config_echo(cfg);
  write_assembly_file(o.out, file);
  if (!o.trace.empty()) {
    std::string lines;
    for (const auto& r : result.trace) lines += trace_line(r) + "\n";
    write_text_file(o.trace, lines);
  }
  const TraceRecord& last = result.trace.back();
  out << "fit: " << result.assembly.selected_count() << " of " << cfg.K << " primitives selected, final loss "
      << last.total << "\n";
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const AssemblyFile file = read_assembly_file(o.input);
  const Assembly& a = file.assembly;
  std::vector<TriMesh> meshes;
  std::vector<std::string> names;
  if (o.primitive) {
    const int i = *o.primitive;
    if (i < 0 || i >= a.K()) {
      throw DomainError("primitive index " + std::to_string(i) + " out of range [0, " + std::to_string(a.K()) + ")");
    }
    const TriMesh mesh = sweep_mesh(a.primitives[i], o.frames, o.contour);
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw FormatError("cannot write " + o.out);
    write_obj(f, mesh);
    if (!f) throw FormatError("failed writing " + o.out);
    out << "sweep: primitive " << i << ", " << mesh.vertices.size() << " vertices\n";
    return 0;
  }
  for (int i : a.selected()) {
    meshes.push_back(sweep_mesh(a.primitives[i], o.frames, o.contour));
    names.push_back("primitive_" + std::to_string(i));
  }
  if (meshes.empty()) throw DomainError("no primitive has gate > 0.5");
  write_obj_file(o.out, meshes, names);
  out << "sweep: " << meshes.size() << " primitives\n";
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const AssemblyFile file = read_assembly_file(o.input);
  const VoxelGrid grid = read_sweepvox_file(o.second);
  SurfaceSampling sampling;
  sampling.count = o.samples;
  const MetricReport report = evaluate_assembly(file.assembly, grid, o.tau, o.seed, sampling, o.threads);
  const Json j = report_to_json(report);
  if (!o.out.empty()) write_json_file(o.out, j);
  out << j.dump() << "\n";
  return 0;
}

int cmd_edit(const Options& o, std::ostream& out) {
  AssemblyFile file = read_assembly_file(o.input);
  Assembly& a = file.assembly;
  const int i = o.primitive.value_or(0);
  if (i < 0 || i >= a.K()) {
    throw DomainError("primitive index " + std::to_string(i) + " out of range [0, " + std::to_string(a.K()) + ")");
  }
  if (o.rotate.empty() && o.translate.empty() && o.scale_coeff.empty() && o.profile.empty()) {
    throw FormatError("edit needs one of --rotate, --translate, --scale-coeff, --profile");
  }
  SweepPrimitive p = a.primitives[i];
  if (!o.rotate.empty()) {
    const auto comma = o.rotate.find(',');
    if (comma != 1) throw FormatError("--rotate expects axis,degrees (e.g. z,90), got '" + o.rotate + "'");
    p = rotate_primitive(p, o.rotate[0], parse_numbers(o.rotate.substr(2), 1, "--rotate")[0]);
  }
  if (!o.translate.empty()) {
    const auto v = parse_numbers(o.translate, 3, "--translate");
    p = translate_primitive(p, Vec3(v[0], v[1], v[2]));
  }
  if (!o.scale_coeff.empty()) {
    const auto [name, value] = parse_assignment(o.scale_coeff, "--scale-coeff");
    std::size_t used = 0;
    int j = -1;
    try {
      j = std::stoi(name, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != name.size()) throw FormatError("--scale-coeff index must be an integer, got '" + name + "'");
    p = set_scaling_coeff(p, j, value);
  }
  if (!o.profile.empty()) {
    const auto [name, value] = parse_assignment(o.profile, "--profile");
    if (name.size() != 1) throw FormatError("--profile expects a, b or d, got '" + name + "'");
    p = set_profile_param(p, name[0], value);
  }
  validate_bounds(p);
  a.primitives[i] = std::move(p);
  write_assembly_file(o.out, file);
  out << "edit: primitive " << i << " written to " << o.out << "\n";
  return 0;
}

int cmd_skeleton(const Options& o, std::ostream& out) {
  const VoxelGrid grid = read_sweepvox_file(o.input);
  const SkeletonPoints s = extract_medial_axis(grid, o.prune, o.max_points);
  write_json_file(o.out, skeleton_to_json(s));
  out << "skeleton: " << s.points.size() << " points\n";
  return 0;
}

int cmd_sample(const Options& o, std::ostream& out) {
  const AssemblyFile file = read_assembly_file(o.input);
  PointList points;
  for (int i : file.assembly.selected()) {
    const PointList cloud = sample_keypoints(file.assembly.primitives[i]).flatten();
    points.insert(points.end(), cloud.begin(), cloud.end());
  }
  if (points.empty()) throw DomainError("no primitive has gate > 0.5");
  write_text_file(o.out, write_xyz(points));
  out << "sample: " << points.size() << " points\n";
  return 0;
}

int cmd_fixture(const Options& o, std::ostream& out) {
  const VoxelGrid grid = fixtures::make(o.input, o.resolution);
  write_sweepvox_file(o.out, grid);
  out << "fixture: " << o.input << ", " << grid.count() << " occupied cells\n";
  return 0;
}

int cmd_rasterize(const Options& o, std::ostream& out) {
  const VoxelGrid grid = rasterize_mesh(read_obj_file(o.input), o.resolution);
  write_sweepvox_file(o.out, grid);
  out << "rasterize: " << grid.count() << " occupied cells\n";
  return 0;
}

int cmd_surface(const Options& o, std::ostream& out) {
  const TriMesh mesh = voxel_surface(read_sweepvox_file(o.input));
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw FormatError("cannot write " + o.out);
  write_obj(f, mesh);
  if (!f) throw FormatError("failed writing " + o.out);
  out << "surface: " << mesh.triangles.size() << " triangles\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Fit unions of sweep-surface primitives to voxel shapes", "sweepfit"};
  app.require_subcommand(1);

  auto* fit_cmd = app.add_subcommand("fit", "Fit an assembly to a SWEEPVOX grid");
  fit_cmd->add_option("input", o.input, "SWEEPVOX file")->required();
  fit_cmd->add_option("-K,--primitives", o.primitives, "Maximum number of primitives")->capture_default_str();
  fit_cmd->add_option("--iters", o.iterations, "Optimizer iterations")->capture_default_str();
  fit_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  fit_cmd->add_option("--out", o.out, "Assembly JSON output")->required();
  fit_cmd->add_option("--trace", o.trace, "Convergence trace (JSONL) output");
  fit_cmd->add_option("--overlap-mode", o.overlap_mode, "hinge or paper")->capture_default_str();
  fit_cmd->add_flag("--straight-axis", o.straight_axis, "Keep every axis a straight segment");
  fit_cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep", "Mesh the selected primitives as OBJ");
  sweep_cmd->add_option("assembly", o.input, "Assembly JSON")->required();
  sweep_cmd->add_option("--frames", o.frames, "Frames along the axis")->capture_default_str();
  sweep_cmd->add_option("--contour", o.contour, "Points per contour")->capture_default_str();
  sweep_cmd->add_option("--out", o.out, "OBJ output")->required();
  sweep_cmd->add_option("--primitive", o.primitive, "Mesh only this primitive");

  auto* eval_cmd = app.add_subcommand("eval", "IoU, Chamfer distance and F-score against a grid");
  eval_cmd->add_option("assembly", o.input, "Assembly JSON")->required();
  eval_cmd->add_option("voxels", o.second, "SWEEPVOX file")->required();
  eval_cmd->add_option("--out", o.out, "Report JSON output");
  eval_cmd->add_option("--tau", o.tau, "F-score distance threshold")->capture_default_str();
  eval_cmd->add_option("--samples", o.samples, "Surface samples per point set")->capture_default_str();
  eval_cmd->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
  eval_cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();

  auto* edit_cmd = app.add_subcommand("edit", "Edit one primitive's parameters");
  edit_cmd->add_option("assembly", o.input, "Assembly JSON")->required();
  edit_cmd->add_option("--primitive", o.primitive, "Primitive index (default 0)");
  edit_cmd->add_option("--rotate", o.rotate, "axis,degrees about the control-point centroid");
  edit_cmd->add_option("--translate", o.translate, "dx,dy,dz");
  edit_cmd->add_option("--scale-coeff", o.scale_coeff, "j=value");
  edit_cmd->add_option("--profile", o.profile, "a|b|d=value");
  edit_cmd->add_option("--out", o.out, "Assembly JSON output")->required();

  auto* skel_cmd = app.add_subcommand("skeleton", "Medial-axis points of a grid as JSON");
  skel_cmd->add_option("voxels", o.input, "SWEEPVOX file")->required();
  skel_cmd->add_option("--out", o.out, "JSON output")->required();
  skel_cmd->add_option("--prune", o.prune, "Keep points with radius >= prune * max radius")->capture_default_str();
  skel_cmd->add_option("--max-points", o.max_points, "Thin to at most this many points (0 keeps all)")
      ->capture_default_str();

  auto* sample_cmd = app.add_subcommand("sample", "Key points of the selected primitives as .xyz");
  sample_cmd->add_option("assembly", o.input, "Assembly JSON")->required();
  sample_cmd->add_option("--out", o.out, ".xyz output")->required();

  auto* fixture_cmd = app.add_subcommand("fixture", "Write a synthetic test solid as SWEEPVOX");
  fixture_cmd->add_option("name", o.input, "Fixture name")->required()->check(CLI::IsMember(fixtures::names()));
  fixture_cmd->add_option("--resolution", o.resolution, "Grid resolution")->capture_default_str();
  fixture_cmd->add_option("--out", o.out, "SWEEPVOX output")->required();

  auto* raster_cmd = app.add_subcommand("rasterize", "Voxelize a closed OBJ mesh");
  raster_cmd->add_option("mesh", o.input, "OBJ file")->required();
  raster_cmd->add_option("--resolution", o.resolution, "Grid resolution")->capture_default_str();
  raster_cmd->add_option("--out", o.out, "SWEEPVOX output")->required();

  auto* surface_cmd = app.add_subcommand("surface", "Iso-surface of a grid as OBJ");
  surface_cmd->add_option("voxels", o.input, "SWEEPVOX file")->required();
  surface_cmd->add_option("--out", o.out, "OBJ output")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const WarningSink previous = set_warning_sink([&err](const std::string& m) { err << "warning: " << m << "\n"; });
  struct Restore {
    WarningSink sink;
    ~Restore() { set_warning_sink(std::move(sink)); }
  } restore{previous};

  try {
    if (fit_cmd->parsed()) return cmd_fit(o, out);
    if (sweep_cmd->parsed()) return cmd_sweep(o, out);
    if (eval_cmd->parsed()) return cmd_eval(o, out);
    if (edit_cmd->parsed()) return cmd_edit(o, out);
    if (skel_cmd->parsed()) return cmd_skeleton(o, out);
    if (sample_cmd->parsed()) return cmd_sample(o, out);
    if (fixture_cmd->parsed()) return cmd_fixture(o, out);
    if (raster_cmd->parsed()) return cmd_rasterize(o, out);
    if (surface_cmd->parsed()) return cmd_surface(o, out);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace sweep
