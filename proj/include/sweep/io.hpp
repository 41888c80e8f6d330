#pragma once

#include "sweep/assembly.hpp"
#include "sweep/fitter.hpp"
#include "sweep/metrics.hpp"
#include "sweep/skeleton.hpp"

#include "json.hpp"

#include <string>

namespace sweep {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// On-disk assembly: primitives with gates plus the configuration that
/// produced them. The echo is carried verbatim through read and write.
struct AssemblyFile {
  Assembly assembly;
  Json fit_config_echo = Json::object();
};

/// Every FitConfig field, in declaration order.
Json config_echo(const FitConfig& config);

Json primitive_to_json(const SweepPrimitive& primitive, double gate);
/// Throws FormatError for missing, mistyped or unknown fields and a version
/// mismatch, BoundsError for out-of-range values.
SweepPrimitive primitive_from_json(const Json& record, double* gate = nullptr);

Json assembly_to_json(const AssemblyFile& file);
AssemblyFile assembly_from_json(const Json& document);

/// Canonical text: two-space indentation and a trailing newline.
std::string write_assembly(const AssemblyFile& file);
AssemblyFile read_assembly(const std::string& text);
void write_assembly_file(const std::string& path, const AssemblyFile& file);
AssemblyFile read_assembly_file(const std::string& path);

Json skeleton_to_json(const SkeletonPoints& skeleton);
Json report_to_json(const MetricReport& report);
/// One JSONL line (no newline).
std::string trace_line(const TraceRecord& record);

/// "x y z" lines with 17 significant digits.
std::string write_xyz(const PointList& points);

/// Whole file as a string; throws FormatError naming the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sweep
