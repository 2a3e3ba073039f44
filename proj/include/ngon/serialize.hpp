#pragma once

// JSON and CSV output.  JSON objects keep insertion order and non-finite
// numbers are written as null.

#include "ngon/energy.hpp"
#include "ngon/geometry.hpp"
#include "ngon/optimize.hpp"
#include "ngon/verify.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ngon {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::size_t kMaxTracePoints = 2000;

struct RunManifest {
  std::string command;
  Json config = Json::object();
  std::string version = kVersion;
  std::uint64_t seed = 0;
  std::string timestamp;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

/// %.17g, with "inf", "-inf" and "nan" for the non-finite values.
std::string format_double(double x);

/// Evenly spaced subset of at most `max_points`, always keeping both ends.
std::vector<TracePoint> downsample_trace(const std::vector<TracePoint>& trace,
                                         std::size_t max_points = kMaxTracePoints);

Json to_json(const RunManifest& m);
Json to_json(const OptimizationConfig& cfg);
Json to_json(const PointChain& chain);
Json to_json(const ConvexEquilateralPolygon& poly);
Json to_json(const EnergyBreakdown& b);
Json to_json(const Diagnostics& d);
Json to_json(const OptimizationResult& r);
Json to_json(const N4Report& r);
Json to_json(const RegularOptimalityReport& r);
Json to_json(const LukoReport& r);
Json to_json(const IdentityReport& r);
Json to_json(const SweepReport& r);

/// Throws std::invalid_argument on a malformed document.
PointChain chain_from_json(const Json& j);
ConvexEquilateralPolygon polygon_from_json(const Json& j);
OptimizationConfig config_from_json(const Json& j);

/// Two-space indentation, trailing newline.
std::string dump(const Json& j);

/// Copy with every "timestamp" key removed, at any depth.
Json without_timestamps(Json j);

/// Columns alpha,winner,energy_best,energy_regular,energy_double_arc,gap,
/// restarts,seed.  Notes, bracket and manifest go in leading '#' lines.
std::string sweep_csv(const SweepReport& r, const RunManifest* manifest = nullptr);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace ngon
