// Report serialization: pretty JSON with stable key order, CSV with one row
// per scan point at 17 significant digits, and reproducibility manifests.

#pragma once

#include <string>

#include "betawalk/experiments.hpp"

namespace betawalk {

// Shortest-roundtrip decimal for CSV cells; integers lose the trailing ".0".
std::string format_double(double x);

std::string report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);

// Write content to path, throwing std::runtime_error with the path on failure.
void write_text_file(const std::string& path, const std::string& content);

// Sidecar "<output_path>.manifest.json": the full resolved configuration
// (serialized by the caller), seed, tool version, and wall time.
void write_manifest(const std::string& output_path, const std::string& config_json,
                    std::uint64_t seed, double wall_seconds);

}  // namespace betawalk
