#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gemlab/config.hpp"

namespace gem {

struct ArtifactEntry {
    std::string name;        // relative to the output directory
    std::uint64_t checksum;  // FNV-1a over the file bytes
    std::uint64_t bytes;
};

struct RunManifest {
    std::string kind;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string version;
    std::string compiler;
    std::vector<ArtifactEntry> artifacts;
    std::map<std::string, double> metrics;
    std::map<std::string, std::uint64_t> stage_checksums;
    double wall_time_s = 0.0;  // excluded from all checksums
    bool asserts_passed = true;
    std::vector<std::string> assert_failures;
};

// Executes the configured pipeline, writes every declared artifact plus
// manifest.json into config.output_dir, and evaluates the assert rules.
RunManifest run(const ExperimentConfig& config);

std::string manifest_to_json(const RunManifest& manifest);

}  // namespace gem
