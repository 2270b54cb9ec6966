#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "salnet/experiment.hpp"

namespace salnet {

inline constexpr std::string_view kToolVersion = "1.0.0";

struct OutputFile {
    std::string path;  // relative to the output directory
    std::string hash;  // git blob SHA-1 of the contents
};

struct RunSeed {
    std::string label;  // e.g. "run 3"
    std::uint64_t seed = 0;
};

struct RunManifest {
    std::string version{kToolVersion};
    std::string kind;
    std::vector<std::pair<std::string, std::string>> params;  // fully resolved
    std::vector<std::string> overrides;                       // keys changed from the defaults
    std::uint64_t master_seed = 0;
    std::vector<RunSeed> run_seeds;
    std::string started;   // UTC, ISO 8601
    std::string finished;  // empty until results are written
    std::string status;    // running | ok | diverged | failed
    std::vector<OutputFile> outputs;
};

// SHA-1 over "blob <size>\0" + contents, hex encoded (what `git hash-object` prints).
std::string git_blob_hash(std::string_view contents);

std::string utc_timestamp();

RunManifest make_manifest(const ExperimentSpec& spec, const std::vector<RunSeed>& seeds);
std::string manifest_json(const RunManifest& manifest);
// Throws std::runtime_error on malformed JSON or missing fields.
RunManifest parse_manifest(std::string_view json);
// Rebuilds the experiment spec a manifest describes.
ExperimentSpec spec_from_manifest(const RunManifest& manifest);

}  // namespace salnet
