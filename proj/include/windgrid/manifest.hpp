#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace windgrid {

inline constexpr const char* kToolkitVersion = "0.1.0";

// FNV-1a, 64-bit. Fast, dependency-free and stable across platforms; used to
// fingerprint pipeline inputs and outputs, not for security.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64(const std::string& text);
std::string hash_hex(std::uint64_t h);  // 16 lowercase hex digits

// Hashes a file's bytes; Error::input when the file cannot be read.
std::uint64_t hash_file(const std::string& path);

std::string read_text_file(const std::string& path);

// Writes to a sibling temp file and renames it into place, so readers never
// observe a partially written artifact. Error::input on any filesystem error.
void write_text_atomic(const std::string& path, const std::string& content);

struct ManifestFile {
    std::string role;  // e.g. "wind-profile-winter"
    std::string path;  // relative to the manifest's directory unless absolute
    std::string hash;  // hash_hex of the file bytes
    std::uint64_t bytes = 0;
};

struct ManifestStage {
    std::string name;
    double seconds = 0.0;  // wall clock
};

// Record of one pipeline run: what went in, what came out (with content
// hashes), the effective configuration and the seed. The manifest alone
// carries everything needed to re-run or audit a stage.
struct PipelineManifest {
    std::string tool_version = kToolkitVersion;
    std::string created;  // ISO-8601 UTC; informational, like stage timings
    std::uint64_t seed = 0;
    std::string config;  // JSON snapshot of the effective configuration
    std::vector<ManifestFile> inputs;
    std::vector<ManifestFile> outputs;
    std::vector<ManifestStage> stages;
};

// Hashes the file at `path` and appends an entry recorded under `stored_as`
// (usually the path relative to the manifest's directory).
void manifest_add(std::vector<ManifestFile>& list, const std::string& role,
                  const std::string& path, const std::string& stored_as);

std::string manifest_to_json(const PipelineManifest& m);
PipelineManifest manifest_from_json(const std::string& text, const std::string& source);
void save_manifest(const PipelineManifest& m, const std::string& path);
PipelineManifest load_manifest(const std::string& path);

// Re-hashes every recorded output, resolving relative paths against
// `base_dir`. A missing file or a hash mismatch raises Error::integrity
// naming the file.
void verify_manifest(const PipelineManifest& m, const std::string& base_dir);

// Current UTC time as ISO-8601; seconds resolution.
std::string utc_timestamp();

}  // namespace windgrid
