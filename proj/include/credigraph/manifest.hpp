#pragma once

// Per-run job manifests. A manifest records what a command read, what it
// wrote and with which settings, plus a hash over input contents and
// configuration used to skip identical reruns.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "credigraph/timeutil.hpp"

namespace credigraph {

// Hex SHA-256 of a file's bytes. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

struct ManifestEntry {
    std::string path;
    std::string sha256;
    std::uint64_t bytes = 0;
};

struct JobManifest {
    std::string command;
    std::vector<ManifestEntry> inputs;
    std::vector<ManifestEntry> outputs;
    nlohmann::json config = nlohmann::json::object();
    std::string run_hash;
    Timestamp started{};
    Timestamp finished{};
    std::map<std::string, std::uint64_t> counters;

    [[nodiscard]] nlohmann::json to_json() const;
    static JobManifest from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static JobManifest load(const std::filesystem::path& path);
};

// Directories are hashed over their regular files in path order.
ManifestEntry describe_path(const std::filesystem::path& path);

// Hash of the command name, each input's content hash and the canonical
// config dump.
std::string run_hash(std::string_view command, const std::vector<ManifestEntry>& inputs,
                     const nlohmann::json& config);

// True when `manifest_path` holds a manifest with the same run hash whose
// outputs all still exist with their recorded hashes.
bool is_up_to_date(const std::filesystem::path& manifest_path, const std::string& hash);

}  // namespace credigraph
