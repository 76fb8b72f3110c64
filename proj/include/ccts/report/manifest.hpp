#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace ccts::report {

// Lowercase hex SHA-256 of a file's bytes. Throws IoError.
std::string sha256_file(const std::filesystem::path& p);
std::string sha256_hex(const std::string& bytes);

// Writes `dir`/manifest.json: `meta` plus a "files" array of
// {path, bytes, sha256} for every regular file under `dir` (relative paths,
// sorted, the manifest itself excluded). No timestamps or absolute paths.
void write_manifest(const std::filesystem::path& dir, const nlohmann::json& meta);

}  // namespace ccts::report
