#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace ehs::cli {

/// Header attached to every emitted file: resolved config, its hash, the seed and input
/// digests. Only file names are recorded, never directories.
class Provenance {
 public:
  Provenance(std::string command, const PipelineConfig& cfg);

  void add_input(const std::filesystem::path& file);
  /// Digest over every regular file below `dir`, visited in sorted relative-path order.
  void add_input_dir(const std::filesystem::path& dir);

  nlohmann::ordered_json json() const;
  /// "# provenance: {...}" for CSV outputs.
  std::string csv_line() const;

 private:
  std::string command_;
  PipelineConfig cfg_;
  std::vector<std::pair<std::string, std::string>> inputs_;
};

std::string digest_bytes(const std::string& bytes);
std::string digest_file(const std::filesystem::path& file);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ehs::cli
