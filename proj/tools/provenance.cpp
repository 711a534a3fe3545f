#include "provenance.hpp"

#include <algorithm>
#include <fstream>

#include "ehs/error.hpp"
#include "ehs/hash.hpp"
#include "ehs/io.hpp"

namespace ehs::cli {

namespace fs = std::filesystem;

Provenance::Provenance(std::string command, const PipelineConfig& cfg) : command_(std::move(command)), cfg_(cfg) {}

void Provenance::add_input(const fs::path& file) { inputs_.emplace_back(file.filename().string(), digest_file(file)); }

void Provenance::add_input_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), dir));
  }
  std::sort(files.begin(), files.end());
  Fnv1a h;
  for (const auto& rel : files) {
    h.update(rel.generic_string());
    h.update(read_text_file(dir / rel));
  }
  inputs_.emplace_back(dir.filename().string() + "/", hex64(h.value()));
}

nlohmann::ordered_json Provenance::json() const {
  nlohmann::ordered_json j;
  j["tool"] = "ehs";
  j["command"] = command_;
  j["config_hash"] = config_hash(cfg_);
  j["seed"] = cfg_.seed;
  j["config"] = to_json(cfg_);
  auto& inputs = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [name, digest] : inputs_) inputs.push_back({{"name", name}, {"digest", digest}});
  return j;
}

std::string Provenance::csv_line() const { return "# provenance: " + json().dump() + "\n"; }

std::string digest_bytes(const std::string& bytes) { return hex64(fnv1a(bytes)); }

std::string digest_file(const fs::path& file) { return digest_bytes(read_text_file(file)); }

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out << content;
  if (!out) fail(Errc::io_error, "write failed for " + path.string());
}

}  // namespace ehs::cli
