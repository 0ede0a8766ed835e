#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mkv/cloud.hpp"

namespace mkv {

/// 17 significant digits, so every double round-trips through text.
std::string format_double(double v);

/// particle_id, media_1..media_d, then one column per grid node.
void write_cloud_csv(std::ostream& out, const ParticleCloud& cloud);
ParticleCloud read_cloud_csv(std::istream& in, GridPtr grid);

/// Little-endian header (magic, count, dim, node count) followed by raw doubles.
void write_cloud_binary(std::ostream& out, const ParticleCloud& cloud);
ParticleCloud read_cloud_binary(std::istream& in, GridPtr grid);

nlohmann::json cloud_sidecar(const ParticleCloud& cloud);
GridPtr grid_from_sidecar(const nlohmann::json& sidecar);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Writes files under one directory and remembers them for the manifest.
/// Volatile files (wall-clock timings) are listed without a hash.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  void write_text(const std::string& name, std::string_view content, bool is_volatile = false);
  void write_json(const std::string& name, const nlohmann::json& j, bool is_volatile = false);
  /// <stem>.csv, <stem>.bin and <stem>.json.
  void write_cloud(const std::string& stem, const ParticleCloud& cloud);

  nlohmann::json manifest() const;
  /// Writes manifest.json and returns it.
  nlohmann::json write_manifest();

 private:
  struct Entry {
    std::string name;
    bool is_volatile;
  };
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
};

/// Loads <stem>.bin using the grid in <stem>.json.
ParticleCloud load_cloud(const std::filesystem::path& dir, const std::string& stem);

/// Manifest equality over the non-volatile entries.
bool same_manifest(const nlohmann::json& a, const nlohmann::json& b);

}  // namespace mkv
