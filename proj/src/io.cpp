#include "mkv/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mkv/error.hpp"

namespace mkv {
namespace {

constexpr std::uint64_t kMagic = 0x31444C43564B4DULL;  // "MKVCLD1"

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error(ErrorCode::IoError, "truncated cloud file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_double(std::ostream& out, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(out, v);
}

double get_double(std::istream& in) {
  const std::uint64_t v = get_u64(in);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_cloud_csv(std::ostream& out, const ParticleCloud& cloud) {
  const TimeGrid& grid = cloud.grid();
  out << "particle_id";
  for (std::size_t c = 0; c < cloud.dim(); ++c) out << ",media_" << (c + 1);
  for (std::size_t k = 0; k < grid.size(); ++k) out << ",t_" << format_double(grid.node(k));
  out << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out << i;
    for (double w : cloud.media(i)) out << ',' << format_double(w);
    const PathView p = cloud.path(i);
    for (std::size_t k = 0; k < p.size(); ++k) out << ',' << format_double(p[k]);
    out << '\n';
  }
}

ParticleCloud read_cloud_csv(std::istream& in, GridPtr grid) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoError, "empty cloud csv");
  const auto header = split_csv(line);
  std::size_t dim = 0;
  while (dim + 1 < header.size() && header[dim + 1].rfind("media_", 0) == 0) ++dim;
  if (header.size() != 1 + dim + grid->size()) throw Error(ErrorCode::GridMismatch, "csv columns do not match grid");
  std::vector<double> values, media;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw Error(ErrorCode::IoError, "ragged cloud csv row");
    for (std::size_t c = 0; c < dim; ++c) media.push_back(std::stod(cells[1 + c]));
    for (std::size_t k = 0; k < grid->size(); ++k) values.push_back(std::stod(cells[1 + dim + k]));
  }
  return ParticleCloud(std::move(grid), dim, std::move(values), std::move(media));
}

void write_cloud_binary(std::ostream& out, const ParticleCloud& cloud) {
  put_u64(out, kMagic);
  put_u64(out, cloud.size());
  put_u64(out, cloud.dim());
  put_u64(out, cloud.grid().size());
  for (double w : cloud.media_data()) put_double(out, w);
  for (double v : cloud.values()) put_double(out, v);
}

ParticleCloud read_cloud_binary(std::istream& in, GridPtr grid) {
  if (get_u64(in) != kMagic) throw Error(ErrorCode::IoError, "not a cloud file");
  const std::uint64_t n = get_u64(in);
  const std::uint64_t dim = get_u64(in);
  const std::uint64_t len = get_u64(in);
  if (len != grid->size()) throw Error(ErrorCode::GridMismatch, "binary cloud does not match grid");
  std::vector<double> media(n * dim), values(n * len);
  for (auto& w : media) w = get_double(in);
  for (auto& v : values) v = get_double(in);
  return ParticleCloud(std::move(grid), dim, std::move(values), std::move(media));
}

nlohmann::json cloud_sidecar(const ParticleCloud& cloud) {
  const TimeGrid& g = cloud.grid();
  return {{"format", "mkv-cloud-1"},
          {"particles", cloud.size()},
          {"media_dim", cloud.dim()},
          {"grid", {{"tau", g.tau()}, {"T", g.horizon()}, {"dt", g.dt()}, {"nodes", g.size()}}}};
}

GridPtr grid_from_sidecar(const nlohmann::json& sidecar) {
  const auto& g = sidecar.at("grid");
  return make_time_grid(g.at("tau").get<double>(), g.at("T").get<double>(), g.at("dt").get<double>());
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Internal, "sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir_.string() + ": " + ec.message());
}

void ArtifactWriter::write_text(const std::string& name, std::string_view content, bool is_volatile) {
  std::ofstream out(dir_ / name, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir_ / name).string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  for (auto& e : entries_) {
    if (e.name == name) {
      e.is_volatile = is_volatile;
      return;
    }
  }
  entries_.push_back({name, is_volatile});
}

void ArtifactWriter::write_json(const std::string& name, const nlohmann::json& j, bool is_volatile) {
  write_text(name, j.dump(2) + "\n", is_volatile);
}

void ArtifactWriter::write_cloud(const std::string& stem, const ParticleCloud& cloud) {
  std::ostringstream csv;
  write_cloud_csv(csv, cloud);
  write_text(stem + ".csv", csv.str());
  std::ostringstream bin;
  write_cloud_binary(bin, cloud);
  write_text(stem + ".bin", bin.str());
  write_json(stem + ".json", cloud_sidecar(cloud));
}

nlohmann::json ArtifactWriter::manifest() const {
  nlohmann::json files = nlohmann::json::array();
  nlohmann::json volatile_files = nlohmann::json::array();
  for (const auto& e : entries_) {
    if (e.is_volatile) {
      volatile_files.push_back(e.name);
      continue;
    }
    const auto path = dir_ / e.name;
    files.push_back({{"path", e.name}, {"sha256", sha256_file(path)}, {"bytes", std::filesystem::file_size(path)}});
  }
  return {{"files", files}, {"volatile", volatile_files}};
}

nlohmann::json ArtifactWriter::write_manifest() {
  const auto m = manifest();
  std::ofstream out(dir_ / "manifest.json");
  if (!out) throw Error(ErrorCode::IoError, "cannot write manifest");
  out << m.dump(2) << '\n';
  return m;
}

ParticleCloud load_cloud(const std::filesystem::path& dir, const std::string& stem) {
  std::ifstream side(dir / (stem + ".json"));
  if (!side) throw Error(ErrorCode::IoError, "missing sidecar for " + stem);
  const auto sidecar = nlohmann::json::parse(side);
  std::ifstream bin(dir / (stem + ".bin"), std::ios::binary);
  if (!bin) throw Error(ErrorCode::IoError, "missing binary for " + stem);
  return read_cloud_binary(bin, grid_from_sidecar(sidecar));
}

bool same_manifest(const nlohmann::json& a, const nlohmann::json& b) { return a.at("files") == b.at("files"); }

}  // namespace mkv
