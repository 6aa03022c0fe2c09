#include <bit>
#include <cstring>
#include <fstream>

#include "wigchar/error.hpp"
#include "wigchar/martingale.hpp"

namespace wigchar {
namespace {

static_assert(std::endian::native == std::endian::little, "path dumps are written in little-endian order");

constexpr char kMagic[8] = {'W', 'I', 'G', 'P', 'A', 'T', 'H', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& file) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(ErrorKind::IOFailure, "truncated path dump '" + file + "'");
  return v;
}

}  // namespace

void write_path_dump(const std::string& file, const PathDumpHeader& header, const MatrixPath& path) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IOFailure, "cannot open '" + file + "' for writing");
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, header.n);
  put(out, header.seed);
  put(out, header.trial);
  put(out, static_cast<std::uint32_t>(header.density_id.size()));
  out.write(header.density_id.data(), static_cast<std::streamsize>(header.density_id.size()));
  put(out, static_cast<std::uint64_t>(header.schedule.size()));
  for (double t : header.schedule) put(out, t);
  put(out, static_cast<std::uint64_t>(path.checkpoints.size()));
  for (const MatrixState& s : path.checkpoints) {
    if (s.n() != header.n) throw Error(ErrorKind::DimensionMismatch, "checkpoint size differs from header N");
    put(out, s.t);
    for (Eigen::Index i = 0; i < s.h.rows(); ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) put(out, s.h(i, j));
    }
  }
  if (!out) throw Error(ErrorKind::IOFailure, "cannot write '" + file + "'");
}

PathDump read_path_dump(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOFailure, "cannot open '" + file + "'");
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw Error(ErrorKind::IOFailure, "'" + file + "' is not a path dump");
  }
  if (get<std::uint32_t>(in, file) != kVersion) throw Error(ErrorKind::IOFailure, "unsupported path dump version");
  PathDump d;
  d.header.n = get<std::uint32_t>(in, file);
  d.header.seed = get<std::uint64_t>(in, file);
  d.header.trial = get<std::uint64_t>(in, file);
  const auto id_len = get<std::uint32_t>(in, file);
  if (id_len > 4096) throw Error(ErrorKind::IOFailure, "corrupt density id in '" + file + "'");
  d.header.density_id.resize(id_len);
  in.read(d.header.density_id.data(), id_len);
  const auto steps = get<std::uint64_t>(in, file);
  if (steps > (1ull << 32)) throw Error(ErrorKind::IOFailure, "corrupt schedule length in '" + file + "'");
  d.header.schedule.resize(steps);
  for (auto& t : d.header.schedule) t = get<double>(in, file);
  const auto count = get<std::uint64_t>(in, file);
  if (count > (1ull << 32)) throw Error(ErrorKind::IOFailure, "corrupt checkpoint count in '" + file + "'");
  const auto n = static_cast<Eigen::Index>(d.header.n);
  for (std::uint64_t c = 0; c < count; ++c) {
    d.times.push_back(get<double>(in, file));
    Eigen::MatrixXd h(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) h(i, j) = h(j, i) = get<double>(in, file);
    }
    d.matrices.push_back(std::move(h));
  }
  return d;
}

}  // namespace wigchar
