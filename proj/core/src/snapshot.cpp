#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "lbmcf/errors.hpp"
#include "lbmcf/torus_fields.hpp"

namespace lbmcf {

namespace {

constexpr std::array<char, 8> kMagic{'L', 'B', 'M', 'C', 'F', 'S', 'N', 'P'};

template <class UInt>
void put_le(std::ostream& out, UInt value) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFFu);
  }
  out.write(bytes.data(), bytes.size());
}

template <class UInt>
UInt get_le(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error("snapshot truncated");
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    value |= static_cast<UInt>(bytes[i]) << (8 * i);
  }
  return value;
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ScalarField& field, double time) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open snapshot for writing: " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kSnapshotVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid().dims()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid().n()));
  put_le<std::uint32_t>(out, 0);
  put_f64(out, time);
  for (const double v : field.values()) put_f64(out, v);
  if (!out) throw Error("failed writing snapshot: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot: " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error("not a snapshot file: " + path.string());
  const auto version = get_le<std::uint32_t>(in);
  if (version != kSnapshotVersion) {
    throw Error("unsupported snapshot version " + std::to_string(version));
  }
  const auto dims = static_cast<int>(get_le<std::uint32_t>(in));
  const auto n = static_cast<int>(get_le<std::uint32_t>(in));
  (void)get_le<std::uint32_t>(in);
  Snapshot snap;
  snap.time = get_f64(in);
  const GridSpec grid(n, dims);
  std::vector<double> values(grid.size());
  for (double& v : values) v = get_f64(in);
  snap.field = ScalarField(grid, std::move(values));
  return snap;
}

}  // namespace lbmcf
