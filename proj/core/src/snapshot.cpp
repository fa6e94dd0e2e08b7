#include "tdho/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace tdho {

namespace {

constexpr char magic[4] = {'T', 'D', 'H', 'O'};
constexpr std::uint32_t format_version = 1;

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(bytes[sizeof(T) - 1 - i]);
  } else {
    out.insert(out.end(), bytes, bytes + sizeof(T));
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  unsigned char bytes[sizeof(T)];
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = p[sizeof(T) - 1 - i];
  } else {
    std::memcpy(bytes, p, sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_snapshot(const std::string& path, const WaveFunction& psi) {
  std::vector<unsigned char> buf;
  buf.reserve(28 + 16 * psi.amp.size());
  buf.insert(buf.end(), magic, magic + 4);
  put_le<std::uint32_t>(buf, format_version);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(psi.grid.dim));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(psi.grid.n));
  put_le<double>(buf, psi.grid.half_width);
  put_le<double>(buf, psi.time_tag);
  for (const cdouble& a : psi.amp) {
    put_le<double>(buf, a.real());
    put_le<double>(buf, a.imag());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open snapshot for writing: " + path);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("short write on snapshot: " + path);
}

WaveFunction read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot: " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 32) throw IoError("snapshot truncated: " + path);
  if (std::memcmp(buf.data(), magic, 4) != 0)
    throw IoError("snapshot magic mismatch: " + path);
  const auto version = get_le<std::uint32_t>(buf.data() + 4);
  if (version != format_version) throw IoError("unsupported snapshot version");
  const auto dim = static_cast<int>(get_le<std::uint32_t>(buf.data() + 8));
  const auto n = static_cast<int>(get_le<std::uint32_t>(buf.data() + 12));
  const double half_width = get_le<double>(buf.data() + 16);
  const double time_tag = get_le<double>(buf.data() + 24);

  Grid g = Grid::make(dim, n, half_width);
  const std::size_t expected = 32 + 16 * g.size();
  if (buf.size() != expected) throw IoError("snapshot payload size mismatch: " + path);

  WaveFunction psi = WaveFunction::zero(g);
  psi.time_tag = time_tag;
  const unsigned char* p = buf.data() + 32;
  for (std::size_t i = 0; i < psi.amp.size(); ++i, p += 16)
    psi.amp[i] = cdouble{get_le<double>(p), get_le<double>(p + 8)};
  return psi;
}

}  // namespace tdho
