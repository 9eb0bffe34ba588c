#include "lab/io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lab/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot i/o assumes a little-endian host");

namespace lab {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  char raw[4];
  std::memcpy(raw, &v, 4);
  out.append(raw, 4);
}

void put_field(std::string& out, const SpectralField& f) {
  const int b = f.grid.band_limit();
  char raw[16];
  for (int k0 = -b; k0 <= b; ++k0)
    for (int k1 = -b; k1 <= b; ++k1)
      for (int k2 = -b; k2 <= b; ++k2) {
        const V3c v = f.at({k0, k1, k2});
        for (int c = 0; c < 3; ++c) {
          const double re = v[c].real(), im = v[c].imag();
          std::memcpy(raw, &re, 8);
          std::memcpy(raw + 8, &im, 8);
          out.append(raw, 16);
        }
      }
}

SpectralField get_field(const std::string& in, std::size_t& pos, int n) {
  SpectralField f{GridSpec(n)};
  const int b = f.grid.band_limit();
  const std::size_t need = (std::size_t)(2 * b + 1) * (2 * b + 1) * (2 * b + 1) * 48;
  if (in.size() - pos < need) fail(Err::io_failure, "snapshot truncated mid-field");
  for (int k0 = -b; k0 <= b; ++k0)
    for (int k1 = -b; k1 <= b; ++k1)
      for (int k2 = -b; k2 <= b; ++k2) {
        V3c v;
        for (int c = 0; c < 3; ++c) {
          double re, im;
          std::memcpy(&re, in.data() + pos, 8);
          std::memcpy(&im, in.data() + pos + 8, 8);
          pos += 16;
          v[c] = cplx{re, im};
        }
        f.set({k0, k1, k2}, v);
      }
  return f;
}

}  // namespace

std::string svf_bytes(const SpectralField& u, const SpectralField* b) {
  if (b && b->grid.n != u.grid.n)
    fail(Err::shape_mismatch, "snapshot fields live on different grids");
  std::string out;
  out.reserve(12 + (b ? 2u : 1u) * u.grid.size() * 48);
  out += "SVF1";
  put_u32(out, (std::uint32_t)u.grid.n);
  put_u32(out, b ? 1u : 0u);
  put_field(out, u);
  if (b) put_field(out, *b);
  return out;
}

void write_svf(const std::filesystem::path& path, const SpectralField& u,
               const SpectralField* b) {
  write_text_create_new(path, svf_bytes(u, b));
}

SvfSnapshot read_svf(const std::filesystem::path& path) {
  const std::string in = read_text(path);
  if (in.size() < 12 || in.compare(0, 4, "SVF1") != 0)
    fail(Err::io_failure, "not an SVF1 snapshot: " + path.string());
  std::uint32_t n = 0, flags = 0;
  std::memcpy(&n, in.data() + 4, 4);
  std::memcpy(&flags, in.data() + 8, 4);
  if (n < 4 || n % 2 != 0 || n > 4096)
    fail(Err::io_failure, "snapshot header carries an unusable grid size");
  std::size_t pos = 12;
  SvfSnapshot snap{get_field(in, pos, (int)n), std::nullopt};
  if (flags & 1u) snap.b = get_field(in, pos, (int)n);
  if (pos != in.size()) fail(Err::io_failure, "snapshot has trailing bytes");
  return snap;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::missing_artifact, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(Err::io_failure, "read failed for " + path.string());
  return ss.str();
}

void write_text_create_new(const std::filesystem::path& path, const std::string& body) {
  std::error_code ec;
  if (std::filesystem::exists(path, ec))
    fail(Err::io_failure, "refusing to overwrite " + path.string());
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::io_failure, "cannot create " + path.string());
  out.write(body.data(), (std::streamsize)body.size());
  out.flush();
  if (!out) fail(Err::io_failure, "write failed for " + path.string());
}

std::uint32_t crc32_of(const std::string& bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  return (std::uint32_t)crc32(crc, (const Bytef*)bytes.data(), (uInt)bytes.size());
}

std::uint32_t crc32_of_file(const std::filesystem::path& path) {
  return crc32_of(read_text(path));
}

std::string crc32_hex(std::uint32_t crc) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", crc);
  return std::string(buf);
}

}  // namespace lab
