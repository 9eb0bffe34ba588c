#pragma once
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lab/field.hpp"

namespace lab {

// Binary snapshot, format SVF1:
//   bytes 0..3   magic "SVF1"
//   bytes 4..7   u32 little-endian grid n
//   bytes 8..11  u32 little-endian flags (bit 0: a magnetic field follows the
//                velocity field)
// then per field, the kept band |k_i| <= n/2-1 in lexicographic k order
// (k0 outer, k2 inner, each axis -band..band), one (re, im) float64
// little-endian pair per component, components 0,1,2 per mode.
void write_svf(const std::filesystem::path& path, const SpectralField& u,
               const SpectralField* b = nullptr);
std::string svf_bytes(const SpectralField& u, const SpectralField* b = nullptr);

struct SvfSnapshot {
  SpectralField u;
  std::optional<SpectralField> b;
};
SvfSnapshot read_svf(const std::filesystem::path& path);

// Whole-file text helpers.  Reading a missing path is a missing_artifact
// error; writing refuses to overwrite (the experiment store is append-only).
std::string read_text(const std::filesystem::path& path);
void write_text_create_new(const std::filesystem::path& path, const std::string& body);

std::uint32_t crc32_of(const std::string& bytes);
std::uint32_t crc32_of_file(const std::filesystem::path& path);
std::string crc32_hex(std::uint32_t crc);

}  // namespace lab
