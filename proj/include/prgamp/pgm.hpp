#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace prgamp {

// 8-bit grayscale raster, row-major.
struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

// Binary (P5) PGM with maxval <= 255.  Comments and arbitrary header
// whitespace are accepted on read; writes are canonical ("P5\n<w> <h>\n255\n"
// followed by the raster), so a write/read round trip is bit-exact.
PgmImage pgm_read(const std::string& path);
void pgm_write(const std::string& path, const PgmImage& image);

}  // namespace prgamp
