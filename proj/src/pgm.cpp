#include "prgamp/pgm.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace prgamp {

namespace {

// next header token, skipping whitespace and '#' comments that run to end of line
std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') in.unget();
  return tok;
}

std::size_t parse_dim(const std::string& tok, const char* what) {
  if (tok.empty()) throw std::runtime_error(std::string("pgm: missing ") + what);
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("pgm: malformed ") + what + " '" + tok + "'");
  }
  if (pos != tok.size() || v == 0)
    throw std::runtime_error(std::string("pgm: malformed ") + what + " '" + tok + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

PgmImage pgm_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open '" + path + "' for reading");
  if (next_token(in) != "P5")
    throw std::runtime_error("pgm: '" + path + "' is not a binary (P5) grayscale file");
  PgmImage img;
  img.width = parse_dim(next_token(in), "width");
  img.height = parse_dim(next_token(in), "height");
  const std::size_t maxval = parse_dim(next_token(in), "maxval");
  if (maxval > 255)
    throw std::runtime_error("pgm: only 8-bit rasters are supported (maxval <= 255)");
  // exactly one whitespace byte separates the header from the raster
  img.pixels.resize(img.width * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixels.size())
    throw std::runtime_error("pgm: '" + path + "' raster is truncated");
  return img;
}

void pgm_write(const std::string& path, const PgmImage& image) {
  if (image.width == 0 || image.height == 0)
    throw std::invalid_argument("pgm: image dimensions must be positive");
  if (image.pixels.size() != image.width * image.height)
    throw std::invalid_argument("pgm: pixel buffer does not match dimensions");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot open '" + path + "' for writing");
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw std::runtime_error("pgm: write to '" + path + "' failed");
}

}  // namespace prgamp
