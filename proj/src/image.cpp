#include "tsopt/image.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

namespace tsopt {

namespace {

// Skips PNM whitespace and '#' comment lines, then parses one unsigned int.
std::size_t read_pnm_int(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  require(c != EOF, ErrorKind::io_error, "truncated header in " + path);
  std::size_t value = 0;
  bool any = false;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + std::size_t(c - '0');
    any = true;
    c = in.get();
  }
  require(any, ErrorKind::io_error, "malformed header in " + path);
  return value;
}

}  // namespace

Image read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::io_error, "cannot open " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  require(in.gcount() == 2 && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6'),
          ErrorKind::io_error, "not a binary PGM/PPM file: " + path);
  const std::size_t channels = magic[1] == '5' ? 1 : 3;
  const std::size_t width = read_pnm_int(in, path);
  const std::size_t height = read_pnm_int(in, path);
  const std::size_t maxval = read_pnm_int(in, path);
  require(maxval == 255, ErrorKind::io_error, "only 8-bit PNM supported: " + path);
  // The single whitespace byte after maxval was already consumed by the
  // integer reader's terminating character.
  Image img(height, width, channels);
  std::vector<std::uint8_t> raw(height * width * channels);
  in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
  require(in.gcount() == std::streamsize(raw.size()), ErrorKind::io_error,
          "truncated pixel data in " + path);
  for (std::size_t i = 0; i < raw.size(); ++i) img.px[i] = double(raw[i]);
  return img;
}

void write_pnm(const Image& img, const std::string& path) {
  require(img.channels == 1 || img.channels == 3, ErrorKind::invalid_argument,
          "PNM supports 1 or 3 channels");
  require(img.height > 0 && img.width > 0, ErrorKind::invalid_argument,
          "empty image");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::io_error, "cannot write " + path);
  out << (img.channels == 1 ? "P5" : "P6") << "\n"
      << img.width << " " << img.height << "\n255\n";
  std::vector<std::uint8_t> raw(img.px.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double v = std::floor(img.px[i] + 0.5);
    if (v < 0.0) v = 0.0;
    if (v > 255.0) v = 255.0;
    raw[i] = std::uint8_t(v);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), std::streamsize(raw.size()));
  require(out.good(), ErrorKind::io_error, "short write to " + path);
}

}  // namespace tsopt
