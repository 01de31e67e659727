#pragma once

// 8-bit greyscale PGM (P2 ASCII and P5 binary) reading and writing for
// metric maps. Ground truth is foreground where the value is >= 128;
// predictions are scaled to [0, 1] by maxval.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "affplan/grid.hpp"
#include "affplan/metrics.hpp"

namespace affplan::io {

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GreyImage {
  Grid<std::uint16_t> pixels;
  unsigned maxval = 255;
};

namespace detail {

inline void skip_space_and_comments(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline unsigned read_header_number(std::istream& in, const std::string& path) {
  skip_space_and_comments(in);
  unsigned v = 0;
  if (!(in >> v)) throw ImageError(path + ": malformed PGM header");
  return v;
}

}  // namespace detail

inline GreyImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open " + path);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P2" && magic != "P5") throw ImageError(path + ": not a P2/P5 PGM file");
  const unsigned w = detail::read_header_number(in, path);
  const unsigned h = detail::read_header_number(in, path);
  const unsigned maxval = detail::read_header_number(in, path);
  if (w == 0 || h == 0) throw ImageError(path + ": empty image");
  if (maxval == 0 || maxval > 65535) throw ImageError(path + ": bad maxval");

  GreyImage img{Grid<std::uint16_t>(h, w), maxval};
  if (magic == "P5") {
    in.get();  // single whitespace after maxval
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(img.pixels.size() * bytes_per);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
      throw ImageError(path + ": truncated pixel data");
    }
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      img.pixels[i] = bytes_per == 1 ? raw[i]
                                     : static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    }
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      unsigned v = 0;
      if (!(in >> v)) throw ImageError(path + ": truncated pixel data");
      img.pixels[i] = static_cast<std::uint16_t>(v);
    }
  }
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (img.pixels[i] > maxval) throw ImageError(path + ": pixel value exceeds maxval");
  }
  return img;
}

inline void write_pgm(const std::string& path, const Grid<std::uint8_t>& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageError("cannot write " + path);
  out << "P5\n" << pixels.width() << " " << pixels.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.values().data()),
            static_cast<std::streamsize>(pixels.size()));
}

inline metrics::GroundTruthMask load_mask(const std::string& path) {
  const auto img = read_pgm(path);
  const unsigned cut = (img.maxval + 1) / 2;
  metrics::GroundTruthMask g(img.pixels.height(), img.pixels.width());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = img.pixels[i] >= cut ? 1 : 0;
  return g;
}

inline metrics::PredictionMap load_prediction(const std::string& path) {
  const auto img = read_pgm(path);
  metrics::PredictionMap d(img.pixels.height(), img.pixels.width());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<double>(img.pixels[i]) / img.maxval;
  return d;
}

}  // namespace affplan::io
