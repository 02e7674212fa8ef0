#pragma once

// Portable graymap I/O: reads P2 and P5 (8 and 16 bit), writes P5.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stimspdc::app {

struct GrayImage
{
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels; ///< row-major, scaled to [0, 1]

  double at(std::size_t col, std::size_t row) const { return pixels[row * width + col]; }
};

namespace detail {

inline std::string pgm_token(std::istream& in)
{
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
      if (!tok.empty())
        break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty())
        break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

inline std::size_t pgm_number(std::istream& in, const std::string& path)
{
  const std::string t = pgm_token(in);
  try {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(t, &pos);
    if (pos != t.size())
      throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("pgm: malformed header in '" + path + "'");
  }
}

} // namespace detail

inline GrayImage read_pgm(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("pgm: cannot open '" + path + "'");
  const std::string magic = detail::pgm_token(in);
  if (magic != "P2" && magic != "P5")
    throw std::runtime_error("pgm: '" + path + "' is not a P2/P5 graymap");
  GrayImage img;
  img.width = detail::pgm_number(in, path);
  img.height = detail::pgm_number(in, path);
  const std::size_t maxval = detail::pgm_number(in, path);
  if (img.width == 0 || img.height == 0 || maxval == 0 || maxval > 65535)
    throw std::runtime_error("pgm: bad dimensions or maxval in '" + path + "'");
  const std::size_t n = img.width * img.height;
  img.pixels.resize(n);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i)
      img.pixels[i] = static_cast<double>(detail::pgm_number(in, path)) * scale;
    return img;
  }
  const std::size_t bytes = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(n * bytes);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw std::runtime_error("pgm: truncated pixel data in '" + path + "'");
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned v = bytes == 1 ? raw[i] : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
    img.pixels[i] = static_cast<double>(v) * scale;
  }
  return img;
}

/// Writes an 8-bit P5 image, mapping [0, 1] linearly to [0, 255].
inline void write_pgm(const std::string& path, std::size_t width, std::size_t height, std::span<const double> values)
{
  if (values.size() != width * height)
    throw std::invalid_argument("write_pgm: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("pgm: cannot write '" + path + "'");
  out << "P5\n" << width << " " << height << "\n255\n";
  std::vector<unsigned char> raw(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::clamp(values[i], 0.0, 1.0);
    raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out)
    throw std::runtime_error("pgm: write failed for '" + path + "'");
}

} // namespace stimspdc::app
