#include "rcs/wavelets.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rcs/dct.hpp"
#include "rcs/errors.hpp"
#include "rcs/signals.hpp"

namespace rcs {

namespace {
const double kInvSqrt2 = 0.70710678118654752440084436210485;
}

Image::Image(int side, Vec pixels) : side_(side), pixels_(std::move(pixels)) {
  if (!is_power_of_two(side_)) {
    throw SpecError("Image: side must be a power of two, got " + std::to_string(side_));
  }
  if (pixels_.size() != static_cast<std::size_t>(side_) * side_) {
    throw ShapeError("Image: pixel buffer must be side*side");
  }
  if (!all_finite(pixels_)) throw SpecError("Image: pixels must be finite");
}

Image Image::clamped() const {
  Vec p = pixels_;
  for (auto& v : p) v = std::min(1.0, std::max(0.0, v));
  return Image(side_, std::move(p));
}

namespace {

// One orthonormal Haar split of the leading `len` entries of a strided line:
// pairwise (a+b)/sqrt2 into the front half, (a-b)/sqrt2 into the back half.
void haar_step_line(double* data, int stride, int len, Vec& tmp) {
  const int half = len / 2;
  for (int i = 0; i < half; ++i) {
    const double a = data[(2 * i) * stride];
    const double b = data[(2 * i + 1) * stride];
    tmp[i] = (a + b) * kInvSqrt2;
    tmp[half + i] = (a - b) * kInvSqrt2;
  }
  for (int i = 0; i < len; ++i) data[i * stride] = tmp[i];
}

void haar_unstep_line(double* data, int stride, int len, Vec& tmp) {
  const int half = len / 2;
  for (int i = 0; i < half; ++i) {
    const double s = data[i * stride];
    const double d = data[(half + i) * stride];
    tmp[2 * i] = (s + d) * kInvSqrt2;
    tmp[2 * i + 1] = (s - d) * kInvSqrt2;
  }
  for (int i = 0; i < len; ++i) data[i * stride] = tmp[i];
}

}  // namespace

Vec haar2_forward_flat(int side, const Vec& pixels) {
  if (!is_power_of_two(side)) throw SpecError("haar2: side must be a power of two");
  if (pixels.size() != static_cast<std::size_t>(side) * side) {
    throw ShapeError("haar2: buffer must be side*side");
  }
  Vec buf = pixels;
  Vec tmp(side);
  for (int len = side; len > 1; len /= 2) {
    for (int r = 0; r < len; ++r) haar_step_line(buf.data() + static_cast<std::size_t>(r) * side, 1, len, tmp);
    for (int c = 0; c < len; ++c) haar_step_line(buf.data() + c, side, len, tmp);
  }
  return buf;
}

Vec haar2_inverse_flat(int side, const Vec& coeffs) {
  if (!is_power_of_two(side)) throw SpecError("haar2: side must be a power of two");
  if (coeffs.size() != static_cast<std::size_t>(side) * side) {
    throw ShapeError("haar2: buffer must be side*side");
  }
  Vec buf = coeffs;
  Vec tmp(side);
  for (int len = 2; len <= side; len *= 2) {
    for (int c = 0; c < len; ++c) haar_unstep_line(buf.data() + c, side, len, tmp);
    for (int r = 0; r < len; ++r) haar_unstep_line(buf.data() + static_cast<std::size_t>(r) * side, 1, len, tmp);
  }
  return buf;
}

Vec haar2_forward(const Image& img) { return haar2_forward_flat(img.side(), img.pixels()); }

Image haar2_inverse(const Vec& coeffs) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(coeffs.size()))));
  if (static_cast<std::size_t>(side) * side != coeffs.size() || !is_power_of_two(side)) {
    throw SpecError("haar2_inverse: coefficient length must be a power-of-two square");
  }
  return Image(side, haar2_inverse_flat(side, coeffs));
}

LinearMap as_synthesis_map(int side) {
  if (!is_power_of_two(side)) throw SpecError("as_synthesis_map: side must be a power of two");
  const int n = side * side;
  return LinearMap::custom(
      n, n, [side](const Vec& coeffs) { return haar2_inverse_flat(side, coeffs); },
      [side](const Vec& pixels) { return haar2_forward_flat(side, pixels); }, "haar-synthesis");
}

namespace {

struct Ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

// Modified (high-contrast) head phantom from the tomography literature.
constexpr Ellipse kSheppLogan[10] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
};

}  // namespace

Image phantom_shepp_logan(int side) {
  if (side < 16) throw SpecError("phantom: side must be >= 16");
  if (!is_power_of_two(side)) throw SpecError("phantom: side must be a power of two");
  Vec px(static_cast<std::size_t>(side) * side, 0.0);
  const double step = 2.0 / side;
  for (int i = 0; i < side; ++i) {
    const double y = 1.0 - (i + 0.5) * step;  // row 0 at the top
    for (int j = 0; j < side; ++j) {
      const double x = -1.0 + (j + 0.5) * step;
      double v = 0.0;
      for (const Ellipse& e : kSheppLogan) {
        const double phi = e.phi_deg * 3.14159265358979323846 / 180.0;
        const double c = std::cos(phi), s = std::sin(phi);
        const double dx = x - e.x0, dy = y - e.y0;
        const double u = dx * c + dy * s;
        const double w = -dx * s + dy * c;
        if ((u * u) / (e.a * e.a) + (w * w) / (e.b * e.b) <= 1.0) v += e.intensity;
      }
      px[static_cast<std::size_t>(i) * side + j] = std::min(1.0, std::max(0.0, v));
    }
  }
  return Image(side, std::move(px));
}

namespace {

// Reads the next PGM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in, long& offset) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    ++offset;
    if (c == '#') {
      while ((c = in.get()) != EOF) {
        ++offset;
        if (c == '\n') break;
      }
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      break;
    }
  }
  if (tok.empty()) throw ParseError("pgm: unexpected end of header", offset);
  while ((c = in.get()) != EOF) {
    ++offset;
    if (std::isspace(c)) break;
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int parse_int(const std::string& tok, long offset, const char* what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("pgm: bad ") + what + " '" + tok + "'", offset);
  }
}

}  // namespace

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("pgm: cannot open '" + path + "'", 0);
  long offset = 0;

  const std::string magic = next_token(in, offset);
  if (magic != "P2" && magic != "P5") {
    throw ParseError("pgm: magic must be P2 or P5, got '" + magic + "'", offset);
  }
  const int width = parse_int(next_token(in, offset), offset, "width");
  const int height = parse_int(next_token(in, offset), offset, "height");
  const int maxval = parse_int(next_token(in, offset), offset, "maxval");
  if (width != height) throw ParseError("pgm: image must be square", offset);
  if (!is_power_of_two(width)) throw ParseError("pgm: side must be a power of two", offset);
  if (maxval != 255) throw ParseError("pgm: maxval must be 255", offset);

  const std::size_t count = static_cast<std::size_t>(width) * height;
  Vec px(count);
  if (magic == "P5") {
    std::string raw(count, '\0');
    in.read(raw.data(), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) {
      throw ParseError("pgm: truncated pixel data", offset + in.gcount());
    }
    for (std::size_t i = 0; i < count; ++i) {
      px[i] = static_cast<unsigned char>(raw[i]) / 255.0;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const std::string tok = next_token(in, offset);
      const int v = parse_int(tok, offset, "pixel");
      if (v < 0 || v > 255) throw ParseError("pgm: pixel out of range", offset);
      px[i] = v / 255.0;
    }
  }
  return Image(width, std::move(px));
}

void write_pgm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("pgm: cannot open '" + path + "' for writing", 0);
  out << "P5\n" << img.side() << " " << img.side() << "\n255\n";
  const Vec& px = img.pixels();
  std::string raw(px.size(), '\0');
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double v = std::min(1.0, std::max(0.0, px[i]));
    raw[i] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) throw ParseError("pgm: write failed for '" + path + "'", 0);
}

double psnr_db(const Image& estimate, const Image& reference) {
  if (estimate.side() != reference.side()) throw ShapeError("psnr_db: image sizes differ");
  return psnr_db(estimate.pixels(), reference.pixels());
}

}  // namespace rcs
