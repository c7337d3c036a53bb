#pragma once

#include <string>

#include "rcs/linop.hpp"
#include "rcs/vec.hpp"

namespace rcs {

// Square grayscale image, row-major, side a power of two. Pixel values are
// nominally in [0,1]; generators and file I/O keep that range, transforms of
// reconstructed coefficients may step slightly outside until clamped.
class Image {
 public:
  Image(int side, Vec pixels);

  int side() const { return side_; }
  const Vec& pixels() const { return pixels_; }
  double at(int row, int col) const { return pixels_[static_cast<std::size_t>(row) * side_ + col]; }

  Image clamped() const;

 private:
  int side_;
  Vec pixels_;
};

// Full-depth (log2 side levels) separable orthonormal 2-D Haar transform.
Vec haar2_forward(const Image& img);
Image haar2_inverse(const Vec& coeffs);

// Same transforms on raw row-major buffers (used by the synthesis map).
Vec haar2_forward_flat(int side, const Vec& pixels);
Vec haar2_inverse_flat(int side, const Vec& coeffs);

// n x n map (n = side^2) whose apply is Haar synthesis (coefficients ->
// pixels) and whose adjoint is the forward analysis. Orthogonal.
LinearMap as_synthesis_map(int side);

// Standard 10-ellipse head phantom rasterized over [-1,1]^2, clamped to [0,1].
Image phantom_shepp_logan(int side);

// Portable graymap I/O. Reading accepts P2 (ASCII) and P5 (binary) with
// maxval 255 and square power-of-two dimensions; writing emits P5.
Image read_pgm(const std::string& path);
void write_pgm(const Image& img, const std::string& path);

double psnr_db(const Image& estimate, const Image& reference);

}  // namespace rcs
