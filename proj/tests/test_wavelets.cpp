#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rcs/rng.hpp"
#include "rcs/wavelets.hpp"

using namespace rcs;

namespace {

Image random_image(int side, std::uint64_t seed) {
  Rng rng(seed);
  Vec px(static_cast<std::size_t>(side) * side);
  for (auto& v : px) v = rng.uniform01();
  return Image(side, std::move(px));
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("constant image concentrates in the approximation coefficient") {
  const Image img(4, Vec(16, 1.0));
  const Vec c = haar2_forward(img);
  CHECK(c[0] == doctest::Approx(4.0).epsilon(1e-12));
  for (std::size_t i = 1; i < c.size(); ++i) REQUIRE(std::fabs(c[i]) < 1e-12);
}

TEST_CASE("parseval and perfect reconstruction across sides") {
  for (int side : {4, 8, 32, 256}) {
    const Image img = random_image(side, 100 + side);
    const Vec c = haar2_forward(img);
    REQUIRE(nrm2(c) == doctest::Approx(nrm2(img.pixels())).epsilon(1e-12));
    const Image back = haar2_inverse(c);
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      worst = std::max(worst, std::fabs(back.pixels()[i] - img.pixels()[i]));
    }
    REQUIRE(worst < 1e-12);
  }
}

TEST_CASE("synthesis map is orthogonal") {
  const auto psi = as_synthesis_map(8);
  CHECK(psi.rows() == 64);
  CHECK(psi.cols() == 64);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Vec t1(64), t2(64);
    for (auto& v : t1) v = rng.normal();
    for (auto& v : t2) v = rng.normal();
    const Vec s1 = psi.apply(t1), s2 = psi.apply(t2);
    REQUIRE(nrm2(s1) == doctest::Approx(nrm2(t1)).epsilon(1e-12));
    REQUIRE(dot(s1, s2) == doctest::Approx(dot(t1, t2)).epsilon(1e-11));
    const Vec rt = psi.adjoint_apply(s1);
    REQUIRE(dist2(rt, t1) < 1e-12 * (1.0 + nrm2(t1)));
  }

  SUBCASE("small dense psi has orthonormal columns") {
    const auto m = as_synthesis_map(4);
    std::vector<Vec> cols(16);
    for (int j = 0; j < 16; ++j) {
      Vec e(16, 0.0);
      e[j] = 1.0;
      cols[j] = m.apply(e);
    }
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) {
        REQUIRE(dot(cols[i], cols[j]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
      }
    }
  }

  SUBCASE("composition with a partial dct has unit gram spectrum") {
    const auto A = LinearMap::compose(LinearMap::partial_dct(256, 102, 4), as_synthesis_map(16));
    CHECK(A.rows() == 102);
    CHECK(A.cols() == 256);
    const auto est = max_eig_gram(A, 1e-10, 500, 1);
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("shepp-logan phantom") {
  const Image img = phantom_shepp_logan(256);

  SUBCASE("background corners are zero, values in range") {
    CHECK(img.at(0, 0) == 0.0);
    CHECK(img.at(255, 255) == 0.0);
    double lo = 1.0, hi = 0.0;
    for (double v : img.pixels()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
    CHECK(hi > 0.5);
  }

  SUBCASE("haar coefficients are a few percent nonzero") {
    // strictly nonzero coefficients sit on the ellipse boundaries only; the
    // count is a rasterization-dependent few percent of n, and the top 3.2%
    // largest coefficients carry essentially all of the energy
    const Vec c = haar2_forward(img);
    int big = 0;
    for (double v : c)
      if (std::fabs(v) > 1e-6) ++big;
    const double frac = static_cast<double>(big) / static_cast<double>(c.size());
    CHECK(frac > 0.02);
    CHECK(frac < 0.08);

    Vec energy(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) energy[i] = c[i] * c[i];
    std::sort(energy.begin(), energy.end(), std::greater<double>());
    double total = 0.0, top = 0.0;
    for (double e : energy) total += e;
    const std::size_t k = static_cast<std::size_t>(0.032 * energy.size());
    for (std::size_t i = 0; i < k; ++i) top += energy[i];
    CHECK(top / total > 0.99);
  }

  SUBCASE("mirror symmetry is exact outside the tilted ellipses' span") {
    // every off-axis or tilted ellipse of the table lies within |x| < 0.45;
    // columns beyond that see only the axis-symmetric components, whose
    // rasterization mirrors bit-exactly on the centered pixel grid
    const int side = img.side();
    const double step = 2.0 / side;
    for (int i = 0; i < side; ++i) {
      for (int j = 0; j < side / 2; ++j) {
        const double x = -1.0 + (j + 0.5) * step;
        if (x > -0.45) break;
        REQUIRE(img.at(i, j) == img.at(i, side - 1 - j));
      }
    }
  }

  CHECK_THROWS_AS(phantom_shepp_logan(8), SpecError);
  CHECK_THROWS_AS(phantom_shepp_logan(100), SpecError);
}

TEST_CASE("pgm round trip and encodings") {
  const Image img = random_image(16, 77);
  const auto path = temp_file("rcs_test_roundtrip.pgm");
  write_pgm(img, path.string());
  const Image back = read_pgm(path.string());
  REQUIRE(back.side() == 16);
  double worst = 0.0;
  for (std::size_t i = 0; i < back.pixels().size(); ++i) {
    worst = std::max(worst, std::fabs(back.pixels()[i] - img.pixels()[i]));
  }
  CHECK(worst <= 1.0 / 510.0 + 1e-12);  // half a quantization level

  SUBCASE("p2 and p5 encodings of the same image agree") {
    const auto p2path = temp_file("rcs_test_ascii.pgm");
    std::ofstream out(p2path);
    out << "P2\n# ascii twin\n16 16\n255\n";
    for (double v : back.pixels()) out << static_cast<int>(std::lround(v * 255.0)) << "\n";
    out.close();
    const Image ascii = read_pgm(p2path.string());
    REQUIRE(ascii.pixels() == back.pixels());
    std::filesystem::remove(p2path);
  }

  SUBCASE("truncated file is a parse error, not a crash") {
    const auto trunc = temp_file("rcs_test_trunc.pgm");
    std::ofstream out(trunc, std::ios::binary);
    out << "P5\n16 16\n255\n";
    out.write("abc", 3);
    out.close();
    CHECK_THROWS_AS(read_pgm(trunc.string()), ParseError);
    std::filesystem::remove(trunc);
  }

  SUBCASE("bad magic and non-square dimensions rejected") {
    const auto bad = temp_file("rcs_test_bad.pgm");
    std::ofstream(bad) << "P6\n16 16\n255\n";
    CHECK_THROWS_AS(read_pgm(bad.string()), ParseError);
    std::ofstream(bad) << "P2\n16 8\n255\n";
    CHECK_THROWS_AS(read_pgm(bad.string()), ParseError);
    std::ofstream(bad) << "P2\n12 12\n255\n";
    CHECK_THROWS_AS(read_pgm(bad.string()), ParseError);
    std::filesystem::remove(bad);
  }

  std::filesystem::remove(path);
}

TEST_CASE("image validation") {
  CHECK_THROWS_AS(Image(3, Vec(9, 0.0)), SpecError);
  CHECK_THROWS_AS(Image(4, Vec(15, 0.0)), ShapeError);
  Vec nan_px(16, 0.0);
  nan_px[3] = std::nan("");
  CHECK_THROWS_AS(Image(4, std::move(nan_px)), SpecError);
}
