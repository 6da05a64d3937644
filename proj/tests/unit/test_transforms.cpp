#include <algorithm>
#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "mimicmark/transforms.hpp"

using namespace mimicmark;
using namespace testutil;

namespace {

// Textbook orthonormal DCT-II, straight from the definition.
std::vector<double> dct_oracle(const std::vector<double>& x, int n) {
  std::vector<double> out(x.size());
  auto c = [n](int k) { return k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n); };
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) {
      double acc = 0.0;
      for (int yy = 0; yy < n; ++yy)
        for (int xx = 0; xx < n; ++xx)
          acc += x[yy * n + xx] * std::cos((2 * xx + 1) * u * std::numbers::pi / (2 * n)) *
                 std::cos((2 * yy + 1) * v * std::numbers::pi / (2 * n));
      out[v * n + u] = c(u) * c(v) * acc;
    }
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double energy(const PlanarF64& p) {
  double e = 0.0;
  for (double v : p.data) e += v * v;
  return e;
}

}  // namespace

TEST_CASE("haar on a single 2x2 block") {
  PlanarF64 p(2, 2);
  p.data = {1.0, 3.0, 5.0, 11.0};  // a b / c d
  const Subbands s = dwt2_haar(p);
  CHECK(s.ll.data[0] == doctest::Approx(10.0));
  CHECK(s.hl.data[0] == doctest::Approx(0.5 * ((1 - 3) + (5 - 11))));  // horizontal detail
  CHECK(s.lh.data[0] == doctest::Approx(0.5 * ((1 + 3) - (5 + 11))));   // vertical detail
  CHECK(s.hh.data[0] == doctest::Approx(0.5 * ((1 - 3) - (5 - 11))));
}

TEST_CASE("haar of a constant plane is pure LL") {
  const PlanarF64 p(12, 10, 7.5);
  const Subbands s = dwt2_haar(p);
  for (std::size_t i = 0; i < s.ll.size(); ++i) {
    CHECK(s.ll.data[i] == doctest::Approx(15.0));
    CHECK(s.lh.data[i] == doctest::Approx(0.0));
    CHECK(s.hl.data[i] == doctest::Approx(0.0));
    CHECK(s.hh.data[i] == doctest::Approx(0.0));
  }
}

TEST_CASE("haar of a horizontal step edge shows up in HL only") {
  PlanarF64 p(16, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 16; ++x) p.at(x, y) = x < 7 ? 0.0 : 100.0;  // step inside the pair (6, 7)
  const Subbands s = dwt2_haar(p);
  double hl_energy = 0.0;
  for (std::size_t i = 0; i < s.lh.size(); ++i) {
    CHECK(s.lh.data[i] == doctest::Approx(0.0));
    hl_energy += s.hl.data[i] * s.hl.data[i];
  }
  CHECK(hl_energy > 1.0);
}

TEST_CASE("haar of a horizontal ramp has no vertical detail") {
  PlanarF64 p(16, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 16; ++x) p.at(x, y) = 3.0 * x;
  const Subbands s = dwt2_haar(p);
  for (std::size_t i = 0; i < s.lh.size(); ++i) {
    CHECK(s.lh.data[i] == doctest::Approx(0.0));
    CHECK(s.hh.data[i] == doctest::Approx(0.0));
    CHECK(s.hl.data[i] == doctest::Approx(-3.0));
  }
}

TEST_CASE("haar properties over random planes") {
  for (auto [w, h] : {std::pair{2, 2}, std::pair{64, 48}, std::pair{33, 20}, std::pair{20, 31}, std::pair{17, 9}}) {
    CAPTURE(w);
    CAPTURE(h);
    const PlanarF64 p = noise_plane(w, h, static_cast<std::uint64_t>(w * 100 + h));
    const Subbands s = dwt2_haar(p);
    const PlanarF64 back = idwt2_haar(s);
    REQUIRE(back.same_shape(p));
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(back.data[i] - p.data[i]));
    CHECK(worst < 1e-9);

    // Orthonormal: energy of the even region equals subband energy.
    double even = 0.0;
    for (int y = 0; y < h / 2 * 2; ++y)
      for (int x = 0; x < w / 2 * 2; ++x) even += p.at(x, y) * p.at(x, y);
    CHECK(energy(s.ll) + energy(s.lh) + energy(s.hl) + energy(s.hh) == doctest::Approx(even).epsilon(1e-12));

    const Subbands r = reference::dwt2_haar(p);
    CHECK(max_abs_diff(r.ll.data, s.ll.data) < 1e-10);
    CHECK(max_abs_diff(r.hl.data, s.hl.data) < 1e-10);
    CHECK(max_abs_diff(r.lh.data, s.lh.data) < 1e-10);
    CHECK(max_abs_diff(r.hh.data, s.hh.data) < 1e-10);
    CHECK(max_abs_diff(reference::idwt2_haar(s).data, back.data) < 1e-10);
  }
  CHECK_THROWS_CODE(dwt2_haar(PlanarF64(1, 5)), Errc::EmptyPlane);
}

TEST_CASE("block dct matches the textbook definition") {
  for (int n : {4, 8}) {
    Rng rng(static_cast<std::uint64_t>(n));
    std::vector<double> tile(static_cast<std::size_t>(n * n));
    for (double& v : tile) v = rng.uniform(-50.0, 200.0);
    const std::vector<double> got = dct2_block(tile, n), want = dct_oracle(tile, n);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    const std::vector<double> back = idct2_block(got, n);
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == doctest::Approx(tile[i]).epsilon(1e-12));
  }
  std::vector<double> flat(16, 10.0);
  CHECK(dct2_block(flat, 4)[0] == doctest::Approx(40.0));  // DC = n * mean
}

TEST_CASE("dct of a constant 8x8 tile is DC only, with Parseval") {
  const std::vector<double> flat(64, 9.0);
  const std::vector<double> c = dct2_block(flat, 8);
  CHECK(c[0] == doctest::Approx(72.0));
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(0.0).scale(1.0));
  Rng rng(99);
  std::vector<double> tile(64);
  for (double& v : tile) v = rng.uniform(0.0, 255.0);
  const std::vector<double> t = dct2_block(tile, 8);
  double e_in = 0.0, e_out = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    e_in += tile[i] * tile[i];
    e_out += t[i] * t[i];
  }
  CHECK(std::abs(e_in - e_out) < 1e-9 * e_in);
}

TEST_CASE("block dct grid covers the divisible region and matches the serial version") {
  const PlanarF64 p = noise_plane(37, 21, 8);
  for (int n : {4, 8}) {
    const BlockGrid g = forward_block_dct(p, n);
    CHECK(g.cols == 37 / n);
    CHECK(g.rows == 21 / n);
    CHECK(g.block_count() == block_capacity(37, 21, n));
    CHECK(max_abs_diff(reference::forward_block_dct(p, n).coeffs, g.coeffs) < 1e-10);
    PlanarF64 back(37, 21, -1.0), back_ref(37, 21, -1.0);
    inverse_block_dct(g, back);
    reference::inverse_block_dct(g, back_ref);
    CHECK(max_abs_diff(back.data, back_ref.data) < 1e-10);
    for (int y = 0; y < 21; ++y)
      for (int x = 0; x < 37; ++x) {
        if (x < g.cols * n && y < g.rows * n) CHECK(back.at(x, y) == doctest::Approx(p.at(x, y)).epsilon(1e-12));
        else CHECK(back.at(x, y) == -1.0);  // untouched outside the grid
      }
  }
  CHECK_THROWS_CODE(forward_block_dct(p, 5), Errc::BadBlockSize);
}

TEST_CASE("svd of a known 2x2 matrix") {
  // A^T A = [[25, 20], [20, 25]] has eigenvalues 45 and 5.
  const SvdResult r = svd_block(std::vector<double>{3.0, 0.0, 4.0, 5.0});
  CHECK(r.s[0] == doctest::Approx(3.0 * std::sqrt(5.0)));
  CHECK(r.s[1] == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("svd of diagonal and identity tiles") {
  std::vector<double> d(16, 0.0);
  d[0] = 3.0;
  d[5] = 1.0;
  const SvdResult r = svd_block(d);
  CHECK(r.s[0] == doctest::Approx(3.0));
  CHECK(r.s[1] == doctest::Approx(1.0));
  CHECK(r.s[2] == doctest::Approx(0.0));
  CHECK(r.s[3] == doctest::Approx(0.0));
  std::vector<double> eye(64, 0.0);
  for (int i = 0; i < 8; ++i) eye[static_cast<std::size_t>(i * 9)] = 1.0;
  for (double v : svd_block(eye).s) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("svd properties on random tiles") {
  for (int n : {4, 8}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Rng rng(seed * 31 + n);
      std::vector<double> tile(static_cast<std::size_t>(n * n));
      for (double& v : tile) v = rng.uniform(-100.0, 100.0);
      if (seed == 20) std::fill(tile.begin() + n, tile.end(), 0.0);  // rank one
      const SvdResult r = svd_block(tile);
      const std::vector<double> back = r.reconstruct();
      double frob = 0.0, ssum = 0.0;
      for (std::size_t i = 0; i < tile.size(); ++i) {
        CHECK(back[i] == doctest::Approx(tile[i]).epsilon(1e-9).scale(100.0));
        frob += tile[i] * tile[i];
      }
      for (int i = 0; i < n; ++i) {
        ssum += r.s[i] * r.s[i];
        CHECK(r.s[i] >= 0.0);
        if (i) CHECK(r.s[i] <= r.s[i - 1]);
      }
      CHECK(ssum == doctest::Approx(frob).epsilon(1e-10));
      // U columns orthonormal.
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (r.s[a] < 1e-9 || r.s[b] < 1e-9) continue;
          double dot = 0.0;
          for (int k = 0; k < n; ++k) dot += r.u[k * n + a] * r.u[k * n + b];
          CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0));
        }
      // Deterministic.
      CHECK(svd_block(tile).s == r.s);
    }
  }
}
