#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "mimicmark/error.hpp"
#include "mimicmark/transforms.hpp"

namespace mimicmark {
namespace {

template <int N>
std::array<double, N * N> make_basis() {
  std::array<double, N * N> c{};
  for (int k = 0; k < N; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / N);
    for (int n = 0; n < N; ++n) c[k * N + n] = scale * std::cos(std::numbers::pi * (2 * n + 1) * k / (2.0 * N));
  }
  return c;
}

const double* basis(int n) {
  static const auto b4 = make_basis<4>();
  static const auto b8 = make_basis<8>();
  return n == 4 ? b4.data() : b8.data();
}

void check_block(std::size_t len, int n) {
  if (!supported_block_size(n)) throw Error(Errc::BadBlockSize, "block size must be 4 or 8, got " + std::to_string(n));
  if (len != static_cast<std::size_t>(n) * n)
    throw Error(Errc::BadBlockSize, "tile has " + std::to_string(len) + " samples, expected " + std::to_string(n * n));
}

// out = C * x * C^T (forward) or C^T * x * C (inverse), separable.
void transform(const double* x, double* out, int n, bool inverse) {
  const double* c = basis(n);
  double tmp[64];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += (inverse ? c[k * n + i] : c[i * n + k]) * x[k * n + j];
      tmp[i * n + j] = acc;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += tmp[i * n + k] * (inverse ? c[k * n + j] : c[j * n + k]);
      out[i * n + j] = acc;
    }
}

void check_grid(const BlockGrid& grid, const PlanarF64& plane) {
  if (!supported_block_size(grid.block_size)) throw Error(Errc::BadBlockSize, "grid has unsupported block size");
  if (grid.plane_width != plane.width || grid.plane_height != plane.height)
    throw Error(Errc::DimensionMismatch, "grid does not belong to this plane");
  if (grid.coeffs.size() != static_cast<std::size_t>(grid.block_count()) * grid.tile_len())
    throw Error(Errc::DimensionMismatch, "grid coefficient storage is inconsistent");
}

BlockGrid empty_grid(const PlanarF64& plane, int block_size) {
  if (!supported_block_size(block_size))
    throw Error(Errc::BadBlockSize, "block size must be 4 or 8, got " + std::to_string(block_size));
  BlockGrid g;
  g.block_size = block_size;
  g.cols = plane.width / block_size;
  g.rows = plane.height / block_size;
  g.plane_width = plane.width;
  g.plane_height = plane.height;
  g.coeffs.assign(static_cast<std::size_t>(g.block_count()) * g.tile_len(), 0.0);
  return g;
}

}  // namespace

std::vector<double> dct2_block(std::span<const double> tile, int block_size) {
  check_block(tile.size(), block_size);
  std::vector<double> out(tile.size());
  transform(tile.data(), out.data(), block_size, false);
  return out;
}

std::vector<double> idct2_block(std::span<const double> coeffs, int block_size) {
  check_block(coeffs.size(), block_size);
  std::vector<double> out(coeffs.size());
  transform(coeffs.data(), out.data(), block_size, true);
  return out;
}

BlockGrid forward_block_dct(const PlanarF64& plane, int block_size) {
  BlockGrid g = empty_grid(plane, block_size);
  const int n = block_size;
#pragma omp parallel for schedule(static)
  for (int b = 0; b < g.block_count(); ++b) {
    const int bx = (b % g.cols) * n, by = (b / g.cols) * n;
    double tile[64];
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) tile[y * n + x] = plane.at(bx + x, by + y);
    transform(tile, g.tile(b).data(), n, false);
  }
  return g;
}

void inverse_block_dct(const BlockGrid& grid, PlanarF64& plane) {
  check_grid(grid, plane);
  const int n = grid.block_size;
#pragma omp parallel for schedule(static)
  for (int b = 0; b < grid.block_count(); ++b) {
    const int bx = (b % grid.cols) * n, by = (b / grid.cols) * n;
    double tile[64];
    transform(grid.tile(b).data(), tile, n, true);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) plane.at(bx + x, by + y) = tile[y * n + x];
  }
}

namespace reference {

// Direct quadruple-sum definition of the orthonormal DCT-II.
BlockGrid forward_block_dct(const PlanarF64& plane, int block_size) {
  BlockGrid g = empty_grid(plane, block_size);
  const int n = block_size;
  const double pi = std::numbers::pi;
  for (int b = 0; b < g.block_count(); ++b) {
    const int bx = (b % g.cols) * n, by = (b / g.cols) * n;
    auto out = g.tile(b);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        double acc = 0.0;
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x)
            acc += plane.at(bx + x, by + y) * std::cos(pi * (2 * y + 1) * u / (2.0 * n)) *
                   std::cos(pi * (2 * x + 1) * v / (2.0 * n));
        const double au = std::sqrt((u == 0 ? 1.0 : 2.0) / n), av = std::sqrt((v == 0 ? 1.0 : 2.0) / n);
        out[static_cast<std::size_t>(u * n + v)] = au * av * acc;
      }
  }
  return g;
}

void inverse_block_dct(const BlockGrid& grid, PlanarF64& plane) {
  check_grid(grid, plane);
  const int n = grid.block_size;
  const double pi = std::numbers::pi;
  for (int b = 0; b < grid.block_count(); ++b) {
    const int bx = (b % grid.cols) * n, by = (b / grid.cols) * n;
    auto in = grid.tile(b);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int u = 0; u < n; ++u)
          for (int v = 0; v < n; ++v) {
            const double au = std::sqrt((u == 0 ? 1.0 : 2.0) / n), av = std::sqrt((v == 0 ? 1.0 : 2.0) / n);
            acc += au * av * in[static_cast<std::size_t>(u * n + v)] * std::cos(pi * (2 * y + 1) * u / (2.0 * n)) *
                   std::cos(pi * (2 * x + 1) * v / (2.0 * n));
          }
        plane.at(bx + x, by + y) = acc;
      }
  }
}

}  // namespace reference
}  // namespace mimicmark
