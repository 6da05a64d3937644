#pragma once

#include <span>
#include <vector>

#include "mimicmark/image.hpp"

namespace mimicmark {

/// One level of the orthonormal 2-D Haar transform.
///
/// Naming follows (horizontal filter, vertical filter): `hl` is high-pass
/// along x and low-pass along y, so it responds to intensity changes as x
/// increases. Odd-sized sources are transformed over their even top-left
/// region; the dropped last column/row is carried verbatim in `tail_column`
/// and `tail_row` and restored by idwt2_haar.
struct Subbands {
  PlanarF64 ll, lh, hl, hh;
  int source_width = 0;
  int source_height = 0;
  std::vector<double> tail_column;  // x = source_width-1, rows 0..source_height-1
  std::vector<double> tail_row;     // y = source_height-1, columns 0..even_width-1
};

Subbands dwt2_haar(const PlanarF64& plane);
PlanarF64 idwt2_haar(const Subbands& bands);

inline bool supported_block_size(int n) noexcept { return n == 4 || n == 8; }

/// Orthonormal type-II 2-D DCT of one row-major n x n tile, n in {4, 8}.
std::vector<double> dct2_block(std::span<const double> tile, int block_size);
std::vector<double> idct2_block(std::span<const double> coeffs, int block_size);

/// Coefficient tiles covering the largest top-left region of a plane that is
/// divisible by `block_size`. Tiles are stored contiguously in raster order.
struct BlockGrid {
  int block_size = 0;
  int cols = 0;
  int rows = 0;
  int plane_width = 0;
  int plane_height = 0;
  std::vector<double> coeffs;

  int block_count() const noexcept { return cols * rows; }
  std::size_t tile_len() const noexcept { return static_cast<std::size_t>(block_size) * block_size; }
  std::span<double> tile(int index) noexcept {
    return {coeffs.data() + static_cast<std::size_t>(index) * tile_len(), tile_len()};
  }
  std::span<const double> tile(int index) const noexcept {
    return {coeffs.data() + static_cast<std::size_t>(index) * tile_len(), tile_len()};
  }
};

/// Number of whole tiles of `block_size` that fit in a w x h plane.
inline int block_capacity(int w, int h, int block_size) noexcept {
  return (w / block_size) * (h / block_size);
}

BlockGrid forward_block_dct(const PlanarF64& plane, int block_size);
/// Writes every tile back into `plane`; samples outside the grid are untouched.
void inverse_block_dct(const BlockGrid& grid, PlanarF64& plane);

/// Thin SVD of a square row-major matrix: tile = U * diag(S) * V^T.
struct SvdResult {
  int n = 0;
  std::vector<double> u;  // n x n, row-major, orthonormal columns
  std::vector<double> s;  // nonincreasing, >= 0
  std::vector<double> v;  // n x n, row-major, orthonormal columns

  std::vector<double> reconstruct() const;
};

/// One-sided Jacobi SVD for small square tiles.
SvdResult svd_block(std::span<const double> tile);

namespace reference {

// Straightforward serial versions of the plane kernels (separable Haar,
// per-tile DCT). They round differently from the fused parallel kernels, so
// the two agree to within a few ulps, not bit-for-bit.
Subbands dwt2_haar(const PlanarF64& plane);
PlanarF64 idwt2_haar(const Subbands& bands);
BlockGrid forward_block_dct(const PlanarF64& plane, int block_size);
void inverse_block_dct(const BlockGrid& grid, PlanarF64& plane);

}  // namespace reference

}  // namespace mimicmark
