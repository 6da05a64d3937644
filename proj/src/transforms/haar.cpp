#include <cmath>
#include <string>

#include "mimicmark/error.hpp"
#include "mimicmark/transforms.hpp"

namespace mimicmark {
namespace {

void check_source(const PlanarF64& plane) {
  if (plane.empty() || plane.width < 2 || plane.height < 2)
    throw Error(Errc::EmptyPlane, "Haar transform needs at least a 2x2 plane");
  if (plane.size() != static_cast<std::size_t>(plane.width) * plane.height)
    throw Error(Errc::DimensionMismatch, "plane data does not match its dimensions");
}

Subbands allocate(const PlanarF64& plane) {
  const int hw = plane.width / 2, hh = plane.height / 2;
  Subbands s{PlanarF64(hw, hh), PlanarF64(hw, hh), PlanarF64(hw, hh), PlanarF64(hw, hh),
             plane.width, plane.height, {}, {}};
  if (plane.width % 2 != 0) {
    s.tail_column.resize(static_cast<std::size_t>(plane.height));
    for (int y = 0; y < plane.height; ++y) s.tail_column[static_cast<std::size_t>(y)] = plane.at(plane.width - 1, y);
  }
  if (plane.height % 2 != 0) {
    s.tail_row.resize(static_cast<std::size_t>(hw) * 2);
    for (int x = 0; x < hw * 2; ++x) s.tail_row[static_cast<std::size_t>(x)] = plane.at(x, plane.height - 1);
  }
  return s;
}

void check_bands(const Subbands& s) {
  const PlanarF64& ll = s.ll;
  if (!ll.same_shape(s.lh) || !ll.same_shape(s.hl) || !ll.same_shape(s.hh))
    throw Error(Errc::DimensionMismatch, "subbands differ in size");
  if (ll.empty()) throw Error(Errc::EmptyPlane, "empty subbands");
  if (s.source_width / 2 != ll.width || s.source_height / 2 != ll.height)
    throw Error(Errc::DimensionMismatch, "subbands inconsistent with recorded source size");
  if ((s.source_width % 2 != 0) != !s.tail_column.empty() ||
      (s.source_height % 2 != 0) != !s.tail_row.empty())
    throw Error(Errc::DimensionMismatch, "odd-edge tails inconsistent with source size");
}

PlanarF64 allocate_output(const Subbands& s) {
  PlanarF64 out(s.source_width, s.source_height);
  if (!s.tail_column.empty())
    for (int y = 0; y < s.source_height; ++y) out.at(s.source_width - 1, y) = s.tail_column[static_cast<std::size_t>(y)];
  if (!s.tail_row.empty())
    for (int x = 0; x < s.ll.width * 2; ++x) out.at(x, s.source_height - 1) = s.tail_row[static_cast<std::size_t>(x)];
  return out;
}

}  // namespace

Subbands dwt2_haar(const PlanarF64& plane) {
  check_source(plane);
  Subbands s = allocate(plane);
  const int hw = s.ll.width, hh = s.ll.height;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < hh; ++j) {
    for (int i = 0; i < hw; ++i) {
      const double a = plane.at(2 * i, 2 * j), b = plane.at(2 * i + 1, 2 * j);
      const double c = plane.at(2 * i, 2 * j + 1), d = plane.at(2 * i + 1, 2 * j + 1);
      s.ll.at(i, j) = 0.5 * ((a + b) + (c + d));
      s.hl.at(i, j) = 0.5 * ((a - b) + (c - d));
      s.lh.at(i, j) = 0.5 * ((a + b) - (c + d));
      s.hh.at(i, j) = 0.5 * ((a - b) - (c - d));
    }
  }
  return s;
}

PlanarF64 idwt2_haar(const Subbands& s) {
  check_bands(s);
  PlanarF64 out = allocate_output(s);
  const int hw = s.ll.width, hh = s.ll.height;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < hh; ++j) {
    for (int i = 0; i < hw; ++i) {
      const double ll = s.ll.at(i, j), hl = s.hl.at(i, j), lh = s.lh.at(i, j), d = s.hh.at(i, j);
      out.at(2 * i, 2 * j) = 0.5 * ((ll + hl) + (lh + d));
      out.at(2 * i + 1, 2 * j) = 0.5 * ((ll - hl) + (lh - d));
      out.at(2 * i, 2 * j + 1) = 0.5 * ((ll + hl) - (lh + d));
      out.at(2 * i + 1, 2 * j + 1) = 0.5 * ((ll - hl) - (lh - d));
    }
  }
  return out;
}

namespace reference {

// Separable form: 1-D orthonormal Haar along rows, then along columns.
Subbands dwt2_haar(const PlanarF64& plane) {
  check_source(plane);
  Subbands s = allocate(plane);
  const int hw = s.ll.width, hh = s.ll.height;
  const double r = 1.0 / std::sqrt(2.0);
  PlanarF64 lo(hw, hh * 2), hi(hw, hh * 2);
  for (int y = 0; y < hh * 2; ++y)
    for (int i = 0; i < hw; ++i) {
      lo.at(i, y) = (plane.at(2 * i, y) + plane.at(2 * i + 1, y)) * r;
      hi.at(i, y) = (plane.at(2 * i, y) - plane.at(2 * i + 1, y)) * r;
    }
  for (int j = 0; j < hh; ++j)
    for (int i = 0; i < hw; ++i) {
      s.ll.at(i, j) = (lo.at(i, 2 * j) + lo.at(i, 2 * j + 1)) * r;
      s.lh.at(i, j) = (lo.at(i, 2 * j) - lo.at(i, 2 * j + 1)) * r;
      s.hl.at(i, j) = (hi.at(i, 2 * j) + hi.at(i, 2 * j + 1)) * r;
      s.hh.at(i, j) = (hi.at(i, 2 * j) - hi.at(i, 2 * j + 1)) * r;
    }
  return s;
}

PlanarF64 idwt2_haar(const Subbands& s) {
  check_bands(s);
  PlanarF64 out = allocate_output(s);
  const int hw = s.ll.width, hh = s.ll.height;
  const double r = 1.0 / std::sqrt(2.0);
  PlanarF64 lo(hw, hh * 2), hi(hw, hh * 2);
  for (int j = 0; j < hh; ++j)
    for (int i = 0; i < hw; ++i) {
      lo.at(i, 2 * j) = (s.ll.at(i, j) + s.lh.at(i, j)) * r;
      lo.at(i, 2 * j + 1) = (s.ll.at(i, j) - s.lh.at(i, j)) * r;
      hi.at(i, 2 * j) = (s.hl.at(i, j) + s.hh.at(i, j)) * r;
      hi.at(i, 2 * j + 1) = (s.hl.at(i, j) - s.hh.at(i, j)) * r;
    }
  for (int y = 0; y < hh * 2; ++y)
    for (int i = 0; i < hw; ++i) {
      out.at(2 * i, y) = (lo.at(i, y) + hi.at(i, y)) * r;
      out.at(2 * i + 1, y) = (lo.at(i, y) - hi.at(i, y)) * r;
    }
  return out;
}

}  // namespace reference
}  // namespace mimicmark
