#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mimicmark/error.hpp"
#include "mimicmark/transforms.hpp"

namespace mimicmark {
namespace {

int square_side(std::size_t len) {
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(len))));
  if (n <= 0 || static_cast<std::size_t>(n) * n != len)
    throw Error(Errc::DimensionMismatch, "SVD needs a square tile, got " + std::to_string(len) + " samples");
  return n;
}

}  // namespace

std::vector<double> SvdResult::reconstruct() const {
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += u[i * n + k] * s[k] * v[j * n + k];
      out[i * n + j] = acc;
    }
  return out;
}

// One-sided (Hestenes) Jacobi: rotate column pairs of W = A*V until all
// columns are mutually orthogonal; then S = column norms and U = W / S.
SvdResult svd_block(std::span<const double> tile) {
  const int n = square_side(tile.size());
  for (double x : tile)
    if (!std::isfinite(x)) throw Error(Errc::NonFiniteInput, "tile contains NaN or Inf");

  std::vector<double> w(tile.begin(), tile.end());
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[i * n + i] = 1.0;

  constexpr double kEps = 1e-15;
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int i = 0; i < n; ++i) {
          const double wp = w[i * n + p], wq = w[i * n + q];
          alpha += wp * wp;
          beta += wq * wq;
          gamma += wp * wq;
        }
        if (std::abs(gamma) <= kEps * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < n; ++i) {
          const double wp = w[i * n + p], wq = w[i * n + q];
          w[i * n + p] = c * wp - s * wq;
          w[i * n + q] = s * wp + c * wq;
          const double vp = v[i * n + p], vq = v[i * n + q];
          v[i * n + p] = c * vp - s * vq;
          v[i * n + q] = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> norms(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += w[i * n + j] * w[i * n + j];
    norms[static_cast<std::size_t>(j)] = std::sqrt(acc);
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return norms[a] > norms[b]; });

  SvdResult r;
  r.n = n;
  r.u.assign(static_cast<std::size_t>(n) * n, 0.0);
  r.v.assign(static_cast<std::size_t>(n) * n, 0.0);
  r.s.resize(static_cast<std::size_t>(n));
  const double scale = norms[order[0]];
  const double zero_tol = std::max(scale, 1.0) * 1e-13;
  int rank = 0;
  for (int k = 0; k < n; ++k) {
    const int j = order[static_cast<std::size_t>(k)];
    const double sigma = norms[static_cast<std::size_t>(j)];
    r.s[static_cast<std::size_t>(k)] = sigma;
    for (int i = 0; i < n; ++i) r.v[i * n + k] = v[i * n + j];
    if (sigma > zero_tol) {
      for (int i = 0; i < n; ++i) r.u[i * n + k] = w[i * n + j] / sigma;
      ++rank;
    }
  }
  // Complete U for null singular values with Gram-Schmidt over unit vectors.
  int next_unit = 0;
  for (int k = rank; k < n; ++k) {
    while (next_unit < n) {
      std::vector<double> cand(static_cast<std::size_t>(n), 0.0);
      cand[static_cast<std::size_t>(next_unit++)] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (int m = 0; m < k; ++m) {
          double dot = 0.0;
          for (int i = 0; i < n; ++i) dot += cand[static_cast<std::size_t>(i)] * r.u[i * n + m];
          for (int i = 0; i < n; ++i) cand[static_cast<std::size_t>(i)] -= dot * r.u[i * n + m];
        }
      double norm = 0.0;
      for (double c : cand) norm += c * c;
      norm = std::sqrt(norm);
      if (norm > 1e-6) {
        for (int i = 0; i < n; ++i) r.u[i * n + k] = cand[static_cast<std::size_t>(i)] / norm;
        break;
      }
    }
    r.s[static_cast<std::size_t>(k)] = std::max(0.0, r.s[static_cast<std::size_t>(k)]);
  }
  return r;
}

}  // namespace mimicmark
