#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mimicmark::stats {

/// P(K = k) for K ~ BetaBinomial(n, a, b), k = 0..n.
std::vector<double> beta_binomial_pmf(int n, double a, double b);

/// Shape parameters for mean accuracy `mu` and intra-class correlation
/// `rho` = 1 / (a + b + 1).
struct BetaShape {
  double alpha;
  double beta;
};
BetaShape shape_from_moments(double mu, double rho);

/// Accuracy bin of k correct bits out of n with `bins` equal-width bins,
/// left-closed, the last one closed: min(k * bins / n, bins - 1).
int accuracy_bin(int k, int n, int bins) noexcept;

/// Mass of `pmf` (indexed by k) in each accuracy bin.
std::vector<double> bin_mass(std::span<const double> pmf, int bins);

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
};
MomentSummary pmf_moments(std::span<const double> pmf);

/// Method-of-moments overdispersion of counts out of n (clamped to
/// [kMinRho, kMaxRho]).
inline constexpr double kMinRho = 1e-6;
inline constexpr double kMaxRho = 0.95;
double overdispersion(double mean_bits, double variance_bits, int n);

/// Pearson chi-square of observed counts against expected proportions.
/// Cells with zero expected mass must have zero observed count; they are
/// skipped. Degrees of freedom = used cells - 1.
struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};
ChiSquare chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected_prop);

/// Upper tail of the standard normal.
double normal_sf(double z);

/// Two-sample Kolmogorov-Smirnov on integer samples; asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_two_sample(std::span<const int> a, std::span<const int> b);

/// Exact sampler over a finite pmf: the table is built once in floating
/// point, after which a draw is one 64-bit integer and a binary search.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> pmf);
  int operator()(std::uint64_t random_word) const noexcept;

 private:
  std::vector<std::uint64_t> thresholds_;  // k is drawn when word < thresholds_[k]
  int last_ = 0;                            // largest k with mass
};

}  // namespace mimicmark::stats
