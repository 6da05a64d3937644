#include "mimicmark/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mimicmark/error.hpp"

namespace mimicmark::stats {

namespace {
double lbeta(double a, double b) {
  return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}
}  // namespace

std::vector<double> beta_binomial_pmf(int n, double a, double b) {
  if (n < 1 || !(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(Errc::BadParameter, "beta-binomial needs n >= 1 and finite a, b > 0");
  std::vector<double> pmf(static_cast<std::size_t>(n + 1));
  const double norm = lbeta(a, b);
  const double lg_n = boost::math::lgamma(n + 1.0);
  for (int k = 0; k <= n; ++k) {
    const double log_choose = lg_n - boost::math::lgamma(k + 1.0) - boost::math::lgamma(n - k + 1.0);
    pmf[static_cast<std::size_t>(k)] = std::exp(log_choose + lbeta(k + a, n - k + b) - norm);
  }
  const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  for (double& p : pmf) p /= total;
  return pmf;
}

BetaShape shape_from_moments(double mu, double rho) {
  if (!(mu > 0.0 && mu < 1.0) || !(rho > 0.0 && rho < 1.0))
    throw Error(Errc::BadParameter, "need 0 < mu < 1 and 0 < rho < 1");
  const double s = (1.0 - rho) / rho;
  return {mu * s, (1.0 - mu) * s};
}

int accuracy_bin(int k, int n, int bins) noexcept {
  return std::min(static_cast<int>(static_cast<long long>(k) * bins / n), bins - 1);
}

std::vector<double> bin_mass(std::span<const double> pmf, int bins) {
  const int n = static_cast<int>(pmf.size()) - 1;
  std::vector<double> out(static_cast<std::size_t>(bins), 0.0);
  for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(accuracy_bin(k, n, bins))] += pmf[static_cast<std::size_t>(k)];
  return out;
}

MomentSummary pmf_moments(std::span<const double> pmf) {
  MomentSummary m;
  for (std::size_t k = 0; k < pmf.size(); ++k) m.mean += static_cast<double>(k) * pmf[k];
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double d = static_cast<double>(k) - m.mean;
    m.variance += d * d * pmf[k];
  }
  return m;
}

double overdispersion(double mean_bits, double variance_bits, int n) {
  const double mu = mean_bits / n;
  const double binomial = n * mu * (1.0 - mu);
  if (n < 2 || binomial <= 0.0) return kMinRho;
  const double rho = (variance_bits / binomial - 1.0) / (n - 1);
  return std::clamp(rho, kMinRho, kMaxRho);
}

ChiSquare chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected_prop) {
  if (observed.size() != expected_prop.size()) throw Error(Errc::LengthMismatch, "chi-square cell counts differ");
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
  ChiSquare r;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected_prop[i] * total;
    if (e <= 0.0) {
      if (observed[i] > 0) {
        r.statistic = INFINITY;
        r.p_value = 0.0;
        return r;
      }
      continue;
    }
    const double d = static_cast<double>(observed[i]) - e;
    r.statistic += d * d / e;
    ++cells;
  }
  r.dof = cells - 1;
  if (r.dof < 1) return r;
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
  return r;
}

double normal_sf(double z) { return 0.5 * boost::math::erfc(z / std::sqrt(2.0)); }

KsResult ks_two_sample(std::span<const int> a, std::span<const int> b) {
  if (a.empty() || b.empty()) throw Error(Errc::EmptySampleSet, "KS test needs two nonempty samples");
  std::vector<int> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const int v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  // Q_KS(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2)
  if (lambda < 1e-3) {
    r.p_value = 1.0;
  } else {
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
      q += term;
      if (std::abs(term) < 1e-12) break;
    }
    r.p_value = std::clamp(q, 0.0, 1.0);
  }
  return r;
}

DiscreteSampler::DiscreteSampler(std::span<const double> pmf) {
  if (pmf.empty()) throw Error(Errc::BadParameter, "empty pmf");
  const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  if (!(total > 0.0)) throw Error(Errc::BadParameter, "pmf has no mass");
  thresholds_.resize(pmf.size());
  double cum = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    cum += pmf[k] / total;
    // 2^64 * cum, saturating; the last threshold is "everything".
    const double scaled = std::ldexp(cum, 64);
    thresholds_[k] = scaled >= 0x1.0p64 ? UINT64_MAX : static_cast<std::uint64_t>(scaled);
  }
  last_ = static_cast<int>(pmf.size()) - 1;
  while (last_ > 0 && pmf[static_cast<std::size_t>(last_)] <= 0.0) --last_;
  thresholds_.resize(static_cast<std::size_t>(last_ + 1));
  thresholds_.back() = UINT64_MAX;
}

int DiscreteSampler::operator()(std::uint64_t random_word) const noexcept {
  const auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), random_word);
  if (it == thresholds_.end()) return last_;
  return static_cast<int>(it - thresholds_.begin());
}

}  // namespace mimicmark::stats
