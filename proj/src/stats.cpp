#include "sigbound/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigbound {

KsResult ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic: empty sample");

  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < n || j < m) {
    double t;
    if (i < n && (j >= m || a[i] <= b[j]))
      t = a[i];
    else
      t = b[j];
    while (i < n && a[i] <= t) ++i;
    while (j < m && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(n) -
                             static_cast<double>(j) / static_cast<double>(m)));
  }

  KsResult result;
  result.statistic = d;
  result.p_value = ks_pvalue(d, n, m);
  result.n_a = n;
  result.n_b = m;
  return result;
}

double ks_pvalue(double d, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0)
    throw std::invalid_argument("ks_pvalue: empty sample");
  if (d <= 0) return 1.0;

  const double ne = static_cast<double>(n) * static_cast<double>(m) /
                    (static_cast<double>(n) + static_cast<double>(m));
  const double z = std::sqrt(ne) * d;

  // Kolmogorov survival function; the theta-transformed series converges
  // fast for small z, the alternating series for large z.
  if (z < 1.18) {
    const double v = std::exp(-M_PI * M_PI / (8.0 * z * z));
    // sum of v^{(2k-1)^2} for k = 1, 2, 3, ...
    const double cdf = std::sqrt(2.0 * M_PI) / z *
                       (v + std::pow(v, 9.0) + std::pow(v, 25.0) +
                        std::pow(v, 49.0));
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }

  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * z * z);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

std::optional<double> improvement_pct(double base, double conf) {
  if (!(base < 0.0) || !(conf < 0.0)) return std::nullopt;
  return (base / conf - 1.0) * 100.0;
}

}  // namespace sigbound
