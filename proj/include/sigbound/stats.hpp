#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace sigbound {

/// Two-sample Kolmogorov-Smirnov result.
struct KsResult {
  double statistic = 0.0;  // D = sup |ECDF_a - ECDF_b|
  double p_value = 1.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

/// Exact D via a merge of the sorted samples; p-value from the asymptotic
/// Kolmogorov distribution at effective size n*m/(n+m).
KsResult ks_statistic(std::vector<double> a, std::vector<double> b);

/// Survival function of the Kolmogorov distribution evaluated at
/// sqrt(n*m/(n+m)) * d.
double ks_pvalue(double d, std::size_t n, std::size_t m);

/// Relative gain (base/conf - 1) * 100 of one average bound over another;
/// defined only when both are negative.
std::optional<double> improvement_pct(double base, double conf);

}  // namespace sigbound
