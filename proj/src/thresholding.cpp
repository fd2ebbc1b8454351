#include "mlc/thresholding.hpp"

#include <algorithm>
#include <stdexcept>

namespace mlc {

Scalar otsu_threshold(std::span<const Scalar> values) {
  if (values.empty())
    throw std::invalid_argument("otsu_threshold: empty score set");

  const std::size_t n = values.size();
  std::vector<Scalar> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  // Prefix sums over the sorted values give each cut's class means in O(1).
  std::vector<Scalar> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sorted[i];
  const Scalar total = prefix[n];

  Scalar best_t = sorted[0];
  Scalar best_var = -1;
  for (std::size_t i = 0; i < n; ++i) {
    // Cut at sorted[i]; skip duplicate values so each distinct cut is
    // evaluated once, at its last occurrence.
    if (i + 1 < n && sorted[i + 1] == sorted[i]) continue;
    const std::size_t n0 = i + 1;
    const std::size_t n1 = n - n0;
    const Scalar w0 = static_cast<Scalar>(n0) / static_cast<Scalar>(n);
    const Scalar w1 = static_cast<Scalar>(n1) / static_cast<Scalar>(n);
    const Scalar mu0 = prefix[n0] / static_cast<Scalar>(n0);
    const Scalar mu1 = n1 > 0 ? (total - prefix[n0]) / static_cast<Scalar>(n1) : 0;
    const Scalar var = n1 > 0 ? w0 * w1 * (mu0 - mu1) * (mu0 - mu1) : 0;
    if (var > best_var) {
      best_var = var;
      best_t = sorted[i];
    }
  }
  return best_t;
}

SplitResult split(std::span<const Scalar> values, Scalar t) {
  SplitResult r;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] > t)
      r.above.push_back(static_cast<int>(j));
    else
      r.below.push_back(static_cast<int>(j));
  }
  return r;
}

}  // namespace mlc
