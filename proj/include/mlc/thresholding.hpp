#pragma once

#include "mlc/types.hpp"

#include <span>
#include <vector>

namespace mlc {

/// Otsu threshold over a finite set of real scores, exact discrete form.
///
/// Candidate thresholds are the distinct sample values; the returned t
/// maximizes the between-class variance w0*w1*(mu0-mu1)^2 of the split
/// {v <= t} | {v > t}. Variance ties break toward the smaller threshold, so
/// an all-equal set returns that value. Throws std::invalid_argument on an
/// empty set.
Scalar otsu_threshold(std::span<const Scalar> values);

/// Index partition at threshold t: above = {j : v_j > t}, below = {j : v_j <= t}.
struct SplitResult {
  std::vector<int> above;
  std::vector<int> below;
};

SplitResult split(std::span<const Scalar> values, Scalar t);

}  // namespace mlc
