#pragma once

#include <vector>

namespace swarmot {

// Euclidean projection of w onto { v >= 0, lower <= sum(v) <= upper }.
//
// Returns max(w - theta, 0) where theta = 0 if clipping alone lands the sum
// inside [lower, upper], and otherwise solves sum(max(w - theta, 0)) = bound
// for the violated bound. Exact sort-and-threshold when lower == upper,
// bisection to 1e-12 otherwise.
std::vector<double> project_capped_simplex(const std::vector<double>& w, double lower,
                                           double upper);

}  // namespace swarmot
