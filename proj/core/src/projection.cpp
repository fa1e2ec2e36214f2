#include "swarmot/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "swarmot/types.hpp"

namespace swarmot {
namespace {

double clipped_sum(const std::vector<double>& w, double theta) {
    double s = 0.0;
    for (double x : w) s += std::max(x - theta, 0.0);
    return s;
}

// Exact threshold for sum(max(w - theta, 0)) = target via sort.
std::vector<double> threshold_exact(const std::vector<double>& w, double target) {
    const size_t n = w.size();
    std::vector<double> sorted(w);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double prefix = 0.0;
    double theta = sorted.front() - target;
    for (size_t k = 1; k <= n; ++k) {
        prefix += sorted[k - 1];
        const double cand = (prefix - target) / static_cast<double>(k);
        if (sorted[k - 1] > cand) theta = cand;
    }
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = std::max(w[i] - theta, 0.0);
    return v;
}

}  // namespace

std::vector<double> project_capped_simplex(const std::vector<double>& w, double lower,
                                           double upper) {
    if (lower < 0.0 || lower > upper) throw Error("projection bounds need 0 <= lower <= upper");
    for (double x : w)
        if (!std::isfinite(x)) throw Error("projection input must be finite");
    if (w.empty()) return {};

    std::vector<double> clipped(w.size());
    double s = 0.0;
    for (size_t i = 0; i < w.size(); ++i) {
        clipped[i] = std::max(w[i], 0.0);
        s += clipped[i];
    }
    if (s >= lower && s <= upper) return clipped;

    const double target = s < lower ? lower : upper;
    if (target == 0.0) return std::vector<double>(w.size(), 0.0);
    if (lower == upper) return threshold_exact(w, target);

    double hi = *std::max_element(w.begin(), w.end());
    double amax = 0.0;
    for (double x : w) amax = std::max(amax, std::abs(x));
    double lo = *std::min_element(w.begin(), w.end()) - amax - 1.0;
    while (clipped_sum(w, lo) < target) lo -= (hi - lo);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (clipped_sum(w, mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    const double theta = 0.5 * (lo + hi);
    std::vector<double> v(w.size());
    for (size_t i = 0; i < w.size(); ++i) v[i] = std::max(w[i] - theta, 0.0);
    return v;
}

}  // namespace swarmot
