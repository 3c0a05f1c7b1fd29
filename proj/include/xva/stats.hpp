#ifndef XVA_STATS_HPP
#define XVA_STATS_HPP

#include <cmath>
#include <cstddef>
#include <span>

#include "xva/errors.hpp"

namespace xva {

struct EstimateWithSe {
    double value = 0.0;
    double se = 0.0;
};

inline double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// Batch-means standard error over contiguous blocks of per-path statistics.
inline EstimateWithSe mean_with_batch_se(std::span<const double> xs, std::size_t batches) {
    if (xs.empty()) throw EstimationError("mean_with_batch_se: empty sample");
    batches = std::max<std::size_t>(2, std::min(batches, xs.size()));
    const std::size_t n = xs.size();
    EstimateWithSe out;
    out.value = mean_of(xs);
    double ss = 0.0;
    double wsum = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t lo = b * n / batches;
        const std::size_t hi = (b + 1) * n / batches;
        if (hi == lo) continue;
        double m = 0.0;
        for (std::size_t i = lo; i < hi; ++i) m += xs[i];
        m /= static_cast<double>(hi - lo);
        const double d = m - out.value;
        ss += d * d;
        wsum += 1.0;
    }
    if (wsum > 1.0) out.se = std::sqrt(ss / (wsum - 1.0) / wsum);
    return out;
}

inline EstimateWithSe mean_with_plain_se(std::span<const double> xs) {
    if (xs.empty()) throw EstimationError("mean_with_plain_se: empty sample");
    EstimateWithSe out;
    out.value = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - out.value;
        ss += d * d;
    }
    const double n = static_cast<double>(xs.size());
    if (xs.size() > 1) out.se = std::sqrt(ss / (n - 1.0) / n);
    return out;
}

}  // namespace xva

#endif
