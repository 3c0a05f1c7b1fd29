#ifndef XVA_GRID_HPP
#define XVA_GRID_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "xva/errors.hpp"

namespace xva {

// Simulation grid in year fractions, from 0 to the horizon.
class TimeGrid {
public:
    TimeGrid() = default;

    explicit TimeGrid(std::vector<double> times) : times_(std::move(times)) { validate(); }

    static TimeGrid regular(double horizon_years, double step_years) {
        if (!(horizon_years > 0.0) || !(step_years > 0.0))
            throw ArgumentError("TimeGrid::regular: horizon and step must be positive");
        const double ratio = horizon_years / step_years;
        const long n = std::lround(ratio);
        if (n < 1 || std::fabs(ratio - static_cast<double>(n)) > 1e-9)
            throw ArgumentError("TimeGrid::regular: horizon must be a multiple of step");
        std::vector<double> t(static_cast<std::size_t>(n) + 1);
        for (long k = 0; k <= n; ++k) t[static_cast<std::size_t>(k)] = step_years * static_cast<double>(k);
        t.back() = horizon_years;
        return TimeGrid(std::move(t));
    }

    const std::vector<double>& times() const { return times_; }
    double operator[](std::size_t k) const { return times_[k]; }
    std::size_t size() const { return times_.size(); }
    std::size_t steps() const { return times_.size() - 1; }
    double horizon() const { return times_.back(); }
    double dt(std::size_t k) const { return times_[k + 1] - times_[k]; }

    // Smallest grid index with time >= t (used for default snapping and the
    // one-year-ahead window); size() if t is past the horizon.
    std::size_t index_at_or_after(double t) const {
        std::size_t lo = 0, hi = times_.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (times_[mid] < t)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

    bool operator==(const TimeGrid& other) const { return times_ == other.times_; }

private:
    void validate() const {
        if (times_.size() < 2) throw ArgumentError("TimeGrid: need at least two points");
        if (times_.front() != 0.0) throw ArgumentError("TimeGrid: first point must be 0");
        for (std::size_t k = 0; k + 1 < times_.size(); ++k)
            if (!(times_[k] < times_[k + 1]))
                throw ArgumentError("TimeGrid: times must be strictly increasing (index " +
                                    std::to_string(k + 1) + ")");
    }

    std::vector<double> times_;
};

}  // namespace xva

#endif
