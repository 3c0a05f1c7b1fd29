#ifndef XVA_TERM_STRUCTURE_HPP
#define XVA_TERM_STRUCTURE_HPP

#include <cmath>
#include <vector>

#include "xva/errors.hpp"
#include "xva/grid.hpp"

namespace xva {

// Deterministic function of time sampled on the simulation grid.
struct TermStructure {
    TermStructure() = default;
    TermStructure(const TimeGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        validate();
    }
    static TermStructure constant(const TimeGrid& g, double c) {
        return TermStructure(g, std::vector<double>(g.size(), c));
    }
    static TermStructure zero(const TimeGrid& g) { return constant(g, 0.0); }

    double operator[](std::size_t k) const { return values[k]; }
    double& operator[](std::size_t k) { return values[k]; }
    std::size_t size() const { return values.size(); }

    void validate() const {
        if (values.size() != grid.size())
            throw ArgumentError("TermStructure: length must match grid");
        for (double v : values)
            if (!std::isfinite(v)) throw ArgumentError("TermStructure: values must be finite");
    }

    TimeGrid grid;
    std::vector<double> values;
};

inline TermStructure pointwise_max(const TermStructure& a, const TermStructure& b) {
    TermStructure out = a;
    for (std::size_t k = 0; k < out.size(); ++k) out.values[k] = std::max(a[k], b[k]);
    return out;
}

}  // namespace xva

#endif
