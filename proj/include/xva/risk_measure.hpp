#ifndef XVA_RISK_MEASURE_HPP
#define XVA_RISK_MEASURE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xva/term_structure.hpp"

namespace xva {

// One-year-ahead loss increments with bank-survival flags, conditioned on
// survival when the risk measures are taken. Weights need not be normalised;
// they are divided out internally.
struct ConditionalSample {
    struct Obs {
        double increment;
        bool survived;
        double weight;
    };
    std::vector<Obs> values;
    double anchor_time = 0.0;

    void add(double increment, bool survived, double weight = 1.0) {
        values.push_back({increment, survived, weight});
    }
};

// Smallest observed loss level whose survival-conditioned tail probability is
// at or below alpha; the largest surviving atom when none qualifies.
double conditional_var(const ConditionalSample& sample, double alpha = 0.025);

// Mean of the surviving tail at or above the VaR level.
double conditional_es(const ConditionalSample& sample, double alpha = 0.025);

// Pooled per-anchor increments (primary x secondary) for the projected ES curve.
struct AnchorSamples {
    std::size_t anchor_index = 0;
    std::vector<float> increments;
    std::vector<std::uint8_t> survived;
};

struct EsCurveResult {
    TermStructure curve;
    std::vector<std::string> warnings;
    std::vector<std::size_t> surviving_counts;  // per anchor
};

// Applies conditional_es anchor by anchor, linearly filling between anchors
// and extending flat past the last one (the window runs off the horizon there).
EsCurveResult es_term_structure(const std::vector<AnchorSamples>& anchors, const TimeGrid& grid,
                                double alpha = 0.025, std::size_t min_survivors = 200);

// Streaming variant: anchors are produced one at a time, so the full
// (primary x secondary x anchor) sample cube never has to be materialised.
EsCurveResult es_term_structure(std::size_t n_anchors,
                                const std::function<AnchorSamples(std::size_t)>& provider,
                                const TimeGrid& grid, double alpha = 0.025,
                                std::size_t min_survivors = 200);

}  // namespace xva

#endif
