#include "xva/risk_measure.hpp"

#include <algorithm>
#include <cmath>

#include "xva/errors.hpp"

namespace xva {

namespace {

struct Weighted {
    double x;
    double w;
};

std::vector<Weighted> surviving_sorted_desc(const ConditionalSample& sample) {
    std::vector<Weighted> xs;
    xs.reserve(sample.values.size());
    for (const auto& o : sample.values) {
        if (!o.survived) continue;
        if (!(o.weight > 0.0)) throw ArgumentError("ConditionalSample: weights must be positive");
        xs.push_back({o.increment, o.weight});
    }
    if (xs.empty())
        throw EstimationError("conditional risk measure: no surviving samples");
    std::sort(xs.begin(), xs.end(), [](const Weighted& a, const Weighted& b) { return a.x > b.x; });
    return xs;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ArgumentError("conditional risk measure: alpha must lie in (0,1)");
}

double var_of(const std::vector<Weighted>& xs, double alpha) {
    double p_survived = 0.0;
    for (const auto& o : xs) p_survived += o.w;
    const double cutoff = alpha * p_survived;
    // Walk atoms from the largest down; the last atom whose inclusive tail mass
    // still fits under alpha is the VaR. If even the top atom does not fit,
    // fall back to it (degenerate heavy atom, e.g. a constant sample).
    double tail = 0.0;
    double var = xs.front().x;
    bool qualified = false;
    std::size_t i = 0;
    while (i < xs.size()) {
        const double v = xs[i].x;
        double w = 0.0;
        while (i < xs.size() && xs[i].x == v) {
            w += xs[i].w;
            ++i;
        }
        tail += w;
        if (tail <= cutoff) {
            var = v;
            qualified = true;
        } else {
            if (!qualified) var = v;  // first atom already exceeds the tail budget
            break;
        }
    }
    return var;
}

}  // namespace

double conditional_var(const ConditionalSample& sample, double alpha) {
    check_alpha(alpha);
    return var_of(surviving_sorted_desc(sample), alpha);
}

double conditional_es(const ConditionalSample& sample, double alpha) {
    check_alpha(alpha);
    const auto xs = surviving_sorted_desc(sample);
    const double var = var_of(xs, alpha);
    double num = 0.0, den = 0.0;
    for (const auto& o : xs) {
        if (o.x < var) break;  // sorted descending
        num += o.w * o.x;
        den += o.w;
    }
    return num / den;
}

EsCurveResult es_term_structure(const std::vector<AnchorSamples>& anchors, const TimeGrid& grid,
                                double alpha, std::size_t min_survivors) {
    return es_term_structure(
        anchors.size(), [&](std::size_t j) { return anchors[j]; }, grid, alpha, min_survivors);
}

EsCurveResult es_term_structure(std::size_t n_anchors,
                                const std::function<AnchorSamples(std::size_t)>& provider,
                                const TimeGrid& grid, double alpha, std::size_t min_survivors) {
    if (n_anchors == 0) throw ArgumentError("es_term_structure: no anchors");
    EsCurveResult out;
    out.curve = TermStructure::zero(grid);
    out.surviving_counts.reserve(n_anchors);

    std::vector<std::pair<std::size_t, double>> knots;
    for (std::size_t jj = 0; jj < n_anchors; ++jj) {
        const AnchorSamples a = provider(jj);
        if (a.anchor_index >= grid.size())
            throw ArgumentError("es_term_structure: anchor outside grid");
        ConditionalSample sample;
        sample.anchor_time = grid[a.anchor_index];
        sample.values.reserve(a.increments.size());
        std::size_t surv = 0;
        for (std::size_t i = 0; i < a.increments.size(); ++i) {
            const bool s = a.survived[i] != 0;
            surv += s ? 1 : 0;
            sample.add(static_cast<double>(a.increments[i]), s);
        }
        out.surviving_counts.push_back(surv);
        double es = 0.0;
        if (surv == 0) {
            out.warnings.push_back("es_term_structure: no surviving samples at t=" +
                                   std::to_string(grid[a.anchor_index]) + ", using 0");
        } else {
            if (surv < min_survivors)
                out.warnings.push_back("es_term_structure: only " + std::to_string(surv) +
                                       " surviving samples at t=" +
                                       std::to_string(grid[a.anchor_index]) + " (minimum " +
                                       std::to_string(min_survivors) + ")");
            es = conditional_es(sample, alpha);
        }
        knots.emplace_back(a.anchor_index, es);
    }
    std::sort(knots.begin(), knots.end());

    // Linear fill between anchors, flat past the last anchor.
    std::size_t j = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        while (j + 1 < knots.size() && knots[j + 1].first <= k) ++j;
        if (k <= knots.front().first) {
            out.curve[k] = knots.front().second;
        } else if (j + 1 >= knots.size()) {
            out.curve[k] = knots.back().second;
        } else {
            const auto [k0, v0] = knots[j];
            const auto [k1, v1] = knots[j + 1];
            const double w = (grid[k] - grid[k0]) / (grid[k1] - grid[k0]);
            out.curve[k] = v0 + w * (v1 - v0);
        }
    }
    return out;
}

}  // namespace xva
