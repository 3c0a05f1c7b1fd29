#ifndef XVA_RNG_HPP
#define XVA_RNG_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace xva {

// Splittable counter-based generator (Philox4x32-10). A draw is addressed by
// (seed, stream, a, b) and never depends on call order, so path generation can
// be parallelised or re-run piecewise with identical output.

namespace rng_stream {
inline constexpr std::uint32_t kPrimaryRate = 1;
inline constexpr std::uint32_t kPrimaryClock = 2;
inline constexpr std::uint32_t kSecondaryRate = 3;
inline constexpr std::uint32_t kSecondaryClock = 4;
inline constexpr std::uint32_t kMarginGap = 5;
}  // namespace rng_stream

std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint32_t stream,
                                        std::uint64_t a, std::uint64_t b);

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Uniform on (0,1), 53-bit resolution.
    double uniform(std::uint32_t stream, std::uint64_t a, std::uint64_t b) const;

    // Standard normal via the inverse CDF (deterministic, no rejection).
    double normal(std::uint32_t stream, std::uint64_t a, std::uint64_t b) const;

private:
    std::uint64_t seed_;
};

// Deterministic sub-stream derivation, e.g. one seed per secondary anchor.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

double inverse_normal_cdf(double p);  // AS241 PPND16
double normal_cdf(double x);
double normal_pdf(double x);

// Gauss-Hermite rule mapped to E[f(X)], X ~ N(mean, variance). Accurate for
// smooth integrands; kinked payoffs converge slowly here.
struct GaussHermite {
    explicit GaussHermite(int n);
    template <typename F>
    double expect(double mean, double stdev, const F& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mean + stdev * nodes[i]);
        return acc;
    }
    std::vector<double> nodes;    // abscissae of N(0,1)
    std::vector<double> weights;  // sum to 1
};

// Composite Gauss-Legendre rule against the normal density over +-8 standard
// deviations. Panels keep the error from a payoff kink local, which matters
// for positive-part exposure integrands.
struct NormalExpectation {
    explicit NormalExpectation(int panels = 16, int nodes_per_panel = 8);
    template <typename F>
    double expect(double mean, double stdev, const F& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mean + stdev * nodes[i]);
        return acc;
    }
    std::vector<double> nodes;    // standardized abscissae
    std::vector<double> weights;  // density-weighted, sum to ~1
};

}  // namespace xva

#endif
