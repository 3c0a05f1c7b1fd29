#include "xva/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace xva {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t& x0, std::uint32_t& x1, std::uint32_t& x2,
                         std::uint32_t& x3, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x0 = hi1 ^ x1 ^ k0;
    x1 = lo1;
    x2 = hi0 ^ x3 ^ k1;
    x3 = lo0;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint32_t stream,
                                        std::uint64_t a, std::uint64_t b) {
    std::uint32_t x0 = static_cast<std::uint32_t>(a);
    std::uint32_t x1 = static_cast<std::uint32_t>(a >> 32);
    std::uint32_t x2 = static_cast<std::uint32_t>(b);
    std::uint32_t x3 = static_cast<std::uint32_t>(b >> 32) ^ stream;
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    for (int r = 0; r < 10; ++r) {
        philox_round(x0, x1, x2, x3, k0, k1);
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {x0, x1, x2, x3};
}

double CounterRng::uniform(std::uint32_t stream, std::uint64_t a, std::uint64_t b) const {
    const auto blk = philox4x32(seed_, stream, a, b);
    const std::uint64_t v = (static_cast<std::uint64_t>(blk[0]) << 32) | blk[1];
    return static_cast<double>(v >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::normal(std::uint32_t stream, std::uint64_t a, std::uint64_t b) const {
    return inverse_normal_cdf(uniform(stream, a, b));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf: p outside (0,1)");
    static const double a[8] = {3.3871328727963666080e0, 1.3314166789178437745e2,
                                1.9715909503065514427e3, 1.3731693765509461125e4,
                                4.5921953931549871457e4, 6.7265770927008700853e4,
                                3.3430575583588128105e4, 2.5090809287301226727e3};
    static const double b[8] = {1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
                                5.3941960214247511077e3, 2.1213794301586595867e4,
                                3.9307895800092710610e4, 2.8729085735721942674e4,
                                5.2264952788528545610e3};
    static const double c[8] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                                5.76949722146069140550e0, 3.64784832476320460504e0,
                                1.27045825245236838258e0, 2.41780725177450611770e-1,
                                2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static const double d[8] = {1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
                                6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                1.05075007164441684324e-9};
    static const double e[8] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                                1.78482653991729133580e0, 2.96560571828504891230e-1,
                                2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static const double f[8] = {1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                2.04426310338993978564e-15};
    auto horner = [](const double* k, double x) {
        double r = k[7];
        for (int i = 6; i >= 0; --i) r = r * x + k[i];
        return r;
    };
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(a, r) / horner(b, r);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = horner(c, r) / horner(d, r);
    } else {
        r -= 5.0;
        x = horner(e, r) / horner(f, r);
    }
    return (q < 0.0) ? -x : x;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double normal_pdf(double x) { return 0.3989422804014326779 * std::exp(-0.5 * x * x); }

GaussHermite::GaussHermite(int n) {
    if (n < 1) throw std::invalid_argument("GaussHermite: n >= 1 required");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    // Newton iteration on physicists' Hermite polynomials, then rescale so the
    // rule integrates against the standard normal density.
    const double pim4 = 0.7511255444649424829;  // pi^{-1/4}
    const int m = (n + 1) / 2;
    std::vector<double> zroot(m, 0.0);
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * zroot[0];
        else
            z = 2.0 * z - zroot[i - 2];
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
        }
        zroot[i] = z;
        const double w = 2.0 / (pp * pp);
        // abscissae for N(0,1): x = sqrt(2) z; weights normalised by 1/sqrt(pi)
        nodes[i] = std::sqrt(2.0) * z;
        nodes[n - 1 - i] = -nodes[i];
        weights[i] = w * 0.5641895835477562869;  // 1/sqrt(pi)
        weights[n - 1 - i] = weights[i];
    }
    if (n % 2 == 1) nodes[m - 1] = 0.0;
}

NormalExpectation::NormalExpectation(int panels, int nodes_per_panel) {
    if (panels < 1 || nodes_per_panel < 2)
        throw std::invalid_argument("NormalExpectation: bad rule size");
    // Gauss-Legendre nodes on [-1,1] by Newton on the Legendre recurrence.
    const int n = nodes_per_panel;
    std::vector<double> x(n), w(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        double p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    const double lo = -8.0, hi = 8.0;
    const double width = (hi - lo) / panels;
    nodes.reserve(static_cast<std::size_t>(panels) * n);
    weights.reserve(static_cast<std::size_t>(panels) * n);
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * width;
        const double c = a + 0.5 * width;
        for (int i = 0; i < n; ++i) {
            const double xi = c + 0.5 * width * x[i];
            nodes.push_back(xi);
            weights.push_back(0.5 * width * w[i] * normal_pdf(xi));
        }
    }
}

}  // namespace xva
