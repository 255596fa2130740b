#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>

#include "bitrans/grid.hpp"

namespace bitrans {

/// F(u, x) together with its declared growth and Lipschitz certificates:
///   |F(u, x)| <= k |u| + h(x),   |F(u1, x) - F(u2, x)| <= l |u1 - u2|.
struct NonlinearSpec {
    std::string name = "custom";
    std::function<double(double u, double x)> eval;
    double lipschitz_l = 0.0;
    double growth_k = 0.0;
    std::function<double(double x)> envelope_h = [](double) { return 0.0; };
    /// F(u, 0) = F(u, 2 pi); required on the periodic interval.
    bool periodic_compatible = true;

    Field envelope(const GridPtr& grid) const { return Field::sample(grid, envelope_h); }
};

/// Common choices for the u-independent part h(x) of the built-in nonlinearities.
namespace source {

inline std::function<double(double)> none() {
    return [](double) { return 0.0; };
}
inline std::function<double(double)> cosine(double amplitude, int mode = 1) {
    return [=](double x) { return amplitude * std::cos(mode * x); };
}
inline std::function<double(double)> gaussian(double amplitude, double width = 1.0) {
    return [=](double x) { return amplitude * std::exp(-(x * x) / (width * width)); };
}

}  // namespace source

inline NonlinearSpec zero_nonlinearity() {
    return {"zero", [](double, double) { return 0.0; }, 0.0, 0.0, source::none(), true};
}

/// F(u, x) = h(x)
inline NonlinearSpec source_nonlinearity(std::function<double(double)> h, bool periodic = true) {
    auto abs_h = [h](double x) { return std::abs(h(x)); };
    return {"source", [h](double, double x) { return h(x); }, 0.0, 0.0, abs_h, periodic};
}

/// F(u, x) = mu sin(u) + h(x), with l = k = |mu|.
inline NonlinearSpec sine_nonlinearity(double mu, std::function<double(double)> h = source::none(),
                                       bool periodic = true) {
    auto abs_h = [h](double x) { return std::abs(h(x)); };
    return {"sine", [mu, h](double u, double x) { return mu * std::sin(u) + h(x); }, std::abs(mu),
            std::abs(mu), abs_h, periodic};
}

/// F(u, x) = mu u / (1 + u^2) + h(x), with l = k = |mu|.
inline NonlinearSpec saturating_nonlinearity(double mu, std::function<double(double)> h = source::none(),
                                             bool periodic = true) {
    auto abs_h = [h](double x) { return std::abs(h(x)); };
    return {"saturating", [mu, h](double u, double x) { return mu * u / (1.0 + u * u) + h(x); },
            std::abs(mu), std::abs(mu), abs_h, periodic};
}

/// Pointwise F(u(x_k), x_k).
inline Field evaluate_field(const NonlinearSpec& spec, const Field& u) {
    if (!u.grid->whole_line() && !spec.periodic_compatible) {
        throw InvalidArgument("nonlinearity '" + spec.name + "' is not periodic-compatible");
    }
    const auto xs = u.grid->x();
    std::vector<double> out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        out[k] = spec.eval(u.values[k], xs[k]);
        if (!std::isfinite(out[k])) {
            throw NumericalError("nonlinearity '" + spec.name + "' is not finite at node " +
                                 std::to_string(k) + " (x = " + std::to_string(xs[k]) +
                                 ", u = " + std::to_string(u.values[k]) + ")");
        }
    }
    return Field(u.grid, std::move(out));
}

struct VerificationReport {
    std::size_t samples = 0;
    double max_lipschitz_ratio = 0.0;
    double max_growth_ratio = 0.0;
    bool lipschitz_ok = true;
    bool growth_ok = true;
    bool pass() const { return lipschitz_ok && growth_ok; }
};

struct URange {
    double lo = -10.0;
    double hi = 10.0;
};

/// Samples (u, u', x) triples on a seed-shifted Kronecker sequence and audits the
/// declared constants. Pass iff both observed ratios are <= declared * (1 + 1e-9).
inline VerificationReport verify_assumption1(const NonlinearSpec& spec, const Grid& grid, URange u_range,
                                             std::size_t samples, std::uint64_t seed = 0) {
    if (samples < 1000) throw InvalidArgument("verify_assumption1 needs at least 1000 samples");
    if (!(u_range.lo < u_range.hi)) throw InvalidArgument("empty u range");

    // R3 low-discrepancy sequence; phi is the root of x^4 = x + 1.
    const double phi = 1.2207440846057596;
    const double alpha[3] = {1.0 / phi, 1.0 / (phi * phi), 1.0 / (phi * phi * phi)};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double shift[3] = {unit(rng), unit(rng), unit(rng)};

    const double x0 = grid.origin();
    const double len = grid.length();
    const double width = u_range.hi - u_range.lo;

    VerificationReport r;
    r.samples = samples;
    for (std::size_t s = 1; s <= samples; ++s) {
        double t[3];
        for (int d = 0; d < 3; ++d) t[d] = std::fmod(shift[d] + alpha[d] * static_cast<double>(s), 1.0);
        const double u1 = u_range.lo + width * t[0];
        // odd draws probe distant pairs, even draws probe local slopes
        const double u2 = (s % 2 == 1) ? u_range.lo + width * t[1] : u1 + 1e-3 * width * (2.0 * t[1] - 1.0);
        const double x = x0 + len * t[2];
        const double f1 = spec.eval(u1, x);
        const double f2 = spec.eval(u2, x);
        if (std::abs(u1 - u2) > 1e-12) {
            r.max_lipschitz_ratio = std::max(r.max_lipschitz_ratio, std::abs(f1 - f2) / std::abs(u1 - u2));
        }
        if (std::abs(u1) > 1e-12) {
            r.max_growth_ratio = std::max(r.max_growth_ratio, (std::abs(f1) - spec.envelope_h(x)) / std::abs(u1));
        }
    }
    const double slack = 1.0 + 1e-9;
    r.lipschitz_ok = r.max_lipschitz_ratio <= spec.lipschitz_l * slack;
    r.growth_ok = r.max_growth_ratio <= spec.growth_k * slack;
    return r;
}

}  // namespace bitrans
