#pragma once

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "bitrans/kernel.hpp"

namespace bitrans {

/// Coefficients of d^4/dx^4 - b d/dx - a.
struct OperatorParams {
    double a = 0.0;
    double b = 1.0;

    void validate() const {
        if (!std::isfinite(a) || a < 0.0) throw InvalidArgument("operator coefficient a must be >= 0");
        if (!std::isfinite(b) || b == 0.0) throw InvalidArgument("drift coefficient b must be nonzero");
    }
};

/// p^4 - a - i b p
inline complex symbol_value(double p, const OperatorParams& params) {
    const double p2 = p * p;
    return {p2 * p2 - params.a, -params.b * p};
}

/// Symbol of the discrete operator at storage index i. The discrete first derivative
/// annihilates the unpaired Nyquist mode, so there the drift term drops out.
inline complex discrete_symbol(const Grid& grid, std::size_t i, const OperatorParams& params) {
    const double p = grid.freq()[i];
    if (i == grid.nyquist_index()) {
        const double p2 = p * p;
        return {p2 * p2 - params.a, 0.0};
    }
    return symbol_value(p, params);
}

/// Guard below which |symbol| at a retained mode is treated as a division by zero.
inline constexpr double symbol_guard = 1e-14;

/// min |p^4 - a - i b p| over the grid's frequencies. On the whole line the minimum
/// is refined by local search around p = 0, p = +-a^(1/4) and the best grid point.
inline double spectrum_origin_distance(const OperatorParams& params, const Grid& grid) {
    params.validate();
    const auto freq = grid.freq();
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < freq.size(); ++i) {
        const double v = std::abs(symbol_value(freq[i], params));
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    if (!grid.whole_line() || best_val == 0.0) return best_val;

    const double dp = grid.dp();
    const double pmax = grid.max_frequency();
    auto refine = [&](double centre) {
        const double lo = std::max(-pmax, centre - dp);
        const double hi = std::min(pmax, centre + dp);
        if (!(lo < hi)) return;
        auto f = [&](double p) { return std::norm(symbol_value(p, params)); };
        std::uintmax_t iters = 200;
        auto [p, v2] = boost::math::tools::brent_find_minima(f, lo, hi, 52, iters);
        best_val = std::min(best_val, std::sqrt(v2));
        (void)p;
    };
    const double root = std::pow(params.a, 0.25);
    refine(0.0);
    refine(root);
    refine(-root);
    refine(freq[best]);
    return best_val;
}

struct SolvabilityReport {
    bool solvable = true;
    /// |(G, 1)_{L2}|
    double orthogonality_residual = 0.0;
    bool moment_finite = true;
    double tolerance = 0.0;
};

/// Orthogonality tolerance 1e-8 * max(1, ||G||_{L1}).
inline double orthogonality_tolerance(const Kernel& kernel) {
    return 1e-8 * std::max(1.0, kernel.l1());
}

/// For a > 0 the multiplier is always bounded. For a = 0 it is bounded iff G is
/// orthogonal to constants (and, on the line, x G is integrable).
inline SolvabilityReport check_solvability(const Kernel& kernel, const OperatorParams& params) {
    params.validate();
    SolvabilityReport r;
    r.orthogonality_residual = std::abs(kernel.integral());
    r.tolerance = orthogonality_tolerance(kernel);
    r.moment_finite = !kernel.grid()->whole_line() || std::isfinite(kernel.moment1());
    if (params.a > 0.0) {
        r.solvable = true;
    } else {
        r.solvable = r.orthogonality_residual <= r.tolerance && r.moment_finite;
    }
    return r;
}

inline void require_solvable(const Kernel& kernel, const OperatorParams& params) {
    const auto s = check_solvability(kernel, params);
    if (!s.solvable) {
        throw SolvabilityError("a = 0 requires (G, 1) = 0; observed |(G, 1)| = " +
                               std::to_string(s.orthogonality_residual) + " > tolerance " +
                               std::to_string(s.tolerance));
    }
}

/// Value of G^(p) / (p^4 - a - i b p) at p = 0 when a = 0 and G^(0) = 0 on the line.
inline complex origin_limit(const Kernel& kernel, const OperatorParams& params) {
    return kernel.spectrum_slope_at_zero() / complex(0.0, -params.b);
}

/// Coefficient-wise G^ / symbol on the kernel's grid (the resolvent multiplier).
///
/// With a = 0 the solvability gate must pass; the origin entry is then the limit
/// G^'(0) / (-i b) on the line and 0 on the interval (zero-mean subspace).
inline SpectralField multiplier(const Kernel& kernel, const OperatorParams& params) {
    params.validate();
    const auto& grid = *kernel.grid();
    const bool singular_origin = params.a == 0.0;
    if (singular_origin) require_solvable(kernel, params);

    auto m = SpectralField::zeros(kernel.grid());
    const auto& g = kernel.spectrum().coeffs;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (singular_origin && i == grid.zero_index()) {
            m.coeffs[i] = grid.whole_line() ? origin_limit(kernel, params) : complex{};
            continue;
        }
        const complex lam = discrete_symbol(grid, i, params);
        if (std::abs(lam) < symbol_guard) {
            throw NumericalError("multiplier: symbol vanishes at retained frequency p = " +
                                 std::to_string(grid.freq()[i]));
        }
        m.coeffs[i] = g[i] / lam;
    }
    return m;
}

/// max |m(p)| and max |p^4 m(p)| over the grid.
inline std::pair<double, double> grid_sups(const SpectralField& m) {
    const auto freq = m.grid->freq();
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double a = std::abs(m.coeffs[i]);
        lo = std::max(lo, a);
        hi = std::max(hi, std::pow(freq[i], 4) * a);
    }
    return {lo, hi};
}

/// Raw grid sup of |G^/symbol| over every mode where the symbol is nonzero: no
/// projection, no limit at the origin. Used to exhibit the a = 0 blow-up.
inline double raw_grid_sup_low(const Kernel& kernel, const OperatorParams& params) {
    const auto& grid = *kernel.grid();
    const auto& g = kernel.spectrum().coeffs;
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const complex lam = discrete_symbol(grid, i, params);
        if (std::abs(lam) < symbol_guard) continue;
        s = std::max(s, std::abs(g[i] / lam));
    }
    return s;
}

/// N_{a,b} (line) or its interval analogue, with the parts it is assembled from.
struct MultiplierReport {
    OperatorParams params;
    DomainSpec domain;
    double n_value = 0.0;
    double sup_low = 0.0;
    double sup_high = 0.0;
    double tail_bound = 0.0;
    double min_abs_symbol = 0.0;
    bool solvable = true;
    double orthogonality_residual = 0.0;
    double moment1 = 0.0;
};

namespace detail {

/// Local maxima of v (excluding index 0, the Nyquist mode), largest first.
inline std::vector<std::size_t> top_local_maxima(const std::vector<double>& v, std::size_t count) {
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double left = i > 1 ? v[i - 1] : -1.0;
        const double right = i + 1 < v.size() ? v[i + 1] : -1.0;
        if (v[i] > 0.0 && v[i] >= left && v[i] >= right) peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    if (peaks.size() > count) peaks.resize(count);
    return peaks;
}

}  // namespace detail

/// Computes N = max(sup |G^/symbol|, sup |p^4 G^/symbol|).
///
/// The grid sup uses the discrete symbol. On the whole line each leading local
/// maximum is refined off-grid with the kernel's exact transform of its samples.
/// Frequencies beyond the grid are covered by the decomposition
///   p^4 G^/symbol = G^ + a G^/symbol + i b p G^/symbol
/// with sup |G^| beyond the band estimated from the outer eighth of the spectrum.
inline MultiplierReport compute_N(const Kernel& kernel, const OperatorParams& params) {
    params.validate();
    const auto& grid = *kernel.grid();
    MultiplierReport r;
    r.params = params;
    r.domain = grid.domain();
    r.moment1 = kernel.moment1();
    r.min_abs_symbol = spectrum_origin_distance(params, grid);

    const auto solv = check_solvability(kernel, params);
    r.solvable = solv.solvable;
    r.orthogonality_residual = solv.orthogonality_residual;

    const bool singular_origin = params.a == 0.0;
    const auto& g = kernel.spectrum().coeffs;
    const auto freq = grid.freq();
    const std::size_t n = grid.size();

    std::vector<double> low(n, 0.0);
    std::vector<double> high(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (singular_origin && i == grid.zero_index()) {
            if (grid.whole_line() && r.solvable) low[i] = std::abs(origin_limit(kernel, params));
            continue;
        }
        const complex lam = discrete_symbol(grid, i, params);
        if (std::abs(lam) < symbol_guard) {
            low[i] = std::numeric_limits<double>::infinity();
            continue;
        }
        low[i] = std::abs(g[i] / lam);
        high[i] = std::pow(freq[i], 4) * low[i];
    }
    double sup_low = *std::max_element(low.begin(), low.end());
    double sup_high = *std::max_element(high.begin(), high.end());

    if (grid.whole_line() && r.solvable) {
        const double dp = grid.dp();
        const complex limit = singular_origin ? origin_limit(kernel, params) : complex{};
        auto ratio = [&](double p) -> complex {
            if (singular_origin && std::abs(p) < 1e-7 * dp) return limit;
            return kernel.transform_at(p) / symbol_value(p, params);
        };
        auto refine = [&](std::size_t i, bool weighted) {
            const double lo = freq[i] - dp;
            const double hi = freq[i] + dp;
            auto neg = [&](double p) {
                const double w = weighted ? std::pow(p, 4) : 1.0;
                return -w * std::abs(ratio(p));
            };
            std::uintmax_t iters = 200;
            auto [p, v] = boost::math::tools::brent_find_minima(neg, lo, hi, 52, iters);
            (void)p;
            return -v;
        };
        for (std::size_t i : detail::top_local_maxima(low, 6)) sup_low = std::max(sup_low, refine(i, false));
        for (std::size_t i : detail::top_local_maxima(high, 6)) sup_high = std::max(sup_high, refine(i, true));
    }

    // Tail beyond the retained band.
    double g_tail = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(n / 2);
        if (8 * static_cast<std::size_t>(std::abs(j)) >= 3 * n) g_tail = std::max(g_tail, std::abs(g[i]));
    }
    const double pmax = grid.max_frequency();
    const double symbol_floor = std::max(std::pow(pmax, 4) - params.a, std::abs(params.b) * pmax);
    const double tail_low = g_tail / symbol_floor;
    const double tail_high = g_tail * (2.0 + params.a / symbol_floor);
    r.tail_bound = std::max(tail_low, tail_high);

    r.sup_low = std::max(sup_low, tail_low);
    r.sup_high = std::max(sup_high, tail_high);
    if (singular_origin && !r.solvable) r.sup_low = std::numeric_limits<double>::infinity();
    r.n_value = std::max(r.sup_low, r.sup_high);
    return r;
}

}  // namespace bitrans
