#pragma once

// Brute-force references for auditing the spectral code paths. Everything here
// works in physical space with plain loops; nothing touches the FFT.

#include <cmath>
#include <functional>
#include <limits>

#include "bitrans/kernel.hpp"
#include "bitrans/solver.hpp"
#include "bitrans/symbol.hpp"

namespace bitrans::oracle {

/// O(N^2) rectangle rule for int G(x - y) f(y) dy: periodic wrap on the interval,
/// zero extension of G outside [-L, L) on the line.
inline Field direct_convolution(const Kernel& kernel, const Field& f) {
    require_same_grid(*kernel.grid(), *f.grid, "direct_convolution");
    const auto& grid = *f.grid;
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    const auto& g = kernel.samples().values;
    std::vector<double> out(grid.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t k = 0; k < n; ++k) {
            std::ptrdiff_t idx = 0;
            if (grid.whole_line()) {
                // x_i - y_k = (i - k) dx = x_{i - k + N/2}
                idx = i - k + n / 2;
                if (idx < 0 || idx >= n) continue;
            } else {
                idx = ((i - k) % n + n) % n;
            }
            acc += g[static_cast<std::size_t>(idx)] * f.values[static_cast<std::size_t>(k)];
        }
        out[static_cast<std::size_t>(i)] = acc * grid.dx();
    }
    return Field(f.grid, std::move(out));
}

/// Centered five-point stencil (f[k-2] - 4f[k-1] + 6f[k] - 4f[k+1] + f[k+2]) / dx^4.
inline Field fd_fourth_derivative(const Field& f) {
    const auto& grid = *f.grid;
    if (grid.size() < 64) throw InvalidArgument("fd_fourth_derivative needs N >= 64");
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    auto at = [&](std::ptrdiff_t k) -> double {
        if (grid.whole_line()) return (k < 0 || k >= n) ? 0.0 : f.values[static_cast<std::size_t>(k)];
        return f.values[static_cast<std::size_t>((k % n + n) % n)];
    };
    const double h4 = std::pow(grid.dx(), 4);
    std::vector<double> out(grid.size());
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] =
            (at(k - 2) - 4.0 * at(k - 1) + 6.0 * at(k) - 4.0 * at(k + 1) + at(k + 2)) / h4;
    }
    return Field(f.grid, std::move(out));
}

/// max over a uniform scan of [-p_max, p_max] of |G^/symbol| and |p^4 G^/symbol|.
/// On the interval each scan point is snapped to the nearest integer mode.
///
/// G^(p) is the direct quadrature (dx / sqrt(2 pi)) sum_k G(x_k) exp(-i p x_k), i.e. the
/// band-limited continuation of the grid spectrum. With a = 0 the removable point p = 0
/// takes the moment limit when G has zero mean and +inf otherwise.
inline double dense_sup_search(const Kernel& kernel, const OperatorParams& params, double p_max,
                               std::size_t samples) {
    if (samples < 100000) throw InvalidArgument("dense_sup_search needs at least 1e5 samples");
    if (!(p_max > 0.0)) throw InvalidArgument("p_max must be positive");
    const auto& grid = *kernel.grid();
    const auto& g = kernel.samples().values;
    const auto xs = grid.x();

    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax == 0.0) return 0.0;
    // contiguous support above the double-precision floor
    std::size_t first = 0;
    std::size_t last = g.size() - 1;
    while (std::abs(g[first]) <= 1e-18 * gmax) ++first;
    while (std::abs(g[last]) <= 1e-18 * gmax) --last;

    double mass = 0.0;
    double moment = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
        mass += g[k];
        moment += xs[k] * g[k];
    }
    mass *= grid.dx();
    moment *= grid.dx();
    const double scale = grid.dx() / std::sqrt(2.0 * pi);

    double best = 0.0;
    const double step = 2.0 * p_max / static_cast<double>(samples - 1);
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t s = 0; s < samples; ++s) {
        double p = -p_max + step * static_cast<double>(s);
        // the interval symbol lives on the integers: snap each scan point to its mode
        if (!grid.whole_line()) {
            p = std::round(p);
            if (p == previous) continue;
            previous = p;
        }
        const double p4 = p * p * p * p;
        const double lam_re = p4 - params.a;
        const double lam_im = -params.b * p;
        const double lam_abs = std::hypot(lam_re, lam_im);
        double ghat_abs = 0.0;
        double low = 0.0;
        if (params.a == 0.0 && std::abs(p) < 1e-12 * p_max) {
            if (std::abs(mass) > 1e-8 * std::max(1.0, kernel.l1())) return std::numeric_limits<double>::infinity();
            // the interval works in the zero-mean subspace, the line takes the moment limit
            low = grid.whole_line() ? std::abs(moment) / std::sqrt(2.0 * pi) / std::abs(params.b) : 0.0;
        } else {
            // exp(-i p x_k) by recurrence from the first significant sample
            const double c0 = std::cos(p * xs[first]);
            const double s0 = -std::sin(p * xs[first]);
            const double cw = std::cos(p * grid.dx());
            const double sw = -std::sin(p * grid.dx());
            double cr = c0;
            double ci = s0;
            double re = 0.0;
            double im = 0.0;
            for (std::size_t k = first; k <= last; ++k) {
                re += g[k] * cr;
                im += g[k] * ci;
                const double nr = cr * cw - ci * sw;
                ci = cr * sw + ci * cw;
                cr = nr;
            }
            ghat_abs = std::hypot(re, im) * scale;
            low = ghat_abs / lam_abs;
        }
        best = std::max(best, std::max(low, p4 * low));
    }
    return best;
}

/// Recipe for rebuilding one problem at any resolution.
struct ProblemRecipe {
    DomainSpec domain;
    OperatorParams params;
    std::function<double(double)> kernel_fn;
    NonlinearSpec nonlinearity;
    double epsilon_margin = 0.5;
    SolverOptions options;

    Problem build_at(std::size_t points) const {
        DomainSpec d = domain;
        std::visit([&](auto& v) { v.points = points; }, d);
        return Problem::create(params, Kernel::sample(build_grid(d), kernel_fn), nonlinearity, epsilon_margin,
                               options);
    }
    Problem build() const { return build_at(domain_points(domain)); }
};

struct ResolutionReport {
    std::size_t coarse_points = 0;
    std::size_t fine_points = 0;
    /// H^4 distance between the fine solution and the coarse solution interpolated onto the fine grid.
    double distance = 0.0;
    double coarse_residual = 0.0;
    double fine_residual = 0.0;
    bool pass = false;
};

/// Solves at N and 2N and compares the two solutions in H^4.
inline ResolutionReport resolution_doubling_check(const ProblemRecipe& recipe, double tol, double solve_tol = 1e-12,
                                                  std::size_t max_iter = 500) {
    const std::size_t n = domain_points(recipe.domain);
    const Problem coarse = recipe.build_at(n);
    const Problem fine = recipe.build_at(2 * n);
    const auto rc = fixed_point_solve(coarse, solve_tol, max_iter);
    const auto rf = fixed_point_solve(fine, solve_tol, max_iter);

    const auto& uc = rc.coefficients;
    auto diff = rf.coefficients;
    const auto half_c = static_cast<std::ptrdiff_t>(n / 2);
    const auto half_f = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t j = -half_c; j <= half_c; ++j) {
        const auto fi = static_cast<std::size_t>(j + half_f);
        if (std::abs(j) == half_c) {
            // split the coarse Nyquist coefficient evenly between +-N/2
            diff.coeffs[fi] -= 0.5 * uc.coeffs[0];
        } else {
            diff.coeffs[fi] -= uc.coeffs[static_cast<std::size_t>(j + half_c)];
        }
    }

    ResolutionReport r;
    r.coarse_points = n;
    r.fine_points = 2 * n;
    r.distance = h4_norm(diff);
    r.coarse_residual = rc.residual_l2;
    r.fine_residual = rf.residual_l2;
    r.pass = r.distance < tol;
    return r;
}

}  // namespace bitrans::oracle
