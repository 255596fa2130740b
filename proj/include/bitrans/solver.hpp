#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bitrans/kernel.hpp"
#include "bitrans/nonlinearity.hpp"
#include "bitrans/spectral.hpp"
#include "bitrans/symbol.hpp"

namespace bitrans {

struct SolverOptions {
    /// Apply the 2/3 rule to F(v) before the linear solve.
    bool dealias = false;
    /// Whole line: magnitude |u| must fall below at |x| >= L/2 for the truncation to count as adequate.
    double decay_threshold = 1e-10;
};

/// 2 sqrt(pi) N l, the Lipschitz constant of the fixed-point map in H^4.
inline double contraction_constant(double n_value, double l) {
    return 2.0 * std::sqrt(pi) * n_value * l;
}

/// Everything that defines one instance of
///   -u'''' + b u' + a u + int G(x - y) F(u(y), y) dy = 0.
///
/// Construction enforces the solvability gate. For a = 0 the kernel is projected to
/// exact zero mean, and on the interval the iteration runs in the zero-mean subspace.
class Problem {
public:
    static Problem create(OperatorParams params, const Kernel& kernel, NonlinearSpec nonlinearity,
                          double epsilon_margin, SolverOptions options = {}) {
        params.validate();
        if (!(epsilon_margin > 0.0 && epsilon_margin < 1.0)) {
            throw InvalidArgument("epsilon margin must lie in (0, 1)");
        }
        if (!nonlinearity.eval) throw InvalidArgument("nonlinearity has no evaluation function");
        if (!kernel.grid()->whole_line() && !nonlinearity.periodic_compatible) {
            throw InvalidArgument("nonlinearity must satisfy F(u, 0) = F(u, 2 pi) on the interval");
        }
        Problem p;
        p.params_ = params;
        if (params.a == 0.0) {
            require_solvable(kernel, params);
            p.kernel_ = kernel.projected_zero_mean();
        } else {
            p.kernel_ = kernel;
        }
        p.nonlinearity_ = std::move(nonlinearity);
        p.epsilon_ = epsilon_margin;
        p.options_ = options;
        p.constrained_ = params.a == 0.0 && !kernel.grid()->whole_line();
        p.multiplier_ = multiplier(p.kernel_, params);
        p.report_ = compute_N(p.kernel_, params);
        return p;
    }

    const OperatorParams& params() const { return params_; }
    const Kernel& kernel() const { return kernel_; }
    const NonlinearSpec& nonlinearity() const { return nonlinearity_; }
    const GridPtr& grid() const { return kernel_.grid(); }
    double epsilon_margin() const { return epsilon_; }
    const SolverOptions& options() const { return options_; }
    bool constrained_zero_mean() const { return constrained_; }
    const SpectralField& multiplier_field() const { return multiplier_; }
    const MultiplierReport& multiplier_report() const { return report_; }
    double n_value() const { return report_.n_value; }
    double q_bound() const { return contraction_constant(report_.n_value, nonlinearity_.lipschitz_l); }
    bool contraction_certified() const { return q_bound() <= 1.0 - epsilon_; }

private:
    Problem() = default;

    OperatorParams params_;
    Kernel kernel_;
    NonlinearSpec nonlinearity_;
    double epsilon_ = 0.5;
    SolverOptions options_;
    bool constrained_ = false;
    SpectralField multiplier_;
    MultiplierReport report_;
};

/// Coefficients u^(p) = sqrt(2 pi) G^(p) f^(p) / (p^4 - a - i b p), f = F(v(.), .).
inline SpectralField linear_solve_spectral(const Problem& problem, const Field& v) {
    require_same_grid(*problem.grid(), *v.grid, "linear_solve");
    if (!v.all_finite()) throw NumericalError("linear_solve: input field is not finite");
    auto fk = forward_transform(evaluate_field(problem.nonlinearity(), v));
    if (problem.options().dealias) fk = dealias(std::move(fk));
    const auto& m = problem.multiplier_field().coeffs;
    for (std::size_t i = 0; i < fk.size(); ++i) fk.coeffs[i] *= sqrt_two_pi * m[i];
    if (problem.constrained_zero_mean()) fk.coeffs[problem.grid()->zero_index()] = 0.0;
    return fk;
}

inline Field linear_solve(const Problem& problem, const Field& v) {
    return inverse_transform(linear_solve_spectral(problem, v));
}

namespace detail {

inline double residual_from(const Problem& problem, const std::vector<std::complex<long double>>& uk,
                            const Field& u) {
    const auto& grid = *problem.grid();
    const auto fk = forward_coefficients_ld(evaluate_field(problem.nonlinearity(), u));
    const auto gk = forward_coefficients_ld(problem.kernel().samples());
    const long double root = std::sqrt(2.0L * std::numbers::pi_v<long double>);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const complex lam = discrete_symbol(grid, i, problem.params());
        const std::complex<long double> lam_ld(lam.real(), lam.imag());
        // the projected kernel has an exactly vanishing zero mode
        const auto g = (problem.params().a == 0.0 && i == grid.zero_index()) ? std::complex<long double>{} : gk[i];
        acc += std::norm(-lam_ld * uk[i] + root * g * fk[i]);
    }
    return static_cast<double>(std::sqrt(acc * static_cast<long double>(grid.dp())));
}

}  // namespace detail

/// || -u'''' + b u' + a u + G * F(u) ||_{L2}, assembled mode by mode and summed by
/// Plancherel. Transforms run in long double: at N = 64 the p^4 factor alone lifts
/// double round-off in u^ to ~1e-10.
inline double residual(const Problem& problem, const Field& u) {
    require_same_grid(*problem.grid(), *u.grid, "residual");
    return detail::residual_from(problem, detail::forward_coefficients_ld(u), u);
}

/// Residual of the band-limited function with coefficients uk. Avoids the round-off of
/// sampling u, which p^4 amplifies to ~1e-8 at N = 256.
inline double residual(const Problem& problem, const SpectralField& uk) {
    require_same_grid(*problem.grid(), *uk.grid, "residual");
    std::vector<std::complex<long double>> c(uk.coeffs.begin(), uk.coeffs.end());
    return detail::residual_from(problem, c, inverse_transform(uk));
}

struct NontrivialityReport {
    bool nonzero_overlap = false;
    /// Whole line: measure of the overlap of the two supports. Interval: number of modes.
    double overlap_measure = 0.0;
    /// Interval only: modes n with |G_n F(0, .)_n| above threshold.
    std::vector<long> modes;
};

/// Whether the supports of G^ and (F(0, .))^ overlap; if they do the fixed point is not zero.
inline NontrivialityReport nontriviality_check(const Problem& problem) {
    const auto& grid = *problem.grid();
    const auto f0 = forward_transform(evaluate_field(problem.nonlinearity(), Field::zeros(problem.grid())));
    const auto& g = problem.kernel().spectrum();
    NontrivialityReport r;
    const double fmax = f0.max_abs();
    const double gmax = g.max_abs();
    if (fmax == 0.0 || gmax == 0.0) return r;

    if (grid.whole_line()) {
        const double tf = 1e-10 * fmax;
        const double tg = 1e-10 * gmax;
        std::size_t cells = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::abs(g.coeffs[i]) > tg && std::abs(f0.coeffs[i]) > tf) ++cells;
        }
        r.overlap_measure = static_cast<double>(cells) * grid.dp();
    } else {
        const double tau = 1e-10 * fmax * gmax;
        const auto freq = grid.freq();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (problem.constrained_zero_mean() && i == grid.zero_index()) continue;
            if (std::abs(g.coeffs[i] * f0.coeffs[i]) > tau) r.modes.push_back(std::lround(freq[i]));
        }
        r.overlap_measure = static_cast<double>(r.modes.size());
    }
    r.nonzero_overlap = r.overlap_measure > 0.0;
    return r;
}

struct SolveReport {
    Field solution;
    /// Spectral coefficients of the solution; H^4 distances should be taken here.
    SpectralField coefficients;
    std::size_t iterations = 0;
    /// ||u_{k+1} - u_k||_{H^4} for each Picard step.
    std::vector<double> step_norms;
    /// max_k step_norms[k+1] / step_norms[k] over steps above round-off.
    double measured_ratio = 0.0;
    double q_bound = 0.0;
    double n_value = 0.0;
    double residual_l2 = 0.0;
    bool nontrivial = false;
    double solution_h4 = 0.0;
    /// Whole line: max |u(x)| over |x| >= L/2.
    double boundary_leak = 0.0;
    bool truncation_ok = true;
};

/// max |u(x)| over the outer half of the truncated line; 0 on the interval.
inline double boundary_leak(const Field& u) {
    if (!u.grid->whole_line()) return 0.0;
    const double half = 0.5 * u.grid->length() / 2.0;
    const auto xs = u.grid->x();
    double m = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (std::abs(xs[k]) >= half) m = std::max(m, std::abs(u.values[k]));
    }
    return m;
}

inline Field remove_mean(Field u) {
    auto uk = forward_transform(u);
    uk.coeffs[u.grid->zero_index()] = 0.0;
    return inverse_transform(uk);
}

/// Picard iteration u_{k+1} = linear_solve(u_k).
///
/// Refuses to start unless 2 sqrt(pi) N l <= 1 - epsilon. Stops once the a-priori
/// bound q/(1-q) ||u_{k+1} - u_k|| on the distance to the fixed point drops below tol.
/// Three consecutive growing steps abort as divergence.
inline SolveReport fixed_point_solve(const Problem& problem, const Field& initial, double tol,
                                     std::size_t max_iter) {
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    require_same_grid(*problem.grid(), *initial.grid, "fixed_point_solve");
    const double q = problem.q_bound();
    if (!problem.contraction_certified()) {
        throw ContractionError("contraction condition violated: 2 sqrt(pi) N l = " + std::to_string(q) +
                               " > 1 - epsilon = " + std::to_string(1.0 - problem.epsilon_margin()));
    }

    SolveReport r;
    r.q_bound = q;
    r.n_value = problem.n_value();
    Field u = problem.constrained_zero_mean() ? remove_mean(initial) : initial;
    // steps are measured on coefficients; resampling would add p^4-amplified round-off
    SpectralField uk = forward_transform(u);
    int growing = 0;
    bool converged = false;
    for (std::size_t k = 0; k < max_iter; ++k) {
        SpectralField next = linear_solve_spectral(problem, u);
        const double step = h4_norm(next - uk);
        const double floor = 1e-11 * std::max(1.0, h4_norm(next));
        if (!r.step_norms.empty()) {
            const double prev = r.step_norms.back();
            if (prev > floor && step > floor) {
                r.measured_ratio = std::max(r.measured_ratio, step / prev);
                growing = step > prev ? growing + 1 : 0;
                if (growing >= 3) {
                    throw ConvergenceError("Picard steps grew three times in a row; audit the declared "
                                           "Lipschitz constant l = " +
                                           std::to_string(problem.nonlinearity().lipschitz_l));
                }
            }
        }
        r.step_norms.push_back(step);
        uk = std::move(next);
        u = inverse_transform(uk);
        r.iterations = k + 1;
        if (q == 0.0 || q * step <= tol * (1.0 - q) || step <= floor * 1e-3) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("no convergence within " + std::to_string(max_iter) +
                               " iterations; last step " + std::to_string(r.step_norms.back()));
    }

    r.residual_l2 = residual(problem, uk);
    r.nontrivial = nontriviality_check(problem).nonzero_overlap;
    r.solution_h4 = h4_norm(uk);
    r.boundary_leak = boundary_leak(u);
    r.truncation_ok = r.boundary_leak <= problem.options().decay_threshold;
    r.solution = std::move(u);
    r.coefficients = std::move(uk);
    return r;
}

inline SolveReport fixed_point_solve(const Problem& problem, double tol, std::size_t max_iter) {
    return fixed_point_solve(problem, Field::zeros(problem.grid()), tol, max_iter);
}

}  // namespace bitrans
