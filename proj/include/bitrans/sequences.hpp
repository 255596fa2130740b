#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "bitrans/solver.hpp"

namespace bitrans {

enum class FamilyMode { scaling, mollification, perturbation };

inline std::string to_string(FamilyMode m) {
    switch (m) {
        case FamilyMode::scaling: return "scaling";
        case FamilyMode::mollification: return "mollification";
        case FamilyMode::perturbation: return "perturbation";
    }
    return "unknown";
}

/// A family of kernels G_m converging to `limit` as m -> infinity.
struct KernelSequence {
    std::function<Kernel(int m)> generator;
    Kernel limit;
    FamilyMode mode = FamilyMode::scaling;

    Kernel at(int m) const {
        if (m < 1) throw InvalidArgument("sequence index must be >= 1");
        Kernel k = generator(m);
        require_same_grid(*k.grid(), *limit.grid(), "kernel sequence member");
        return k;
    }
};

/// G_m = (1 + c/m) G
inline KernelSequence scaling_family(const Kernel& g, double c = 1.0) {
    return {[g, c](int m) { return g.scaled(1.0 + c / m); }, g, FamilyMode::scaling};
}

/// G_m = G convolved with a unit-mass Gaussian of width 1/m.
inline KernelSequence mollification_family(const Kernel& g) {
    return {[g](int m) {
                const double sigma = 1.0 / m;
                auto s = g.spectrum();
                const auto freq = s.grid->freq();
                for (std::size_t i = 0; i < s.size(); ++i) {
                    s.coeffs[i] *= std::exp(-0.5 * sigma * sigma * freq[i] * freq[i]);
                }
                return Kernel::from_samples(inverse_transform(s));
            },
            g, FamilyMode::mollification};
}

/// G_m = G + D/m with D projected to zero mean, so orthogonality is inherited by every member.
inline KernelSequence perturbation_family(const Kernel& g, const Kernel& d) {
    require_same_grid(*g.grid(), *d.grid(), "perturbation family");
    Kernel dz = d.projected_zero_mean();
    return {[g, dz](int m) { return Kernel::from_samples(g.samples() + (1.0 / m) * dz.samples()); }, g,
            FamilyMode::perturbation};
}

struct KernelConvergenceRow {
    int m = 0;
    double l1_distance = 0.0;
    /// ||x G_m - x G||_{L1}; reported on the whole line.
    std::optional<double> moment_distance;
    /// sup |G_m^/symbol - G^/symbol| over the grid.
    double multiplier_sup_distance = 0.0;
    /// sup |p^4 (G_m^ - G^)/symbol| over the grid.
    double multiplier_high_sup_distance = 0.0;
    double n_value_m = 0.0;
    double n_value_limit = 0.0;
    bool gate_ok = true;
};

namespace detail {

/// Multiplier with the same a = 0 origin handling the solver uses.
inline SpectralField solver_multiplier(const Kernel& k, const OperatorParams& params) {
    return multiplier(params.a == 0.0 ? k.projected_zero_mean() : k, params);
}

}  // namespace detail

/// Per-m distances between G_m and G and between their multipliers. Members that fail
/// the a = 0 gate are flagged (gate_ok = false) and their multiplier distances left at +inf.
inline std::vector<KernelConvergenceRow> kernel_convergence_report(const KernelSequence& seq,
                                                                   const OperatorParams& params,
                                                                   const std::vector<int>& m_list) {
    if (m_list.empty()) throw InvalidArgument("m_list must not be empty");
    const auto& limit = seq.limit;
    const bool line = limit.grid()->whole_line();
    const auto limit_report = compute_N(limit, params);
    const bool limit_ok = check_solvability(limit, params).solvable;
    std::optional<SpectralField> limit_mult;
    if (limit_ok) limit_mult = detail::solver_multiplier(limit, params);

    std::vector<KernelConvergenceRow> rows;
    for (int m : m_list) {
        const Kernel gm = seq.at(m);
        KernelConvergenceRow row;
        row.m = m;
        const Field diff = gm.samples() - limit.samples();
        row.l1_distance = l1_norm(diff);
        if (line) row.moment_distance = first_moment_l1(diff);
        row.gate_ok = check_solvability(gm, params).solvable;
        row.n_value_m = compute_N(gm, params).n_value;
        row.n_value_limit = limit_report.n_value;
        if (row.gate_ok && limit_mult) {
            const auto d = detail::solver_multiplier(gm, params) - *limit_mult;
            std::tie(row.multiplier_sup_distance, row.multiplier_high_sup_distance) = grid_sups(d);
        } else {
            row.multiplier_sup_distance = std::numeric_limits<double>::infinity();
            row.multiplier_high_sup_distance = std::numeric_limits<double>::infinity();
        }
        rows.push_back(row);
    }
    return rows;
}

struct UniformContractionReport {
    bool pass = true;
    std::optional<int> first_violation;
    std::vector<double> q_values;
    double q_limit = 0.0;
    bool limit_pass = true;
};

/// Checks 2 sqrt(pi) N_m l <= 1 - epsilon for every listed m and for the limit kernel.
inline UniformContractionReport uniform_contraction_check(const KernelSequence& seq, const OperatorParams& params,
                                                          double l, double epsilon, const std::vector<int>& m_list) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
    UniformContractionReport r;
    for (int m : m_list) {
        const double q = contraction_constant(compute_N(seq.at(m), params).n_value, l);
        r.q_values.push_back(q);
        if (!(q <= 1.0 - epsilon) && !r.first_violation) {
            r.first_violation = m;
            r.pass = false;
        }
    }
    r.q_limit = contraction_constant(compute_N(seq.limit, params).n_value, l);
    r.limit_pass = r.q_limit <= 1.0 - epsilon;
    return r;
}

struct SequenceRow {
    int m = 0;
    double l1_distance = 0.0;
    std::optional<double> moment_distance;
    double multiplier_sup_distance = 0.0;
    double multiplier_high_sup_distance = 0.0;
    double n_value_m = 0.0;
    double solution_h4_distance = 0.0;
    double solution_l2_distance = 0.0;
    /// (sqrt(2 pi)/epsilon) sup|G_m^/symbol - G^/symbol| ||F(u, .)||_{L2}
    double theorem_bound = 0.0;
    std::size_t iterations = 0;
};

struct SequenceReport {
    FamilyMode mode = FamilyMode::scaling;
    std::vector<SequenceRow> per_m;
    SolveReport limit_solution;
    /// Least-squares slope of log(solution_h4_distance) against log(m).
    std::optional<double> fitted_slope;
    bool bounds_hold = true;
};

/// Least-squares slope of log y against log x over entries with y > 0.
inline std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::nullopt;
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

struct SequenceSettings {
    double epsilon_margin = 0.5;
    double tol = 1e-12;
    std::size_t max_iter = 500;
    SolverOptions options;
    /// Number of concurrent per-m solves; 1 runs sequentially.
    unsigned parallel = 1;
};

/// Solves the limiting problem and every G_m problem, then compares u_m with u.
inline SequenceReport sequence_solve(const OperatorParams& params, const NonlinearSpec& nonlinearity,
                                     const KernelSequence& seq, const std::vector<int>& m_list,
                                     const SequenceSettings& settings) {
    const auto kernel_rows = kernel_convergence_report(seq, params, m_list);
    for (const auto& row : kernel_rows) {
        if (!row.gate_ok) throw SolvabilityError("orthogonality fails for member m = " + std::to_string(row.m));
    }
    const auto uniform = uniform_contraction_check(seq, params, nonlinearity.lipschitz_l, settings.epsilon_margin, m_list);
    if (!uniform.pass) {
        throw ContractionError("uniform contraction fails at m = " + std::to_string(*uniform.first_violation));
    }

    const Problem limit_problem =
        Problem::create(params, seq.limit, nonlinearity, settings.epsilon_margin, settings.options);
    SequenceReport report;
    report.mode = seq.mode;
    report.limit_solution = fixed_point_solve(limit_problem, settings.tol, settings.max_iter);
    const Field& u = report.limit_solution.solution;
    const double f_norm = l2_norm(evaluate_field(nonlinearity, u));

    auto context = [](int m) { return "sequence member m = " + std::to_string(m) + ": "; };
    auto solve_member = [&](std::size_t idx) {
        const int m = m_list[idx];
        try {
            const Problem pm = Problem::create(params, seq.at(m), nonlinearity, settings.epsilon_margin, settings.options);
            return fixed_point_solve(pm, settings.tol, settings.max_iter);
        } catch (const SolvabilityError& e) {
            throw SolvabilityError(context(m) + e.what());
        } catch (const ContractionError& e) {
            throw ContractionError(context(m) + e.what());
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(context(m) + e.what());
        }
    };

    std::vector<SolveReport> member(m_list.size());
    const unsigned workers = std::max(1u, settings.parallel);
    for (std::size_t start = 0; start < m_list.size(); start += workers) {
        std::vector<std::future<SolveReport>> batch;
        const std::size_t stop = std::min(m_list.size(), start + workers);
        for (std::size_t i = start; i < stop; ++i) {
            batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, solve_member, i));
        }
        for (std::size_t i = start; i < stop; ++i) member[i] = batch[i - start].get();
    }

    std::vector<double> ms;
    std::vector<double> dists;
    for (std::size_t i = 0; i < m_list.size(); ++i) {
        const auto& kr = kernel_rows[i];
        SequenceRow row;
        row.m = kr.m;
        row.l1_distance = kr.l1_distance;
        row.moment_distance = kr.moment_distance;
        row.multiplier_sup_distance = kr.multiplier_sup_distance;
        row.multiplier_high_sup_distance = kr.multiplier_high_sup_distance;
        row.n_value_m = kr.n_value_m;
        row.iterations = member[i].iterations;
        const auto d = member[i].coefficients - report.limit_solution.coefficients;
        row.solution_h4_distance = h4_norm(d);
        row.solution_l2_distance = l2_norm(d);
        row.theorem_bound = sqrt_two_pi / settings.epsilon_margin * kr.multiplier_sup_distance * f_norm;
        if (row.solution_l2_distance > row.theorem_bound * (1.0 + 1e-3) + 2.0 * settings.tol) {
            report.bounds_hold = false;
        }
        ms.push_back(kr.m);
        dists.push_back(row.solution_h4_distance);
        report.per_m.push_back(std::move(row));
    }
    report.fitted_slope = loglog_slope(ms, dists);
    return report;
}

}  // namespace bitrans
