#include <gtest/gtest.h>

#include "bitrans/sequences.hpp"

using namespace bitrans;

namespace {

GridPtr interval(std::size_t n) { return build_grid(PeriodicInterval{n}); }

Kernel cosine_kernel(const GridPtr& g) {
    return Kernel::sample(g, [](double x) { return std::cos(x) / pi; });
}

const std::vector<int> powers{1, 2, 4, 8, 16};

}  // namespace

TEST(KernelConvergence, ConstantFamilyHasZeroDistances) {
    auto g = interval(64);
    const Kernel k = cosine_kernel(g);
    KernelSequence seq{[k](int) { return k; }, k, FamilyMode::scaling};
    for (const auto& row : kernel_convergence_report(seq, {1.0, 1.0}, powers)) {
        EXPECT_EQ(row.l1_distance, 0.0);
        EXPECT_EQ(row.multiplier_sup_distance, 0.0);
        EXPECT_EQ(row.multiplier_high_sup_distance, 0.0);
        EXPECT_EQ(row.n_value_m, row.n_value_limit);
    }
}

TEST(KernelConvergence, ScalingIsHomogeneous) {
    auto g = build_grid(WholeLine{20.0, 256});
    const Kernel k = Kernel::sample(g, [](double x) { return std::exp(-x * x); });
    const OperatorParams prm{1.0, 1.0};
    const auto [lo, hi] = grid_sups(multiplier(k, prm));
    for (const auto& row : kernel_convergence_report(scaling_family(k), prm, powers)) {
        EXPECT_NEAR(row.l1_distance, k.l1() / row.m, 1e-14 * k.l1());
        EXPECT_NEAR(row.multiplier_sup_distance, lo / row.m, 1e-14 * lo);
        EXPECT_NEAR(row.multiplier_high_sup_distance, hi / row.m, 1e-14 * hi);
        ASSERT_TRUE(row.moment_distance.has_value());
    }
}

TEST(KernelConvergence, L1BoundOnMultiplierDistance) {
    // sup |G_m^/lambda - G^/lambda| <= ||G_m - G||_L1 / (sqrt(2 pi) min|lambda|)
    auto g = build_grid(WholeLine{20.0, 256});
    const Kernel k = Kernel::sample(g, [](double x) { return std::exp(-x * x); });
    const OperatorParams prm{2.0, 1.0};
    const double dist = spectrum_origin_distance(prm, *g);
    for (const auto& row : kernel_convergence_report(mollification_family(k), prm, powers)) {
        EXPECT_LE(row.multiplier_sup_distance, row.l1_distance / (sqrt_two_pi * dist) * (1.0 + 1e-9));
    }
}

TEST(KernelConvergence, NValuesConvergeMonotonically) {
    auto g = build_grid(WholeLine{20.0, 256});
    const Kernel k = Kernel::sample(g, [](double x) { return std::exp(-x * x); });
    const auto rows = kernel_convergence_report(mollification_family(k), {1.0, 1.0}, powers);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LE(std::abs(rows[i].n_value_m - rows[i].n_value_limit),
                  std::abs(rows[i - 1].n_value_m - rows[i - 1].n_value_limit) + 1e-15);
    }
    EXPECT_LT(std::abs(rows.back().n_value_m - rows.back().n_value_limit), 1e-2 * rows.back().n_value_limit);
}

TEST(KernelConvergence, PerturbationKeepsZeroMean) {
    auto g = build_grid(WholeLine{20.0, 256});
    const Kernel k = Kernel::sample(g, [](double x) { return x * std::exp(-x * x); });
    const Kernel d = Kernel::sample(g, [](double x) { return std::exp(-(x - 1) * (x - 1)); });
    const auto seq = perturbation_family(k, d);
    for (int m : powers) EXPECT_TRUE(check_solvability(seq.at(m), {0.0, 1.0}).solvable);
    for (const auto& row : kernel_convergence_report(seq, {0.0, 1.0}, powers)) EXPECT_TRUE(row.gate_ok);
}

TEST(KernelConvergence, FlagsGateViolation) {
    auto g = build_grid(WholeLine{20.0, 256});
    const Kernel k = Kernel::sample(g, [](double x) { return x * std::exp(-x * x); });
    const Kernel bump = Kernel::sample(g, [](double x) { return std::exp(-x * x); });
    KernelSequence seq{[k, bump](int m) { return Kernel::from_samples(k.samples() + (1.0 / m) * bump.samples()); }, k,
                       FamilyMode::perturbation};
    const auto rows = kernel_convergence_report(seq, {0.0, 1.0}, {1, 2});
    EXPECT_FALSE(rows[0].gate_ok);
    EXPECT_TRUE(std::isinf(rows[0].multiplier_sup_distance));
    EXPECT_THROW(sequence_solve({0.0, 1.0}, source_nonlinearity(source::gaussian(1.0)), seq, {1, 2}, {}),
                 SolvabilityError);
}

TEST(UniformContraction, ZeroKernels) {
    auto g = interval(32);
    const Kernel z = Kernel::zero(g);
    KernelSequence seq{[z](int) { return z; }, z, FamilyMode::scaling};
    const auto r = uniform_contraction_check(seq, {1.0, 1.0}, 5.0, 0.99, powers);
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(r.limit_pass);
}

TEST(UniformContraction, ScaledFamilyArithmetic) {
    // q(G) = 0.4, q(G_m) = 0.4 (1 + 1/m) <= 0.8 for every m
    auto g = interval(64);
    const Kernel k = cosine_kernel(g);
    const double n = compute_N(k, {1.0, 1.0}).n_value;
    const double l = 0.4 / (2.0 * std::sqrt(pi) * n);
    const auto r = uniform_contraction_check(scaling_family(k), {1.0, 1.0}, l, 0.2, powers);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.q_values[0], 0.8, 1e-12);
    EXPECT_NEAR(r.q_limit, 0.4, 1e-12);
}

TEST(UniformContraction, FirstViolation) {
    // m = 1 gives q = 0.85 > 0.8
    auto g = interval(64);
    const Kernel k = cosine_kernel(g);
    const double n = compute_N(k, {1.0, 1.0}).n_value;
    const double l = 0.425 / (2.0 * std::sqrt(pi) * n);
    const auto r = uniform_contraction_check(scaling_family(k), {1.0, 1.0}, l, 0.2, powers);
    EXPECT_FALSE(r.pass);
    ASSERT_TRUE(r.first_violation.has_value());
    EXPECT_EQ(*r.first_violation, 1);
    EXPECT_THROW(sequence_solve({1.0, 1.0}, sine_nonlinearity(l), scaling_family(k), powers, {0.2}), ContractionError);
}

TEST(SequenceSolve, ConstantFamilyGivesZeroDistance) {
    auto g = interval(64);
    const Kernel k = cosine_kernel(g);
    KernelSequence seq{[k](int) { return k; }, k, FamilyMode::scaling};
    const auto r = sequence_solve({1.0, 1.0}, sine_nonlinearity(0.2, source::cosine(1.0)), seq, powers, {});
    for (const auto& row : r.per_m) EXPECT_EQ(row.solution_h4_distance, 0.0);
    EXPECT_TRUE(r.bounds_hold);
}

TEST(SequenceSolve, ScalingFamilyBoundsAndRate) {
    auto g = interval(256);
    SequenceSettings s;
    s.epsilon_margin = 0.4;
    const auto r = sequence_solve({1.0, 1.0}, sine_nonlinearity(0.2, source::cosine(1.0)), scaling_family(cosine_kernel(g)),
                                  powers, s);
    EXPECT_TRUE(r.bounds_hold);
    for (const auto& row : r.per_m) {
        EXPECT_LE(row.solution_l2_distance, row.theorem_bound);
        EXPECT_GE(row.solution_h4_distance, row.solution_l2_distance);
    }
    ASSERT_TRUE(r.fitted_slope.has_value());
    EXPECT_NEAR(*r.fitted_slope, -1.0, 0.1);
}

TEST(SequenceSolve, ParallelMatchesSequential) {
    auto g = interval(128);
    SequenceSettings seq_settings;
    SequenceSettings par_settings;
    par_settings.parallel = 3;
    const auto fam = mollification_family(cosine_kernel(g));
    const auto nl = saturating_nonlinearity(0.3, source::cosine(1.0));
    const auto a = sequence_solve({1.0, 1.0}, nl, fam, powers, seq_settings);
    const auto b = sequence_solve({1.0, 1.0}, nl, fam, powers, par_settings);
    ASSERT_EQ(a.per_m.size(), b.per_m.size());
    for (std::size_t i = 0; i < a.per_m.size(); ++i) {
        EXPECT_EQ(a.per_m[i].m, b.per_m[i].m);
        EXPECT_EQ(a.per_m[i].solution_h4_distance, b.per_m[i].solution_h4_distance);
    }
}

TEST(LogLogSlope, ExactPowerLaw) {
    const std::vector<double> x{1, 2, 4, 8};
    const std::vector<double> y{3, 0.75, 0.1875, 0.046875};
    EXPECT_NEAR(*loglog_slope(x, y), -2.0, 1e-14);
    EXPECT_FALSE(loglog_slope({1.0}, {1.0}).has_value());
}
