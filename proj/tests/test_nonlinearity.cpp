#include <gtest/gtest.h>

#include "bitrans/nonlinearity.hpp"

using namespace bitrans;

namespace {

NonlinearSpec square_nonlinearity() {
    // F = u^2 is not globally Lipschitz; any finite declaration must be caught
    return {"square", [](double u, double) { return u * u; }, 1.0, 1.0, [](double) { return 0.0; }, true};
}

}  // namespace

TEST(Nonlinearity, Evaluation) {
    auto g = build_grid(PeriodicInterval{16});
    const auto f = evaluate_field(sine_nonlinearity(0.5, source::cosine(2.0)), Field::zeros(g));
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_DOUBLE_EQ(f.values[k], 2.0 * std::cos(g->x()[k]));
}

TEST(Nonlinearity, NonFiniteNamesNode) {
    auto g = build_grid(PeriodicInterval{16});
    NonlinearSpec bad{"log", [](double u, double) { return std::log(u); }, 0.0, 0.0, [](double) { return 0.0; }, true};
    auto u = Field::zeros(g);
    try {
        evaluate_field(bad, u);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("node 0"), std::string::npos);
    }
}

TEST(Nonlinearity, PeriodicCompatibilityEnforced) {
    auto g = build_grid(PeriodicInterval{16});
    auto spec = source_nonlinearity([](double x) { return x; }, false);
    EXPECT_THROW(evaluate_field(spec, Field::zeros(g)), InvalidArgument);
    EXPECT_NO_THROW(evaluate_field(spec, Field::zeros(build_grid(WholeLine{5.0, 16}))));
}

TEST(Verification, BuiltinsPass) {
    auto g = build_grid(PeriodicInterval{64});
    for (const auto& spec : {zero_nonlinearity(), source_nonlinearity(source::cosine(1.0)),
                             sine_nonlinearity(0.2, source::cosine(1.0)), saturating_nonlinearity(-0.7)}) {
        const auto r = verify_assumption1(spec, *g, {}, 10000, 7);
        EXPECT_TRUE(r.pass()) << spec.name << " ratio " << r.max_lipschitz_ratio;
    }
}

TEST(Verification, SineRatioApproachesMu) {
    auto g = build_grid(PeriodicInterval{64});
    const auto r = verify_assumption1(sine_nonlinearity(1.0), *g, {}, 10000, 1);
    EXPECT_LE(r.max_lipschitz_ratio, 1.0 + 1e-9);
    EXPECT_GT(r.max_lipschitz_ratio, 0.99);
}

TEST(Verification, SquareRejected) {
    auto g = build_grid(PeriodicInterval{64});
    const auto r = verify_assumption1(square_nonlinearity(), *g, {}, 10000, 3);
    EXPECT_FALSE(r.lipschitz_ok);
    EXPECT_FALSE(r.pass());
}

TEST(Verification, UnderDeclaredSineRejected) {
    auto g = build_grid(WholeLine{10.0, 64});
    auto spec = sine_nonlinearity(1.0);
    spec.lipschitz_l = 0.5;
    spec.growth_k = 0.5;
    EXPECT_FALSE(verify_assumption1(spec, *g, {}, 5000, 0).pass());
}

TEST(Verification, DeterministicPerSeed) {
    auto g = build_grid(PeriodicInterval{64});
    const auto a = verify_assumption1(sine_nonlinearity(0.3), *g, {}, 2000, 11);
    const auto b = verify_assumption1(sine_nonlinearity(0.3), *g, {}, 2000, 11);
    EXPECT_EQ(a.max_lipschitz_ratio, b.max_lipschitz_ratio);
    EXPECT_EQ(a.max_growth_ratio, b.max_growth_ratio);
    EXPECT_THROW(verify_assumption1(sine_nonlinearity(0.3), *g, {}, 999, 0), InvalidArgument);
}
