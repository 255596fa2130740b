#pragma once

#include <array>
#include <random>

#include "bitrans/kernel.hpp"

namespace bitrans::testing {

/// Smooth random fields: a few random modes (interval) or random Gaussian bumps (line).
class FieldGen {
public:
    explicit FieldGen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Field smooth(const GridPtr& grid) {
        if (grid->whole_line()) {
            const double half = grid->length() / 2.0;
            const int bumps = integer(1, 4);
            std::vector<std::array<double, 3>> b;
            for (int i = 0; i < bumps; ++i) {
                b.push_back({uniform(-1.0, 1.0), uniform(-0.2, 0.2) * half, uniform(0.5, 2.0)});
            }
            return Field::sample(grid, [&](double x) {
                double s = 0.0;
                for (const auto& [amp, c, w] : b) s += amp * std::exp(-(x - c) * (x - c) / (w * w));
                return s;
            });
        }
        const int modes = integer(1, 6);
        const int top = static_cast<int>(grid->size() / 4);
        std::vector<std::array<double, 3>> m;
        for (int i = 0; i < modes; ++i) m.push_back({uniform(-1.0, 1.0), double(integer(0, top)), uniform(0.0, 6.3)});
        return Field::sample(grid, [&](double x) {
            double s = 0.0;
            for (const auto& [amp, k, ph] : m) s += amp * std::cos(k * x + ph);
            return s;
        });
    }

    /// Independent samples; not band-limited.
    Field rough(const GridPtr& grid) {
        std::vector<double> v(grid->size());
        for (auto& x : v) x = uniform(-1.0, 1.0);
        return Field(grid, std::move(v));
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace bitrans::testing
