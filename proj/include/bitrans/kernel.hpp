#pragma once

#include <cmath>
#include <utility>

#include "bitrans/grid.hpp"
#include "bitrans/spectral.hpp"

namespace bitrans {

/// A real convolution kernel G sampled on a grid, with its cached transform.
///
/// `moment1` is || x G(x) ||_{L1} (meaningful on the whole line); `zero_mode` is
/// G^(0) on the line and G_0 on the interval.
class Kernel {
public:
    Kernel() = default;

    static Kernel from_samples(Field samples) {
        if (!samples.all_finite()) throw InvalidArgument("kernel samples must be finite");
        Kernel k;
        k.spectrum_ = forward_transform(samples);
        k.l1_ = l1_norm(samples);
        k.moment1_ = first_moment_l1(samples);
        k.samples_ = std::move(samples);
        return k;
    }

    template <class Fn>
    static Kernel sample(GridPtr grid, Fn&& fn) {
        return from_samples(Field::sample(std::move(grid), std::forward<Fn>(fn)));
    }

    static Kernel zero(GridPtr grid) { return from_samples(Field::zeros(std::move(grid))); }

    const GridPtr& grid() const { return samples_.grid; }
    const Field& samples() const { return samples_; }
    const SpectralField& spectrum() const { return spectrum_; }
    double l1() const { return l1_; }
    double moment1() const { return moment1_; }
    complex zero_mode() const { return spectrum_.at_zero(); }

    /// (G, 1)_{L2} = sqrt(2 pi) * G^(0).
    double integral() const { return sqrt_two_pi * zero_mode().real(); }

    /// dG^/dp at p = 0 through the moment formula (-i / sqrt(2 pi)) * int x G(x) dx.
    complex spectrum_slope_at_zero() const {
        const auto xs = grid()->x();
        double m = 0.0;
        for (std::size_t k = 0; k < samples_.size(); ++k) m += xs[k] * samples_.values[k];
        m *= grid()->dx();
        return complex(0.0, -m / sqrt_two_pi);
    }

    /// Transform of the samples at an arbitrary frequency (direct quadrature).
    complex transform_at(double p) const {
        const auto xs = grid()->x();
        complex acc{};
        for (std::size_t k = 0; k < samples_.size(); ++k) {
            if (samples_.values[k] != 0.0) acc += samples_.values[k] * std::polar(1.0, -p * xs[k]);
        }
        return acc * (grid()->dx() / sqrt_two_pi);
    }

    Kernel scaled(double c) const { return from_samples(c * samples_); }

    /// Same kernel with its zero mode removed (exactly orthogonal to constants).
    Kernel projected_zero_mean() const {
        auto s = spectrum_;
        s.coeffs[grid()->zero_index()] = 0.0;
        Kernel k = from_samples(inverse_transform(s));
        k.spectrum_.coeffs[grid()->zero_index()] = 0.0;
        return k;
    }

private:
    Field samples_;
    SpectralField spectrum_;
    double l1_ = 0.0;
    double moment1_ = 0.0;
};

/// int G(x - y) f(y) dy using the kernel's cached spectrum.
inline Field convolve(const Kernel& kernel, const Field& f) {
    require_same_grid(*kernel.grid(), *f.grid, "convolve");
    auto fk = forward_transform(f);
    const auto& gk = kernel.spectrum().coeffs;
    for (std::size_t i = 0; i < fk.size(); ++i) fk.coeffs[i] *= sqrt_two_pi * gk[i];
    return inverse_transform(fk);
}

}  // namespace bitrans
