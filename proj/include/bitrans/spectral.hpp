#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "bitrans/grid.hpp"

namespace bitrans {

namespace detail {

template <class Real>
struct Fftw;

template <>
struct Fftw<double> {
    using plan = fftw_plan;
    using cpx = fftw_complex;
    static plan make(int n, int sign) {
        auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
        auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
        plan p = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        return p;
    }
    static void execute(plan p, void* in, void* out) {
        fftw_execute_dft(p, static_cast<cpx*>(in), static_cast<cpx*>(out));
    }
    static void destroy(plan p) { fftw_destroy_plan(p); }
};

template <>
struct Fftw<long double> {
    using plan = fftwl_plan;
    using cpx = fftwl_complex;
    static plan make(int n, int sign) {
        auto* in = fftwl_alloc_complex(static_cast<std::size_t>(n));
        auto* out = fftwl_alloc_complex(static_cast<std::size_t>(n));
        plan p = fftwl_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftwl_free(in);
        fftwl_free(out);
        return p;
    }
    static void execute(plan p, void* in, void* out) {
        fftwl_execute_dft(p, static_cast<cpx*>(in), static_cast<cpx*>(out));
    }
    static void destroy(plan p) { fftwl_destroy_plan(p); }
};

/// Cached FFTW plans. Planning is serialized; executing a plan on fresh arrays is thread safe.
template <class Real>
class FftPlans {
public:
    using plan = typename Fftw<Real>::plan;

    static FftPlans& instance() {
        static FftPlans plans;
        return plans;
    }

    plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        plan p = Fftw<Real>::make(static_cast<int>(n), sign);
        plans_.emplace(key, p);
        return p;
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

private:
    FftPlans() = default;
    ~FftPlans() {
        for (auto& [key, p] : plans_) Fftw<Real>::destroy(p);
    }

    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, plan> plans_;
};

/// Unnormalized DFT, sum_k in_k exp(sign * 2 pi i j k / n).
template <class Real>
std::vector<std::complex<Real>> dft(std::vector<std::complex<Real>> in, int sign) {
    std::vector<std::complex<Real>> out(in.size());
    auto p = FftPlans<Real>::instance().get(in.size(), sign);
    Fftw<Real>::execute(p, in.data(), out.data());
    return out;
}

/// Forward transform in extended precision, in storage order. Used where round-off
/// amplified by p^4 would otherwise dominate (residual evaluation).
inline std::vector<std::complex<long double>> forward_coefficients_ld(const Field& f) {
    const auto& g = *f.grid;
    const std::size_t n = g.size();
    std::vector<std::complex<long double>> in(f.values.begin(), f.values.end());
    auto raw = dft<long double>(std::move(in), FFTW_FORWARD);
    std::vector<std::complex<long double>> c(n);
    const long double scale = static_cast<long double>(g.dx()) / std::sqrt(2.0L * std::numbers::pi_v<long double>);
    const auto freq = g.freq();
    for (std::size_t i = 0; i < n; ++i) {
        const long double phase = -static_cast<long double>(freq[i]) * static_cast<long double>(g.origin());
        c[i] = scale * std::polar(1.0L, phase) * raw[(i + n / 2) % n];
    }
    return c;
}

}  // namespace detail

/// Hermitian-defect tolerance for inverse_transform, relative to the largest coefficient.
inline constexpr double hermitian_tolerance = 1e-9;

/// coeff(p_j) = (dx / sqrt(2 pi)) sum_k f(x_k) exp(-i p_j x_k).
inline SpectralField forward_transform(const Field& f) {
    if (!f.all_finite()) throw NumericalError("forward_transform: non-finite samples");
    const auto& g = *f.grid;
    const std::size_t n = g.size();
    std::vector<complex> in(f.values.begin(), f.values.end());
    auto raw = detail::dft<double>(std::move(in), FFTW_FORWARD);

    std::vector<complex> c(n);
    const double scale = g.dx() / sqrt_two_pi;
    const auto freq = g.freq();
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        // storage index i <-> j = i - N/2 <-> DFT bin (j mod N)
        const std::size_t bin = (i + half) % n;
        c[i] = scale * std::polar(1.0, -freq[i] * g.origin()) * raw[bin];
    }
    return SpectralField(f.grid, std::move(c));
}

/// f(x_k) = (dp / sqrt(2 pi)) sum_j coeff(p_j) exp(i p_j x_k). Throws on non-Hermitian input.
inline Field inverse_transform(const SpectralField& s) {
    const auto& g = *s.grid;
    const double ref = s.max_abs();
    if (s.hermitian_defect() > hermitian_tolerance * ref + 1e-300) {
        throw NumericalError("inverse_transform: coefficients are not Hermitian symmetric");
    }
    const std::size_t n = g.size();
    const std::size_t half = n / 2;
    const auto freq = g.freq();
    const double scale = g.dp() / sqrt_two_pi;
    std::vector<complex> in(n);
    for (std::size_t i = 0; i < n; ++i) {
        in[(i + half) % n] = scale * std::polar(1.0, freq[i] * g.origin()) * s.coeffs[i];
    }
    auto raw = detail::dft<double>(std::move(in), FFTW_BACKWARD);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = raw[k].real();
    return Field(s.grid, std::move(v));
}

/// Spectral derivative of the given order. Odd orders annihilate the unpaired Nyquist mode.
inline SpectralField derivative(SpectralField s, int order) {
    const auto freq = s.grid->freq();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (order % 2 == 1 && i == s.grid->nyquist_index()) {
            s.coeffs[i] = 0.0;
            continue;
        }
        s.coeffs[i] *= std::pow(complex(0.0, freq[i]), order);
    }
    return s;
}

inline Field derivative(const Field& f, int order) {
    return inverse_transform(derivative(forward_transform(f), order));
}

inline double l2_norm(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(s * f.grid->dx());
}

inline double l1_norm(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += std::abs(v);
    return s * f.grid->dx();
}

/// || x f(x) ||_{L1}
inline double first_moment_l1(const Field& f) {
    const auto xs = f.grid->x();
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += std::abs(xs[k] * f.values[k]);
    return s * f.grid->dx();
}

inline double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

/// Frequency-side L2 norm: sqrt(sum |c|^2 dp).
inline double l2_norm(const SpectralField& s) {
    double acc = 0.0;
    for (const auto& c : s.coeffs) acc += std::norm(c);
    return std::sqrt(acc * s.grid->dp());
}

/// (||u||^2 + ||u''''||^2)^(1/2) = (sum (1 + p^8) |u^(p)|^2 dp)^(1/2)
inline double h4_norm(const SpectralField& s) {
    const auto freq = s.grid->freq();
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double p4 = std::pow(freq[i], 4);
        acc += (1.0 + p4 * p4) * std::norm(s.coeffs[i]);
    }
    return std::sqrt(acc * s.grid->dp());
}

inline double h4_norm(const Field& f) { return h4_norm(forward_transform(f)); }

/// 2/3-rule filter: zero every mode with |j| > N/3.
inline SpectralField dealias(SpectralField s) {
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t j = i - n / 2;
        if (3 * std::abs(j) > n) s.coeffs[static_cast<std::size_t>(i)] = 0.0;
    }
    return s;
}

/// Trigonometric interpolation of a uniformly sampled field at an arbitrary point.
inline double interpolate(const SpectralField& s, double x) {
    const auto freq = s.grid->freq();
    complex acc{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        // the unpaired Nyquist mode contributes its real cosine part only
        if (i == s.grid->nyquist_index()) {
            acc += s.coeffs[i].real() * std::cos(freq[i] * x);
        } else {
            acc += s.coeffs[i] * std::polar(1.0, freq[i] * x);
        }
    }
    return acc.real() * s.grid->dp() / sqrt_two_pi;
}

}  // namespace bitrans
