#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bitrans/errors.hpp"

namespace bitrans {

using complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline const double sqrt_two_pi = std::sqrt(two_pi);

/// The real line truncated to [-half_width, half_width).
struct WholeLine {
    double half_width = 0.0;
    std::size_t points = 0;
    bool operator==(const WholeLine&) const = default;
};

/// The periodic interval [0, 2*pi).
struct PeriodicInterval {
    std::size_t points = 0;
    bool operator==(const PeriodicInterval&) const = default;
};

using DomainSpec = std::variant<WholeLine, PeriodicInterval>;

inline bool is_whole_line(const DomainSpec& d) { return std::holds_alternative<WholeLine>(d); }

inline std::size_t domain_points(const DomainSpec& d) {
    return std::visit([](const auto& v) { return v.points; }, d);
}

inline std::string domain_name(const DomainSpec& d) {
    return is_whole_line(d) ? "whole_line" : "interval";
}

/// Uniform sample points x_k and the matching frequencies p_j, j = -N/2 .. N/2-1.
///
/// Spectral data is always stored in frequency order, so index i holds p = (i - N/2) * dp.
/// The whole-line frequencies are p_j = pi*j/L; on the interval dp = 1 and p_j = j.
class Grid {
public:
    static std::shared_ptr<const Grid> build(const DomainSpec& domain) {
        const std::size_t n = domain_points(domain);
        if (n < 16 || !std::has_single_bit(n)) {
            throw InvalidArgument("grid size must be a power of two >= 16, got " + std::to_string(n));
        }
        double length = two_pi;
        double origin = 0.0;
        if (const auto* line = std::get_if<WholeLine>(&domain)) {
            if (!(line->half_width > 0.0) || !std::isfinite(line->half_width)) {
                throw InvalidArgument("whole-line half width must be positive and finite");
            }
            length = 2.0 * line->half_width;
            origin = -line->half_width;
        }
        return std::shared_ptr<const Grid>(new Grid(domain, n, length, origin));
    }

    std::size_t size() const { return x_.size(); }
    const DomainSpec& domain() const { return domain_; }
    bool whole_line() const { return is_whole_line(domain_); }

    std::span<const double> x() const { return x_; }
    std::span<const double> freq() const { return freq_; }
    double dx() const { return dx_; }
    /// Frequency spacing; doubles as the quadrature weight of frequency sums.
    double dp() const { return dp_; }
    double origin() const { return x_.front(); }
    double length() const { return length_; }
    /// Largest retained |p| (the Nyquist frequency).
    double max_frequency() const { return dp_ * static_cast<double>(size() / 2); }
    /// Storage index of the p = 0 mode.
    std::size_t zero_index() const { return size() / 2; }
    /// Storage index of the unpaired Nyquist mode p = -N/2 * dp.
    std::size_t nyquist_index() const { return 0; }
    /// Storage index of the mode paired with index i under p -> -p (i != nyquist).
    std::size_t mirror_index(std::size_t i) const { return size() - i; }

    bool operator==(const Grid& other) const { return domain_ == other.domain_; }

private:
    Grid(DomainSpec domain, std::size_t n, double length, double origin)
        : domain_(domain), length_(length), dx_(length / static_cast<double>(n)),
          dp_(two_pi / length), x_(n), freq_(n) {
        const auto half = static_cast<std::ptrdiff_t>(n / 2);
        for (std::size_t k = 0; k < n; ++k) {
            x_[k] = origin + dx_ * static_cast<double>(k);
            freq_[k] = dp_ * static_cast<double>(static_cast<std::ptrdiff_t>(k) - half);
        }
    }

    DomainSpec domain_;
    double length_;
    double dx_;
    double dp_;
    std::vector<double> x_;
    std::vector<double> freq_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr build_grid(const DomainSpec& domain) { return Grid::build(domain); }

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) {
        throw InvalidArgument(std::string(what) + ": operands live on different grids");
    }
}

/// Real samples on Grid::x().
struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (!grid) throw InvalidArgument("field without grid");
        if (values.size() != grid->size()) {
            throw InvalidArgument("field length " + std::to_string(values.size()) +
                                  " does not match grid size " + std::to_string(grid->size()));
        }
    }

    static Field zeros(GridPtr g) {
        const auto n = g->size();
        return Field(std::move(g), std::vector<double>(n, 0.0));
    }

    template <class Fn>
    static Field sample(GridPtr g, Fn&& fn) {
        std::vector<double> v(g->size());
        const auto xs = g->x();
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(xs[k]);
        return Field(std::move(g), std::move(v));
    }

    std::size_t size() const { return values.size(); }

    bool all_finite() const {
        for (double v : values) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    Field& operator+=(const Field& o) {
        require_same_grid(*grid, *o.grid, "field +=");
        for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
        return *this;
    }
    Field& operator-=(const Field& o) {
        require_same_grid(*grid, *o.grid, "field -=");
        for (std::size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
        return *this;
    }
    Field& operator*=(double s) {
        for (double& v : values) v *= s;
        return *this;
    }
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }
};

/// Complex coefficients indexed by Grid::freq().
struct SpectralField {
    GridPtr grid;
    std::vector<complex> coeffs;

    SpectralField() = default;
    SpectralField(GridPtr g, std::vector<complex> c) : grid(std::move(g)), coeffs(std::move(c)) {
        if (!grid) throw InvalidArgument("spectral field without grid");
        if (coeffs.size() != grid->size()) {
            throw InvalidArgument("spectral field length does not match grid size");
        }
    }

    static SpectralField zeros(GridPtr g) {
        const auto n = g->size();
        return SpectralField(std::move(g), std::vector<complex>(n, complex{}));
    }

    std::size_t size() const { return coeffs.size(); }
    complex at_zero() const { return coeffs[grid->zero_index()]; }

    double max_abs() const {
        double m = 0.0;
        for (const auto& c : coeffs) m = std::max(m, std::abs(c));
        return m;
    }

    /// Largest violation of coeffs(-p) = conj(coeffs(p)), including the
    /// imaginary parts of the self-paired zero and Nyquist modes.
    double hermitian_defect() const {
        const auto& g = *grid;
        double d = std::max(std::abs(coeffs[g.zero_index()].imag()),
                            std::abs(coeffs[g.nyquist_index()].imag()));
        for (std::size_t i = 1; i < size(); ++i) {
            d = std::max(d, std::abs(coeffs[g.mirror_index(i)] - std::conj(coeffs[i])));
        }
        return d;
    }

    SpectralField& operator-=(const SpectralField& o) {
        require_same_grid(*grid, *o.grid, "spectral -=");
        for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] -= o.coeffs[k];
        return *this;
    }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
};

}  // namespace bitrans
