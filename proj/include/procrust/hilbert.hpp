#pragma once

// Truncated Fock-space states and overlaps for a single bosonic mode, plus
// the Schmidt-diagonal representation of two-mode states with diagonal
// correlations (the two-mode squeezed vacuum and everything this protocol
// turns it into).  All amplitudes are generated by stable ratio recurrences;
// nothing here evaluates a factorial directly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace procrust {

using Complex = std::complex<double>;

namespace detail {

// std::to_string renders 3e-8 as "0.000000"; error messages deserve better.
inline std::string num_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
}

} // namespace detail

// Truncation parameters shared by every Fock-space object.  n_max is the
// highest retained occupation number, so vectors have n_max + 1 entries.
struct Cutoff {
    int n_max;
    double tail_tol;

    explicit Cutoff(int n_max_, double tail_tol_ = 1e-10)
        : n_max(n_max_), tail_tol(tail_tol_) {
        if (n_max < 0)
            throw ValidationError("Cutoff: n_max must be >= 0");
        if (!(tail_tol > 0.0) || !std::isfinite(tail_tol))
            throw ValidationError("Cutoff: tail_tol must be a positive finite number");
    }

    int dim() const { return n_max + 1; }
};

// A normalizable single-mode state truncated at a cutoff.  The constructor
// enforces sum |c_n|^2 <= 1 + 10 eps and the tail guard
// 1 - sum |c_n|^2 <= tail_tol, so every FockVector in flight is a faithful
// truncation of a normalized state.
class FockVector {
  public:
    FockVector(std::vector<Complex> amplitudes, Cutoff cutoff)
        : amps_(std::move(amplitudes)), cutoff_(cutoff) {
        if (amps_.size() != static_cast<std::size_t>(cutoff_.dim()))
            throw ValidationError("FockVector: amplitude count does not match cutoff dimension");
        norm_sq_ = 0.0;
        for (const Complex& a : amps_) {
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
                throw ValidationError("FockVector: non-finite amplitude");
            norm_sq_ += std::norm(a);
        }
        constexpr double eps10 = 10.0 * std::numeric_limits<double>::epsilon();
        if (norm_sq_ > 1.0 + eps10)
            throw ValidationError("FockVector: squared norm exceeds 1");
        if (1.0 - norm_sq_ > cutoff_.tail_tol)
            throw CutoffTooSmall("FockVector: truncated tail mass " +
                                 detail::num_str(1.0 - norm_sq_) + " exceeds tail_tol " +
                                 detail::num_str(cutoff_.tail_tol));
    }

    const std::vector<Complex>& amplitudes() const { return amps_; }
    const Cutoff& cutoff() const { return cutoff_; }
    int n_max() const { return cutoff_.n_max; }
    double norm_sq() const { return norm_sq_; }

    // Mass lost to truncation, clamped at 0 (rounding can push the sum a
    // few ulp past 1).
    double tail_deficit() const { return std::max(0.0, 1.0 - norm_sq_); }

    Complex amplitude(int n) const {
        return (n >= 0 && n <= cutoff_.n_max) ? amps_[static_cast<std::size_t>(n)]
                                              : Complex{0.0, 0.0};
    }

  private:
    std::vector<Complex> amps_;
    Cutoff cutoff_;
    double norm_sq_;
};

// <m|n> = delta_mn with zero-padding beyond either cutoff.
inline Complex inner_product(const FockVector& bra, const FockVector& ket) {
    const int n_top = std::min(bra.n_max(), ket.n_max());
    Complex acc{0.0, 0.0};
    for (int n = 0; n <= n_top; ++n)
        acc += std::conj(bra.amplitude(n)) * ket.amplitude(n);
    return acc;
}

// Coherent state |alpha>: c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!),
// generated by c_{n+1} = c_n alpha / sqrt(n+1).
inline FockVector coherent_fock(Complex alpha, const Cutoff& cutoff) {
    std::vector<Complex> c(static_cast<std::size_t>(cutoff.dim()));
    c[0] = Complex{std::exp(-0.5 * std::norm(alpha)), 0.0};
    for (int n = 0; n + 1 <= cutoff.n_max; ++n)
        c[static_cast<std::size_t>(n) + 1] =
            c[static_cast<std::size_t>(n)] * alpha / std::sqrt(double(n) + 1.0);
    return FockVector(std::move(c), cutoff);
}

inline FockVector coherent_fock(double alpha, const Cutoff& cutoff) {
    if (alpha < 0.0)
        throw ValidationError("coherent_fock: real amplitude must be >= 0");
    return coherent_fock(Complex{alpha, 0.0}, cutoff);
}

// Squeezed vacuum with xi = r e^{i phi}:
//   c_{2m} = sqrt(sech r) (-e^{i phi} tanh r)^m sqrt((2m)!) / (2^m m!),
// odd amplitudes exactly zero.  Ratio form:
//   c_{2m+2} = c_{2m} (-e^{i phi} tanh r) sqrt((2m+1)(2m+2)) / (2(m+1)).
inline FockVector squeezed_vacuum_fock(double r, double phi, const Cutoff& cutoff) {
    if (!(r >= 0.0) || !std::isfinite(r))
        throw ValidationError("squeezed_vacuum_fock: r must be >= 0");
    std::vector<Complex> c(static_cast<std::size_t>(cutoff.dim()), Complex{0.0, 0.0});
    const Complex t = -std::polar(std::tanh(r), phi);
    c[0] = Complex{1.0 / std::sqrt(std::cosh(r)), 0.0};
    for (int m = 0; 2 * m + 2 <= cutoff.n_max; ++m) {
        const double k = 2.0 * double(m);
        c[static_cast<std::size_t>(2 * m + 2)] =
            c[static_cast<std::size_t>(2 * m)] * t *
            std::sqrt((k + 1.0) * (k + 2.0)) / (k + 2.0);
    }
    return FockVector(std::move(c), cutoff);
}

// Schmidt-diagonal two-mode state sum_n c_n |n, n>.  `normalized` tracks
// whether sum |c_n|^2 = 1 was enforced; raw (unnormalized) instances carry
// filter outputs before the success probability is split off.
class SchmidtDiagonalState {
  public:
    static SchmidtDiagonalState normalized(std::vector<Complex> coeffs, Cutoff cutoff) {
        double s = 0.0;
        for (const Complex& a : coeffs)
            s += std::norm(a);
        if (!(s > 0.0))
            throw NotNormalized("SchmidtDiagonalState: zero vector cannot be normalized");
        const double inv = 1.0 / std::sqrt(s);
        for (Complex& a : coeffs)
            a *= inv;
        return SchmidtDiagonalState(std::move(coeffs), cutoff, true);
    }

    static SchmidtDiagonalState raw(std::vector<Complex> coeffs, Cutoff cutoff) {
        return SchmidtDiagonalState(std::move(coeffs), cutoff, false);
    }

    const std::vector<Complex>& coefficients() const { return coeffs_; }
    const Cutoff& cutoff() const { return cutoff_; }
    int n_max() const { return cutoff_.n_max; }
    bool is_normalized() const { return normalized_; }

    double norm_sq() const {
        double s = 0.0;
        for (const Complex& a : coeffs_)
            s += std::norm(a);
        return s;
    }

    Complex coefficient(int n) const {
        return (n >= 0 && n <= cutoff_.n_max) ? coeffs_[static_cast<std::size_t>(n)]
                                              : Complex{0.0, 0.0};
    }

  private:
    SchmidtDiagonalState(std::vector<Complex> coeffs, Cutoff cutoff, bool normalized)
        : coeffs_(std::move(coeffs)), cutoff_(cutoff), normalized_(normalized) {
        if (coeffs_.size() != static_cast<std::size_t>(cutoff_.dim()))
            throw ValidationError("SchmidtDiagonalState: coefficient count does not match cutoff");
        for (const Complex& a : coeffs_)
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
                throw ValidationError("SchmidtDiagonalState: non-finite coefficient");
        if (normalized_) {
            const double s = norm_sq();
            if (std::abs(s - 1.0) > 1e-12)
                throw NotNormalized("SchmidtDiagonalState: squared norm deviates from 1 by " +
                                    detail::num_str(std::abs(s - 1.0)));
        }
    }

    std::vector<Complex> coeffs_;
    Cutoff cutoff_;
    bool normalized_;
};

// Two-mode squeezed vacuum sqrt(1 - lambda^2) sum_n lambda^n |n, n>,
// 0 <= lambda < 1.  The geometric tail sum is checked against the guard:
// retained mass is 1 - lambda^{2(n_max+1)}.
inline SchmidtDiagonalState tmsv(double lambda, const Cutoff& cutoff) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw UnphysicalSqueezing("tmsv: lambda must lie in [0, 1)");
    const double tail = std::pow(lambda * lambda, double(cutoff.n_max) + 1.0);
    if (tail > cutoff.tail_tol)
        throw CutoffTooSmall("tmsv: geometric tail mass " + detail::num_str(tail) +
                             " exceeds tail_tol " + detail::num_str(cutoff.tail_tol));
    std::vector<Complex> c(static_cast<std::size_t>(cutoff.dim()));
    const double head = std::sqrt(1.0 - lambda * lambda);
    double p = 1.0;
    for (int n = 0; n <= cutoff.n_max; ++n, p *= lambda)
        c[static_cast<std::size_t>(n)] = Complex{head * p, 0.0};
    return SchmidtDiagonalState::raw(std::move(c), cutoff);
}

// Orthonormal Hermite functions psi_n(x) = <n|x> for the dimensionless
// quadrature x (convention [x, p] = i, x = (a + a^dagger)/sqrt(2)):
//   psi_0 = pi^{-1/4} e^{-x^2/2},  psi_1 = sqrt(2) x psi_0,
//   psi_{n+1} = x sqrt(2/(n+1)) psi_n - sqrt(n/(n+1)) psi_{n-1}.
// The normalized recurrence stays bounded where the raw Hermite polynomial
// overflows.
inline std::vector<double> hermite_functions(double x, int n_max) {
    if (n_max < 0)
        throw ValidationError("hermite_functions: n_max must be >= 0");
    std::vector<double> psi(static_cast<std::size_t>(n_max) + 1);
    psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    if (n_max >= 1)
        psi[1] = std::sqrt(2.0) * x * psi[0];
    for (int n = 1; n + 1 <= n_max; ++n)
        psi[static_cast<std::size_t>(n) + 1] =
            x * std::sqrt(2.0 / (double(n) + 1.0)) * psi[static_cast<std::size_t>(n)] -
            std::sqrt(double(n) / (double(n) + 1.0)) * psi[static_cast<std::size_t>(n) - 1];
    return psi;
}

// Phase convention for the rotated-quadrature eigenbra <x_phi|n>.  Both
// choices appear in the literature and differ by phi -> -phi:
//   plus:  <x_phi|n> = e^{+i n phi} psi_n(x); under this convention a
//          coherent post-selection at angle phi gives
//          Im n_W = sqrt(2) alpha x sin(phi) - alpha^2 sin(2 phi) and the
//          success threshold x > sqrt(2) alpha cos(phi).  Default for
//          post-selection work.
//   minus: <x_phi|n> = e^{-i n phi} psi_n(x); under this convention the
//          overlap <x_phi|alpha> (alpha real) carries e^{-i phi} in the
//          cross term:
//          pi^{-1/4} exp(-x^2/2 + sqrt(2) e^{-i phi} x alpha
//                        - e^{-2 i phi} alpha^2/2 - alpha^2/2).
enum class QuadraturePhase { plus, minus };

inline Complex quadrature_fock_overlap(double x, double phi, int n, QuadraturePhase convention) {
    if (n < 0)
        throw ValidationError("quadrature_fock_overlap: n must be >= 0");
    const std::vector<double> psi = hermite_functions(x, n);
    const double sign = (convention == QuadraturePhase::plus) ? 1.0 : -1.0;
    return std::polar(1.0, sign * double(n) * phi) * psi[static_cast<std::size_t>(n)];
}

// Full bra row <x_phi|n> for n = 0..n_max in one recurrence pass.
inline std::vector<Complex> quadrature_bra_row(double x, double phi, int n_max,
                                               QuadraturePhase convention) {
    const std::vector<double> psi = hermite_functions(x, n_max);
    const double sign = (convention == QuadraturePhase::plus) ? 1.0 : -1.0;
    std::vector<Complex> row(psi.size());
    const Complex step = std::polar(1.0, sign * phi);
    Complex phase{1.0, 0.0};
    for (std::size_t n = 0; n < psi.size(); ++n, phase *= step)
        row[n] = phase * psi[n];
    return row;
}

// Improper quadrature eigenbra used as a post-selection functional.  Not a
// state: its Fock row is not square-summable, so success "probabilities"
// built from it are densities in x.
struct QuadratureFunctional {
    double x;
    double phi;
    QuadraturePhase convention = QuadraturePhase::plus;
};

// Scheme-level description of an ancilla preparation or post-selection.
struct CoherentAncilla {
    double magnitude;
    double phase = 0.0; // amplitude = magnitude * e^{i phase}
};
struct SqueezedAncilla {
    double r;
    double phi;
};
struct QuadratureAncilla {
    double x;
    double phi;
    QuadraturePhase convention = QuadraturePhase::plus;
};
struct FockAncilla {
    std::vector<Complex> amplitudes;
};

using AncillaSpec = std::variant<CoherentAncilla, SqueezedAncilla, QuadratureAncilla, FockAncilla>;

namespace detail {

// Explicit amplitude lists may be shorter than the working cutoff; the
// missing levels are exactly zero.  Longer lists would drop mass silently,
// so they are refused.
inline std::vector<Complex> padded_amplitudes(const std::vector<Complex>& amps,
                                              const Cutoff& cutoff) {
    if (amps.size() > static_cast<std::size_t>(cutoff.dim()))
        throw ValidationError("Fock amplitude list is longer than the cutoff dimension");
    std::vector<Complex> out(amps);
    out.resize(static_cast<std::size_t>(cutoff.dim()), Complex{0.0, 0.0});
    return out;
}

} // namespace detail

inline const char* scheme_name(const AncillaSpec& spec) {
    return std::visit(
        [](const auto& s) -> const char* {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CoherentAncilla>)
                return "coherent";
            else if constexpr (std::is_same_v<T, SqueezedAncilla>)
                return "squeezed";
            else if constexpr (std::is_same_v<T, QuadratureAncilla>)
                return "quadrature";
            else
                return "fock";
        },
        spec);
}

// Materialize the pre-measurement ancilla.  The protocol's closed forms
// assume a real positive coherent amplitude, so that is what a coherent
// pre must be; a quadrature functional is not preparable at all.
inline FockVector make_pre_state(const AncillaSpec& spec, const Cutoff& cutoff) {
    return std::visit(
        [&](const auto& s) -> FockVector {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CoherentAncilla>) {
                if (!(s.magnitude > 0.0))
                    throw ValidationError("pre-state coherent amplitude must be > 0");
                if (s.phase != 0.0)
                    throw ValidationError("pre-state coherent amplitude must be real (phase 0)");
                return coherent_fock(s.magnitude, cutoff);
            } else if constexpr (std::is_same_v<T, SqueezedAncilla>) {
                return squeezed_vacuum_fock(s.r, s.phi, cutoff);
            } else if constexpr (std::is_same_v<T, QuadratureAncilla>) {
                throw ValidationError("a quadrature functional cannot be a pre-measurement state");
            } else {
                return FockVector(detail::padded_amplitudes(s.amplitudes, cutoff), cutoff);
            }
        },
        spec);
}

// Post-selection bra.  Either a normalizable state (bra = conjugate
// amplitudes) or a quadrature functional (bra = <x_phi|n> row).  bra_scale
// is the l2 norm of the truncated row, the natural yardstick for deciding
// that an overlap is "near zero".
class PostSelector {
  public:
    static PostSelector normalizable(FockVector state) {
        return PostSelector(std::move(state));
    }

    static PostSelector quadrature(QuadratureFunctional f) {
        if (!std::isfinite(f.x) || !std::isfinite(f.phi))
            throw ValidationError("PostSelector: non-finite quadrature parameters");
        return PostSelector(f);
    }

    static PostSelector from_spec(const AncillaSpec& spec, const Cutoff& cutoff) {
        return std::visit(
            [&](const auto& s) -> PostSelector {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, CoherentAncilla>)
                    return normalizable(coherent_fock(std::polar(s.magnitude, s.phase), cutoff));
                else if constexpr (std::is_same_v<T, SqueezedAncilla>)
                    return normalizable(squeezed_vacuum_fock(s.r, s.phi, cutoff));
                else if constexpr (std::is_same_v<T, QuadratureAncilla>)
                    return quadrature(QuadratureFunctional{s.x, s.phi, s.convention});
                else
                    return normalizable(
                        FockVector(detail::padded_amplitudes(s.amplitudes, cutoff), cutoff));
            },
            spec);
    }

    bool is_density() const { return functional_.has_value(); }

    // <Phi_2|n> for n = 0..n_max.
    std::vector<Complex> bra_row(int n_max) const {
        if (functional_)
            return quadrature_bra_row(functional_->x, functional_->phi, n_max,
                                      functional_->convention);
        std::vector<Complex> row(static_cast<std::size_t>(n_max) + 1, Complex{0.0, 0.0});
        for (int n = 0; n <= n_max; ++n)
            row[static_cast<std::size_t>(n)] = std::conj(state_->amplitude(n));
        return row;
    }

    double bra_scale(int n_max) const {
        double s = 0.0;
        for (const Complex& b : bra_row(n_max))
            s += std::norm(b);
        return std::sqrt(s);
    }

    const std::optional<FockVector>& state() const { return state_; }
    const std::optional<QuadratureFunctional>& functional() const { return functional_; }

  private:
    explicit PostSelector(FockVector state) : state_(std::move(state)) {}
    explicit PostSelector(QuadratureFunctional f) : functional_(f) {}

    std::optional<FockVector> state_;
    std::optional<QuadratureFunctional> functional_;
};

// <Phi_2|Phi_1> over the ket's retained levels.
inline Complex overlap(const PostSelector& bra, const FockVector& ket) {
    const std::vector<Complex> row = bra.bra_row(ket.n_max());
    Complex acc{0.0, 0.0};
    for (int n = 0; n <= ket.n_max(); ++n)
        acc += row[static_cast<std::size_t>(n)] * ket.amplitude(n);
    return acc;
}

// Smallest power-of-two-stepped cutoff at which the spec's state passes its
// tail guard.  Convenience for "cutoffs chosen by the tail guard" setups.
inline Cutoff fitted_cutoff(const AncillaSpec& spec, double tail_tol = 1e-10,
                            int start = 16, int hard_limit = 4096) {
    if (std::holds_alternative<QuadratureAncilla>(spec))
        throw ValidationError("fitted_cutoff: quadrature functionals have no tail mass");
    if (const auto* f = std::get_if<FockAncilla>(&spec)) {
        // explicit amplitudes fix their own dimension
        if (f->amplitudes.empty())
            throw ValidationError("fitted_cutoff: empty Fock amplitude list");
        return Cutoff(static_cast<int>(f->amplitudes.size()) - 1, tail_tol);
    }
    for (int n = start; n <= hard_limit; n *= 2) {
        try {
            const Cutoff c(n, tail_tol);
            std::visit(
                [&](const auto& s) {
                    using T = std::decay_t<decltype(s)>;
                    if constexpr (std::is_same_v<T, CoherentAncilla>)
                        coherent_fock(std::polar(s.magnitude, s.phase), c);
                    else if constexpr (std::is_same_v<T, SqueezedAncilla>)
                        squeezed_vacuum_fock(s.r, s.phi, c);
                },
                spec);
            return c;
        } catch (const CutoffTooSmall&) {
            continue;
        }
    }
    throw CutoffTooSmall("fitted_cutoff: no cutoff up to the hard limit passes the tail guard");
}

} // namespace procrust
