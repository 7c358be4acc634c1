#pragma once

// Weak values of the ancilla photon number between a pre-measurement state
// and a post-selection bra:
//
//   n_W = <Phi_2| n_hat |Phi_1> / <Phi_2|Phi_1>
//
// (bra = post-selection, ket = pre-measurement).  The imaginary part is
// what drives the concentration protocol.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hilbert.hpp"

namespace procrust {

struct WeakValue {
    Complex value;
    double overlap_mag; // |<Phi_2|Phi_1>| actually reached, for diagnostics
};

// Moments <Phi_2| n_hat^m |Phi_1> / <Phi_2|Phi_1> for m = 1..m_max.
struct WeakMoments {
    std::vector<Complex> values;
    Complex moment(int m) const {
        if (m < 1 || static_cast<std::size_t>(m) > values.size())
            throw ValidationError("WeakMoments: moment index out of range");
        return values.at(static_cast<std::size_t>(m) - 1);
    }
};

namespace detail {

// Overlap plus the scale used to decide it is "near zero": the bra row's
// l2 norm times the ket norm bounds |<Phi_2|Phi_1>| from above, so the
// ratio is a meaningful orthogonality measure for functionals too.
inline void check_overlap_scale(const Complex& ov, const FockVector& pre,
                                const PostSelector& post, double ortho_threshold) {
    if (!(ortho_threshold > 0.0))
        throw ValidationError("ortho_threshold must be > 0");
    const double scale =
        std::sqrt(pre.norm_sq()) * post.bra_scale(pre.n_max());
    if (std::abs(ov) < ortho_threshold * scale)
        throw NearOrthogonalPostSelection(
            "post-selection overlap magnitude " + detail::num_str(std::abs(ov)) +
            " below threshold " + detail::num_str(ortho_threshold * scale));
}

} // namespace detail

inline WeakMoments weak_moments(const FockVector& pre, const PostSelector& post, int m_max,
                                double ortho_threshold = 1e-8) {
    if (m_max < 1)
        throw ValidationError("weak_moments: m_max must be >= 1");
    const std::vector<Complex> bra = post.bra_row(pre.n_max());
    Complex denom{0.0, 0.0};
    std::vector<Complex> numer(static_cast<std::size_t>(m_max), Complex{0.0, 0.0});
    for (int n = 0; n <= pre.n_max(); ++n) {
        const Complex term = bra[static_cast<std::size_t>(n)] * pre.amplitude(n);
        denom += term;
        double n_pow = double(n);
        for (int m = 1; m <= m_max; ++m, n_pow *= double(n))
            numer[static_cast<std::size_t>(m) - 1] += n_pow * term;
    }
    detail::check_overlap_scale(denom, pre, post, ortho_threshold);
    for (Complex& v : numer)
        v /= denom;
    return WeakMoments{std::move(numer)};
}

inline WeakValue weak_value_numeric(const FockVector& pre, const PostSelector& post,
                                    double ortho_threshold = 1e-8) {
    const std::vector<Complex> bra = post.bra_row(pre.n_max());
    Complex denom{0.0, 0.0}, numer{0.0, 0.0};
    for (int n = 0; n <= pre.n_max(); ++n) {
        const Complex term = bra[static_cast<std::size_t>(n)] * pre.amplitude(n);
        denom += term;
        numer += double(n) * term;
    }
    detail::check_overlap_scale(denom, pre, post, ortho_threshold);
    return WeakValue{numer / denom, std::abs(denom)};
}

// Analytic n_W for a real coherent pre-measurement amplitude alpha > 0:
//   coherent post beta:          n_W = conj(beta) alpha
//   quadrature post (x, phi):    n_W = sqrt(2) alpha x e^{i s phi}
//                                      - alpha^2 e^{2 i s phi}
//                                with s = +1/-1 for the plus/minus phase
//                                convention of the functional
//   squeezed post (r, phi):      n_W = -alpha^2 e^{-i phi} tanh(r)
// Explicit Fock amplitude lists have no closed form.
inline Complex number_weak_value_closed_form(const AncillaSpec& post, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ValidationError("number_weak_value_closed_form: alpha must be > 0");
    return std::visit(
        [&](const auto& s) -> Complex {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CoherentAncilla>) {
                return std::conj(std::polar(s.magnitude, s.phase)) * alpha;
            } else if constexpr (std::is_same_v<T, QuadratureAncilla>) {
                const double sign = (s.convention == QuadraturePhase::plus) ? 1.0 : -1.0;
                return std::sqrt(2.0) * alpha * s.x * std::polar(1.0, sign * s.phi) -
                       alpha * alpha * std::polar(1.0, 2.0 * sign * s.phi);
            } else if constexpr (std::is_same_v<T, SqueezedAncilla>) {
                return -alpha * alpha * std::polar(std::tanh(s.r), -s.phi);
            } else {
                throw UnsupportedScheme(
                    "number_weak_value_closed_form: no closed form for explicit Fock amplitudes");
            }
        },
        post);
}

// The protocol concentrates entanglement exactly when Im(n_W) > 0 (for a
// positive coupling; the direction flips with the sign of kappa_T, so a
// non-positive coupling is rejected rather than silently reinterpreted).
inline bool success_condition(Complex weak_value, double kappa_T) {
    if (!(kappa_T > 0.0))
        throw NonPositiveCoupling("success_condition: kappa_T must be > 0");
    return weak_value.imag() > 0.0;
}

inline bool success_condition(const WeakValue& w, double kappa_T) {
    return success_condition(w.value, kappa_T);
}

} // namespace procrust
