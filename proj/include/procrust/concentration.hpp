#pragma once

// The concentration protocol itself.  A cross-Kerr coupling
// U = exp(-i kappa_T n_B n_C) entangles mode B of a two-mode squeezed
// vacuum with an ancilla C; post-selecting the ancilla multiplies the
// Schmidt coefficients by a filter function
//
//   G(n) = <Phi_2| e^{-i kappa_T n n_C} |Phi_1>
//        = sum_m <Phi_2|m> e^{-i kappa_T n m} <m|Phi_1>,
//
// so the exact (unnormalized) output is sqrt(1-lambda^2) lambda^n G(n).
// To first order in kappa_T, G(n)/G(0) = e^{-i kappa_T n n_W}, which maps
// the state onto another two-mode squeezed vacuum with
// lambda' = lambda e^{-i kappa_T n_W}; Im(n_W) > 0 strengthens it.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "entanglement.hpp"
#include "errors.hpp"
#include "hilbert.hpp"
#include "weak_values.hpp"

namespace procrust {

struct ProtocolConfig {
    double lambda;
    double kappa_T;
    AncillaSpec pre;
    AncillaSpec post;
    Cutoff cutoff;
    double ortho_threshold = 1e-8;
    // predicted_tmsv uses the numeric weak value unless this asks for the
    // closed form
    bool use_analytic_weak_value = false;

    void validate() const {
        if (!(lambda >= 0.0 && lambda < 1.0))
            throw UnphysicalSqueezing("ProtocolConfig: lambda must lie in [0, 1)");
        if (!std::isfinite(kappa_T))
            throw ValidationError("ProtocolConfig: kappa_T must be finite");
        if (!(ortho_threshold > 0.0))
            throw ValidationError("ProtocolConfig: ortho_threshold must be > 0");
        if (std::holds_alternative<QuadratureAncilla>(pre))
            throw ValidationError("ProtocolConfig: pre-measurement ancilla cannot be a quadrature functional");
        check_spec(pre, true);
        check_spec(post, false);
    }

  private:
    static void check_spec(const AncillaSpec& spec, bool is_pre) {
        std::visit(
            [is_pre](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, CoherentAncilla>) {
                    if (!std::isfinite(s.magnitude) || !std::isfinite(s.phase))
                        throw ValidationError("ProtocolConfig: non-finite coherent parameters");
                    if (is_pre && !(s.magnitude > 0.0))
                        throw ValidationError(
                            "ProtocolConfig: pre-state coherent amplitude must be > 0");
                    if (is_pre && s.phase != 0.0)
                        throw ValidationError(
                            "ProtocolConfig: pre-state coherent amplitude must be real (phase 0)");
                } else if constexpr (std::is_same_v<T, SqueezedAncilla>) {
                    if (!std::isfinite(s.r) || !std::isfinite(s.phi))
                        throw ValidationError("ProtocolConfig: non-finite squeezing parameters");
                } else if constexpr (std::is_same_v<T, QuadratureAncilla>) {
                    if (!std::isfinite(s.x) || !std::isfinite(s.phi))
                        throw ValidationError("ProtocolConfig: non-finite quadrature parameters");
                } else {
                    if (s.amplitudes.empty())
                        throw ValidationError("ProtocolConfig: empty Fock amplitude list");
                    for (const Complex& a : s.amplitudes)
                        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
                            throw ValidationError("ProtocolConfig: non-finite Fock amplitude");
                }
            },
            spec);
    }
};

struct FilterFunction {
    std::vector<Complex> values; // values[n] = G(n)
    Complex at(int n) const {
        if (n < 0 || n >= static_cast<int>(values.size()))
            throw ValidationError("FilterFunction: index out of range");
        return values[static_cast<std::size_t>(n)];
    }
};

// G(n) for n = 0..n_max_B.  G(0) is exactly the post/pre overlap.
inline FilterFunction filter_function(const FockVector& pre, const PostSelector& post,
                                      double kappa_T, int n_max_B) {
    if (n_max_B < 0)
        throw ValidationError("filter_function: n_max_B must be >= 0");
    const std::vector<Complex> bra = post.bra_row(pre.n_max());
    FilterFunction g;
    g.values.resize(static_cast<std::size_t>(n_max_B) + 1);
    for (int n = 0; n <= n_max_B; ++n) {
        Complex acc{0.0, 0.0};
        for (int m = 0; m <= pre.n_max(); ++m)
            acc += bra[static_cast<std::size_t>(m)] *
                   std::polar(1.0, -kappa_T * double(n) * double(m)) * pre.amplitude(m);
        g.values[static_cast<std::size_t>(n)] = acc;
    }
    return g;
}

struct ExactProtocolOutput {
    SchmidtDiagonalState state; // normalized
    double success_prob;        // a probability, or a density if is_density
    bool is_density;
};

inline ExactProtocolOutput apply_protocol_exact(const ProtocolConfig& config) {
    config.validate();
    const FockVector pre = make_pre_state(config.pre, config.cutoff);
    const PostSelector post = PostSelector::from_spec(config.post, config.cutoff);
    const FilterFunction g = filter_function(pre, post, config.kappa_T, config.cutoff.n_max);
    const SchmidtDiagonalState in = tmsv(config.lambda, config.cutoff);

    std::vector<Complex> raw(static_cast<std::size_t>(config.cutoff.dim()));
    double success = 0.0;
    for (int n = 0; n <= config.cutoff.n_max; ++n) {
        raw[static_cast<std::size_t>(n)] =
            in.coefficient(n) * g.values[static_cast<std::size_t>(n)];
        success += std::norm(raw[static_cast<std::size_t>(n)]);
    }
    if (success < 1e-30)
        throw VanishingPostSelection("apply_protocol_exact: filtered state has vanishing norm");
    return ExactProtocolOutput{
        SchmidtDiagonalState::normalized(std::move(raw), config.cutoff),
        success,
        post.is_density(),
    };
}

// First-order transformation law lambda -> lambda e^{-i kappa_T n_W}.
inline Complex transformed_lambda(double lambda, double kappa_T, Complex weak_value) {
    return lambda * std::exp(Complex{0.0, -kappa_T} * weak_value);
}

// Predicted output: another two-mode squeezed vacuum with the transformed
// parameter, sqrt(1-|lambda'|^2) lambda'^n, normalized over the cutoff.
inline SchmidtDiagonalState predicted_tmsv(double lambda, double kappa_T, Complex weak_value,
                                           const Cutoff& cutoff) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw UnphysicalSqueezing("predicted_tmsv: lambda must lie in [0, 1)");
    const Complex lp = transformed_lambda(lambda, kappa_T, weak_value);
    const double mag = std::abs(lp);
    if (mag >= 1.0)
        throw UnphysicalOutput("predicted_tmsv: |lambda'| = " + detail::num_str(mag) +
                               " leaves the physical family");
    const double tail = std::pow(mag * mag, double(cutoff.n_max) + 1.0);
    if (tail > cutoff.tail_tol)
        throw CutoffTooSmall("predicted_tmsv: geometric tail mass " + detail::num_str(tail) +
                             " exceeds tail_tol " + detail::num_str(cutoff.tail_tol));
    std::vector<Complex> c(static_cast<std::size_t>(cutoff.dim()));
    const double head = std::sqrt(1.0 - mag * mag);
    Complex p{1.0, 0.0};
    for (int n = 0; n <= cutoff.n_max; ++n, p *= lp)
        c[static_cast<std::size_t>(n)] = head * p;
    return SchmidtDiagonalState::normalized(std::move(c), cutoff);
}

// How weak is the measurement really: residual(n) = G(n)/G(0)
//                                                   - e^{-i kappa_T n n_W}.
// The damped variant multiplies by lambda^n, the weight the residual
// actually carries in the output state.
struct WeaknessReport {
    std::vector<Complex> residuals;        // undamped
    std::vector<Complex> residuals_damped; // lambda^n residual(n)
    double max_abs;
    int argmax;
    double max_abs_damped;
    int argmax_damped;
};

inline WeaknessReport weakness_residuals(const ProtocolConfig& config, Complex weak_value) {
    config.validate();
    const FockVector pre = make_pre_state(config.pre, config.cutoff);
    const PostSelector post = PostSelector::from_spec(config.post, config.cutoff);
    const FilterFunction g = filter_function(pre, post, config.kappa_T, config.cutoff.n_max);
    detail::check_overlap_scale(g.values[0], pre, post, config.ortho_threshold);

    WeaknessReport rep;
    const int dim = config.cutoff.dim();
    rep.residuals.resize(static_cast<std::size_t>(dim));
    rep.residuals_damped.resize(static_cast<std::size_t>(dim));
    rep.max_abs = 0.0;
    rep.argmax = 0;
    rep.max_abs_damped = 0.0;
    rep.argmax_damped = 0;
    double damp = 1.0;
    for (int n = 0; n < dim; ++n, damp *= config.lambda) {
        const Complex ideal = std::exp(Complex{0.0, -config.kappa_T * double(n)} * weak_value);
        const Complex res = g.values[static_cast<std::size_t>(n)] / g.values[0] - ideal;
        rep.residuals[static_cast<std::size_t>(n)] = res;
        rep.residuals_damped[static_cast<std::size_t>(n)] = damp * res;
        if (std::abs(res) > rep.max_abs) {
            rep.max_abs = std::abs(res);
            rep.argmax = n;
        }
        if (std::abs(damp * res) > rep.max_abs_damped) {
            rep.max_abs_damped = std::abs(damp * res);
            rep.argmax_damped = n;
        }
    }
    return rep;
}

// |<a|b>|^2 for normalized Schmidt-diagonal states.
inline double approximation_fidelity(const SchmidtDiagonalState& a,
                                     const SchmidtDiagonalState& b) {
    if (!a.is_normalized() || !b.is_normalized())
        throw NotNormalized("approximation_fidelity: both states must be normalized");
    const int n_top = std::min(a.n_max(), b.n_max());
    Complex acc{0.0, 0.0};
    for (int n = 0; n <= n_top; ++n)
        acc += std::conj(a.coefficient(n)) * b.coefficient(n);
    return std::norm(acc);
}

struct ConcentrationResult {
    SchmidtDiagonalState input;  // normalized truncated two-mode squeezed vacuum
    ExactProtocolOutput exact;
    WeakValue weak_numeric;
    std::optional<Complex> weak_analytic; // absent when no closed form applies
    Complex weak_used;                    // the one fed into the prediction
    Complex lambda_prime;
    std::optional<SchmidtDiagonalState> predicted; // absent when unphysical
    std::optional<std::string> predicted_failure;  // why it is absent
    std::optional<double> fidelity;                // exact vs predicted
    WeaknessReport weakness;
    EntanglementVerdict verdict; // exact output vs input
    bool success;                // kappa_T > 0 and Im(weak_used) > 0
};

inline ConcentrationResult run(const ProtocolConfig& config) {
    config.validate();
    const FockVector pre = make_pre_state(config.pre, config.cutoff);
    const PostSelector post = PostSelector::from_spec(config.post, config.cutoff);

    SchmidtDiagonalState input =
        SchmidtDiagonalState::normalized(tmsv(config.lambda, config.cutoff).coefficients(),
                                         config.cutoff);
    ExactProtocolOutput exact = apply_protocol_exact(config);
    WeakValue weak_numeric = weak_value_numeric(pre, post, config.ortho_threshold);

    std::optional<Complex> weak_analytic;
    if (const auto* c = std::get_if<CoherentAncilla>(&config.pre)) {
        try {
            weak_analytic = number_weak_value_closed_form(config.post, c->magnitude);
        } catch (const UnsupportedScheme&) {
        }
    }
    if (config.use_analytic_weak_value && !weak_analytic)
        throw UnsupportedScheme("run: analytic weak value requested but no closed form applies");
    const Complex weak_used =
        config.use_analytic_weak_value ? *weak_analytic : weak_numeric.value;

    std::optional<SchmidtDiagonalState> predicted;
    std::optional<std::string> predicted_failure;
    std::optional<double> fidelity;
    try {
        predicted = predicted_tmsv(config.lambda, config.kappa_T, weak_used, config.cutoff);
        fidelity = approximation_fidelity(exact.state, *predicted);
    } catch (const PhysicalRegimeError& e) {
        predicted_failure = e.what();
    } catch (const CutoffTooSmall& e) {
        // the boosted state may need a larger basis than the exact run did;
        // keep the exact results and report why the prediction is absent
        predicted_failure = e.what();
    }

    WeaknessReport weakness = weakness_residuals(config, weak_used);
    EntanglementVerdict verdict = compare(input, exact.state);
    const bool success = config.kappa_T > 0.0 && weak_used.imag() > 0.0;

    return ConcentrationResult{
        std::move(input),
        std::move(exact),
        weak_numeric,
        weak_analytic,
        weak_used,
        transformed_lambda(config.lambda, config.kappa_T, weak_used),
        std::move(predicted),
        std::move(predicted_failure),
        fidelity,
        std::move(weakness),
        verdict,
        success,
    };
}

// Physical acceptance window for a quadrature post-selection: integrate the
// success density over x' in [x - delta/2, x + delta/2] by composite
// Simpson.  The output state itself is still reported for the ideal
// functional; a finite window would mix over x'.
inline double windowed_success_probability(const ProtocolConfig& config, double delta,
                                           int n_points = 65) {
    config.validate();
    const auto* quad = std::get_if<QuadratureAncilla>(&config.post);
    if (!quad)
        throw ValidationError("windowed_success_probability: post-selection is not a quadrature functional");
    if (!(delta > 0.0))
        throw ValidationError("windowed_success_probability: window width must be > 0");
    if (n_points < 3)
        throw ValidationError("windowed_success_probability: need at least 3 sample points");
    if (n_points % 2 == 0)
        ++n_points; // Simpson needs an odd count

    const FockVector pre = make_pre_state(config.pre, config.cutoff);
    const SchmidtDiagonalState in = tmsv(config.lambda, config.cutoff);
    const double x_lo = quad->x - 0.5 * delta;
    const double h = delta / double(n_points - 1);

    auto density_at = [&](double xs) {
        const PostSelector post = PostSelector::quadrature(
            QuadratureFunctional{xs, quad->phi, quad->convention});
        const FilterFunction g = filter_function(pre, post, config.kappa_T, config.cutoff.n_max);
        double s = 0.0;
        for (int n = 0; n <= config.cutoff.n_max; ++n)
            s += std::norm(in.coefficient(n) * g.values[static_cast<std::size_t>(n)]);
        return s;
    };

    double acc = 0.0;
    for (int k = 0; k < n_points; ++k) {
        const double w = (k == 0 || k == n_points - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += w * density_at(x_lo + h * double(k));
    }
    return acc * h / 3.0;
}

} // namespace procrust
