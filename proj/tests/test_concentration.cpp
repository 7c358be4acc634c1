#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <procrust/concentration.hpp>
#include <procrust/entanglement.hpp>
#include <procrust/hilbert.hpp>
#include <procrust/weak_values.hpp>

using namespace procrust;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

// Brute-force oracle: enumerate the full |n>_A |n>_B |m>_C tensor, apply
// the diagonal coupling phase e^{-i kappa n m} entry by entry, contract
// mode C with the post-selection bra.  No filter-function algebra shared
// with the library path.
struct OracleOutput {
    std::vector<Complex> raw; // unnormalized Schmidt coefficients
    double success;
};

OracleOutput oracle_protocol(double lambda, double kappa,
                             const std::vector<Complex>& pre_amps,
                             const std::vector<Complex>& post_bra_row) {
    const std::size_t nb = post_bra_row.size();
    const std::size_t na = pre_amps.size() < nb ? pre_amps.size() : nb;
    OracleOutput out;
    out.raw.assign(nb, Complex{0.0, 0.0});
    out.success = 0.0;
    const double head = std::sqrt(1.0 - lambda * lambda);
    for (std::size_t n = 0; n < nb; ++n) {
        const Complex c_n = head * std::pow(lambda, double(n));
        Complex acc{0.0, 0.0};
        for (std::size_t m = 0; m < na; ++m) {
            const Complex coupled =
                c_n * pre_amps[m] * std::polar(1.0, -kappa * double(n) * double(m));
            acc += post_bra_row[m] * coupled;
        }
        out.raw[n] = acc;
        out.success += std::norm(acc);
    }
    return out;
}

// Closed-form filter ratios G(n)/G(0) for a real coherent pre-state.
Complex oracle_ratio_coherent(double alpha, Complex beta, double kappa, int n) {
    return std::exp((std::polar(1.0, -kappa * double(n)) - 1.0) * std::conj(beta) * alpha);
}

Complex oracle_ratio_quadrature_plus(double alpha, double x, double phi, double kappa, int n) {
    const Complex shifted = std::polar(1.0, phi - kappa * double(n));
    const Complex base = std::polar(1.0, phi);
    return std::exp(std::sqrt(2.0) * x * alpha * (shifted - base) -
                    0.5 * alpha * alpha * (shifted * shifted - base * base));
}

Complex oracle_ratio_squeezed(double alpha, double r, double phi, double kappa, int n) {
    return std::exp(-0.5 * alpha * alpha * std::polar(std::tanh(r), -phi) *
                    (std::polar(1.0, -2.0 * kappa * double(n)) - 1.0));
}

ProtocolConfig baseline_config(int n_max = 80) {
    return ProtocolConfig{0.5, 0.05, CoherentAncilla{1.0, 0.0},
                          CoherentAncilla{1.0, 3.0 * kPi / 2.0}, Cutoff(n_max)};
}

} // namespace

TEST_CASE("filter function matches the closed-form ratios") {
    const double kappa = 0.13;

    SECTION("coherent post-selection") {
        const Cutoff c(48);
        const FockVector pre = coherent_fock(1.1, c);
        const Complex beta = std::polar(0.8, 2.4);
        const PostSelector post =
            PostSelector::normalizable(coherent_fock(beta, c));
        const FilterFunction g = filter_function(pre, post, kappa, 30);
        for (int n = 0; n <= 30; ++n)
            REQUIRE_THAT(std::abs(g.at(n) / g.at(0) -
                                  oracle_ratio_coherent(1.1, beta, kappa, n)),
                         WithinAbs(0.0, 1e-10));
    }
    SECTION("quadrature post-selection, plus convention") {
        const Cutoff c(96);
        const FockVector pre = coherent_fock(0.9, c);
        const PostSelector post = PostSelector::quadrature(
            QuadratureFunctional{0.6, 0.7, QuadraturePhase::plus});
        const FilterFunction g = filter_function(pre, post, kappa, 30);
        for (int n = 0; n <= 30; ++n)
            REQUIRE_THAT(std::abs(g.at(n) / g.at(0) -
                                  oracle_ratio_quadrature_plus(0.9, 0.6, 0.7, kappa, n)),
                         WithinAbs(0.0, 1e-10));
    }
    SECTION("squeezed post-selection") {
        const Cutoff c(64);
        const FockVector pre = coherent_fock(0.8, c);
        const PostSelector post =
            PostSelector::normalizable(squeezed_vacuum_fock(0.6, kPi / 4.0, c));
        const FilterFunction g = filter_function(pre, post, kappa, 30);
        for (int n = 0; n <= 30; ++n)
            REQUIRE_THAT(std::abs(g.at(n) / g.at(0) -
                                  oracle_ratio_squeezed(0.8, 0.6, kPi / 4.0, kappa, n)),
                         WithinAbs(0.0, 1e-10));
    }
    SECTION("G(0) is exactly the post/pre overlap") {
        const Cutoff c(48);
        const FockVector pre = coherent_fock(1.0, c);
        const PostSelector post = PostSelector::from_spec(CoherentAncilla{1.0, 1.0}, c);
        const FilterFunction g = filter_function(pre, post, 0.07, 10);
        REQUIRE_THAT(std::abs(g.at(0) - overlap(post, pre)), WithinAbs(0.0, 1e-15));
        REQUIRE_THROWS_AS(g.at(11), ValidationError);
        REQUIRE_THROWS_AS(g.at(-1), ValidationError);
    }
}

TEST_CASE("exact protocol output agrees with the brute-force tensor oracle") {
    struct Case {
        const char* name;
        AncillaSpec post;
        int n_max;
    };
    const std::vector<Case> cases{
        {"coherent", CoherentAncilla{1.0, 3.0 * kPi / 2.0}, 24},
        {"quadrature", QuadratureAncilla{1.5, 0.7, QuadraturePhase::plus}, 24},
        {"squeezed", SqueezedAncilla{0.6, kPi / 4.0}, 40},
    };
    for (const Case& tc : cases) {
        DYNAMIC_SECTION(tc.name) {
            const Cutoff c(tc.n_max);
            const ProtocolConfig config{0.5, 0.05, CoherentAncilla{1.0, 0.0}, tc.post, c};
            const ExactProtocolOutput exact = apply_protocol_exact(config);

            const FockVector pre = make_pre_state(config.pre, c);
            const PostSelector post = PostSelector::from_spec(config.post, c);
            const OracleOutput want =
                oracle_protocol(0.5, 0.05, pre.amplitudes(), post.bra_row(c.n_max));

            REQUIRE_THAT(exact.success_prob, WithinAbs(want.success, 1e-10));
            const double scale = std::sqrt(want.success);
            for (int n = 0; n <= c.n_max; ++n)
                REQUIRE_THAT(std::abs(exact.state.coefficient(n) -
                                      want.raw[std::size_t(n)] / scale),
                             WithinAbs(0.0, 1e-10));
            REQUIRE(exact.is_density == std::holds_alternative<QuadratureAncilla>(tc.post));
        }
    }
}

TEST_CASE("exact protocol edge behavior") {
    SECTION("kappa = 0 leaves the input untouched and succeeds trivially") {
        ProtocolConfig config = baseline_config();
        config.kappa_T = 0.0;
        const ConcentrationResult res = run(config);
        REQUIRE_THAT(*res.fidelity, WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(approximation_fidelity(res.exact.state, res.input),
                     WithinAbs(1.0, 1e-12));
        REQUIRE_FALSE(res.success); // no coupling, no concentration
        const FockVector pre = make_pre_state(config.pre, config.cutoff);
        const PostSelector post = PostSelector::from_spec(config.post, config.cutoff);
        REQUIRE_THAT(res.exact.success_prob,
                     WithinAbs(std::norm(overlap(post, pre)), 1e-12));
    }
    SECTION("lambda = 0 passes a bare product state through") {
        ProtocolConfig config = baseline_config();
        config.lambda = 0.0;
        const ExactProtocolOutput exact = apply_protocol_exact(config);
        REQUIRE_THAT(std::abs(exact.state.coefficient(0)), WithinAbs(1.0, 1e-14));
        const FockVector pre = make_pre_state(config.pre, config.cutoff);
        const PostSelector post = PostSelector::from_spec(config.post, config.cutoff);
        REQUIRE_THAT(exact.success_prob, WithinAbs(std::norm(overlap(post, pre)), 1e-14));
    }
    SECTION("fully filtered-out input raises VanishingPostSelection") {
        std::vector<Complex> one{{0.0, 0.0}, {1.0, 0.0}};
        std::vector<Complex> zero{{1.0, 0.0}, {0.0, 0.0}};
        // lambda small enough for a two-level cutoff to hold its tail
        const ProtocolConfig config{0.001, 0.05, FockAncilla{one}, FockAncilla{zero},
                                    Cutoff(1)};
        REQUIRE_THROWS_AS(apply_protocol_exact(config), VanishingPostSelection);
    }
    SECTION("near-orthogonal pre/post pair raises through run") {
        const double t = 1e-10;
        std::vector<Complex> tilted{{std::sqrt(1.0 - t * t), 0.0}, {t, 0.0}};
        std::vector<Complex> excited{{0.0, 0.0}, {1.0, 0.0}};
        const ProtocolConfig config{0.001, 0.05, FockAncilla{tilted}, FockAncilla{excited},
                                    Cutoff(1)};
        REQUIRE_THROWS_AS(run(config), NearOrthogonalPostSelection);
    }
    SECTION("a quadrature pre-state is rejected up front") {
        const ProtocolConfig config{0.5, 0.05, QuadratureAncilla{0.0, 0.0},
                                    CoherentAncilla{1.0, 0.0}, Cutoff(16)};
        REQUIRE_THROWS_AS(config.validate(), ValidationError);
        REQUIRE_THROWS_AS(run(config), ValidationError);
    }
    SECTION("unphysical lambda is rejected") {
        ProtocolConfig config = baseline_config();
        config.lambda = 1.0;
        REQUIRE_THROWS_AS(run(config), UnphysicalSqueezing);
    }
}

TEST_CASE("transformation law and predicted state") {
    SECTION("modulus follows lambda e^{kappa Im n_W}") {
        for (double lambda : {0.3, 0.5, 0.7}) {
            for (double kappa : {0.05, 0.2}) {
                for (double im : {-1.0, 0.4, 1.0}) {
                    const Complex w{0.7, im};
                    const Complex lp = transformed_lambda(lambda, kappa, w);
                    REQUIRE_THAT(std::abs(lp),
                                 WithinAbs(lambda * std::exp(kappa * im), 1e-14));
                    REQUIRE_THAT(std::arg(lp) , WithinAbs(-kappa * 0.7, 1e-14));
                }
            }
        }
    }
    SECTION("predicted state is the transformed two-mode squeezed vacuum") {
        const Cutoff c(80);
        const Complex w{0.0, 1.0};
        const SchmidtDiagonalState pred = predicted_tmsv(0.5, 0.05, w, c);
        const double mag = 0.5 * std::exp(0.05);
        REQUIRE(pred.is_normalized());
        for (int n = 0; n <= 10; ++n)
            REQUIRE_THAT(std::abs(pred.coefficient(n)),
                         WithinAbs(std::sqrt(1.0 - mag * mag) * std::pow(mag, n), 1e-12));
        // frozen by the direct sum 2 sum_n n p_n of the same spectrum
        REQUIRE_THAT(mean_photon_number(pred), WithinAbs(0.7635483040960607, 1e-10));
        REQUIRE_THAT(mean_photon_number(pred),
                     WithinAbs(tmsv_mean_photon_number(mag), 1e-8));
    }
    SECTION("leaving the physical family raises UnphysicalOutput") {
        const Complex w{0.0, 1.0};
        REQUIRE_THROWS_AS(predicted_tmsv(0.9, 1.0, w, Cutoff(64)), UnphysicalOutput);
        // |lambda'| = 0.5 e^{ln(4)/2} = 1 exactly: the boundary is out too
        REQUIRE_THROWS_AS(predicted_tmsv(0.5, std::log(4.0) / 2.0, w, Cutoff(64)),
                          UnphysicalOutput);
        REQUIRE_NOTHROW(predicted_tmsv(0.5, std::log(4.0) / 2.0 - 0.05, w, Cutoff(256)));
    }
    SECTION("a cutoff too small for the boosted state is caught") {
        const Complex w{0.0, 1.0};
        REQUIRE_THROWS_AS(predicted_tmsv(0.9, 0.1, w, Cutoff(64)), CutoffTooSmall);
    }
}

TEST_CASE("weakness residuals") {
    const Complex w{0.0, 1.0}; // exact weak value for the baseline pair

    SECTION("residual at n = 0 vanishes to machine precision") {
        const WeaknessReport rep = weakness_residuals(baseline_config(), w);
        // G(0)/G(0) is one complex division away from an exact 1
        REQUIRE_THAT(std::abs(rep.residuals[0]), WithinAbs(0.0, 1e-15));
        REQUIRE_THAT(std::abs(rep.residuals_damped[0]), WithinAbs(0.0, 1e-15));
        REQUIRE(rep.max_abs >= rep.max_abs_damped);
    }
    SECTION("damped residuals shrink monotonically with the coupling") {
        double prev = 1e9;
        for (double kappa : {0.2, 0.1, 0.05}) {
            ProtocolConfig config = baseline_config();
            config.kappa_T = kappa;
            const WeaknessReport rep = weakness_residuals(config, w);
            REQUIRE(rep.max_abs_damped < prev);
            prev = rep.max_abs_damped;
        }
        REQUIRE(prev < 2e-3); // kappa = 0.05 sits around 1.6e-3
    }
}

TEST_CASE("approximation fidelity") {
    const Cutoff c(128);
    auto normalized_tmsv = [&](double l) {
        return SchmidtDiagonalState::normalized(tmsv(l, c).coefficients(), c);
    };

    SECTION("closed form for two squeezed-vacuum family members") {
        for (double l1 : {0.2, 0.5}) {
            for (double l2 : {0.35, 0.6}) {
                const double want = (1.0 - l1 * l1) * (1.0 - l2 * l2) /
                                    ((1.0 - l1 * l2) * (1.0 - l1 * l2));
                REQUIRE_THAT(approximation_fidelity(normalized_tmsv(l1), normalized_tmsv(l2)),
                             WithinAbs(want, 1e-12));
            }
        }
    }
    SECTION("identity and symmetry") {
        const SchmidtDiagonalState a = normalized_tmsv(0.5);
        const SchmidtDiagonalState b = normalized_tmsv(0.3);
        REQUIRE_THAT(approximation_fidelity(a, a), WithinAbs(1.0, 1e-14));
        REQUIRE_THAT(approximation_fidelity(a, b),
                     WithinAbs(approximation_fidelity(b, a), 1e-14));
    }
    SECTION("raw states are refused") {
        const SchmidtDiagonalState raw = tmsv(0.5, c);
        REQUIRE_THROWS_AS(approximation_fidelity(raw, normalized_tmsv(0.5)), NotNormalized);
    }
}

TEST_CASE("full run on the baseline concentrating configuration") {
    const ConcentrationResult res = run(baseline_config());

    REQUIRE(res.success);
    REQUIRE_THAT(res.weak_numeric.value.imag(), WithinAbs(1.0, 1e-9));
    REQUIRE(res.weak_analytic.has_value());
    REQUIRE_THAT(std::abs(*res.weak_analytic - Complex{0.0, 1.0}), WithinAbs(0.0, 1e-12));
    // frozen by the brute-force tensor oracle
    REQUIRE_THAT(res.exact.success_prob, WithinAbs(0.14024282935645346, 1e-9));
    REQUIRE_FALSE(res.exact.is_density);
    REQUIRE(res.verdict.majorized);
    REQUIRE(res.verdict.entropy_out > res.verdict.entropy_in);
    REQUIRE_THAT(res.verdict.entropy_in, WithinAbs(1.0817041659455104, 1e-8));
    REQUIRE_THAT(res.verdict.entropy_out, WithinAbs(1.1746584771195698, 1e-8));
    REQUIRE(res.fidelity.has_value());
    REQUIRE(*res.fidelity > 0.99999);
    REQUIRE_THAT(std::abs(res.lambda_prime), WithinAbs(0.5 * std::exp(0.05), 1e-12));
    REQUIRE_FALSE(res.predicted_failure.has_value());

    SECTION("violated success condition dilutes instead") {
        ProtocolConfig config = baseline_config();
        config.post = CoherentAncilla{1.0, kPi / 2.0};
        const ConcentrationResult bad = run(config);
        REQUIRE_FALSE(bad.success);
        REQUIRE_THAT(bad.weak_numeric.value.imag(), WithinAbs(-1.0, 1e-9));
        REQUIRE(bad.verdict.entropy_out < bad.verdict.entropy_in);
        REQUIRE_FALSE(bad.verdict.majorized);
    }
    SECTION("analytic weak value can drive the prediction") {
        ProtocolConfig config = baseline_config();
        config.use_analytic_weak_value = true;
        const ConcentrationResult ana = run(config);
        REQUIRE(ana.weak_used == *ana.weak_analytic);
        REQUIRE(ana.fidelity.has_value());
        REQUIRE(*ana.fidelity > 0.99999);
    }
    SECTION("analytic flag without a closed form is refused") {
        ProtocolConfig config = baseline_config();
        std::vector<Complex> amps(81, Complex{0.0, 0.0});
        amps[0] = amps[1] = Complex{std::sqrt(0.5), 0.0};
        config.post = FockAncilla{amps};
        config.use_analytic_weak_value = true;
        REQUIRE_THROWS_AS(run(config), UnsupportedScheme);
        config.use_analytic_weak_value = false;
        REQUIRE_FALSE(run(config).weak_analytic.has_value());
    }
    SECTION("unphysical prediction degrades gracefully") {
        ProtocolConfig config = baseline_config();
        config.lambda = 0.7;
        config.kappa_T = 0.5;
        const ConcentrationResult res2 = run(config);
        REQUIRE_FALSE(res2.predicted.has_value());
        REQUIRE(res2.predicted_failure.has_value());
        REQUIRE_FALSE(res2.fidelity.has_value());
        REQUIRE(res2.success); // the exact protocol still concentrates
        REQUIRE(res2.verdict.entropy_out > res2.verdict.entropy_in);
    }
}

TEST_CASE("quadrature post-selection run reports densities and windows") {
    const ProtocolConfig config{0.5, 0.05, CoherentAncilla{1.0, 0.0},
                                QuadratureAncilla{2.0, 0.7, QuadraturePhase::plus},
                                Cutoff(96)};
    const ConcentrationResult res = run(config);
    REQUIRE(res.exact.is_density);
    REQUIRE(res.success); // x = 2.0 is beyond the threshold 1.0817
    REQUIRE(res.fidelity.has_value());
    REQUIRE(*res.fidelity > 0.9999);

    SECTION("a narrow window integrates to width times density") {
        const double density = res.exact.success_prob;
        const double narrow = windowed_success_probability(config, 1e-4, 9);
        REQUIRE_THAT(narrow / 1e-4, WithinAbs(density, 1e-6));
        const double wide = windowed_success_probability(config, 1.0);
        REQUIRE(wide > 0.0);
        REQUIRE(wide < 1.0);
    }
    SECTION("window requires a quadrature post-selection and a real width") {
        REQUIRE_THROWS_AS(windowed_success_probability(baseline_config(), 0.1),
                          ValidationError);
        REQUIRE_THROWS_AS(windowed_success_probability(config, 0.0), ValidationError);
        REQUIRE_THROWS_AS(windowed_success_probability(config, 0.1, 2), ValidationError);
    }
}

TEST_CASE("global post-selection phase drops out of every observable") {
    const Cutoff c(48);
    std::vector<Complex> amps = coherent_fock(std::polar(0.9, 1.3), c).amplitudes();
    std::vector<Complex> rotated = amps;
    for (Complex& a : rotated)
        a *= std::polar(1.0, 0.77);

    const ProtocolConfig plain{0.5, 0.05, CoherentAncilla{1.0, 0.0}, FockAncilla{amps},
                               c};
    const ProtocolConfig turned{0.5, 0.05, CoherentAncilla{1.0, 0.0}, FockAncilla{rotated},
                                c};
    const ConcentrationResult a = run(plain);
    const ConcentrationResult b = run(turned);

    REQUIRE_THAT(a.exact.success_prob, WithinAbs(b.exact.success_prob, 1e-14));
    REQUIRE_THAT(std::abs(a.weak_numeric.value - b.weak_numeric.value),
                 WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(a.verdict.entropy_out, WithinAbs(b.verdict.entropy_out, 1e-12));
    for (int n = 0; n <= 10; ++n)
        REQUIRE_THAT(std::abs(std::abs(a.exact.state.coefficient(n)) -
                              std::abs(b.exact.state.coefficient(n))),
                     WithinAbs(0.0, 1e-12));
}
