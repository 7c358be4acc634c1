#pragma once

// Schmidt spectra, entanglement measures, and the majorization certificate.
// For a Schmidt-diagonal state sum_n c_n |n, n> the reduced state of either
// mode is diagonal with probabilities p_n = |c_n|^2, so everything here is
// arithmetic on a probability vector.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hilbert.hpp"

namespace procrust {

// Reduced-state eigenvalues sorted in descending order, summing to 1
// within 1e-10.
class SchmidtSpectrum {
  public:
    explicit SchmidtSpectrum(std::vector<double> probabilities)
        : probs_(std::move(probabilities)) {
        if (probs_.empty())
            throw ValidationError("SchmidtSpectrum: empty spectrum");
        double s = 0.0;
        for (double p : probs_) {
            if (!std::isfinite(p) || p < 0.0)
                throw ValidationError("SchmidtSpectrum: probabilities must be finite and >= 0");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-10)
            throw NotNormalized("SchmidtSpectrum: probabilities sum to " + detail::num_str(s));
        std::sort(probs_.begin(), probs_.end(), std::greater<double>());
    }

    const std::vector<double>& probabilities() const { return probs_; }
    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t k) const { return k < probs_.size() ? probs_[k] : 0.0; }

  private:
    std::vector<double> probs_;
};

inline SchmidtSpectrum schmidt_spectrum(const SchmidtDiagonalState& state) {
    if (!state.is_normalized())
        throw NotNormalized("schmidt_spectrum: state is not normalized");
    std::vector<double> p;
    p.reserve(state.coefficients().size());
    for (const Complex& c : state.coefficients())
        p.push_back(std::norm(c));
    return SchmidtSpectrum(std::move(p));
}

// S = -sum p log(p) in the given base; base 2 gives ebits.  0 log 0 = 0.
inline double von_neumann_entropy(const SchmidtSpectrum& spectrum, double log_base = 2.0) {
    if (!(log_base > 1.0))
        throw ValidationError("von_neumann_entropy: log base must be > 1");
    const double scale = 1.0 / std::log(log_base);
    double s = 0.0;
    for (double p : spectrum.probabilities())
        if (p > 0.0)
            s -= p * std::log(p) * scale;
    return s;
}

// Tr rho^2 = sum p^2; 1 for a product state, smaller for more entanglement.
inline double purity(const SchmidtSpectrum& spectrum) {
    double s = 0.0;
    for (double p : spectrum.probabilities())
        s += p * p;
    return s;
}

// d majorized by c: every head partial sum of d is <= the corresponding
// head sum of c, up to eps.  Spectra are already sorted descending; the
// shorter one is zero-padded.  The l = 0 (empty head) comparison is
// trivially 0 <= 0 and the full sums agree by normalization, so the loop
// just runs every prefix.
inline bool is_majorized_by(const SchmidtSpectrum& d, const SchmidtSpectrum& c,
                            double eps = 1e-9) {
    const std::size_t len = std::max(d.size(), c.size());
    double head_d = 0.0, head_c = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
        head_d += d[k];
        head_c += c[k];
        if (head_d > head_c + eps)
            return false;
    }
    return true;
}

// Closed forms for the two-mode squeezed vacuum with parameter magnitude
// lambda, spectrum p_n = (1 - lambda^2) lambda^{2n}.

inline double tmsv_entropy(double lambda_mag, double log_base = 2.0) {
    if (!(lambda_mag >= 0.0 && lambda_mag < 1.0))
        throw UnphysicalSqueezing("tmsv_entropy: |lambda| must lie in [0, 1)");
    if (!(log_base > 1.0))
        throw ValidationError("tmsv_entropy: log base must be > 1");
    if (lambda_mag == 0.0)
        return 0.0;
    const double l2 = lambda_mag * lambda_mag;
    const double scale = 1.0 / std::log(log_base);
    return (-std::log(1.0 - l2) - l2 / (1.0 - l2) * std::log(l2)) * scale;
}

inline double tmsv_purity(double lambda_mag) {
    if (!(lambda_mag >= 0.0 && lambda_mag < 1.0))
        throw UnphysicalSqueezing("tmsv_purity: |lambda| must lie in [0, 1)");
    const double l2 = lambda_mag * lambda_mag;
    return (1.0 - l2) / (1.0 + l2);
}

// Mean total photon number of the pair, 2 lambda^2 / (1 - lambda^2).
inline double tmsv_mean_photon_number(double lambda_mag) {
    if (!(lambda_mag >= 0.0 && lambda_mag < 1.0))
        throw UnphysicalSqueezing("tmsv_mean_photon_number: |lambda| must lie in [0, 1)");
    const double l2 = lambda_mag * lambda_mag;
    return 2.0 * l2 / (1.0 - l2);
}

// Mean total photon number sum_n 2 n |c_n|^2.  Takes the state, not the
// spectrum: sorting a spectrum divorces index from photon number.
inline double mean_photon_number(const SchmidtDiagonalState& state) {
    if (!state.is_normalized())
        throw NotNormalized("mean_photon_number: state is not normalized");
    double s = 0.0;
    const auto& c = state.coefficients();
    for (std::size_t n = 0; n < c.size(); ++n)
        s += 2.0 * double(n) * std::norm(c[n]);
    return s;
}

// Side-by-side verdict for an input/output pair.  majorized == true means
// the output reduced spectrum is majorized by the input's, i.e. every LOCC
// monotone of this kind certifies concentration.
struct EntanglementVerdict {
    bool majorized;
    double entropy_in;
    double entropy_out;
    double purity_in;
    double purity_out;
    double mean_photons_in;
    double mean_photons_out;
};

inline EntanglementVerdict compare(const SchmidtDiagonalState& input,
                                   const SchmidtDiagonalState& output,
                                   double majorization_eps = 1e-9) {
    const SchmidtSpectrum in_spec = schmidt_spectrum(input);
    const SchmidtSpectrum out_spec = schmidt_spectrum(output);
    return EntanglementVerdict{
        is_majorized_by(out_spec, in_spec, majorization_eps),
        von_neumann_entropy(in_spec),
        von_neumann_entropy(out_spec),
        purity(in_spec),
        purity(out_spec),
        mean_photon_number(input),
        mean_photon_number(output),
    };
}

} // namespace procrust
