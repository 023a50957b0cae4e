#ifndef MCDLAB_CONSTRUCTIONS_HPP
#define MCDLAB_CONSTRUCTIONS_HPP

#include <optional>
#include <vector>

#include "mcdlab/cones.hpp"
#include "mcdlab/ensemble.hpp"

namespace mcdlab {

/**
 * Builders that turn entanglement witnesses into ensembles whose maximum
 * confidence is provably larger globally than under separable measurements,
 * together with the closed-form predictions those guarantees rest on.
 */

// Spectral split W = plus - minus into orthogonal PSD parts. degenerate is
// set when W has no negative part (minus ~ 0), in which case W was PSD and
// cannot seed an ensemble.
struct JordanDecomposition {
    HermitianOperator plus;
    HermitianOperator minus;
    bool degenerate = false;
};

JordanDecomposition jordan_decompose(const HermitianOperator& w);

/**
 * Two-state ensemble from a single witness W = W+ - W-:
 *   eta_1 = Tr W- / (Tr W+ + Tr W-),  rho_1 = W- / Tr W-,
 *   eta_2 = Tr W+ / (Tr W+ + Tr W-),  rho_2 = W+ / Tr W+.
 * Outcome 0 (the W- side) then has global confidence exactly 1 while any
 * separable strategy stays at or below 1/2, because q rho_0 - eta_1 rho_1 is
 * a positive multiple of W at q = 1/2.
 *
 * Throws std::invalid_argument when w is certified not to be a witness
 * (PSD, or a product vector with negative expectation exists). A verdict of
 * unknown on undecidable dimensions does not block construction; the
 * separable bound is then predicted rather than certified.
 */
Ensemble ensemble_from_witness(const HermitianOperator& w, const SeesawOptions& seesaw = {},
                               const SdpOptions& sdp = {});

/**
 * A finite family of witnesses W_1..W_n with the derived quantities the
 * ensemble construction needs. Built by witness_family, which verifies each
 * member, rejects any certified non-witness, and fills:
 *   w_sum = sum of W_i, epsilon = smallest eigenvalue of w_sum,
 *   lambda[i] = largest eigenvalue of W_i, lambda_sum = sum of lambda[i],
 *   delta[j] = |smallest eigenvalue of sqrt(w_sum)^-1 W_j sqrt(w_sum)^-1|
 *   (filled only when epsilon > 0, where the inverse root exists).
 */
struct WitnessFamily {
    std::vector<HermitianOperator> witnesses;
    HermitianOperator w_sum;
    double epsilon = 0.0;
    std::vector<double> lambda;
    double lambda_sum = 0.0;
    std::vector<double> delta;
    std::vector<ConeVerdict> witness_verdicts;
};

WitnessFamily witness_family(std::vector<HermitianOperator> witnesses,
                             const SeesawOptions& seesaw = {}, const SdpOptions& sdp = {});

/**
 * n-state ensemble from a family with epsilon > 0:
 *   eta_i proportional to Tr(lambda_i W - epsilon W_i),
 *   rho_i = (lambda_i W - epsilon W_i) / Tr(lambda_i W - epsilon W_i).
 * Every outcome then carries a guaranteed gap: separable confidence at most
 * lambda_j / (lambda - epsilon), global confidence strictly above it.
 * Normalization is derived from the unit-trace requirement on the average
 * state (the per-item traces sum to Tr(lambda W - epsilon W)).
 *
 * Throws std::domain_error when epsilon <= 0 (construction impossible) and
 * std::runtime_error when a numerator leaves the PSD cone by more than a
 * 1e-9 relative tolerance (numerical degeneracy).
 */
Ensemble ensemble_from_family(const WitnessFamily& f);

/**
 * Closed-form global maximum confidence of outcome j in the constructed
 * ensemble: (lambda_j + epsilon * delta_j) / (lambda - epsilon). Requires
 * epsilon > 0; throws std::domain_error otherwise.
 */
double predicted_max_confidence(const WitnessFamily& f, int j);

// Unconditional separable-confidence upper bound lambda_j / (lambda - epsilon).
double separable_confidence_bound(const WitnessFamily& f, int j);

/**
 * Exact separable maximum confidence lambda_j / (lambda - epsilon), available
 * only when W_j is certified weakly optimal (its zero set touches the product
 * vectors); none when certification fails or is undecidable.
 */
std::optional<double> predicted_Q(const WitnessFamily& f, int j,
                                  const SeesawOptions& seesaw = {}, const SdpOptions& sdp = {});

} // namespace mcdlab

#endif
