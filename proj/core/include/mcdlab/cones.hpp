#pragma once

#include "mcdlab/hermitian.hpp"
#include "mcdlab/sdp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mcdlab {

/**
 * Membership tests against the nested operator cones on a multipartite space:
 *
 *   separable  <=  positive semidefinite  <=  block positive  <=  Hermitian
 *
 * Block positive means nonnegative expectation on every product vector; the
 * operators strictly between PSD and block positive are the entanglement
 * witnesses. Verdicts are three-valued: membership of these cones is only
 * decidable in general on 2x2 and 2x3 bipartite spaces, where positivity of
 * the partial transpose settles separability and decomposability settles
 * block positivity. Outside that scope, "inside"/"outside" verdicts are
 * still rigorous (they come with certificates); "unknown" is the honest
 * answer when neither side could be certified.
 */

// Whether the dims admit exact cone decisions, with a short explanation.
struct ExactnessScope {
    bool is_exact = false;
    std::string reason;
};

ExactnessScope exactness_scope(const DimVector& dims);

enum class Membership { inside, outside, unknown };

const char* to_string(Membership m);

// A unit vector v with <v|H|v> = value < 0: proof of non-PSD-ness.
struct NegativeEigenvectorCert {
    VectorXcd vec;
    double value = 0.0;
};

// Per-factor unit vectors whose product w satisfies <w|H|w> = value.
struct ProductVectorCert {
    std::vector<VectorXcd> factors;
    double value = 0.0;
};

// H = psd_part + partial_transpose(ppt_part, cut) with both parts PSD:
// proof of block positivity across every product vector.
struct PptDecompositionCert {
    HermitianOperator psd_part;
    HermitianOperator ppt_part;
    std::vector<int> cut;
};

// A state sigma (separable in exact scope) with Tr(sigma H) = expectation.
struct SeparableStateCert {
    HermitianOperator sigma;
    double expectation = 0.0;
};

struct ConeVerdict {
    Membership status = Membership::unknown;
    bool exact = false; // dims fall in the exactly decidable scope
    std::optional<NegativeEigenvectorCert> negative_eigenvector;
    std::optional<ProductVectorCert> product_vector;
    std::optional<PptDecompositionCert> decomposition;
    std::optional<SeparableStateCert> separable_state;
};

// Minimum eigenvalue test with relative tolerance; fills the certificate
// with the most negative eigenvector when the answer is no.
bool is_psd(const HermitianOperator& h, double tol = 1e-9,
            NegativeEigenvectorCert* cert = nullptr);

struct SeesawOptions {
    int restarts = 64;
    int max_sweeps = 200;
    double tol = 1e-12;
    std::uint64_t seed = 0;
};

/**
 * Alternating minimization of <v1 x ... x vm | H | v1 x ... x vm> over unit
 * product vectors: each pass replaces one factor by the bottom eigenvector
 * of the operator contracted against the others, so the sweep values are
 * non-increasing. Restarts from seeded random product vectors; the best
 * restart wins, earliest index on ties. The result is always an upper bound
 * on the true minimum product expectation.
 */
struct SeesawResult {
    double value = 0.0;
    std::vector<VectorXcd> factors;
    std::vector<double> sweep_values; // per-sweep values of the winning restart
    int restart_index = 0;
};

SeesawResult min_product_expectation(const HermitianOperator& h,
                                     const SeesawOptions& options = {});

/**
 * Block positivity. Decision routes, in order: PSD (inside, any dims);
 * negative product expectation from the see-saw (outside, any dims);
 * a PSD + partial-transposed-PSD decomposition across some bipartition cut
 * (inside, any dims); exhaustion of those in exact scope (outside, since
 * decomposability and block positivity coincide on 2x2 and 2x3). Otherwise
 * unknown.
 */
ConeVerdict is_block_positive(const HermitianOperator& h,
                              const SeesawOptions& seesaw = {},
                              const SdpOptions& sdp = {});

/**
 * Separability of a PSD operator. Non-PSD or any negative partial transpose
 * is outside; positivity of every partial transpose is inside in exact scope
 * and unknown beyond it.
 */
ConeVerdict is_separable(const HermitianOperator& h, double tol = 1e-9);

/**
 * Entanglement witness: block positive but not PSD. Certificates combine the
 * negative eigenvector (non-PSD proof) with the block positivity evidence.
 */
ConeVerdict is_ew(const HermitianOperator& h, const SeesawOptions& seesaw = {},
                  const SdpOptions& sdp = {});

/**
 * Weak optimality of an entanglement witness: the infimum of its expectation
 * over product vectors is zero (it touches the separable cone). Requires an
 * is_ew "inside" verdict and throws std::invalid_argument otherwise. In
 * exact scope an SDP over PSD + PPT states of the Frobenius-normalized
 * witness decides membership and returns the touching state; beyond it a
 * see-saw product vector reaching zero still certifies "inside" (the witness
 * property bounds the infimum below by zero), while failure to reach zero
 * leaves "unknown".
 */
ConeVerdict is_weakly_optimal_ew(const HermitianOperator& h,
                                 const SeesawOptions& seesaw = {},
                                 const SdpOptions& sdp = {});

} // namespace mcdlab
