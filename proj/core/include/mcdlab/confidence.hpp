#pragma once

#include "mcdlab/cones.hpp"
#include "mcdlab/ensemble.hpp"
#include "mcdlab/sdp.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace mcdlab {

/**
 * Maximum-confidence figures of an ensemble: for outcome j, the confidence of
 * a measurement operator M is eta_j Tr(rho_j M) / Tr(rho_0 M). Its best value
 * over all operators (c_value) is an eigenvalue problem on the support of
 * rho_0; its best value over separable operators (bracketed by q_lower and
 * q_upper) is what local measurements with classical communication can reach.
 * A gap between the two is certified through entanglement witnesses of the
 * form q rho_0 - eta_j rho_j.
 */

enum class Trilean { yes, no, unknown };

const char* to_string(Trilean t);

struct ConfidenceOptions {
    double tol = 1e-9;
    std::uint64_t seed = 0;
    SeesawOptions seesaw{};
    SdpOptions sdp{};
};

struct MaxConfidenceResult {
    double value = 0.0;           // top whitened eigenvalue
    double bisection_value = 0.0; // smallest q with q rho_0 - eta_j rho_j PSD
    int support_rank = 0;         // rank of rho_0
};

// Best achievable confidence for outcome j over unrestricted measurements,
// computed two independent ways (they agree within 1e-8).
MaxConfidenceResult max_confidence(const Ensemble& e, int j,
                                   const ConfidenceOptions& options = {});

// A measurement operator attaining max_confidence: 0 <= M <= identity with
// positive Tr(rho_0 M) and confidence equal to the maximum within 1e-9.
HermitianOperator mc_measurement_operator(const Ensemble& e, int j,
                                          const ConfidenceOptions& options = {});

// One partial-transposed PSD part per cut; their sum plus the PSD part
// reproduces q rho_0 - eta_j rho_j up to `residual` in Frobenius norm.
struct WitnessDecomposition {
    HermitianOperator psd_part;
    std::vector<std::pair<HermitianOperator, std::vector<int>>> transposed_parts;
    double residual = 0.0;
};

struct LoccConfidenceResult {
    double q_lower = 0.0; // best product-state confidence found (floor eta_j)
    double q_upper = 0.0; // PPT-relaxation optimum (dual bound)
    bool exact = false;   // dims decidable and solver converged: bounds match within 1e-6
    SdpStatus solver_status = SdpStatus::stalled;
    HermitianOperator optimizer;                       // M with Tr(rho_0 M) = 1
    std::optional<ProductVectorCert> best_product;     // attains q_lower when beyond the floor
    std::optional<WitnessDecomposition> decomposition; // dual certificate at q_upper
};

/**
 * Separable-measurement confidence bracket for outcome j. q_upper comes from
 * maximizing eta_j Tr(rho_j M) over M >= 0 with every partial transpose >= 0
 * and Tr(rho_0 M) = 1 (the dual multiplier of the normalization is reported,
 * and its slack matrices assemble the decomposition certificate). q_lower is
 * an alternating maximization of the confidence over product vectors, seeded
 * from the solver's optimizer and floored at eta_j, which the identity
 * operator always achieves.
 */
LoccConfidenceResult locc_confidence(const Ensemble& e, int j,
                                     const ConfidenceOptions& options = {});

// A state with zero expectation on q rho_0 - eta_j rho_j and positive
// overlap with rho_0: proof that no separable improvement past q exists.
struct SigmaCertificate {
    HermitianOperator sigma;
    double witness_expectation = 0.0; // ~ 0
    double rho0_overlap = 0.0;        // > 0
    Membership separability = Membership::unknown;
};

/**
 * Touching-state certificate at q. Requires q to sit at or above the
 * separable bracket (throws std::domain_error when q < q_upper - 1e-6, a
 * distinct report of the precondition failure). Returns the normalized SDP
 * optimizer when q matches the separable optimum and it re-verifies both
 * trace conditions within 1e-8; none for q strictly beyond it, where no such
 * state exists.
 */
std::optional<SigmaCertificate> sigma_certificate(const Ensemble& e, int j, double q,
                                                  const ConfidenceOptions& options = {});

struct NonlocalityGap {
    double gap = 0.0; // c_value - q_upper
    std::vector<std::pair<double, ConeVerdict>> probe_points;
    Trilean nonlocal = Trilean::unknown;
};

/**
 * Nonlocality verdict for outcome j: the gap between global and separable
 * maximum confidence, certified by witness verdicts at q_upper and at the
 * midpoint. yes requires gap > 1e-6 with both probes certified witnesses;
 * no when the bracket pins the gap shut; unknown otherwise.
 */
NonlocalityGap nonlocality_gap(const Ensemble& e, int j,
                               const ConfidenceOptions& options = {});

struct ConfidenceReport {
    int j = 0;
    double c_value = 0.0;
    double c_bisection = 0.0;
    double q_lower = 0.0;
    double q_upper = 0.0;
    bool exact = false;
    Trilean nonlocal = Trilean::unknown;
    NonlocalityGap gap;
    SdpStatus locc_status = SdpStatus::stalled;
    int support_rank = 0;
    std::optional<ConeVerdict> ew_certificate; // witness verdict at q_upper
    std::optional<SigmaCertificate> sigma;     // touching state at q_upper
    std::optional<HermitianOperator> mc_operator;
    std::optional<HermitianOperator> locc_optimizer;
    std::optional<WitnessDecomposition> locc_decomposition;
};

// Full per-outcome report; bundles the pieces above.
ConfidenceReport confidence_report(const Ensemble& e, int j,
                                   const ConfidenceOptions& options = {});

struct TwoQubitWeakOptimality {
    bool weakly_optimal_ew = false;     // q rho_0 - eta_j rho_j touches zero as an EW
    bool at_separable_optimum = false;  // q = q_upper within 1e-6 and gap > 1e-6
    bool consistent = false;            // the two sides agree (and the rank clause holds)
    std::optional<bool> rank_deficient_local; // c_value = q_upper check when rank(rho_0) < 4
    double c_value = 0.0;
    double q_upper = 0.0;
};

/**
 * Two-qubit equivalence check: on 2x2 dims (throws std::invalid_argument
 * otherwise), the witness at q is weakly optimal exactly when q equals the
 * separable optimum and a gap to the global value remains; additionally,
 * a rank-deficient rho_0 forces the global value to be separably achievable.
 * Evaluates both sides independently and reports their agreement.
 */
TwoQubitWeakOptimality two_qubit_weak_optimality_check(const Ensemble& e, int j, double q,
                                                       const ConfidenceOptions& options = {});

// Rebuild q rho_0 - eta_j rho_j and measure how well a decomposition
// certificate reproduces it; used to re-verify reports.
double witness_decomposition_residual(const Ensemble& e, int j, double q,
                                      const WitnessDecomposition& d);

} // namespace mcdlab
