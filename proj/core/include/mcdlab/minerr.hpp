#ifndef MCDLAB_MINERR_HPP
#define MCDLAB_MINERR_HPP

#include <string>
#include <vector>

#include "mcdlab/confidence.hpp"
#include "mcdlab/ensemble.hpp"

namespace mcdlab {

/**
 * Minimum-error discrimination: the best average success probability over
 * all joint measurements, plus the criteria deciding when no separable
 * measurement can beat the largest prior, and the two-way bridge between
 * confidence gaps and minimum-error gaps on derived two-state ensembles.
 */

struct GuessingProbability {
    double value = 0.0; // Tr K of the certificate; the POVM attains it at optimum
    SdpStatus solver_status = SdpStatus::stalled;
    std::vector<HermitianOperator> povm; // one element per state plus the completion
    HermitianOperator k_certificate;     // K - eta_i rho_i >= 0 for every i
    double certificate_violation = 0.0;  // worst negative eigenvalue across those gaps
};

/**
 * Optimal guessing probability via the measurement maximization; the dual
 * multipliers assemble K with K >= eta_i rho_i whose trace certifies the
 * value from above (the textbook dual formulation). certificate_violation
 * reports how far the recovered K falls outside that feasible set.
 */
GuessingProbability guessing_probability(const Ensemble& e, const SdpOptions& sdp = {});

/**
 * Closed-form two-state optimum (1 + ||eta1 rho1 - eta2 rho2||_1) / 2.
 * Throws std::invalid_argument unless eta1 + eta2 = 1 within 1e-10 and the
 * operators share dimensions.
 */
double helstrom_two_state(double eta1, const HermitianOperator& rho1, double eta2,
                          const HermitianOperator& rho2);

enum class PsepStatus { equals_prior, other, unknown };

const char* to_string(PsepStatus s);

/**
 * Criterion for "separable measurements cannot beat always guessing j":
 * that holds with a strict global gap exactly when every difference
 * eta_j rho_j - eta_i rho_i is block positive and at least one of them is a
 * witness (block positive with a negative eigenvalue). Verdicts are decided
 * only on dimensions where block positivity itself is decidable; elsewhere
 * the status stays unknown.
 */
struct SeparableCeilingCheck {
    std::vector<ConeVerdict> difference_verdicts; // block positivity per i
    std::vector<bool> difference_psd;             // PSD flag per i
    Trilean ew_exists = Trilean::unknown;
    PsepStatus p_sep_status = PsepStatus::unknown;
    bool exact = false;
};

SeparableCeilingCheck separable_ceiling_check(const Ensemble& e, int j, const SeesawOptions& seesaw = {},
                       const SdpOptions& sdp = {});

enum class CrosscheckStatus { certified, not_certified, skipped };

const char* to_string(CrosscheckStatus s);

/**
 * Bridge between a confidence gap on (e, j) and a minimum-error gap on the
 * two-state ensemble {r, rho_0; 1-r, rho_j} with r = q / (q + eta_j) at the
 * separable optimum q. When the gap is certified nonlocal, the sub-ensemble
 * must show a separable ceiling of exactly r while the global optimum
 * exceeds it; the reverse map q = r eta_j / (1 - r) then re-certifies the
 * witness on the original ensemble. Skipped (with reason) when no certified
 * gap exists.
 */
struct CrosscheckResult {
    CrosscheckStatus status = CrosscheckStatus::skipped;
    std::string reason;
    double q = 0.0;      // separable confidence bound on the original ensemble
    double r = 0.0;      // derived two-state prior of rho_0
    double p_g = 0.0;    // guessing probability of the sub-ensemble
    SdpStatus p_g_status = SdpStatus::optimal; // meaningful once status != skipped
    SeparableCeilingCheck separable_ceiling;    // separable-ceiling criterion on the sub-ensemble
    double q_back = 0.0; // r eta_j / (1 - r), the inverse map
    bool reverse_ok = false;
};

CrosscheckResult crosscheck_minerr_gap(const Ensemble& e, int j,
                                       const ConfidenceOptions& options = {});

} // namespace mcdlab

#endif
