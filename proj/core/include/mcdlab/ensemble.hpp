#ifndef MCDLAB_ENSEMBLE_HPP
#define MCDLAB_ENSEMBLE_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "mcdlab/hermitian.hpp"

namespace mcdlab {

enum class EnsembleErrorCode {
    malformed_json,
    bad_schema,
    dimension_mismatch,
    prior_sum,
    nonpositive_prior,
    non_psd_state,
    non_unit_trace,
};

class EnsembleError : public std::runtime_error {
public:
    EnsembleError(EnsembleErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    EnsembleErrorCode code() const { return code_; }

private:
    EnsembleErrorCode code_;
};

const char* to_string(EnsembleErrorCode c);

struct EnsembleItem {
    double prior;
    HermitianOperator state;
};

/**
 * Finite ensemble {eta_i, rho_i} of states on a shared tensor-product space.
 *
 * Validation on construction: at least one item, all dims equal, every prior
 * positive with the sum within 1e-10 of one, every state PSD with unit trace
 * within 1e-10. Priors are stored exactly as given (no renormalization), so
 * save/load round trips are bit-exact.
 */
class Ensemble {
public:
    Ensemble(DimVector dims, std::vector<EnsembleItem> items);

    const DimVector& dims() const { return dims_; }
    int size() const { return static_cast<int>(items_.size()); }
    double prior(int i) const { return items_.at(static_cast<std::size_t>(i)).prior; }
    const HermitianOperator& state(int i) const { return items_.at(static_cast<std::size_t>(i)).state; }
    const std::vector<EnsembleItem>& items() const { return items_; }

private:
    DimVector dims_;
    std::vector<EnsembleItem> items_;
};

struct AverageState {
    HermitianOperator rho0;
    int support_rank;
};

AverageState average_state(const Ensemble& e, double rank_tol = 1e-10);

// JSON schema: {"dims":[2,3],"items":[{"prior":p,"re":[[...]],"im":[[...]]}]}
// with row-major dense matrices. Imaginary parts may be omitted when zero.
Ensemble load_ensemble(const std::string& path, std::vector<std::string>* warnings = nullptr);
void save_ensemble(const Ensemble& e, const std::string& path);

// Compact JSON serialization with sorted keys and shortest round-trip
// doubles; the bytes hashed into reports.
std::string canonical_json(const Ensemble& e);

// Single-operator files share the matrix schema: {"dims":[...],"re":...,"im":...}.
HermitianOperator load_operator(const std::string& path, std::vector<std::string>* warnings = nullptr);
void save_operator(const HermitianOperator& h, const std::string& path);

// Fixed qubit-qutrit demonstration ensemble: three equiprobable states on
// C^2 x C^3 whose maximum confidence for state 0 is globally 1 but only 1/2
// under separable measurements.
Ensemble example_qubit_qutrit();

// Two-state ensemble {r, rho0(E); 1-r, rho_j(E)} used by the minimum-error
// crosscheck. Requires 0 < r < 1.
Ensemble two_state_subensemble(const Ensemble& e, int j, double r);

} // namespace mcdlab

#endif
