#ifndef MCDLAB_SDP_HPP
#define MCDLAB_SDP_HPP

#include <optional>
#include <utility>
#include <vector>

#include "mcdlab/hermitian.hpp"

namespace mcdlab {

/**
 * Linear SDP over complex Hermitian PSD blocks:
 *
 *   maximize   sum_b Tr(C_b X_b)
 *   subject to sum_b Tr(A_{k,b} X_b) = rhs_k   (k = 0..p-1)
 *              X_b >= 0.
 *
 * Coefficients are symmetrized on ingestion. Desk-scale limits are enforced:
 * at most 200 constraints and total block dimension at most 64.
 */
struct SdpProblem {
    struct Constraint {
        std::vector<MatrixXcd> coeff; // one per block; zero matrices allowed
        double rhs = 0.0;
    };
    std::vector<int> block_dims;
    std::vector<MatrixXcd> objective;
    std::vector<Constraint> constraints;
};

enum class SdpStatus { optimal, infeasible, unbounded, stalled };

const char* to_string(SdpStatus s);

struct SdpIterStat {
    double mu;
    double primal_residual;
    double dual_residual;
    double primal_objective;
    double dual_objective;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::stalled;
    std::vector<MatrixXcd> primal;     // X_b
    VectorXd dual;                     // y, for the dual: minimize rhs^T y, sum_k y_k A_k - C >= 0
    std::vector<MatrixXcd> dual_slack; // S_b = sum_k y_k A_{k,b} - C_b
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double duality_gap = 0.0;     // dual_objective - primal_objective
    double primal_residual = 0.0; // ||rhs - A(X)|| / (1 + ||rhs||)
    double dual_residual = 0.0;   // ||C + S - A*(y)||_F / (1 + ||C||_F)
    int iterations = 0;
    std::vector<SdpIterStat> trace;
    std::optional<VectorXd> farkas_certificate;          // y: A*(y) <= 0, rhs^T y > 0
    std::optional<std::vector<MatrixXcd>> unbounded_ray; // Z >= 0: A(Z) = 0, Tr(C Z) > 0
};

struct SdpOptions {
    double feas_tol = 1e-9;
    double gap_tol = 1e-9;
    int max_iters = 200;
    double step_frac = 0.98;
    bool keep_trace = false;
};

/**
 * Primal-dual path-following interior-point solve.
 *
 * Complex Hermitian blocks are embedded as real symmetric blocks of twice
 * the size; Nesterov-Todd scaling with a Mehrotra predictor-corrector and a
 * dense normal-equation solve drive the iteration, starting infeasibly from
 * identity blocks. Status `optimal` guarantees primal residual <= 1e-8,
 * PSD blocks, and relative duality gap <= 1e-7 even when the inner targets
 * were not reached.
 */
SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

/**
 * Search for P, Q >= 0 with X = P + partial_transpose(Q, cut), via an
 * auxiliary minimized-infeasibility SDP; nullopt when the minimized
 * infeasibility exceeds 1e-8. The returned pair reproduces X within 1e-8.
 * The default cut {1} covers the bipartite case.
 */
std::optional<std::pair<HermitianOperator, HermitianOperator>>
feasibility_decompose(const HermitianOperator& x, const std::vector<int>& cut = {1},
                      const SdpOptions& options = {});

// Hermitian operator basis of the D x D matrices: D diagonal units followed
// by the (1, 1) and (i, -i) off-diagonal pairs; D^2 elements, unnormalized.
std::vector<MatrixXcd> hermitian_basis(int D);

// Append the D^2 trace equalities forcing
// block_b = partial_transpose(block_a, cut) for blocks of shape `dims`.
void add_ppt_tie(SdpProblem& problem, int block_a, int block_b, const DimVector& dims,
                 const std::vector<int>& cut);

} // namespace mcdlab

#endif
