#ifndef MCDLAB_HERMITIAN_HPP
#define MCDLAB_HERMITIAN_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "mcdlab/dims.hpp"

namespace mcdlab {

using complexd = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;

/**
 * Dense Hermitian operator on a tensor-product space.
 *
 * Construction symmetrizes the input as (H + H^dagger)/2; the discarded
 * asymmetry is reported through the optional out-parameter so callers can
 * warn when it exceeds their tolerance. The stored matrix is always exactly
 * Hermitian up to floating-point symmetry of the averaging.
 */
class HermitianOperator {
public:
    HermitianOperator(DimVector dims, const MatrixXcd& raw, double* asymmetry = nullptr);

    const DimVector& dims() const { return dims_; }
    const MatrixXcd& matrix() const { return mat_; }
    int dim() const { return static_cast<int>(mat_.rows()); }

    double trace() const { return mat_.trace().real(); }
    double frobenius_norm() const { return mat_.norm(); }

    static HermitianOperator identity(const DimVector& dims);
    static HermitianOperator zero(const DimVector& dims);
    // Rank-one projector |v><v| / <v|v>.
    static HermitianOperator projector(const DimVector& dims, const VectorXcd& v);

private:
    DimVector dims_;
    MatrixXcd mat_;
};

// Eigendecomposition of a Hermitian operator: ascending eigenvalues and a
// unitary whose columns are the matching eigenvectors.
struct Spectrum {
    VectorXd eigenvalues;
    MatrixXcd eigenvectors;
};

Spectrum eig_hermitian(const HermitianOperator& h);

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);

// Transpose the listed subsystems (0-based). An empty list is the identity;
// listing every subsystem is the full transpose.
HermitianOperator partial_transpose(const HermitianOperator& h, const std::vector<int>& subsystems);

// Trace out the listed subsystems. Tracing out everything yields a 1x1
// operator holding the trace.
HermitianOperator partial_trace(const HermitianOperator& h, const std::vector<int>& subsystems);

// Square root of a PSD operator. Eigenvalues in [-tol * spectral_norm, 0)
// are clamped to zero; anything below that raises std::domain_error.
HermitianOperator psd_sqrt(const HermitianOperator& h, double tol = 1e-10);

// Moore-Penrose inverse restricted to the support: eigenvalues with
// |lambda| > rank_tol * max|lambda| are inverted, the rest are zeroed.
HermitianOperator pinv_on_support(const HermitianOperator& h, double rank_tol = 1e-10);

double trace_norm(const HermitianOperator& h);

// Zero out negative eigenvalues; projects onto the PSD cone.
HermitianOperator psd_clamp(const HermitianOperator& h);

// Elementwise sums and scalar multiples (dims must agree).
HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator operator*(double s, const HermitianOperator& a);

// Real Hilbert-Schmidt inner product Tr(A B) of two Hermitian operators.
double hs_inner(const HermitianOperator& a, const HermitianOperator& b);

// <v|H|v> (real for Hermitian H).
double expectation(const HermitianOperator& h, const VectorXcd& v);

// View the operator as bipartite (group, rest): subsystems in `group` become
// factor 0 (in the given order), the remaining subsystems factor 1. Entries
// are permuted accordingly.
HermitianOperator regroup_bipartite(const HermitianOperator& h, const std::vector<int>& group);

// All nontrivial bipartition cuts of m subsystems, as the transposed subset.
// Subsystem 0 stays on the untransposed side by convention (transposing a
// subset or its complement tests the same thing): 2^(m-1) - 1 subsets.
std::vector<std::vector<int>> bipartition_cuts(int m);

} // namespace mcdlab

#endif
