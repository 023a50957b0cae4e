#include "mcdlab/cones.hpp"

#include "mcdlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcdlab {

namespace {

constexpr double kPsdTol = 1e-9;
constexpr double kSeesawNegTol = 1e-9;  // on Frobenius-normalized operators
constexpr double kTouchTol = 1e-8;      // |min expectation| window for "touches zero"

// Kronecker product of the factor vectors, subsystem 0 most significant.
VectorXcd product_vector(const DimVector& dims, const std::vector<VectorXcd>& factors) {
    const int D = dims.total();
    VectorXcd w(D);
    for (int joint = 0; joint < D; ++joint) {
        std::vector<int> digits = dims.decode(joint);
        complexd prod = 1.0;
        for (std::size_t k = 0; k < factors.size(); ++k) prod *= factors[k](digits[k]);
        w(joint) = prod;
    }
    return w;
}

} // namespace

const char* to_string(Membership m) {
    switch (m) {
        case Membership::inside: return "inside";
        case Membership::outside: return "outside";
        case Membership::unknown: return "unknown";
    }
    return "unknown";
}

ExactnessScope exactness_scope(const DimVector& dims) {
    std::vector<int> nontrivial;
    for (int d : dims.as_vector())
        if (d > 1) nontrivial.push_back(d);
    if (nontrivial.size() <= 1)
        return {true, "single effective factor: positivity decides every cone"};
    if (nontrivial.size() == 2 && nontrivial[0] * nontrivial[1] <= 6)
        return {true, "partial transposition is decisive on 2x2 and 2x3 spaces"};
    if (nontrivial.size() == 2)
        return {false, "cone membership is not exactly decidable beyond 2x2 and 2x3"};
    return {false, "cone membership is not exactly decidable on multipartite spaces"};
}

bool is_psd(const HermitianOperator& h, double tol, NegativeEigenvectorCert* cert) {
    Spectrum s = eig_hermitian(h);
    double scale = std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
    if (s.eigenvalues(0) >= -tol * scale) return true;
    if (cert) {
        cert->vec = s.eigenvectors.col(0);
        cert->value = s.eigenvalues(0);
    }
    return false;
}

SeesawResult min_product_expectation(const HermitianOperator& h, const SeesawOptions& options) {
    if (options.restarts < 1 || options.max_sweeps < 1)
        throw std::invalid_argument("min_product_expectation: restarts and max_sweeps must be >= 1");
    const DimVector& dims = h.dims();
    const int m = dims.factors();
    const int D = dims.total();
    const MatrixXcd& H = h.matrix();

    SeesawResult best;
    best.value = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < options.restarts; ++restart) {
        Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(restart)));
        std::vector<VectorXcd> v = haar_random_product(dims, rng);
        double val = expectation(h, product_vector(dims, v));
        std::vector<double> sweep_values;

        for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
            for (int k = 0; k < m; ++k) {
                const int dk = dims.dim(k);
                // Columns of psi are the products with slot k replaced by a
                // basis vector; the contracted dk x dk operator psi^H H psi
                // is the landscape seen by factor k alone.
                MatrixXcd psi = MatrixXcd::Zero(D, dk);
                for (int joint = 0; joint < D; ++joint) {
                    std::vector<int> digits = dims.decode(joint);
                    complexd prod = 1.0;
                    for (int j = 0; j < m; ++j)
                        if (j != k) prod *= v[static_cast<std::size_t>(j)](digits[static_cast<std::size_t>(j)]);
                    psi(joint, digits[static_cast<std::size_t>(k)]) = prod;
                }
                MatrixXcd e = psi.adjoint() * H * psi;
                e = 0.5 * (e + e.adjoint().eval());
                Eigen::SelfAdjointEigenSolver<MatrixXcd> es(e);
                v[static_cast<std::size_t>(k)] = es.eigenvectors().col(0);
                val = es.eigenvalues()(0);
            }
            sweep_values.push_back(val);
            if (sweep_values.size() >= 2) {
                double prev = sweep_values[sweep_values.size() - 2];
                if (prev - val <= options.tol * std::max(1.0, std::abs(val))) break;
            }
        }

        double final_val = expectation(h, product_vector(dims, v));
        if (final_val < best.value) {
            best.value = final_val;
            best.factors = v;
            best.sweep_values = std::move(sweep_values);
            best.restart_index = restart;
        }
    }
    return best;
}

ConeVerdict is_block_positive(const HermitianOperator& h, const SeesawOptions& seesaw,
                              const SdpOptions& sdp) {
    ExactnessScope scope = exactness_scope(h.dims());
    const int m = h.dims().factors();
    ConeVerdict v;
    v.exact = scope.is_exact;

    NegativeEigenvectorCert neg;
    if (is_psd(h, kPsdTol, &neg)) {
        v.status = Membership::inside;
        if (m >= 2) {
            // Clamp roundoff so the certificate re-verifies as PSD exactly.
            Spectrum s = eig_hermitian(h);
            VectorXd lam = s.eigenvalues.cwiseMax(0.0);
            HermitianOperator pc(h.dims(),
                                 s.eigenvectors * lam.asDiagonal() * s.eigenvectors.adjoint());
            v.decomposition = PptDecompositionCert{pc, HermitianOperator::zero(h.dims()), {1}};
        }
        return v;
    }
    v.negative_eigenvector = neg;
    if (m == 1) {
        v.status = Membership::outside;
        return v;
    }

    const double fro = h.frobenius_norm();
    HermitianOperator hn = (1.0 / fro) * h;
    SeesawResult ss = min_product_expectation(hn, seesaw);
    if (ss.value < -kSeesawNegTol) {
        v.status = Membership::outside;
        v.product_vector = ProductVectorCert{ss.factors, ss.value * fro};
        return v;
    }

    for (const std::vector<int>& cut : bipartition_cuts(m)) {
        auto dec = feasibility_decompose(hn, cut, sdp);
        if (dec) {
            v.status = Membership::inside;
            v.decomposition = PptDecompositionCert{fro * dec->first, fro * dec->second, cut};
            return v;
        }
    }

    v.status = scope.is_exact ? Membership::outside : Membership::unknown;
    return v;
}

ConeVerdict is_separable(const HermitianOperator& h, double tol) {
    ExactnessScope scope = exactness_scope(h.dims());
    const int m = h.dims().factors();
    ConeVerdict v;
    v.exact = scope.is_exact;

    NegativeEigenvectorCert neg;
    if (!is_psd(h, tol, &neg)) {
        v.status = Membership::outside;
        v.negative_eigenvector = neg;
        return v;
    }
    if (m == 1) {
        v.status = Membership::inside;
        return v;
    }
    for (const std::vector<int>& cut : bipartition_cuts(m)) {
        NegativeEigenvectorCert negt;
        if (!is_psd(partial_transpose(h, cut), tol, &negt)) {
            // The negative direction lives in the transposed frame; it still
            // pins down the violated cut.
            v.status = Membership::outside;
            v.negative_eigenvector = negt;
            return v;
        }
    }
    v.status = scope.is_exact ? Membership::inside : Membership::unknown;
    return v;
}

ConeVerdict is_ew(const HermitianOperator& h, const SeesawOptions& seesaw,
                  const SdpOptions& sdp) {
    ConeVerdict v;
    v.exact = exactness_scope(h.dims()).is_exact;
    NegativeEigenvectorCert neg;
    if (is_psd(h, kPsdTol, &neg)) {
        v.status = Membership::outside; // PSD operators detect nothing
        return v;
    }
    ConeVerdict bp = is_block_positive(h, seesaw, sdp);
    v.status = bp.status;
    v.negative_eigenvector = neg;
    v.product_vector = bp.product_vector;
    v.decomposition = bp.decomposition;
    return v;
}

ConeVerdict is_weakly_optimal_ew(const HermitianOperator& h, const SeesawOptions& seesaw,
                                 const SdpOptions& sdp) {
    ConeVerdict ew = is_ew(h, seesaw, sdp);
    if (ew.status != Membership::inside)
        throw std::invalid_argument(
            "is_weakly_optimal_ew: operator is not a certified entanglement witness");

    ConeVerdict v;
    v.exact = ew.exact;
    const DimVector& dims = h.dims();
    const int m = dims.factors();
    const int D = dims.total();
    const double fro = h.frobenius_norm();
    HermitianOperator hn = (1.0 / fro) * h;

    // A product vector reaching zero certifies membership at any dims: the
    // witness property bounds the infimum below by zero and the vector
    // attains it.
    SeesawResult ss = min_product_expectation(hn, seesaw);
    if (std::abs(ss.value) <= kTouchTol) {
        v.status = Membership::inside;
        v.product_vector = ProductVectorCert{ss.factors, ss.value * fro};
        VectorXcd w = product_vector(dims, ss.factors);
        v.separable_state =
            SeparableStateCert{HermitianOperator::projector(dims, w), ss.value * fro};
        return v;
    }
    if (ss.value < -kTouchTol) {
        // Contradicts the certified witness precondition; refuse to guess.
        v.status = Membership::unknown;
        return v;
    }
    if (!v.exact) {
        v.status = Membership::unknown;
        return v;
    }

    // Exact scope: minimize the expectation over PSD states with PSD partial
    // transposes (= the separable states here). Zero minimum means the
    // witness touches the separable cone, and the optimizer is the toucher.
    std::vector<std::vector<int>> cuts = bipartition_cuts(m);
    SdpProblem p;
    p.block_dims.assign(cuts.size() + 1, D);
    p.objective.assign(cuts.size() + 1, MatrixXcd::Zero(D, D));
    p.objective[0] = -hn.matrix();
    SdpProblem::Constraint norm;
    norm.coeff.assign(cuts.size() + 1, MatrixXcd::Zero(D, D));
    norm.coeff[0] = MatrixXcd::Identity(D, D);
    norm.rhs = 1.0;
    p.constraints.push_back(std::move(norm));
    for (std::size_t c = 0; c < cuts.size(); ++c)
        add_ppt_tie(p, 0, static_cast<int>(c) + 1, dims, cuts[c]);

    SdpSolution sol = solve(p, sdp);
    if (sol.status != SdpStatus::optimal) {
        v.status = Membership::unknown;
        return v;
    }
    double minval = -sol.primal_objective;
    if (std::abs(minval) <= kTouchTol) {
        v.status = Membership::inside;
        HermitianOperator sigma(dims, sol.primal[0]);
        v.separable_state = SeparableStateCert{sigma, hs_inner(sigma, h)};
    } else if (minval > kTouchTol) {
        v.status = Membership::outside;
    } else {
        v.status = Membership::unknown;
    }
    return v;
}

} // namespace mcdlab
