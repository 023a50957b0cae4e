#pragma once

// Shared fixtures and oracles for the test suite. Everything here is
// deliberately independent of the library internals it is used to check:
// the grid oracle runs its own eigensolves, and the witness fixtures are
// built from first principles (Bell projectors, partial transposes).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mcdlab/cones.hpp"
#include "mcdlab/ensemble.hpp"
#include "mcdlab/hermitian.hpp"
#include "mcdlab/random.hpp"

namespace testsupport {

using mcdlab::complexd;
using mcdlab::DimVector;
using mcdlab::HermitianOperator;
using mcdlab::MatrixXcd;
using mcdlab::VectorXcd;

// (Bell projector)^T2 on 2x2. which: 0 Phi+, 1 Phi-, 2 Psi+, 3 Psi-.
inline HermitianOperator bell_transposed(int which) {
    DimVector dims({2, 2});
    VectorXcd v = VectorXcd::Zero(4);
    const double s = 1.0 / std::sqrt(2.0);
    switch (which) {
        case 0: v(0) = s; v(3) = s; break;
        case 1: v(0) = s; v(3) = -s; break;
        case 2: v(1) = s; v(2) = s; break;
        default: v(1) = s; v(2) = -s; break;
    }
    return mcdlab::partial_transpose(HermitianOperator::projector(dims, v), {1});
}

// Partial transpose (on the qutrit) of the projector onto (|00>+|12>)/sqrt2.
inline HermitianOperator xi_witness() {
    DimVector dims({2, 3});
    VectorXcd xi = VectorXcd::Zero(6);
    xi(0) = 1.0 / std::sqrt(2.0);
    xi(5) = 1.0 / std::sqrt(2.0);
    return mcdlab::partial_transpose(HermitianOperator::projector(dims, xi), {1});
}

// Decomposable entanglement witness: the partial transpose of a random
// entangled pure projector. Block positive by construction; resampled until
// the negative eigenvalue is comfortably below zero (so it is not PSD).
inline HermitianOperator random_decomposable_witness(const DimVector& dims, mcdlab::Rng& rng) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        VectorXcd psi = mcdlab::haar_random_state(dims.total(), rng);
        HermitianOperator w =
            mcdlab::partial_transpose(HermitianOperator::projector(dims, psi), {1});
        if (mcdlab::eig_hermitian(w).eigenvalues.minCoeff() < -1e-3) return w;
    }
    throw std::runtime_error("random_decomposable_witness: sampling failed");
}

// Best ratio <a x b|num|a x b> / <a x b|den|a x b> over product vectors on a
// 2 x d space, scanning the qubit factor over an (n_theta x n_phi) Bloch grid
// and solving the induced d-dimensional generalized eigenproblem exactly for
// the second factor. A rigorous lower bound on the product-vector supremum.
inline double qubit_grid_ratio_oracle(const HermitianOperator& num,
                                      const HermitianOperator& den, int n_theta = 100,
                                      int n_phi = 100) {
    const DimVector& dims = num.dims();
    if (dims.factors() != 2 || dims.dim(0) != 2)
        throw std::invalid_argument("oracle expects a 2 x d bipartite space");
    const int d = dims.dim(1);
    const MatrixXcd& n_mat = num.matrix();
    const MatrixXcd& d_mat = den.matrix();

    double best = 0.0;
    const double pi = 3.14159265358979323846;
    for (int ti = 0; ti <= n_theta; ++ti) {
        double theta = pi * ti / n_theta;
        for (int pi_i = 0; pi_i < n_phi; ++pi_i) {
            double phi = 2.0 * pi * pi_i / n_phi;
            Eigen::Vector2cd a(std::cos(theta / 2.0),
                               std::polar(std::sin(theta / 2.0), phi));
            // Contract the qubit factor: A_rc = sum_{ij} conj(a_i) a_j N[(i,r),(j,c)].
            MatrixXcd an = MatrixXcd::Zero(d, d), ad = MatrixXcd::Zero(d, d);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    complexd w = std::conj(a(i)) * a(j);
                    an += w * n_mat.block(i * d, j * d, d, d);
                    ad += w * d_mat.block(i * d, j * d, d, d);
                }
            // Generalized eigenproblem on the support of the denominator.
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es_d(ad);
            const Eigen::VectorXd& lam = es_d.eigenvalues();
            double top = lam.cwiseAbs().maxCoeff();
            if (!(top > 0.0)) continue;
            Eigen::VectorXd inv = Eigen::VectorXd::Zero(d);
            for (int k = 0; k < d; ++k)
                if (lam(k) > 1e-12 * top) inv(k) = 1.0 / std::sqrt(lam(k));
            MatrixXcd s = es_d.eigenvectors() * inv.asDiagonal() *
                          es_d.eigenvectors().adjoint();
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es_r(MatrixXcd(s * an * s));
            best = std::max(best, es_r.eigenvalues().maxCoeff());
        }
    }
    return best;
}

// Witness operator of the confidence problem: q * rho0 - eta_j * rho_j.
inline HermitianOperator confidence_witness(const mcdlab::Ensemble& e, int j, double q) {
    return q * mcdlab::average_state(e).rho0 - e.prior(j) * e.state(j);
}

} // namespace testsupport
