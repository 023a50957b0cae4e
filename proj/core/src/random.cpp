#include "mcdlab/random.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace mcdlab {

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; u clamped away from 0 so log stays finite.
    double u = uniform();
    if (u < 1e-300) u = 1e-300;
    double v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 2.0 * M_PI * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over seed ^ golden-ratio-spaced stream id.
    std::uint64_t z = seed ^ (stream * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

VectorXcd haar_random_state(int dim, Rng& rng) {
    VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = rng.complex_gaussian();
    v.normalize();
    return v;
}

std::vector<VectorXcd> haar_random_product(const DimVector& dims, Rng& rng) {
    std::vector<VectorXcd> factors;
    factors.reserve(static_cast<std::size_t>(dims.factors()));
    for (int k = 0; k < dims.factors(); ++k) factors.push_back(haar_random_state(dims.dim(k), rng));
    return factors;
}

MatrixXcd haar_random_unitary(int dim, Rng& rng) {
    MatrixXcd g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) g(r, c) = rng.complex_gaussian();
    Eigen::HouseholderQR<MatrixXcd> qr(g);
    MatrixXcd q = qr.householderQ();
    // Fix the phase ambiguity so the distribution is Haar.
    MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < dim; ++i) {
        complexd d = r(i, i);
        double a = std::abs(d);
        q.col(i) *= (a > 0.0) ? d / a : complexd(1.0, 0.0);
    }
    return q;
}

HermitianOperator random_mixed_state(const DimVector& dims, int ancilla, Rng& rng) {
    if (ancilla < 1) throw std::invalid_argument("random_mixed_state: ancilla < 1");
    int D = dims.total();
    VectorXcd psi = haar_random_state(D * ancilla, rng);
    std::vector<int> ext = dims.as_vector();
    ext.push_back(ancilla);
    DimVector edims(ext);
    HermitianOperator pure = HermitianOperator::projector(edims, psi);
    HermitianOperator red = partial_trace(pure, {edims.factors() - 1});
    return HermitianOperator(dims, red.matrix());
}

HermitianOperator random_pure_state(const DimVector& dims, Rng& rng) {
    return HermitianOperator::projector(dims, haar_random_state(dims.total(), rng));
}

HermitianOperator random_hermitian(const DimVector& dims, Rng& rng) {
    int D = dims.total();
    MatrixXcd g(D, D);
    for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c) g(r, c) = rng.complex_gaussian();
    return HermitianOperator(dims, g); // constructor symmetrizes
}

MatrixXcd random_local_unitary(const DimVector& dims, Rng& rng) {
    MatrixXcd u = haar_random_unitary(dims.dim(0), rng);
    for (int k = 1; k < dims.factors(); ++k) {
        MatrixXcd uk = haar_random_unitary(dims.dim(k), rng);
        u = Eigen::kroneckerProduct(u, uk).eval();
    }
    return u;
}

} // namespace mcdlab
