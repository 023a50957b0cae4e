#ifndef MCDLAB_RANDOM_HPP
#define MCDLAB_RANDOM_HPP

#include <cstdint>
#include <random>

#include "mcdlab/hermitian.hpp"

namespace mcdlab {

// All randomness flows through a seeded mt19937_64 so identical seeds give
// identical streams. Gaussian samples are drawn with a fixed Box-Muller
// transform rather than std::normal_distribution, whose output is
// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double gaussian();
    complexd complex_gaussian() { return {gaussian(), gaussian()}; }
    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stream-splitting mix so worker k of a seeded run gets an independent,
// reproducible substream.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

VectorXcd haar_random_state(int dim, Rng& rng);

// Product of independent Haar factors, one per subsystem.
std::vector<VectorXcd> haar_random_product(const DimVector& dims, Rng& rng);

// Haar-distributed unitary via QR of a complex Gaussian matrix.
MatrixXcd haar_random_unitary(int dim, Rng& rng);

// Mixed state as the reduction of a Haar-random pure state on dim x ancilla.
HermitianOperator random_mixed_state(const DimVector& dims, int ancilla, Rng& rng);

HermitianOperator random_pure_state(const DimVector& dims, Rng& rng);

// Random Hermitian with independent Gaussian entries (GUE-like, unnormalized).
HermitianOperator random_hermitian(const DimVector& dims, Rng& rng);

// Local unitary U_1 x ... x U_m, each factor Haar on its subsystem.
MatrixXcd random_local_unitary(const DimVector& dims, Rng& rng);

} // namespace mcdlab

#endif
