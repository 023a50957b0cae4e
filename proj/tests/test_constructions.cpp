#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcdlab/confidence.hpp"
#include "mcdlab/constructions.hpp"
#include "mcdlab/random.hpp"
#include "support/fixtures.hpp"

using namespace mcdlab;
using testsupport::bell_transposed;
using testsupport::xi_witness;

TEST_CASE("jordan split is orthogonal and reassembles the operator") {
    HermitianOperator w = xi_witness();
    JordanDecomposition jd = jordan_decompose(w);
    CHECK_FALSE(jd.degenerate);
    CHECK((jd.plus.matrix() - jd.minus.matrix() - w.matrix()).norm() <= 1e-12);
    CHECK((jd.plus.matrix() * jd.minus.matrix()).norm() <= 1e-12);
    CHECK(eig_hermitian(jd.plus).eigenvalues.minCoeff() >= -1e-13);
    CHECK(eig_hermitian(jd.minus).eigenvalues.minCoeff() >= -1e-13);
    CHECK(jd.plus.trace() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(jd.minus.trace() == doctest::Approx(0.5).epsilon(1e-12));

    JordanDecomposition psd = jordan_decompose(HermitianOperator::identity(w.dims()));
    CHECK(psd.degenerate);
}

TEST_CASE("single-witness ensemble carries the advertised guarantees") {
    HermitianOperator w = xi_witness();
    Ensemble e = ensemble_from_witness(w);
    CHECK(e.size() == 2);
    CHECK(e.prior(0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(e.prior(1) == doctest::Approx(0.75).epsilon(1e-12));

    // eta_1 rho_1 - eta_2 rho_2 is proportional to -w, so the witness sign
    // structure transfers to the ensemble.
    HermitianOperator diff = e.prior(1) * e.state(1) - e.prior(0) * e.state(0);
    double scale = diff.trace() / w.trace();
    CHECK((diff.matrix() - scale * w.matrix()).norm() <= 1e-12);

    CHECK(std::abs(max_confidence(e, 0).value - 1.0) <= 1e-9);
    LoccConfidenceResult locc = locc_confidence(e, 0);
    CHECK(locc.solver_status == SdpStatus::optimal);
    CHECK(locc.q_upper <= 0.5 + 1e-6);
    CHECK(nonlocality_gap(e, 0).nonlocal == Trilean::yes);
}

TEST_CASE("single-witness construction rejects non-witness input") {
    DimVector dims({2, 2});
    CHECK_THROWS_AS(ensemble_from_witness(HermitianOperator::identity(dims)),
                    std::invalid_argument);
    CHECK_THROWS_AS(ensemble_from_witness(-1.0 * HermitianOperator::identity(dims)),
                    std::invalid_argument);
}

TEST_CASE("witness family aggregates the closed-form ingredients") {
    std::vector<HermitianOperator> ws = {bell_transposed(0), bell_transposed(1),
                                         bell_transposed(2)};
    WitnessFamily fam = witness_family(ws);
    CHECK(fam.epsilon == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fam.lambda_sum == doctest::Approx(1.5).epsilon(1e-10));
    for (double l : fam.lambda) CHECK(l == doctest::Approx(0.5).epsilon(1e-10));
    REQUIRE(fam.delta.size() == 3);
    for (double d : fam.delta) CHECK(d == doctest::Approx(1.0).epsilon(1e-8));

    Ensemble e = ensemble_from_family(fam);
    CHECK(e.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(e.prior(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    // The average state is the normalized witness sum.
    AverageState avg = average_state(e);
    HermitianOperator expect = (1.0 / fam.w_sum.trace()) * fam.w_sum;
    CHECK((avg.rho0.matrix() - expect.matrix()).norm() <= 1e-10);

    for (int j = 0; j < 3; ++j) {
        double pc = predicted_max_confidence(fam, j);
        CHECK(pc == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(max_confidence(e, j).value - pc) <= 1e-8);
        double bound = separable_confidence_bound(fam, j);
        CHECK(bound == doctest::Approx(0.5).epsilon(1e-10));
        LoccConfidenceResult locc = locc_confidence(e, j);
        CHECK(locc.q_upper <= bound + 1e-6);
        std::optional<double> pq = predicted_Q(fam, j);
        REQUIRE(pq.has_value());
        CHECK(std::abs(locc.q_upper - *pq) <= 1e-6);
        CHECK(nonlocality_gap(e, j).nonlocal == Trilean::yes);
    }
}

TEST_CASE("family construction requires a strictly positive witness sum") {
    // A single transposed Bell projector sums to itself; the minimum
    // eigenvalue is negative, so no ensemble can be formed.
    std::vector<HermitianOperator> ws = {bell_transposed(0)};
    WitnessFamily fam = witness_family(ws);
    CHECK(fam.epsilon < 0.0);
    CHECK_THROWS_AS(ensemble_from_family(fam), std::domain_error);
}

TEST_CASE("family mode validates its members") {
    DimVector dims({2, 2});
    std::vector<HermitianOperator> empty;
    CHECK_THROWS_AS(witness_family(empty), std::invalid_argument);
    std::vector<HermitianOperator> bad = {bell_transposed(0),
                                          HermitianOperator::identity(dims)};
    CHECK_THROWS_AS(witness_family(bad), std::invalid_argument);
    std::vector<HermitianOperator> mixed_dims = {bell_transposed(0), xi_witness()};
    CHECK_THROWS_AS(witness_family(mixed_dims), std::invalid_argument);
}

TEST_CASE("prediction is withheld when weak optimality is uncertified") {
    // Shifting the witnesses into the block-positive interior keeps them
    // witnesses but moves their product infimum away from zero.
    DimVector dims({2, 2});
    std::vector<HermitianOperator> ws = {
        bell_transposed(0) + 0.25 * HermitianOperator::identity(dims),
        bell_transposed(2) + 0.25 * HermitianOperator::identity(dims)};
    WitnessFamily fam = witness_family(ws);
    CHECK(fam.epsilon > 0.0);
    Ensemble e = ensemble_from_family(fam);
    for (int j = 0; j < 2; ++j) {
        CHECK_FALSE(predicted_Q(fam, j).has_value()); // no weak-optimality certificate
        // The separable bound still holds measured against the SDP value.
        double bound = separable_confidence_bound(fam, j);
        LoccConfidenceResult locc = locc_confidence(e, j);
        CHECK(locc.q_upper <= bound + 1e-6);
        // The closed-form confidence still matches.
        CHECK(std::abs(max_confidence(e, j).value - predicted_max_confidence(fam, j)) <=
              1e-8);
    }
}

TEST_CASE("random decomposable witnesses drive valid single constructions") {
    Rng rng(71);
    for (const DimVector& dims : {DimVector({2, 2}), DimVector({2, 3})}) {
        for (int t = 0; t < 3; ++t) {
            HermitianOperator w = testsupport::random_decomposable_witness(dims, rng);
            Ensemble e = ensemble_from_witness(w);
            CHECK(std::abs(max_confidence(e, 0).value - 1.0) <= 1e-9);
            CHECK(locc_confidence(e, 0).q_upper <= 0.5 + 1e-6);
        }
    }
}
