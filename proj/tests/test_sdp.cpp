#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcdlab/random.hpp"
#include "mcdlab/sdp.hpp"
#include "support/fixtures.hpp"

using namespace mcdlab;

namespace {

// maximize Tr(H X) subject to Tr(X) = 1, X >= 0; optimum is the top eigenvalue.
SdpProblem max_eig_problem(const MatrixXcd& h) {
    SdpProblem p;
    const int d = static_cast<int>(h.rows());
    p.block_dims = {d};
    p.objective = {h};
    SdpProblem::Constraint c;
    c.coeff = {MatrixXcd::Identity(d, d)};
    c.rhs = 1.0;
    p.constraints.push_back(std::move(c));
    return p;
}

} // namespace

TEST_CASE("maximum-eigenvalue program matches the eigensolver across sizes") {
    Rng rng(41);
    for (int trial = 0; trial < 12; ++trial) {
        int d = 2 + static_cast<int>(rng.uniform() * 15.0); // 2..16
        DimVector dims({d});
        HermitianOperator h = random_hermitian(dims, rng);
        SdpSolution sol = solve(max_eig_problem(h.matrix()));
        REQUIRE(sol.status == SdpStatus::optimal);
        double top = eig_hermitian(h).eigenvalues.maxCoeff();
        CHECK(std::abs(sol.primal_objective - top) <= 1e-8 * std::max(1.0, std::abs(top)));
        CHECK(std::abs(sol.duality_gap) <= 1e-7 * std::max(1.0, std::abs(top)));
        CHECK(sol.primal_residual <= 1e-8);
        CHECK(sol.dual_residual <= 1e-7);
    }
}

TEST_CASE("primal optimizer is psd and feasible") {
    Rng rng(42);
    DimVector dims({6});
    HermitianOperator h = random_hermitian(dims, rng);
    SdpSolution sol = solve(max_eig_problem(h.matrix()));
    REQUIRE(sol.status == SdpStatus::optimal);
    HermitianOperator x(dims, sol.primal[0]);
    CHECK(eig_hermitian(x).eigenvalues.minCoeff() >= -1e-9);
    CHECK(x.trace() == doctest::Approx(1.0).epsilon(1e-8));
    // Complementary slackness: Tr(X S) vanishes at optimality.
    CHECK(std::abs((sol.primal[0] * sol.dual_slack[0]).trace().real()) <= 1e-6);
}

TEST_CASE("infeasible equalities produce a farkas certificate") {
    SdpProblem p;
    p.block_dims = {2};
    p.objective = {MatrixXcd::Zero(2, 2)};
    SdpProblem::Constraint c1, c2;
    c1.coeff = {MatrixXcd::Identity(2, 2)};
    c1.rhs = 1.0;
    c2.coeff = {MatrixXcd::Identity(2, 2)};
    c2.rhs = 2.0; // contradicts c1
    p.constraints = {c1, c2};
    SdpSolution sol = solve(p);
    CHECK(sol.status == SdpStatus::infeasible);
    REQUIRE(sol.farkas_certificate.has_value());
    // y with A*(y) <= 0 but rhs . y > 0 proves infeasibility.
    const VectorXd& y = *sol.farkas_certificate;
    double combo = y(0) * 1.0 + y(1) * 2.0;
    CHECK(combo > 0.0);
    MatrixXcd aty = y(0) * MatrixXcd::Identity(2, 2) + y(1) * MatrixXcd::Identity(2, 2);
    CHECK(eig_hermitian(HermitianOperator(DimVector({2}), aty)).eigenvalues.maxCoeff() <=
          1e-7 * std::abs(combo));
}

TEST_CASE("unbounded objective is detected with an improving ray") {
    SdpProblem p;
    p.block_dims = {2};
    MatrixXcd obj(2, 2);
    obj << 1.0, 0.0, 0.0, 0.0;
    p.objective = {obj};
    SdpProblem::Constraint c; // fix only the (1,1) entry, leave (0,0) free
    MatrixXcd e11 = MatrixXcd::Zero(2, 2);
    e11(1, 1) = 1.0;
    c.coeff = {e11};
    c.rhs = 1.0;
    p.constraints = {c};
    SdpSolution sol = solve(p);
    CHECK(sol.status == SdpStatus::unbounded);
    REQUIRE(sol.unbounded_ray.has_value());
    const MatrixXcd& z = (*sol.unbounded_ray)[0];
    CHECK(eig_hermitian(HermitianOperator(DimVector({2}), z)).eigenvalues.minCoeff() >= -1e-8);
    CHECK((obj * z).trace().real() > 0.0);       // improves the objective
    CHECK(std::abs((e11 * z).trace().real()) <= 1e-7); // stays feasible
}

TEST_CASE("state limits reject oversized problems") {
    SdpProblem p;
    p.block_dims = {65};
    p.objective = {MatrixXcd::Identity(65, 65)};
    CHECK_THROWS_AS(solve(p), std::invalid_argument);

    SdpProblem q;
    q.block_dims = {2};
    q.objective = {MatrixXcd::Identity(2, 2)};
    for (int k = 0; k < 201; ++k) {
        SdpProblem::Constraint c;
        c.coeff = {MatrixXcd::Identity(2, 2)};
        c.rhs = 1.0;
        q.constraints.push_back(std::move(c));
    }
    CHECK_THROWS_AS(solve(q), std::invalid_argument);
}

TEST_CASE("hermitian basis spans with the expected pairings") {
    std::vector<MatrixXcd> basis = hermitian_basis(3);
    CHECK(basis.size() == 9);
    for (const MatrixXcd& b : basis) CHECK((b - b.adjoint()).norm() <= 1e-15);
    // Every Hermitian operator is reproduced by its basis expansion under
    // the real pairing coefficients Tr(B_k H) / Tr(B_k B_k).
    Rng rng(43);
    HermitianOperator h = random_hermitian(DimVector({3}), rng);
    MatrixXcd rebuilt = MatrixXcd::Zero(3, 3);
    for (const MatrixXcd& b : basis)
        rebuilt += ((b * h.matrix()).trace().real() / (b * b).trace().real()) * b;
    CHECK((rebuilt - h.matrix()).norm() <= 1e-12);
}

TEST_CASE("partial-transpose tie constraints force the transposed copy") {
    DimVector dims({2, 2});
    Rng rng(44);
    HermitianOperator target = random_mixed_state(dims, 4, rng);

    // maximize Tr(target X) with Tr X = 1 and Y = X^T2 both PSD: the PPT
    // relaxation; the optimizer must satisfy the tie exactly.
    SdpProblem p;
    p.block_dims = {4, 4};
    p.objective = {target.matrix(), MatrixXcd::Zero(4, 4)};
    SdpProblem::Constraint norm;
    norm.coeff = {MatrixXcd::Identity(4, 4), MatrixXcd::Zero(4, 4)};
    norm.rhs = 1.0;
    p.constraints.push_back(std::move(norm));
    add_ppt_tie(p, 0, 1, dims, {1});
    SdpSolution sol = solve(p);
    REQUIRE(sol.status == SdpStatus::optimal);
    HermitianOperator x(dims, sol.primal[0]);
    HermitianOperator xt = partial_transpose(x, {1});
    CHECK((xt.matrix() - sol.primal[1]).norm() <= 1e-6);
    // Both copies PSD: the optimum is the PPT-constrained maximum overlap.
    CHECK(eig_hermitian(HermitianOperator(dims, sol.primal[1])).eigenvalues.minCoeff() >=
          -1e-8);
}

TEST_CASE("feasibility decomposition splits block-positive fixtures and rejects others") {
    // 0.5 I + Phi+^T2 fixture is PSD + transposed-PSD by construction.
    HermitianOperator w = testsupport::bell_transposed(0);
    DimVector dims = w.dims();
    HermitianOperator shifted = 0.5 * HermitianOperator::identity(dims) + w;
    auto parts = feasibility_decompose(shifted);
    REQUIRE(parts.has_value());
    HermitianOperator rebuilt = parts->first + partial_transpose(parts->second, {1});
    CHECK((rebuilt.matrix() - shifted.matrix()).norm() <= 1e-7);
    CHECK(eig_hermitian(parts->first).eigenvalues.minCoeff() >= -1e-8);
    CHECK(eig_hermitian(parts->second).eigenvalues.minCoeff() >= -1e-8);

    // A negative-definite operator cannot be decomposed.
    HermitianOperator neg = -1.0 * HermitianOperator::identity(dims);
    CHECK_FALSE(feasibility_decompose(neg).has_value());
}
