// Microbenchmarks for the hot paths: spectral decomposition, the product
// see-saw, the separable-confidence SDP, and the full per-outcome report.

#include <benchmark/benchmark.h>

#include "mcdlab/confidence.hpp"
#include "mcdlab/cones.hpp"
#include "mcdlab/ensemble.hpp"
#include "mcdlab/random.hpp"
#include "mcdlab/sdp.hpp"

using namespace mcdlab;

namespace {

void bm_eig_hermitian(benchmark::State& state) {
    int d = static_cast<int>(state.range(0));
    Rng rng(11);
    HermitianOperator h = random_hermitian(DimVector({d}), rng);
    for (auto _ : state) {
        Spectrum s = eig_hermitian(h);
        benchmark::DoNotOptimize(s.eigenvalues);
    }
}
BENCHMARK(bm_eig_hermitian)->Arg(4)->Arg(6)->Arg(9)->Arg(16);

void bm_seesaw_product_minimum(benchmark::State& state) {
    Rng rng(22);
    DimVector dims = state.range(0) == 4 ? DimVector({2, 2}) : DimVector({2, 3});
    HermitianOperator h = random_hermitian(dims, rng);
    for (auto _ : state) {
        SeesawResult r = min_product_expectation(h);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(bm_seesaw_product_minimum)->Arg(4)->Arg(6);

void bm_max_eigenvalue_sdp(benchmark::State& state) {
    int d = static_cast<int>(state.range(0));
    Rng rng(33);
    HermitianOperator h = random_hermitian(DimVector({d}), rng);
    SdpProblem p;
    p.block_dims = {d};
    p.objective = {h.matrix()};
    SdpProblem::Constraint c;
    c.coeff = {MatrixXcd::Identity(d, d)};
    c.rhs = 1.0;
    p.constraints.push_back(std::move(c));
    for (auto _ : state) {
        SdpSolution sol = solve(p);
        benchmark::DoNotOptimize(sol.primal_objective);
    }
}
BENCHMARK(bm_max_eigenvalue_sdp)->Arg(4)->Arg(9)->Arg(16);

void bm_global_confidence(benchmark::State& state) {
    Ensemble e = example_qubit_qutrit();
    for (auto _ : state) {
        MaxConfidenceResult r = max_confidence(e, 0);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(bm_global_confidence);

void bm_separable_confidence_sdp(benchmark::State& state) {
    Ensemble e = example_qubit_qutrit();
    for (auto _ : state) {
        LoccConfidenceResult r = locc_confidence(e, 0);
        benchmark::DoNotOptimize(r.q_upper);
    }
}
BENCHMARK(bm_separable_confidence_sdp);

void bm_full_outcome_report(benchmark::State& state) {
    Ensemble e = example_qubit_qutrit();
    for (auto _ : state) {
        ConfidenceReport r = confidence_report(e, 0);
        benchmark::DoNotOptimize(r.gap.gap);
    }
}
BENCHMARK(bm_full_outcome_report);

} // namespace

BENCHMARK_MAIN();
