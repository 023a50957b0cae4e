#include "mcdlab/constructions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mcdlab {

namespace {

constexpr double kZeroTol = 1e-12;
constexpr double kPsdSlack = 1e-9; // relative tolerance before a numerator is rejected

void check_family_index(const WitnessFamily& f, int j) {
    if (j < 0 || j >= static_cast<int>(f.witnesses.size()))
        throw std::out_of_range("witness family: index out of range");
}

void require_constructible(const WitnessFamily& f) {
    if (!(f.epsilon > 0.0))
        throw std::domain_error(
            "witness family: sum of witnesses must be positive definite "
            "(smallest eigenvalue " +
            std::to_string(f.epsilon) + " <= 0)");
}

} // namespace

JordanDecomposition jordan_decompose(const HermitianOperator& w) {
    Spectrum s = eig_hermitian(w);
    const Eigen::Index n = s.eigenvalues.size();
    double scale = std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
    MatrixXcd plus = MatrixXcd::Zero(n, n);
    MatrixXcd minus = MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const MatrixXcd proj = s.eigenvectors.col(i) * s.eigenvectors.col(i).adjoint();
        if (s.eigenvalues(i) > 0.0)
            plus += s.eigenvalues(i) * proj;
        else
            minus += -s.eigenvalues(i) * proj;
    }
    JordanDecomposition d{HermitianOperator(w.dims(), plus),
                          HermitianOperator(w.dims(), minus),
                          /*degenerate=*/false};
    d.degenerate = d.minus.trace() <= kZeroTol * scale;
    return d;
}

Ensemble ensemble_from_witness(const HermitianOperator& w, const SeesawOptions& seesaw,
                               const SdpOptions& sdp) {
    ConeVerdict verdict = is_ew(w, seesaw, sdp);
    if (verdict.status == Membership::outside)
        throw std::invalid_argument("ensemble_from_witness: operator is not a witness");

    JordanDecomposition d = jordan_decompose(w);
    if (d.degenerate)
        throw std::invalid_argument(
            "ensemble_from_witness: operator has no negative part, so the first state "
            "is undefined");

    const double tp = d.plus.trace();
    const double tm = d.minus.trace();
    const double total = tp + tm;
    std::vector<EnsembleItem> items;
    items.push_back({tm / total, (1.0 / tm) * d.minus});
    items.push_back({tp / total, (1.0 / tp) * d.plus});
    Ensemble e(w.dims(), std::move(items));

    // The construction stands on q rho_0 - eta_1 rho_1 = [q W+ + (q-1) W-] / Tr|W|,
    // linear in q, so checking the endpoints pins the whole line.
    AverageState avg = average_state(e);
    double r0 = (avg.rho0 - (1.0 / total) * (d.plus + d.minus)).frobenius_norm();
    double r1 = (e.prior(0) * e.state(0) - (1.0 / total) * d.minus).frobenius_norm();
    if (r0 > kZeroTol * total || r1 > kZeroTol * total)
        throw std::runtime_error("ensemble_from_witness: reconstruction identity failed");
    return e;
}

WitnessFamily witness_family(std::vector<HermitianOperator> witnesses,
                             const SeesawOptions& seesaw, const SdpOptions& sdp) {
    if (witnesses.empty())
        throw std::invalid_argument("witness_family: at least one witness required");
    const DimVector dims = witnesses.front().dims();
    for (const HermitianOperator& w : witnesses)
        if (w.dims() != dims)
            throw std::invalid_argument("witness_family: mixed dimensions");

    WitnessFamily f{std::move(witnesses), HermitianOperator(dims, MatrixXcd::Zero(dims.total(), dims.total())),
                    0.0, {}, 0.0, {}, {}};
    for (std::size_t i = 0; i < f.witnesses.size(); ++i) {
        ConeVerdict v = is_ew(f.witnesses[i], seesaw, sdp);
        if (v.status == Membership::outside)
            throw std::invalid_argument("witness_family: member " + std::to_string(i) +
                                        " is not a witness");
        f.witness_verdicts.push_back(std::move(v));
        f.w_sum = f.w_sum + f.witnesses[i];
        double top = eig_hermitian(f.witnesses[i]).eigenvalues.maxCoeff();
        f.lambda.push_back(top);
        f.lambda_sum += top;
    }
    f.epsilon = eig_hermitian(f.w_sum).eigenvalues.minCoeff();

    if (f.epsilon > 0.0) {
        if (!(f.lambda_sum > f.epsilon))
            throw std::runtime_error("witness_family: largest-eigenvalue sum does not "
                                     "exceed the smallest eigenvalue of the sum");
        HermitianOperator s = pinv_on_support(psd_sqrt(f.w_sum));
        for (const HermitianOperator& w : f.witnesses) {
            MatrixXcd m = s.matrix() * w.matrix() * s.matrix();
            double lo = eig_hermitian(HermitianOperator(dims, m)).eigenvalues.minCoeff();
            f.delta.push_back(std::abs(std::min(lo, 0.0)));
        }
    }
    return f;
}

Ensemble ensemble_from_family(const WitnessFamily& f) {
    require_constructible(f);
    const int n = static_cast<int>(f.witnesses.size());
    std::vector<HermitianOperator> numerators;
    std::vector<double> traces;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        HermitianOperator num =
            f.lambda[static_cast<std::size_t>(i)] * f.w_sum - f.epsilon * f.witnesses[static_cast<std::size_t>(i)];
        Spectrum s = eig_hermitian(num);
        double scale = std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
        if (s.eigenvalues.minCoeff() < -kPsdSlack * scale)
            throw std::runtime_error("ensemble_from_family: numerator " + std::to_string(i) +
                                     " is not positive semidefinite");
        num = psd_clamp(num);
        double t = num.trace();
        if (!(t > kZeroTol))
            throw std::runtime_error("ensemble_from_family: numerator " + std::to_string(i) +
                                     " has vanishing trace");
        numerators.push_back(std::move(num));
        traces.push_back(t);
        total += t;
    }
    std::vector<EnsembleItem> items;
    for (int i = 0; i < n; ++i)
        items.push_back({traces[static_cast<std::size_t>(i)] / total,
                         (1.0 / traces[static_cast<std::size_t>(i)]) *
                             numerators[static_cast<std::size_t>(i)]});
    return Ensemble(f.witnesses.front().dims(), std::move(items));
}

double predicted_max_confidence(const WitnessFamily& f, int j) {
    check_family_index(f, j);
    require_constructible(f);
    return (f.lambda[static_cast<std::size_t>(j)] +
            f.epsilon * f.delta[static_cast<std::size_t>(j)]) /
           (f.lambda_sum - f.epsilon);
}

double separable_confidence_bound(const WitnessFamily& f, int j) {
    check_family_index(f, j);
    require_constructible(f);
    return f.lambda[static_cast<std::size_t>(j)] / (f.lambda_sum - f.epsilon);
}

std::optional<double> predicted_Q(const WitnessFamily& f, int j, const SeesawOptions& seesaw,
                                  const SdpOptions& sdp) {
    check_family_index(f, j);
    require_constructible(f);
    if (f.witness_verdicts[static_cast<std::size_t>(j)].status != Membership::inside)
        return std::nullopt; // witness status itself undecided
    ConeVerdict weak = is_weakly_optimal_ew(f.witnesses[static_cast<std::size_t>(j)], seesaw, sdp);
    if (weak.status != Membership::inside) return std::nullopt;
    return separable_confidence_bound(f, j);
}

} // namespace mcdlab
