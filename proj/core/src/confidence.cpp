#include "mcdlab/confidence.hpp"

#include "mcdlab/random.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace mcdlab {

namespace {

constexpr double kGapTol = 1e-6;    // nonlocality threshold on confidence gaps
constexpr double kCertTol = 1e-8;   // certificate re-verification window
constexpr double kDenomGuard = 1e-12;

void check_index(const Ensemble& e, int j) {
    if (j < 0 || j >= e.size())
        throw std::out_of_range("confidence: outcome index out of range");
}

HermitianOperator witness_operator(const HermitianOperator& rho0, const Ensemble& e, int j,
                                   double q) {
    return q * rho0 - e.prior(j) * e.state(j);
}

// Inverse square root on the support. The rank decision is made on the input
// spectrum itself: truncating after taking the square root would let noise
// eigenvalues (~1e-16, sqrt ~1e-8) through the cut and blow up the whitening.
MatrixXcd pinv_sqrt_matrix(const MatrixXcd& d) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (d + d.adjoint()));
    const VectorXd& lam = es.eigenvalues();
    double top = lam.cwiseAbs().maxCoeff();
    VectorXd inv = VectorXd::Zero(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        if (lam(i) > 1e-12 * std::max(1.0, top)) inv(i) = 1.0 / std::sqrt(lam(i));
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

// rho_0^{-1/2} eta_j rho_j rho_0^{-1/2} on the support of rho_0.
HermitianOperator whitened_target(const HermitianOperator& rho0, const Ensemble& e, int j) {
    MatrixXcd s = pinv_sqrt_matrix(rho0.matrix());
    MatrixXcd w = s * (e.prior(j) * e.state(j)).matrix() * s;
    return HermitianOperator(rho0.dims(), w);
}

bool psd_probe(const HermitianOperator& h) {
    Spectrum s = eig_hermitian(h);
    double scale = std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
    return s.eigenvalues(0) >= -1e-12 * scale;
}

// Greedy rank-one peeling of a joint vector into per-factor unit vectors;
// exact top Schmidt pair on bipartite spaces.
std::vector<VectorXcd> nearest_product(const DimVector& dims, VectorXcd u) {
    const int m = dims.factors();
    std::vector<VectorXcd> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k + 1 < m; ++k) {
        const int dk = dims.dim(k);
        const int rest = static_cast<int>(u.size()) / dk;
        MatrixXcd a(dk, rest);
        for (int i = 0; i < dk; ++i)
            for (int r = 0; r < rest; ++r) a(i, r) = u(i * rest + r);
        Eigen::JacobiSVD<MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.push_back(svd.matrixU().col(0));
        u = svd.matrixV().col(0).conjugate();
    }
    double n = u.norm();
    out.push_back(n > 0.0 ? VectorXcd(u / n) : VectorXcd::Unit(u.size(), 0));
    return out;
}

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

struct RatioSeesaw {
    double value = 0.0;
    std::vector<VectorXcd> factors;
    bool found = false;
};

// Alternating maximization of <v|num|v> / <v|den|v> over product vectors:
// each factor update solves the exact one-factor generalized eigenproblem on
// the support of the contracted denominator, so the ratio never decreases.
RatioSeesaw ratio_seesaw(const HermitianOperator& num, const HermitianOperator& den,
                         const SeesawOptions& opts,
                         const std::vector<std::vector<VectorXcd>>& seeds) {
    const DimVector& dims = num.dims();
    const int m = dims.factors();
    const int D = dims.total();
    RatioSeesaw best;

    for (int restart = 0; restart < opts.restarts; ++restart) {
        std::vector<VectorXcd> v;
        if (restart < static_cast<int>(seeds.size())) {
            v = seeds[static_cast<std::size_t>(restart)];
        } else {
            Rng rng(mix_seed(opts.seed, static_cast<std::uint64_t>(restart)));
            v = haar_random_product(dims, rng);
        }
        VectorXcd w = product_vector(dims, v);
        double dv = expectation(den, w);
        if (dv <= kDenomGuard) continue;
        double val = expectation(num, w) / dv;
        bool dead = false;

        for (int sweep = 0; sweep < opts.max_sweeps && !dead; ++sweep) {
            double prev = val;
            for (int k = 0; k < m; ++k) {
                const int dk = dims.dim(k);
                MatrixXcd psi = MatrixXcd::Zero(D, dk);
                for (int joint = 0; joint < D; ++joint) {
                    std::vector<int> digits = dims.decode(joint);
                    complexd prod = 1.0;
                    for (int f = 0; f < m; ++f)
                        if (f != k)
                            prod *= v[static_cast<std::size_t>(f)](
                                digits[static_cast<std::size_t>(f)]);
                    psi(joint, digits[static_cast<std::size_t>(k)]) = prod;
                }
                MatrixXcd dk_mat = psi.adjoint() * den.matrix() * psi;
                MatrixXcd nk_mat = psi.adjoint() * num.matrix() * psi;
                if (dk_mat.norm() < 1e-14) {
                    dead = true;
                    break;
                }
                MatrixXcd s = pinv_sqrt_matrix(dk_mat);
                MatrixXcd t = s * nk_mat * s;
                Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (t + t.adjoint()));
                const Eigen::Index top = es.eigenvalues().size() - 1;
                double lam = es.eigenvalues()(top);
                VectorXcd cand = s * es.eigenvectors().col(top);
                double nc = cand.norm();
                if (lam <= 0.0 || nc < kDenomGuard) continue; // dead direction, keep factor
                v[static_cast<std::size_t>(k)] = cand / nc;
                val = lam;
            }
            if (val - prev <= opts.tol * std::max(1.0, std::abs(val))) break;
        }
        if (dead) continue;

        w = product_vector(dims, v);
        dv = expectation(den, w);
        if (dv <= kDenomGuard) continue;
        double final_val = expectation(num, w) / dv;
        if (!best.found || final_val > best.value) {
            best.value = final_val;
            best.factors = v;
            best.found = true;
        }
    }
    return best;
}

std::optional<SigmaCertificate> sigma_from_locc(const Ensemble& e, int j, double q,
                                                const HermitianOperator& rho0,
                                                const LoccConfidenceResult& locc) {
    if (q < locc.q_upper - kGapTol)
        throw std::domain_error(
            "sigma_certificate: q sits below the separable-confidence bracket");
    if (q > locc.q_upper + kGapTol) return std::nullopt; // strictly past the touching point

    double tr = locc.optimizer.trace();
    if (!(tr > kDenomGuard)) return std::nullopt;
    HermitianOperator sigma = psd_clamp((1.0 / tr) * locc.optimizer);
    double str = sigma.trace();
    if (!(str > kDenomGuard)) return std::nullopt;
    sigma = (1.0 / str) * sigma;

    SigmaCertificate cert{.sigma = sigma,
                          .witness_expectation =
                              hs_inner(sigma, witness_operator(rho0, e, j, q)),
                          .rho0_overlap = hs_inner(sigma, rho0),
                          .separability = Membership::unknown};
    if (std::abs(cert.witness_expectation) > kCertTol || cert.rho0_overlap <= kCertTol)
        return std::nullopt;
    cert.separability = is_separable(sigma).status;
    return cert;
}

NonlocalityGap gap_from(const Ensemble& e, int j, const HermitianOperator& rho0,
                        const MaxConfidenceResult& mc, const LoccConfidenceResult& locc,
                        const ConfidenceOptions& options) {
    NonlocalityGap g;
    g.gap = mc.value - locc.q_upper;
    const double probes[2] = {locc.q_upper, 0.5 * (locc.q_upper + mc.value)};
    bool all_ew = true;
    for (double q : probes) {
        ConeVerdict v = is_ew(witness_operator(rho0, e, j, q), options.seesaw, options.sdp);
        all_ew = all_ew && v.status == Membership::inside;
        g.probe_points.emplace_back(q, std::move(v));
    }
    if (mc.value - locc.q_lower <= kGapTol) {
        g.nonlocal = Trilean::no; // the achievable bracket already closes the gap
    } else if (g.gap > kGapTol && all_ew) {
        g.nonlocal = Trilean::yes;
    } else if (locc.exact && g.gap <= kGapTol) {
        g.nonlocal = Trilean::no;
    } else {
        g.nonlocal = Trilean::unknown;
    }
    return g;
}

} // namespace

const char* to_string(Trilean t) {
    switch (t) {
        case Trilean::yes: return "yes";
        case Trilean::no: return "no";
        case Trilean::unknown: return "unknown";
    }
    return "unknown";
}

MaxConfidenceResult max_confidence(const Ensemble& e, int j, const ConfidenceOptions& options) {
    check_index(e, j);
    AverageState avg = average_state(e);
    MaxConfidenceResult r;
    r.support_rank = avg.support_rank;
    r.value = eig_hermitian(whitened_target(avg.rho0, e, j)).eigenvalues.maxCoeff();

    // Independent route: smallest q whose witness operator is PSD.
    double lo = 0.0, hi = 1.0;
    const double tol = std::max(options.tol, 1e-12);
    if (psd_probe(witness_operator(avg.rho0, e, j, lo))) {
        r.bisection_value = 0.0;
        return r;
    }
    while (hi - lo > 0.5 * tol) {
        double mid = 0.5 * (lo + hi);
        (psd_probe(witness_operator(avg.rho0, e, j, mid)) ? hi : lo) = mid;
    }
    r.bisection_value = hi;
    return r;
}

HermitianOperator mc_measurement_operator(const Ensemble& e, int j,
                                          const ConfidenceOptions& options) {
    check_index(e, j);
    AverageState avg = average_state(e);
    MatrixXcd s = pinv_sqrt_matrix(avg.rho0.matrix());
    HermitianOperator whitened = whitened_target(avg.rho0, e, j);
    Spectrum sp = eig_hermitian(whitened);
    const Eigen::Index n = sp.eigenvalues.size();
    double top = sp.eigenvalues(n - 1);

    // Top eigenspace, then un-whiten and scale under the identity.
    MatrixXcd proj = MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (sp.eigenvalues(i) >= top - std::max(options.tol, 1e-12) * std::max(1.0, std::abs(top)))
            proj += sp.eigenvectors.col(i) * sp.eigenvectors.col(i).adjoint();
    HermitianOperator m_raw(e.dims(), s * proj * s);
    double scale = eig_hermitian(m_raw).eigenvalues.maxCoeff();
    if (!(scale > 0.0))
        throw std::runtime_error("mc_measurement_operator: degenerate whitened operator");
    return (1.0 / scale) * m_raw;
}

LoccConfidenceResult locc_confidence(const Ensemble& e, int j, const ConfidenceOptions& options) {
    check_index(e, j);
    AverageState avg = average_state(e);
    const DimVector& dims = e.dims();
    const int m = dims.factors();
    const int D = dims.total();
    const HermitianOperator target = e.prior(j) * e.state(j);
    std::vector<std::vector<int>> cuts = m >= 2 ? bipartition_cuts(m) : std::vector<std::vector<int>>{};

    SdpProblem p;
    p.block_dims.assign(cuts.size() + 1, D);
    p.objective.assign(cuts.size() + 1, MatrixXcd::Zero(D, D));
    p.objective[0] = target.matrix();
    SdpProblem::Constraint norm;
    norm.coeff.assign(cuts.size() + 1, MatrixXcd::Zero(D, D));
    norm.coeff[0] = avg.rho0.matrix();
    norm.rhs = 1.0;
    p.constraints.push_back(std::move(norm));
    for (std::size_t c = 0; c < cuts.size(); ++c)
        add_ppt_tie(p, 0, static_cast<int>(c) + 1, dims, cuts[c]);

    SdpSolution sol = solve(p, options.sdp);

    LoccConfidenceResult r{
        .q_lower = e.prior(j), // the identity operator always achieves the prior
        .q_upper = sol.dual_objective, // multiplier of the normalization constraint
        .exact = exactness_scope(dims).is_exact && sol.status == SdpStatus::optimal,
        .solver_status = sol.status,
        .optimizer = HermitianOperator(dims, sol.primal[0]),
        .best_product = std::nullopt,
        .decomposition = std::nullopt};

    if (sol.status == SdpStatus::optimal) {
        WitnessDecomposition d{
            .psd_part = psd_clamp(HermitianOperator(dims, sol.dual_slack[0])),
            .transposed_parts = {},
            .residual = 0.0};
        for (std::size_t c = 0; c < cuts.size(); ++c)
            d.transposed_parts.emplace_back(
                psd_clamp(HermitianOperator(dims, sol.dual_slack[c + 1])), cuts[c]);
        d.residual = witness_decomposition_residual(e, j, r.q_upper, d);
        r.decomposition = std::move(d);
    }

    // Lower bound: product-state see-saw seeded from the solver's optimizer.
    std::vector<std::vector<VectorXcd>> seeds;
    if (m >= 2) {
        Spectrum so = eig_hermitian(r.optimizer);
        const Eigen::Index n = so.eigenvalues.size();
        if (so.eigenvalues(n - 1) > 0.0)
            seeds.push_back(nearest_product(dims, so.eigenvectors.col(n - 1)));
    }
    SeesawOptions sopts = options.seesaw;
    sopts.seed = mix_seed(options.seed, 0x10cc);
    RatioSeesaw ss = ratio_seesaw(target, avg.rho0, sopts, seeds);

    if (ss.found && ss.value > r.q_lower) {
        r.q_lower = ss.value;
        r.best_product = ProductVectorCert{ss.factors, ss.value};
    }
    return r;
}

std::optional<SigmaCertificate> sigma_certificate(const Ensemble& e, int j, double q,
                                                  const ConfidenceOptions& options) {
    check_index(e, j);
    AverageState avg = average_state(e);
    LoccConfidenceResult locc = locc_confidence(e, j, options);
    return sigma_from_locc(e, j, q, avg.rho0, locc);
}

NonlocalityGap nonlocality_gap(const Ensemble& e, int j, const ConfidenceOptions& options) {
    check_index(e, j);
    AverageState avg = average_state(e);
    MaxConfidenceResult mc = max_confidence(e, j, options);
    LoccConfidenceResult locc = locc_confidence(e, j, options);
    return gap_from(e, j, avg.rho0, mc, locc, options);
}

ConfidenceReport confidence_report(const Ensemble& e, int j, const ConfidenceOptions& options) {
    check_index(e, j);
    AverageState avg = average_state(e);
    MaxConfidenceResult mc = max_confidence(e, j, options);
    LoccConfidenceResult locc = locc_confidence(e, j, options);

    ConfidenceReport r;
    r.j = j;
    r.c_value = mc.value;
    r.c_bisection = mc.bisection_value;
    r.q_lower = locc.q_lower;
    r.q_upper = locc.q_upper;
    r.exact = locc.exact;
    r.locc_status = locc.solver_status;
    r.support_rank = mc.support_rank;
    r.gap = gap_from(e, j, avg.rho0, mc, locc, options);
    r.nonlocal = r.gap.nonlocal;
    if (!r.gap.probe_points.empty()) r.ew_certificate = r.gap.probe_points.front().second;
    r.sigma = sigma_from_locc(e, j, locc.q_upper, avg.rho0, locc);
    r.mc_operator = mc_measurement_operator(e, j, options);
    r.locc_optimizer = locc.optimizer;
    r.locc_decomposition = locc.decomposition;
    return r;
}

TwoQubitWeakOptimality two_qubit_weak_optimality_check(const Ensemble& e, int j, double q,
                                                       const ConfidenceOptions& options) {
    check_index(e, j);
    if (e.dims() != DimVector{2, 2})
        throw std::invalid_argument("two_qubit_weak_optimality_check: dims must be 2x2");
    AverageState avg = average_state(e);
    MaxConfidenceResult mc = max_confidence(e, j, options);
    LoccConfidenceResult locc = locc_confidence(e, j, options);

    TwoQubitWeakOptimality r;
    r.c_value = mc.value;
    r.q_upper = locc.q_upper;

    HermitianOperator w = witness_operator(avg.rho0, e, j, q);
    ConeVerdict ew = is_ew(w, options.seesaw, options.sdp);
    r.weakly_optimal_ew =
        ew.status == Membership::inside &&
        is_weakly_optimal_ew(w, options.seesaw, options.sdp).status == Membership::inside;

    double gap = mc.value - locc.q_upper;
    r.at_separable_optimum = std::abs(q - locc.q_upper) <= kGapTol && gap > kGapTol;
    if (mc.support_rank < 4)
        r.rank_deficient_local = std::abs(mc.value - locc.q_upper) <= kGapTol;
    r.consistent = r.weakly_optimal_ew == r.at_separable_optimum &&
                   r.rank_deficient_local.value_or(true);
    return r;
}

double witness_decomposition_residual(const Ensemble& e, int j, double q,
                                      const WitnessDecomposition& d) {
    check_index(e, j);
    AverageState avg = average_state(e);
    HermitianOperator rebuilt = d.psd_part;
    for (const auto& [part, cut] : d.transposed_parts)
        rebuilt = rebuilt + partial_transpose(part, cut);
    return (witness_operator(avg.rho0, e, j, q) - rebuilt).frobenius_norm();
}

} // namespace mcdlab
