#include "mcdlab/minerr.hpp"

#include "mcdlab/sdp.hpp"

#include <cmath>
#include <stdexcept>

namespace mcdlab {

namespace {

constexpr double kGapTol = 1e-6;

} // namespace

const char* to_string(PsepStatus s) {
    switch (s) {
        case PsepStatus::equals_prior: return "equals_prior";
        case PsepStatus::other: return "other";
        case PsepStatus::unknown: return "unknown";
    }
    return "unknown";
}

const char* to_string(CrosscheckStatus s) {
    switch (s) {
        case CrosscheckStatus::certified: return "certified";
        case CrosscheckStatus::not_certified: return "not_certified";
        case CrosscheckStatus::skipped: return "skipped";
    }
    return "skipped";
}

GuessingProbability guessing_probability(const Ensemble& e, const SdpOptions& sdp) {
    const int n = e.size();
    const int D = e.dims().total();

    // maximize sum_i eta_i Tr(rho_i M_i) over M_i >= 0 with sum_i M_i + M_rest = I.
    SdpProblem p;
    p.block_dims.assign(static_cast<std::size_t>(n) + 1, D);
    p.objective.assign(static_cast<std::size_t>(n) + 1, MatrixXcd::Zero(D, D));
    for (int i = 0; i < n; ++i)
        p.objective[static_cast<std::size_t>(i)] = (e.prior(i) * e.state(i)).matrix();
    for (const MatrixXcd& basis : hermitian_basis(D)) {
        SdpProblem::Constraint c;
        c.coeff.assign(static_cast<std::size_t>(n) + 1, basis);
        c.rhs = basis.trace().real();
        p.constraints.push_back(std::move(c));
    }

    SdpSolution sol = solve(p, sdp);

    // The completion block has zero objective, so its dual slack is exactly
    // the multiplier operator K = sum_k y_k E_k.
    HermitianOperator k(e.dims(), sol.dual_slack[static_cast<std::size_t>(n)]);
    GuessingProbability g{sol.dual_objective, sol.status, {}, k, 0.0};
    for (int i = 0; i <= n; ++i)
        g.povm.emplace_back(e.dims(), sol.primal[static_cast<std::size_t>(i)]);
    for (int i = 0; i < n; ++i) {
        Spectrum s = eig_hermitian(k - e.prior(i) * e.state(i));
        g.certificate_violation = std::max(g.certificate_violation, -s.eigenvalues.minCoeff());
    }
    g.certificate_violation = std::max(g.certificate_violation, 0.0);
    return g;
}

double helstrom_two_state(double eta1, const HermitianOperator& rho1, double eta2,
                          const HermitianOperator& rho2) {
    if (std::abs(eta1 + eta2 - 1.0) > 1e-10)
        throw std::invalid_argument("helstrom_two_state: priors must sum to one");
    if (rho1.dims() != rho2.dims())
        throw std::invalid_argument("helstrom_two_state: dimension mismatch");
    return 0.5 * (1.0 + trace_norm(eta1 * rho1 - eta2 * rho2));
}

SeparableCeilingCheck separable_ceiling_check(const Ensemble& e, int j, const SeesawOptions& seesaw,
                       const SdpOptions& sdp) {
    if (j < 0 || j >= e.size())
        throw std::out_of_range("separable_ceiling_check: outcome index out of range");

    SeparableCeilingCheck r;
    r.exact = exactness_scope(e.dims()).is_exact;
    bool all_bp_certain = true;   // every difference certified block positive
    bool any_bp_failed = false;   // some difference certified not block positive
    bool any_ew_certain = false;  // some difference certified a witness
    bool any_ew_possible = false; // some undecided difference could still be one
    for (int i = 0; i < e.size(); ++i) {
        HermitianOperator diff = e.prior(j) * e.state(j) - e.prior(i) * e.state(i);
        bool psd = is_psd(diff);
        ConeVerdict bp = is_block_positive(diff, seesaw, sdp);
        all_bp_certain = all_bp_certain && bp.status == Membership::inside;
        any_bp_failed = any_bp_failed || bp.status == Membership::outside;
        if (!psd) {
            if (bp.status == Membership::inside)
                any_ew_certain = true;
            else if (bp.status == Membership::unknown)
                any_ew_possible = true;
        }
        r.difference_psd.push_back(psd);
        r.difference_verdicts.push_back(std::move(bp));
    }

    if (any_ew_certain)
        r.ew_exists = Trilean::yes;
    else if (!any_ew_possible)
        r.ew_exists = Trilean::no; // every difference is PSD or certified outside
    else
        r.ew_exists = Trilean::unknown;

    if (!r.exact) {
        r.p_sep_status = PsepStatus::unknown;
    } else if (all_bp_certain && r.ew_exists == Trilean::yes) {
        r.p_sep_status = PsepStatus::equals_prior;
    } else if (any_bp_failed || r.ew_exists == Trilean::no) {
        r.p_sep_status = PsepStatus::other;
    } else {
        r.p_sep_status = PsepStatus::unknown;
    }
    return r;
}

CrosscheckResult crosscheck_minerr_gap(const Ensemble& e, int j,
                                       const ConfidenceOptions& options) {
    if (j < 0 || j >= e.size())
        throw std::out_of_range("crosscheck_minerr_gap: outcome index out of range");

    CrosscheckResult r;
    NonlocalityGap gap = nonlocality_gap(e, j, options);
    if (gap.nonlocal != Trilean::yes) {
        r.status = CrosscheckStatus::skipped;
        r.reason = std::string("no certified confidence gap for this outcome (verdict: ") +
                   to_string(gap.nonlocal) + ")";
        return r;
    }

    LoccConfidenceResult locc = locc_confidence(e, j, options);
    r.q = locc.q_upper;
    r.r = r.q / (r.q + e.prior(j));
    Ensemble sub = two_state_subensemble(e, j, r.r);

    r.separable_ceiling = separable_ceiling_check(sub, 0, options.seesaw, options.sdp);
    GuessingProbability pg = guessing_probability(sub, options.sdp);
    r.p_g = pg.value;
    r.p_g_status = pg.solver_status;

    if (pg.solver_status != SdpStatus::optimal) {
        r.status = CrosscheckStatus::not_certified;
        r.reason = std::string("guessing-probability solve ended ") +
                   to_string(pg.solver_status);
    } else if (r.separable_ceiling.p_sep_status != PsepStatus::equals_prior) {
        r.status = CrosscheckStatus::not_certified;
        r.reason = std::string("separable ceiling criterion returned ") +
                   to_string(r.separable_ceiling.p_sep_status);
    } else if (!(r.p_g > r.r + kGapTol)) {
        r.status = CrosscheckStatus::not_certified;
        r.reason = "global guessing probability does not exceed the separable ceiling";
    } else {
        r.status = CrosscheckStatus::certified;
        r.reason = "separable ceiling r beaten by the global optimum";
    }

    // Reverse map: the derived prior reproduces q and the witness re-certifies.
    r.q_back = r.r * e.prior(j) / (1.0 - r.r);
    AverageState avg = average_state(e);
    HermitianOperator w = r.q_back * avg.rho0 - e.prior(j) * e.state(j);
    r.reverse_ok = std::abs(r.q_back - r.q) <= 1e-9 * std::max(1.0, r.q) &&
                   is_ew(w, options.seesaw, options.sdp).status == Membership::inside;
    return r;
}

} // namespace mcdlab
