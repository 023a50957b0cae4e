#include "mcdlab/sdp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcdlab {

using Eigen::MatrixXd;

const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::optimal: return "optimal";
        case SdpStatus::infeasible: return "infeasible";
        case SdpStatus::unbounded: return "unbounded";
        case SdpStatus::stalled: return "stalled";
    }
    return "unknown";
}

namespace {

constexpr int kMaxConstraints = 200;
constexpr int kMaxTotalDim = 64;

// Real symmetric embedding of a Hermitian matrix: [[Re, -Im], [Im, Re]].
// PSD-ness is preserved both ways; traces double, which the 1/2 factor on
// embedded problem data compensates.
MatrixXd embed(const MatrixXcd& h) {
    const Eigen::Index n = h.rows();
    MatrixXd m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = h.real();
    m.bottomRightCorner(n, n) = h.real();
    m.topRightCorner(n, n) = -h.imag();
    m.bottomLeftCorner(n, n) = h.imag();
    return 0.5 * (m + m.transpose());
}

// Inverse of embed up to averaging over the symplectic symmetry; PSD inputs
// recover PSD Hermitian outputs.
MatrixXcd recover(const MatrixXd& b) {
    const Eigen::Index n = b.rows() / 2;
    MatrixXd re = 0.5 * (b.topLeftCorner(n, n) + b.bottomRightCorner(n, n));
    MatrixXd im = 0.5 * (b.bottomLeftCorner(n, n) - b.topRightCorner(n, n));
    MatrixXcd x = re.cast<complexd>() + complexd(0.0, 1.0) * im.cast<complexd>();
    return 0.5 * (x + x.adjoint());
}

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void validate(const SdpProblem& p) {
    const std::size_t nb = p.block_dims.size();
    if (nb == 0) throw std::invalid_argument("sdp: no blocks");
    int total = 0;
    for (int d : p.block_dims) {
        if (d < 1) throw std::invalid_argument("sdp: block dimension < 1");
        total += d;
    }
    if (total > kMaxTotalDim) throw std::invalid_argument("sdp: total block dimension exceeds 64");
    if (p.objective.size() != nb) throw std::invalid_argument("sdp: objective block count mismatch");
    if (static_cast<int>(p.constraints.size()) > kMaxConstraints)
        throw std::invalid_argument("sdp: more than 200 constraints");
    for (std::size_t b = 0; b < nb; ++b)
        if (p.objective[b].rows() != p.block_dims[b] || p.objective[b].cols() != p.block_dims[b])
            throw std::invalid_argument("sdp: objective dimension mismatch");
    for (const SdpProblem::Constraint& c : p.constraints) {
        if (c.coeff.size() != nb) throw std::invalid_argument("sdp: constraint block count mismatch");
        for (std::size_t b = 0; b < nb; ++b)
            if (c.coeff[b].rows() != p.block_dims[b] || c.coeff[b].cols() != p.block_dims[b])
                throw std::invalid_argument("sdp: constraint dimension mismatch");
    }
}

// Largest step a in [0, cap] keeping X + a*D PSD, given the Cholesky factor of X.
double step_to_boundary(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& d, double cap) {
    MatrixXd w = llt.matrixL().solve(d);
    w = llt.matrixL().solve(w.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(w), Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues()(0);
    if (lo >= 0.0) return cap;
    return std::min(cap, -1.0 / lo);
}

struct Internal {
    // Internal minimization form: min sum Tr(C_b X_b), A(X) = rhs, X >= 0.
    std::vector<int> side;
    std::vector<MatrixXd> C;
    std::vector<std::vector<MatrixXd>> A; // [k][b]
    std::vector<std::vector<int>> active; // block indices with nonzero coeff
    VectorXd rhs;
    double cnorm = 0.0;
    double bnorm = 0.0;
};

struct Iterate {
    std::vector<MatrixXd> X, S;
    VectorXd y;
    double merit = std::numeric_limits<double>::infinity();
};

struct Stats {
    VectorXd rp;
    std::vector<MatrixXd> Rd;
    double mu = 0.0, pobj = 0.0, dobj = 0.0;
    double prim_res = 0.0, dual_res = 0.0, relgap = 0.0;
};

Stats compute_stats(const Internal& in, const std::vector<MatrixXd>& X,
                    const std::vector<MatrixXd>& S, const VectorXd& y, int N) {
    Stats st;
    const std::size_t nb = in.side.size();
    const int p = static_cast<int>(in.rhs.size());
    st.rp = in.rhs;
    for (int k = 0; k < p; ++k)
        for (int b : in.active[static_cast<std::size_t>(k)])
            st.rp(k) -= in.A[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)]
                            .cwiseProduct(X[static_cast<std::size_t>(b)])
                            .sum();
    st.Rd.resize(nb);
    double rd2 = 0.0, xs = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        MatrixXd r = in.C[b] - S[b];
        for (int k = 0; k < p; ++k) r -= y(k) * in.A[static_cast<std::size_t>(k)][b];
        st.Rd[b] = r;
        rd2 += r.squaredNorm();
        xs += X[b].cwiseProduct(S[b]).sum();
        st.pobj += in.C[b].cwiseProduct(X[b]).sum();
    }
    st.dobj = in.rhs.dot(y);
    st.mu = xs / N;
    st.prim_res = st.rp.norm() / (1.0 + in.bnorm);
    st.dual_res = std::sqrt(rd2) / (1.0 + in.cnorm);
    double ref = 1.0 + std::abs(st.pobj) + std::abs(st.dobj);
    st.relgap = std::max(std::abs(st.pobj - st.dobj), xs) / ref;
    return st;
}

} // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
    validate(problem);

    const std::size_t nb = problem.block_dims.size();
    const int p = static_cast<int>(problem.constraints.size());

    Internal in;
    in.side.resize(nb);
    in.C.resize(nb);
    double c2 = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        in.side[b] = 2 * problem.block_dims[b];
        in.C[b] = -0.5 * embed(0.5 * (problem.objective[b] + problem.objective[b].adjoint()));
        c2 += in.C[b].squaredNorm();
    }
    in.cnorm = std::sqrt(c2);
    in.A.resize(static_cast<std::size_t>(p));
    in.active.resize(static_cast<std::size_t>(p));
    in.rhs.resize(p);
    for (int k = 0; k < p; ++k) {
        const SdpProblem::Constraint& c = problem.constraints[static_cast<std::size_t>(k)];
        in.rhs(k) = c.rhs;
        in.A[static_cast<std::size_t>(k)].resize(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            in.A[static_cast<std::size_t>(k)][b] = 0.5 * embed(0.5 * (c.coeff[b] + c.coeff[b].adjoint()));
            if (in.A[static_cast<std::size_t>(k)][b].norm() > 0.0)
                in.active[static_cast<std::size_t>(k)].push_back(static_cast<int>(b));
        }
    }
    in.bnorm = in.rhs.norm();

    int N = 0;
    for (std::size_t b = 0; b < nb; ++b) N += in.side[b];

    // Infeasible start at identity blocks.
    std::vector<MatrixXd> X(nb), S(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        X[b] = MatrixXd::Identity(in.side[b], in.side[b]);
        S[b] = MatrixXd::Identity(in.side[b], in.side[b]);
    }
    VectorXd y = VectorXd::Zero(p);

    SdpSolution sol;
    Iterate best;
    bool converged = false;
    int iters = 0;
    int tiny_steps = 0;
    std::vector<MatrixXd> ray_candidate;

    auto normalize_blocks = [&](const std::vector<MatrixXd>& Xs) {
        double top = 0.0;
        for (const MatrixXd& m : Xs) top = std::max(top, m.cwiseAbs().maxCoeff());
        std::vector<MatrixXd> Z;
        if (!(top > 0.0) || !std::isfinite(top)) return Z;
        Z.reserve(nb);
        for (const MatrixXd& m : Xs) Z.push_back(m / top);
        return Z;
    };

    auto snapshot = [&](const Stats& st) {
        double merit = std::max({st.prim_res, st.dual_res, st.relgap});
        if (merit < best.merit) best = Iterate{X, S, y, merit};
    };

    for (int iter = 0; iter < options.max_iters; ++iter) {
        Stats st = compute_stats(in, X, S, y, N);
        if (!std::isfinite(st.mu) || !std::isfinite(st.pobj) || !std::isfinite(st.prim_res)) break;
        if (options.keep_trace)
            sol.trace.push_back(SdpIterStat{st.mu, st.prim_res, st.dual_res, -st.pobj, -st.dobj});
        snapshot(st);
        // A runaway primal with small constraint violation signals an
        // improving ray; keep the latest (most recession-dominated) iterate.
        if (st.pobj < -1e7) {
            std::vector<MatrixXd> z = normalize_blocks(X);
            if (!z.empty()) ray_candidate = std::move(z);
        }
        if (st.prim_res <= options.feas_tol && st.dual_res <= options.feas_tol &&
            st.relgap <= options.gap_tol) {
            converged = true;
            break;
        }
        if (st.mu < 1e-16 && st.prim_res <= 1e-8 && st.dual_res <= 1e-8) {
            converged = true;
            break;
        }

        // Nesterov-Todd scaling per block. With X = L L^T and L^T S L = U D U^T,
        // G = L U D^{-1/4} gives W = G G^T (W S W = X) and the scaled point
        // V = G^{-1} X G^{-T} = G^T S G = D^{1/2}, diagonal.
        std::vector<Eigen::LLT<MatrixXd>> lltX(nb), lltS(nb);
        std::vector<MatrixXd> G(nb), Ginv(nb), W(nb);
        std::vector<VectorXd> v(nb);
        bool scale_ok = true;
        for (std::size_t b = 0; b < nb; ++b) {
            lltX[b].compute(X[b]);
            lltS[b].compute(S[b]);
            if (lltX[b].info() != Eigen::Success || lltS[b].info() != Eigen::Success) {
                scale_ok = false;
                break;
            }
            MatrixXd L = lltX[b].matrixL();
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(L.transpose() * S[b] * L));
            if (es.info() != Eigen::Success || es.eigenvalues()(0) <= 0.0) {
                scale_ok = false;
                break;
            }
            VectorXd lam = es.eigenvalues();
            VectorXd lq = lam.array().pow(0.25).matrix();
            G[b] = L * es.eigenvectors() * lq.cwiseInverse().asDiagonal();
            MatrixXd Linv = MatrixXd(L).triangularView<Eigen::Lower>().solve(
                MatrixXd::Identity(in.side[b], in.side[b]));
            Ginv[b] = lq.asDiagonal() * es.eigenvectors().transpose() * Linv;
            W[b] = sym(G[b] * G[b].transpose());
            v[b] = lam.array().sqrt().matrix();
        }
        if (!scale_ok) break;

        // Dense normal equations M dy = r with M[j,k] = sum_b Tr(A_j W A_k W).
        std::vector<std::vector<MatrixXd>> T(static_cast<std::size_t>(p));
        for (int k = 0; k < p; ++k) {
            T[static_cast<std::size_t>(k)].resize(nb);
            for (int b : in.active[static_cast<std::size_t>(k)])
                T[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)] =
                    sym(W[static_cast<std::size_t>(b)] *
                        in.A[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)] *
                        W[static_cast<std::size_t>(b)]);
        }
        MatrixXd M = MatrixXd::Zero(p, p);
        for (int j = 0; j < p; ++j)
            for (int k = j; k < p; ++k) {
                double s = 0.0;
                for (int b : in.active[static_cast<std::size_t>(j)]) {
                    const MatrixXd& akb = in.A[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)];
                    if (akb.size() && akb.norm() > 0.0)
                        s += T[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)]
                                 .cwiseProduct(akb)
                                 .sum();
                }
                M(j, k) = M(k, j) = s;
            }
        Eigen::LDLT<MatrixXd> ldlt;
        double ridge = 0.0;
        for (int attempt = 0; attempt < 6; ++attempt) {
            MatrixXd Mr = M;
            if (ridge > 0.0) Mr.diagonal().array() += ridge;
            ldlt.compute(Mr);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive()) break;
            ridge = ridge == 0.0 ? 1e-14 * (1.0 + M.trace() / std::max(1, p)) : ridge * 100.0;
        }
        if (p > 0 && ldlt.info() != Eigen::Success) break;

        // A_j(W Rd_b W) terms shared by predictor and corrector.
        VectorXd q = VectorXd::Zero(p);
        std::vector<MatrixXd> WRdW(nb);
        for (std::size_t b = 0; b < nb; ++b) WRdW[b] = sym(W[b] * st.Rd[b] * W[b]);
        for (int j = 0; j < p; ++j)
            for (int b : in.active[static_cast<std::size_t>(j)])
                q(j) += in.A[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)]
                            .cwiseProduct(WRdW[static_cast<std::size_t>(b)])
                            .sum();

        auto solve_direction = [&](const std::vector<MatrixXd>& tgt, VectorXd& dy,
                                   std::vector<MatrixXd>& dX, std::vector<MatrixXd>& dS) {
            VectorXd r = st.rp + q;
            for (int j = 0; j < p; ++j)
                for (int b : in.active[static_cast<std::size_t>(j)])
                    r(j) -= in.A[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)]
                                .cwiseProduct(tgt[static_cast<std::size_t>(b)])
                                .sum();
            dy = p > 0 ? VectorXd(ldlt.solve(r)) : VectorXd();
            dS.resize(nb);
            dX.resize(nb);
            for (std::size_t b = 0; b < nb; ++b) {
                MatrixXd ds = st.Rd[b];
                for (int k = 0; k < p; ++k) ds -= dy(k) * in.A[static_cast<std::size_t>(k)][b];
                dS[b] = sym(ds);
                dX[b] = sym(tgt[b] - W[b] * dS[b] * W[b]);
            }
        };

        // Predictor: affine direction (sigma = 0 target of -X in the W frame).
        std::vector<MatrixXd> tgt(nb);
        for (std::size_t b = 0; b < nb; ++b) tgt[b] = -X[b];
        VectorXd dy;
        std::vector<MatrixXd> dX, dS;
        solve_direction(tgt, dy, dX, dS);

        double ap = 1.0, ad = 1.0;
        for (std::size_t b = 0; b < nb; ++b) {
            ap = std::min(ap, step_to_boundary(lltX[b], dX[b], 1.0));
            ad = std::min(ad, step_to_boundary(lltS[b], dS[b], 1.0));
        }
        double xs_aff = 0.0;
        for (std::size_t b = 0; b < nb; ++b)
            xs_aff += (X[b] + ap * dX[b]).cwiseProduct(S[b] + ad * dS[b]).sum();
        double mu_aff = std::max(0.0, xs_aff / N);
        double sigma = std::clamp(std::pow(mu_aff / st.mu, 3.0), 1e-10, 1.0);

        // Mehrotra corrector in the diagonal V frame.
        for (std::size_t b = 0; b < nb; ++b) {
            MatrixXd Dx = Ginv[b] * dX[b] * Ginv[b].transpose();
            MatrixXd Ds = G[b].transpose() * dS[b] * G[b];
            MatrixXd Nc = 0.5 * (Dx * Ds + Ds * Dx);
            const VectorXd& vb = v[b];
            MatrixXd Rc(in.side[b], in.side[b]);
            for (int i = 0; i < in.side[b]; ++i)
                for (int j = 0; j < in.side[b]; ++j)
                    Rc(i, j) = -2.0 * Nc(i, j) / (vb(i) + vb(j));
            for (int i = 0; i < in.side[b]; ++i) Rc(i, i) += sigma * st.mu / vb(i) - vb(i);
            tgt[b] = sym(G[b] * Rc * G[b].transpose());
        }
        solve_direction(tgt, dy, dX, dS);

        ap = options.step_frac;
        ad = options.step_frac;
        for (std::size_t b = 0; b < nb; ++b) {
            ap = std::min(ap, options.step_frac * step_to_boundary(lltX[b], dX[b], 1.0 / options.step_frac));
            ad = std::min(ad, options.step_frac * step_to_boundary(lltS[b], dS[b], 1.0 / options.step_frac));
        }
        ap = std::min(ap, 1.0);
        ad = std::min(ad, 1.0);
        if (ap < 1e-10 && ad < 1e-10) {
            if (++tiny_steps >= 3) break;
        } else {
            tiny_steps = 0;
        }

        for (std::size_t b = 0; b < nb; ++b) {
            X[b] = sym(X[b] + ap * dX[b]);
            S[b] = sym(S[b] + ad * dS[b]);
        }
        if (p > 0) y += ad * dy;
        ++iters;
    }

    if (!converged && best.merit < std::numeric_limits<double>::infinity()) {
        X = best.X;
        S = best.S;
        y = best.y;
    }
    Stats st = compute_stats(in, X, S, y, N);

    // Map back to the external maximize convention: values negate, the dual
    // multipliers flip sign, and the dual slack is unchanged.
    sol.iterations = iters;
    sol.primal.resize(nb);
    sol.dual_slack.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        sol.primal[b] = recover(X[b]);
        // The 1/2 on embedded data sits on the constraint side, so the
        // external slack is twice the recovered internal one.
        sol.dual_slack[b] = recover(2.0 * S[b]);
    }
    sol.dual = -y;
    sol.primal_objective = -st.pobj;
    sol.dual_objective = -st.dobj;
    sol.duality_gap = sol.dual_objective - sol.primal_objective;
    sol.primal_residual = st.prim_res;
    sol.dual_residual = st.dual_res;

    bool good = st.prim_res <= 1e-8 && st.dual_res <= 1e-8 && st.relgap <= 1e-7;
    if (converged || good) {
        sol.status = SdpStatus::optimal;
        return sol;
    }

    // Farkas-type certificate of primal infeasibility: y with A*(y) <= 0 and
    // rhs . y > 0 (checked on normalized candidates). The iterates need not
    // diverge along a certificate direction, so besides the final dual point
    // two candidates are read off the constraint Gram matrix: the component
    // of rhs in its null space (inconsistent equalities) and the constrained
    // least-squares direction in its range (sign-infeasible combinations).
    if (p > 0) {
        auto certifies = [&](const VectorXd& cand) -> bool {
            if (cand.norm() <= 0.0) return false;
            VectorXd yh = cand / cand.norm();
            if (in.rhs.dot(yh) <= 1e-8) return false;
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < nb; ++b) {
                MatrixXd ay = MatrixXd::Zero(in.side[b], in.side[b]);
                for (int k = 0; k < p; ++k) ay += yh(k) * in.A[static_cast<std::size_t>(k)][b];
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(ay), Eigen::EigenvaluesOnly);
                top = std::max(top, es.eigenvalues()(in.side[b] - 1));
            }
            if (top > 1e-8) return false;
            sol.status = SdpStatus::infeasible;
            sol.farkas_certificate = yh; // sign convention is shared by both forms
            return true;
        };

        if (certifies(y)) return sol;

        MatrixXd gram = MatrixXd::Zero(p, p);
        for (int k = 0; k < p; ++k)
            for (int l = k; l < p; ++l) {
                double s = 0.0;
                for (std::size_t b = 0; b < nb; ++b)
                    s += in.A[static_cast<std::size_t>(k)][b]
                             .cwiseProduct(in.A[static_cast<std::size_t>(l)][b])
                             .sum();
                gram(k, l) = s;
                gram(l, k) = s;
            }
        Eigen::SelfAdjointEigenSolver<MatrixXd> ges(gram);
        double gtop = std::max(1.0, ges.eigenvalues().maxCoeff());
        VectorXd null_part = VectorXd::Zero(p);
        VectorXd range_part = VectorXd::Zero(p);
        for (int k = 0; k < p; ++k) {
            const VectorXd v = ges.eigenvectors().col(k);
            double coeff = v.dot(in.rhs);
            if (ges.eigenvalues()(k) <= 1e-12 * gtop)
                null_part += coeff * v;
            else
                range_part += (coeff / ges.eigenvalues()(k)) * v;
        }
        if (certifies(null_part)) return sol;
        if (certifies(range_part)) return sol;
    }

    // Improving-ray certificate of unboundedness: Z >= 0 with A(Z) ~ 0 and a
    // positive external objective along Z.
    if (!ray_candidate.empty()) {
        const std::vector<MatrixXd>& Z = ray_candidate;
        double obj = 0.0, zmin = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            obj += in.C[b].cwiseProduct(Z[b]).sum();
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(Z[b]), Eigen::EigenvaluesOnly);
            zmin = std::min(zmin, es.eigenvalues()(0));
        }
        double an = 0.0;
        for (int k = 0; k < p; ++k) {
            double s = 0.0;
            for (int b : in.active[static_cast<std::size_t>(k)])
                s += in.A[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)]
                         .cwiseProduct(Z[static_cast<std::size_t>(b)])
                         .sum();
            an = std::max(an, std::abs(s));
        }
        if (obj < -1e-8 && an <= 1e-6 && zmin >= -1e-10) {
            sol.status = SdpStatus::unbounded;
            std::vector<MatrixXcd> ray(nb);
            for (std::size_t b = 0; b < nb; ++b) ray[b] = recover(Z[b]);
            sol.unbounded_ray = std::move(ray);
            return sol;
        }
    }

    sol.status = SdpStatus::stalled;
    return sol;
}

std::vector<MatrixXcd> hermitian_basis(int D) {
    std::vector<MatrixXcd> basis;
    basis.reserve(static_cast<std::size_t>(D) * static_cast<std::size_t>(D));
    for (int i = 0; i < D; ++i) {
        MatrixXcd e = MatrixXcd::Zero(D, D);
        e(i, i) = 1.0;
        basis.push_back(std::move(e));
    }
    for (int i = 0; i < D; ++i)
        for (int j = i + 1; j < D; ++j) {
            MatrixXcd ex = MatrixXcd::Zero(D, D);
            ex(i, j) = 1.0;
            ex(j, i) = 1.0;
            basis.push_back(std::move(ex));
            MatrixXcd ey = MatrixXcd::Zero(D, D);
            ey(i, j) = complexd(0.0, 1.0);
            ey(j, i) = complexd(0.0, -1.0);
            basis.push_back(std::move(ey));
        }
    return basis;
}

void add_ppt_tie(SdpProblem& problem, int block_a, int block_b, const DimVector& dims,
                 const std::vector<int>& cut) {
    const int D = dims.total();
    const std::size_t nb = problem.block_dims.size();
    if (block_a < 0 || block_b < 0 || block_a >= static_cast<int>(nb) || block_b >= static_cast<int>(nb))
        throw std::invalid_argument("add_ppt_tie: block index out of range");
    if (problem.block_dims[static_cast<std::size_t>(block_a)] != D ||
        problem.block_dims[static_cast<std::size_t>(block_b)] != D)
        throw std::invalid_argument("add_ppt_tie: block dimensions do not match dims");
    for (const MatrixXcd& e : hermitian_basis(D)) {
        SdpProblem::Constraint c;
        c.coeff.assign(nb, MatrixXcd());
        for (std::size_t b = 0; b < nb; ++b)
            c.coeff[b] = MatrixXcd::Zero(problem.block_dims[b], problem.block_dims[b]);
        HermitianOperator he(dims, e);
        c.coeff[static_cast<std::size_t>(block_a)] = partial_transpose(he, cut).matrix();
        c.coeff[static_cast<std::size_t>(block_b)] -= e;
        c.rhs = 0.0;
        problem.constraints.push_back(std::move(c));
    }
}

std::optional<std::pair<HermitianOperator, HermitianOperator>>
feasibility_decompose(const HermitianOperator& x, const std::vector<int>& cut,
                      const SdpOptions& options) {
    const int D = x.dim();

    // Already PSD: (X, 0) decomposes it with no solve.
    {
        Spectrum s = eig_hermitian(x);
        double scale = std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
        if (s.eigenvalues(0) >= -1e-12 * scale) {
            VectorXd lam = s.eigenvalues.cwiseMax(0.0);
            HermitianOperator pc(x.dims(),
                                 s.eigenvectors * lam.asDiagonal() * s.eigenvectors.adjoint());
            return std::make_pair(pc, HermitianOperator::zero(x.dims()));
        }
    }

    // Blocks: Q, S, t with X + t I = Gamma(Q) + S; minimize t. The operator is
    // decomposable exactly when the minimized infeasibility t* vanishes.
    SdpProblem p;
    p.block_dims = {D, D, 1};
    p.objective.resize(3);
    p.objective[0] = MatrixXcd::Zero(D, D);
    p.objective[1] = MatrixXcd::Zero(D, D);
    p.objective[2] = -MatrixXcd::Identity(1, 1);
    for (const MatrixXcd& e : hermitian_basis(D)) {
        SdpProblem::Constraint c;
        c.coeff.resize(3);
        HermitianOperator he(x.dims(), e);
        c.coeff[0] = partial_transpose(he, cut).matrix();
        c.coeff[1] = e;
        c.coeff[2] = -e.trace() * MatrixXcd::Identity(1, 1);
        c.rhs = (e * x.matrix()).trace().real();
        p.constraints.push_back(std::move(c));
    }

    SdpOptions opt = options;
    opt.feas_tol = std::min(options.feas_tol, 1e-10);
    opt.gap_tol = std::min(options.gap_tol, 1e-10);
    SdpSolution sol = solve(p, opt);
    double t = sol.primal[2](0, 0).real();
    if (sol.status != SdpStatus::optimal || t > 1e-8) return std::nullopt;

    HermitianOperator q(x.dims(), sol.primal[0]);
    // P = X - Gamma(Q), clamped to the PSD cone to absorb the residual t.
    HermitianOperator praw = x - partial_transpose(q, cut);
    Spectrum s = eig_hermitian(praw);
    VectorXd lam = s.eigenvalues.cwiseMax(0.0);
    HermitianOperator pclamped(x.dims(),
                               s.eigenvectors * lam.asDiagonal() * s.eigenvectors.adjoint());
    return std::make_pair(pclamped, q);
}

} // namespace mcdlab
