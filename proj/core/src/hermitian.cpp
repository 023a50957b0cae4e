#include "mcdlab/hermitian.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <stdexcept>

namespace mcdlab {

HermitianOperator::HermitianOperator(DimVector dims, const MatrixXcd& raw, double* asymmetry)
    : dims_(std::move(dims)) {
    if (raw.rows() != raw.cols()) throw std::invalid_argument("HermitianOperator: matrix not square");
    if (raw.rows() != dims_.total())
        throw std::invalid_argument("HermitianOperator: matrix size does not match dims");
    mat_ = 0.5 * (raw + raw.adjoint());
    if (asymmetry) *asymmetry = (raw - raw.adjoint()).norm() * 0.5;
}

HermitianOperator HermitianOperator::identity(const DimVector& dims) {
    return HermitianOperator(dims, MatrixXcd::Identity(dims.total(), dims.total()));
}

HermitianOperator HermitianOperator::zero(const DimVector& dims) {
    return HermitianOperator(dims, MatrixXcd::Zero(dims.total(), dims.total()));
}

HermitianOperator HermitianOperator::projector(const DimVector& dims, const VectorXcd& v) {
    if (v.size() != dims.total()) throw std::invalid_argument("projector: vector size mismatch");
    double n2 = v.squaredNorm();
    if (n2 <= 0.0) throw std::invalid_argument("projector: zero vector");
    return HermitianOperator(dims, (v * v.adjoint()) / n2);
}

Spectrum eig_hermitian(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.matrix());
    if (es.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: eigensolver failed");
    return Spectrum{es.eigenvalues(), es.eigenvectors()};
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    std::vector<int> dims = a.dims().as_vector();
    const std::vector<int>& db = b.dims().as_vector();
    dims.insert(dims.end(), db.begin(), db.end());
    MatrixXcd m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
    return HermitianOperator(DimVector(dims), m);
}

namespace {

void check_subset(const DimVector& dims, const std::vector<int>& subsystems) {
    std::vector<char> seen(static_cast<std::size_t>(dims.factors()), 0);
    for (int k : subsystems) {
        if (k < 0 || k >= dims.factors()) throw std::out_of_range("subsystem index out of range");
        if (seen[static_cast<std::size_t>(k)]) throw std::invalid_argument("duplicate subsystem index");
        seen[static_cast<std::size_t>(k)] = 1;
    }
}

} // namespace

HermitianOperator partial_transpose(const HermitianOperator& h, const std::vector<int>& subsystems) {
    const DimVector& dims = h.dims();
    check_subset(dims, subsystems);
    std::vector<char> flip(static_cast<std::size_t>(dims.factors()), 0);
    for (int k : subsystems) flip[static_cast<std::size_t>(k)] = 1;

    int D = dims.total();
    MatrixXcd out(D, D);
    for (int r = 0; r < D; ++r) {
        std::vector<int> ri = dims.decode(r);
        for (int c = 0; c < D; ++c) {
            std::vector<int> ci = dims.decode(c);
            std::vector<int> rr = ri, cc = ci;
            for (int k = 0; k < dims.factors(); ++k)
                if (flip[static_cast<std::size_t>(k)]) std::swap(rr[static_cast<std::size_t>(k)], cc[static_cast<std::size_t>(k)]);
            out(dims.encode(rr), dims.encode(cc)) = h.matrix()(r, c);
        }
    }
    return HermitianOperator(dims, out);
}

HermitianOperator partial_trace(const HermitianOperator& h, const std::vector<int>& subsystems) {
    const DimVector& dims = h.dims();
    check_subset(dims, subsystems);
    std::vector<char> drop(static_cast<std::size_t>(dims.factors()), 0);
    for (int k : subsystems) drop[static_cast<std::size_t>(k)] = 1;

    std::vector<int> kept;
    for (int k = 0; k < dims.factors(); ++k)
        if (!drop[static_cast<std::size_t>(k)]) kept.push_back(dims.dim(k));
    bool all_traced = kept.empty();
    if (all_traced) kept.push_back(1);
    DimVector odims(kept);

    int D = dims.total(), Do = odims.total();
    MatrixXcd out = MatrixXcd::Zero(Do, Do);
    for (int r = 0; r < D; ++r) {
        std::vector<int> ri = dims.decode(r);
        for (int c = 0; c < D; ++c) {
            std::vector<int> ci = dims.decode(c);
            bool diag = true;
            for (int k = 0; k < dims.factors() && diag; ++k)
                if (drop[static_cast<std::size_t>(k)] && ri[static_cast<std::size_t>(k)] != ci[static_cast<std::size_t>(k)]) diag = false;
            if (!diag) continue;
            std::vector<int> ro, co;
            for (int k = 0; k < dims.factors(); ++k) {
                if (drop[static_cast<std::size_t>(k)]) continue;
                ro.push_back(ri[static_cast<std::size_t>(k)]);
                co.push_back(ci[static_cast<std::size_t>(k)]);
            }
            int orow = all_traced ? 0 : odims.encode(ro);
            int ocol = all_traced ? 0 : odims.encode(co);
            out(orow, ocol) += h.matrix()(r, c);
        }
    }
    return HermitianOperator(odims, out);
}

HermitianOperator psd_sqrt(const HermitianOperator& h, double tol) {
    Spectrum s = eig_hermitian(h);
    double scale = std::max(std::abs(s.eigenvalues(0)), std::abs(s.eigenvalues(s.eigenvalues.size() - 1)));
    VectorXd lam = s.eigenvalues;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < -tol * scale)
            throw std::domain_error("psd_sqrt: operator has a negative eigenvalue beyond tolerance");
        lam(i) = lam(i) > 0.0 ? std::sqrt(lam(i)) : 0.0;
    }
    MatrixXcd m = s.eigenvectors * lam.asDiagonal() * s.eigenvectors.adjoint();
    return HermitianOperator(h.dims(), m);
}

HermitianOperator pinv_on_support(const HermitianOperator& h, double rank_tol) {
    Spectrum s = eig_hermitian(h);
    double scale = 0.0;
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) scale = std::max(scale, std::abs(s.eigenvalues(i)));
    VectorXd lam = VectorXd::Zero(s.eigenvalues.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        if (std::abs(s.eigenvalues(i)) > rank_tol * scale) lam(i) = 1.0 / s.eigenvalues(i);
    MatrixXcd m = s.eigenvectors * lam.asDiagonal() * s.eigenvectors.adjoint();
    return HermitianOperator(h.dims(), m);
}

double trace_norm(const HermitianOperator& h) {
    Spectrum s = eig_hermitian(h);
    return s.eigenvalues.cwiseAbs().sum();
}

HermitianOperator psd_clamp(const HermitianOperator& h) {
    Spectrum s = eig_hermitian(h);
    VectorXd lam = s.eigenvalues.cwiseMax(0.0);
    return HermitianOperator(h.dims(),
                             s.eigenvectors * lam.asDiagonal() * s.eigenvectors.adjoint());
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dims() != b.dims()) throw std::invalid_argument("operator+: dims mismatch");
    return HermitianOperator(a.dims(), a.matrix() + b.matrix());
}

HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dims() != b.dims()) throw std::invalid_argument("operator-: dims mismatch");
    return HermitianOperator(a.dims(), a.matrix() - b.matrix());
}

HermitianOperator operator*(double s, const HermitianOperator& a) {
    return HermitianOperator(a.dims(), s * a.matrix());
}

double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dims() != b.dims()) throw std::invalid_argument("hs_inner: dims mismatch");
    return (a.matrix() * b.matrix()).trace().real();
}

double expectation(const HermitianOperator& h, const VectorXcd& v) {
    if (v.size() != h.dim()) throw std::invalid_argument("expectation: vector size mismatch");
    return (v.adjoint() * h.matrix() * v)(0, 0).real();
}

HermitianOperator regroup_bipartite(const HermitianOperator& h, const std::vector<int>& group) {
    const DimVector& dims = h.dims();
    check_subset(dims, group);
    auto [dg, dr] = dims.split_dims(group);
    std::vector<char> in(static_cast<std::size_t>(dims.factors()), 0);
    for (int k : group) in[static_cast<std::size_t>(k)] = 1;
    std::vector<int> order = group;
    for (int k = 0; k < dims.factors(); ++k)
        if (!in[static_cast<std::size_t>(k)]) order.push_back(k);

    DimVector odims({dg, dr});
    int D = dims.total();
    // Permutation of joint indices induced by reading subsystems in `order`.
    std::vector<int> perm(static_cast<std::size_t>(D));
    for (int j = 0; j < D; ++j) {
        std::vector<int> idx = dims.decode(j);
        int enc = 0;
        for (int k : order) enc = enc * dims.dim(k) + idx[static_cast<std::size_t>(k)];
        perm[static_cast<std::size_t>(j)] = enc;
    }
    MatrixXcd out(D, D);
    for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c)
            out(perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(c)]) = h.matrix()(r, c);
    return HermitianOperator(odims, out);
}

std::vector<std::vector<int>> bipartition_cuts(int m) {
    if (m < 2) throw std::invalid_argument("bipartition_cuts: need at least two subsystems");
    std::vector<std::vector<int>> cuts;
    // Subsets of {1, ..., m-1}, nonempty.
    for (unsigned mask = 1; mask < (1u << (m - 1)); ++mask) {
        std::vector<int> cut;
        for (int k = 1; k < m; ++k)
            if (mask & (1u << (k - 1))) cut.push_back(k);
        cuts.push_back(std::move(cut));
    }
    return cuts;
}

} // namespace mcdlab
