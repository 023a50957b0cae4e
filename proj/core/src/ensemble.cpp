#include "mcdlab/ensemble.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace mcdlab {

using nlohmann::json;

const char* to_string(EnsembleErrorCode c) {
    switch (c) {
        case EnsembleErrorCode::malformed_json: return "malformed_json";
        case EnsembleErrorCode::bad_schema: return "bad_schema";
        case EnsembleErrorCode::dimension_mismatch: return "dimension_mismatch";
        case EnsembleErrorCode::prior_sum: return "prior_sum";
        case EnsembleErrorCode::nonpositive_prior: return "nonpositive_prior";
        case EnsembleErrorCode::non_psd_state: return "non_psd_state";
        case EnsembleErrorCode::non_unit_trace: return "non_unit_trace";
    }
    return "unknown";
}

Ensemble::Ensemble(DimVector dims, std::vector<EnsembleItem> items)
    : dims_(std::move(dims)), items_(std::move(items)) {
    if (items_.empty())
        throw EnsembleError(EnsembleErrorCode::bad_schema, "ensemble has no states");
    double sum = 0.0;
    for (std::size_t i = 0; i < items_.size(); ++i) {
        const EnsembleItem& it = items_[i];
        if (it.state.dims() != dims_)
            throw EnsembleError(EnsembleErrorCode::dimension_mismatch,
                                "state " + std::to_string(i) + " dims differ from ensemble dims");
        if (!(it.prior > 0.0))
            throw EnsembleError(EnsembleErrorCode::nonpositive_prior,
                                "prior " + std::to_string(i) + " is not positive");
        sum += it.prior;
        if (std::abs(it.state.trace() - 1.0) > 1e-10)
            throw EnsembleError(EnsembleErrorCode::non_unit_trace,
                                "state " + std::to_string(i) + " trace differs from 1 beyond 1e-10");
        Spectrum s = eig_hermitian(it.state);
        if (s.eigenvalues(0) < -1e-10)
            throw EnsembleError(EnsembleErrorCode::non_psd_state,
                                "state " + std::to_string(i) + " has eigenvalue " +
                                    std::to_string(s.eigenvalues(0)));
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw EnsembleError(EnsembleErrorCode::prior_sum, "priors sum to " + std::to_string(sum));
}

AverageState average_state(const Ensemble& e, double rank_tol) {
    MatrixXcd m = MatrixXcd::Zero(e.dims().total(), e.dims().total());
    for (const EnsembleItem& it : e.items()) m += it.prior * it.state.matrix();
    HermitianOperator rho0(e.dims(), m);
    Spectrum s = eig_hermitian(rho0);
    double top = s.eigenvalues.cwiseAbs().maxCoeff();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
        if (std::abs(s.eigenvalues(i)) > rank_tol * top) ++rank;
    return AverageState{rho0, rank};
}

namespace {

json matrix_to_json(const MatrixXcd& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json rrow = json::array(), irow = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rrow.push_back(m(r, c).real());
            irow.push_back(m(r, c).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

MatrixXcd matrix_from_json(const json& j, int D) {
    if (!j.contains("re") || !j["re"].is_array())
        throw EnsembleError(EnsembleErrorCode::bad_schema, "missing \"re\" matrix");
    bool has_im = j.contains("im");
    const json& re = j["re"];
    if (static_cast<int>(re.size()) != D)
        throw EnsembleError(EnsembleErrorCode::dimension_mismatch, "matrix row count differs from dims product");
    MatrixXcd m(D, D);
    for (int r = 0; r < D; ++r) {
        const json& rrow = re.at(static_cast<std::size_t>(r));
        if (!rrow.is_array() || static_cast<int>(rrow.size()) != D)
            throw EnsembleError(EnsembleErrorCode::dimension_mismatch, "matrix is not square with dims product");
        const json* irow = nullptr;
        if (has_im) {
            const json& im = j["im"];
            if (static_cast<int>(im.size()) != D)
                throw EnsembleError(EnsembleErrorCode::dimension_mismatch, "\"im\" shape differs from \"re\"");
            irow = &im.at(static_cast<std::size_t>(r));
            if (!irow->is_array() || static_cast<int>(irow->size()) != D)
                throw EnsembleError(EnsembleErrorCode::dimension_mismatch, "\"im\" shape differs from \"re\"");
        }
        for (int c = 0; c < D; ++c) {
            const json& rv = rrow.at(static_cast<std::size_t>(c));
            if (!rv.is_number())
                throw EnsembleError(EnsembleErrorCode::bad_schema, "matrix entry is not a number");
            double imv = 0.0;
            if (irow) {
                const json& iv = irow->at(static_cast<std::size_t>(c));
                if (!iv.is_number())
                    throw EnsembleError(EnsembleErrorCode::bad_schema, "matrix entry is not a number");
                imv = iv.get<double>();
            }
            m(r, c) = complexd(rv.get<double>(), imv);
        }
    }
    return m;
}

DimVector dims_from_json(const json& j) {
    if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].empty())
        throw EnsembleError(EnsembleErrorCode::bad_schema, "missing \"dims\" array");
    std::vector<int> dims;
    for (const json& d : j["dims"]) {
        if (!d.is_number_integer() || d.get<int>() < 1)
            throw EnsembleError(EnsembleErrorCode::bad_schema, "\"dims\" entries must be positive integers");
        dims.push_back(d.get<int>());
    }
    return DimVector(dims);
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw EnsembleError(EnsembleErrorCode::malformed_json, "cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw EnsembleError(EnsembleErrorCode::malformed_json, "JSON parse failure in " + path);
    return j;
}

HermitianOperator hermitize(const DimVector& dims, const MatrixXcd& raw, const std::string& label,
                            std::vector<std::string>* warnings) {
    double asym = 0.0;
    HermitianOperator h(dims, raw, &asym);
    double scale = std::max(1.0, h.frobenius_norm());
    if (asym > 1e-12 * scale && warnings)
        warnings->push_back(label + ": symmetrized non-Hermitian input (asymmetry " +
                            std::to_string(asym) + ")");
    return h;
}

} // namespace

Ensemble load_ensemble(const std::string& path, std::vector<std::string>* warnings) {
    json j = parse_file(path);
    DimVector dims = dims_from_json(j);
    if (!j.contains("items") || !j["items"].is_array() || j["items"].empty())
        throw EnsembleError(EnsembleErrorCode::bad_schema, "missing \"items\" array");
    std::vector<EnsembleItem> items;
    int idx = 0;
    for (const json& it : j["items"]) {
        if (!it.contains("prior") || !it["prior"].is_number())
            throw EnsembleError(EnsembleErrorCode::bad_schema, "item missing numeric \"prior\"");
        MatrixXcd m = matrix_from_json(it, dims.total());
        items.push_back(EnsembleItem{it["prior"].get<double>(),
                                     hermitize(dims, m, "state " + std::to_string(idx), warnings)});
        ++idx;
    }
    return Ensemble(dims, std::move(items));
}

namespace {

json ensemble_to_json(const Ensemble& e) {
    json j;
    j["dims"] = e.dims().as_vector();
    json items = json::array();
    for (const EnsembleItem& it : e.items()) {
        json ji = matrix_to_json(it.state.matrix());
        ji["prior"] = it.prior;
        items.push_back(std::move(ji));
    }
    j["items"] = std::move(items);
    return j;
}

} // namespace

void save_ensemble(const Ensemble& e, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_ensemble: cannot open " + path);
    out << ensemble_to_json(e).dump(2) << "\n";
}

std::string canonical_json(const Ensemble& e) {
    return ensemble_to_json(e).dump();
}

HermitianOperator load_operator(const std::string& path, std::vector<std::string>* warnings) {
    json j = parse_file(path);
    DimVector dims = dims_from_json(j);
    MatrixXcd m = matrix_from_json(j, dims.total());
    return hermitize(dims, m, path, warnings);
}

void save_operator(const HermitianOperator& h, const std::string& path) {
    json j = matrix_to_json(h.matrix());
    j["dims"] = h.dims().as_vector();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_operator: cannot open " + path);
    out << j.dump(2) << "\n";
}

Ensemble example_qubit_qutrit() {
    DimVector dims{2, 3};
    // Basis order |00>,|01>,|02>,|10>,|11>,|12| with the qubit most significant.
    MatrixXcd r1 = MatrixXcd::Zero(6, 6), r2 = MatrixXcd::Zero(6, 6), r3 = MatrixXcd::Zero(6, 6);
    r1(0, 0) = 0.5;
    r1(5, 5) = 0.5;
    r2(2, 2) = 0.5;
    r2(3, 3) = 0.5;
    r3(0, 0) = 0.5;
    r3(0, 5) = 0.5;
    r3(5, 0) = 0.5;
    r3(5, 5) = 0.5;
    double third = 1.0 / 3.0;
    std::vector<EnsembleItem> items{{third, HermitianOperator(dims, r1)},
                                    {third, HermitianOperator(dims, r2)},
                                    {third, HermitianOperator(dims, r3)}};
    // The three stored priors sum to 1 within one ulp.
    items[2].prior = 1.0 - items[0].prior - items[1].prior;
    return Ensemble(dims, std::move(items));
}

Ensemble two_state_subensemble(const Ensemble& e, int j, double r) {
    if (j < 0 || j >= e.size()) throw std::out_of_range("two_state_subensemble: state index");
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("two_state_subensemble: r must lie strictly between 0 and 1");
    AverageState avg = average_state(e);
    std::vector<EnsembleItem> items{{r, avg.rho0}, {1.0 - r, e.state(j)}};
    return Ensemble(e.dims(), std::move(items));
}

} // namespace mcdlab
