#include "mcdlab/dims.hpp"

#include <algorithm>

namespace mcdlab {

std::pair<int, int> DimVector::split_dims(const std::vector<int>& subset) const {
    if (subset.empty() || static_cast<int>(subset.size()) >= factors())
        throw std::invalid_argument("split_dims: subset must be a nonempty strict subset");
    std::vector<char> in(dims_.size(), 0);
    for (int k : subset) {
        if (k < 0 || k >= factors()) throw std::out_of_range("split_dims: subsystem index");
        if (in[static_cast<std::size_t>(k)]) throw std::invalid_argument("split_dims: duplicate index");
        in[static_cast<std::size_t>(k)] = 1;
    }
    int dg = 1, dr = 1;
    for (std::size_t k = 0; k < dims_.size(); ++k) (in[k] ? dg : dr) *= dims_[k];
    return {dg, dr};
}

} // namespace mcdlab
