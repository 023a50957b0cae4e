#ifndef MCDLAB_DIMS_HPP
#define MCDLAB_DIMS_HPP

#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace mcdlab {

// Ordered local dimensions (d_1, ..., d_m) of a tensor-product space.
// Subsystems are indexed 0-based; the row index of a matrix on the joint
// space decodes with subsystem 0 most significant.
class DimVector {
public:
    explicit DimVector(std::vector<int> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) throw std::invalid_argument("DimVector: no subsystems");
        total_ = 1;
        for (int d : dims_) {
            if (d < 1) throw std::invalid_argument("DimVector: dimension < 1");
            total_ *= d;
        }
    }
    DimVector(std::initializer_list<int> dims) : DimVector(std::vector<int>(dims)) {}

    int factors() const { return static_cast<int>(dims_.size()); }
    int dim(int k) const { return dims_.at(static_cast<std::size_t>(k)); }
    int total() const { return total_; }
    const std::vector<int>& as_vector() const { return dims_; }
    bool bipartite() const { return dims_.size() == 2; }

    bool operator==(const DimVector& o) const { return dims_ == o.dims_; }
    bool operator!=(const DimVector& o) const { return !(*this == o); }

    // Decode a joint index into per-subsystem indices (subsystem 0 most significant).
    std::vector<int> decode(int joint) const {
        std::vector<int> idx(dims_.size());
        for (int k = factors() - 1; k >= 0; --k) {
            idx[static_cast<std::size_t>(k)] = joint % dims_[static_cast<std::size_t>(k)];
            joint /= dims_[static_cast<std::size_t>(k)];
        }
        return idx;
    }
    int encode(const std::vector<int>& idx) const {
        int joint = 0;
        for (std::size_t k = 0; k < dims_.size(); ++k) joint = joint * dims_[k] + idx[k];
        return joint;
    }

    // Group the listed subsystems (0-based, nonempty strict subset) against the rest,
    // producing the bipartite dims (d_group, d_rest). Index order is preserved inside
    // each side only if the subset is a prefix or suffix; callers that need a regrouped
    // operator use regroup_bipartite() from hermitian.hpp.
    std::pair<int, int> split_dims(const std::vector<int>& subset) const;

private:
    std::vector<int> dims_;
    int total_ = 1;
};

} // namespace mcdlab

#endif
