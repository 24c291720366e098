#pragma once

#include "fomas/mat_core.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fomas {

/// Maps structured matrix variables (symmetric, skew-symmetric, scalar, or
/// mask-patterned) onto a flat decision vector, providing the basis matrices
/// that make an LMI affine in that vector.
class VarLayout {
  public:
    enum class Kind { symmetric, skew, scalar, masked };

    struct Group {
        std::string name;
        Kind kind;
        int dim = 0;    // matrix dimension (rows for masked)
        int cols = 0;   // columns for masked groups
        Mat mask;       // masked groups only
        int offset = 0; // first flat index
        int count = 0;  // number of flat variables
    };

    int add_symmetric(const std::string& name, int dim);
    int add_skew(const std::string& name, int dim);
    int add_scalar(const std::string& name);
    int add_masked(const std::string& name, const Mat& mask);

    int n_vars() const { return n_vars_; }
    const Group& group(int id) const { return groups_.at(static_cast<std::size_t>(id)); }
    std::vector<std::string> labels() const;

    /// Calls fn(flat_index, basis) for every variable of the group, where the
    /// group's matrix value is sum_k theta_k basis_k.
    void for_each_basis(int id, const std::function<void(int, const Mat&)>& fn) const;

    /// Reconstructs the group's matrix value from the flat vector.
    Mat unpack(int id, const Vec& theta) const;
    double unpack_scalar(int id, const Vec& theta) const;

    /// Writes a matrix value into the flat vector (projecting onto the
    /// group's structure).
    void pack(int id, const Mat& value, Vec& theta) const;
    void pack_scalar(int id, double value, Vec& theta) const;

  private:
    std::vector<Group> groups_;
    int n_vars_ = 0;
};

}  // namespace fomas
