#pragma once

#include "fomas/mat_core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fomas {

/// Positive-real parametric uncertainty: each agent's state matrix is
/// perturbed by left_factor * delta_i * right_factor, where
/// delta = Z (I + J Z)^{-1} for some Z with Sym{Z} >= 0 and Sym{J} > 0.
struct UncertaintyModel {
    Mat left_factor;   // n x m0
    Mat right_factor;  // m0 x n
    Mat j_matrix;      // m0 x m0, Sym{J} positive definite

    int m0() const { return static_cast<int>(j_matrix.rows()); }
    int state_dim() const { return static_cast<int>(left_factor.rows()); }
};

/// Per-agent gain matrices delta_i, each m0 x m0.
struct UncertaintyRealization {
    std::vector<Mat> per_agent_delta;
};

/// delta = Z (I + J Z)^{-1}. Preconditions Sym{J} > 0 and Sym{Z} >= 0
/// (within 1e-9) are checked and reported with the offending eigenvalue.
Mat delta_from_z(const Mat& z, const Mat& j);

/// Inverse map Z = delta (I - J delta)^{-1}.
Mat z_from_delta(const Mat& delta, const Mat& j);

/// True iff delta lies in the positive-real class for this J, i.e. the
/// inverse map yields Sym{Z} >= -tol * I.
bool is_representable(const Mat& delta, const Mat& j, double tol = 1e-9);

/// Sym{J} > 0 and consistent dimensions. Diagnostics via `reason` if given.
bool validate_model(const UncertaintyModel& m, std::string* reason = nullptr);

/// The delta of maximal spectral norm; ties resolved to the lowest agent index.
Mat worst_case_delta(const UncertaintyRealization& r);

/// left_factor * delta * right_factor (the n x n state perturbation).
Mat perturbation_matrix(const UncertaintyModel& m, const Mat& delta);

/// Deterministic draws of valid deltas: Z = G G^T with standard normal G,
/// mapped through delta_from_z. Identical seeds give identical samples.
std::vector<Mat> sample_deltas(const UncertaintyModel& m, int count, std::uint64_t seed);

}  // namespace fomas
