#pragma once

#include "fomas/mat_core.hpp"

#include <string>
#include <vector>

namespace fomas {

/// A system of affine symmetric matrix inequalities
///   F_b(theta) = F0_b + sum_k theta_k Fk_b  < 0   for every block b,
/// over a flat decision vector theta of dimension n_vars. Coefficient
/// matrices are symmetrized on ingestion and stored as upper-triangle
/// triplets (the blocks stay dense only in F0).
class AffineLmiSystem {
  public:
    struct Entry {
        int var;
        int row;
        int col;  // row <= col; off-diagonal entries stand for both mirror positions
        double value;
    };

    struct Block {
        int dim = 0;
        Mat f0;
        std::vector<Entry> entries;
    };

    AffineLmiSystem() = default;
    explicit AffineLmiSystem(int n_vars) : n_vars_(n_vars) {}

    int n_vars() const { return n_vars_; }
    void set_n_vars(int n) { n_vars_ = n; }

    std::vector<std::string>& var_labels() { return var_labels_; }
    const std::vector<std::string>& var_labels() const { return var_labels_; }

    const std::vector<Block>& blocks() const { return blocks_; }

    /// Appends a block from dense data; coeffs[k] is the coefficient of theta_k
    /// (missing trailing coefficients are treated as zero).
    void add_block(const Mat& f0, const std::vector<Mat>& coeffs);

    /// Incremental assembly: create an empty block, then accumulate terms.
    int add_empty_block(int dim);
    void block_add_constant(int block, const Mat& m);
    void block_add_coeff(int block, int var, const Mat& m);

    Mat eval_block(int block, const Vec& theta) const;

    /// True when every block has zero constant part (the system is
    /// positively homogeneous in theta).
    bool homogeneous() const;

    /// Rejects NaN/Inf coefficients and out-of-range variable indices.
    void validate() const;

    /// Text dump: one header line per block with its dimensions, then the
    /// constant and coefficient matrices row-major with 17 significant digits.
    void dump(const std::string& path) const;

  private:
    int n_vars_ = 0;
    std::vector<std::string> var_labels_;
    std::vector<Block> blocks_;
};

enum class SolveStatus {
    feasible,
    infeasible_certificate_absent,
    max_iter,
};

struct FeasibilityResult {
    SolveStatus status = SolveStatus::infeasible_certificate_absent;
    Vec point;
    double margin = 0.0;  // max over blocks of lambda_max at `point`
    int iterations = 0;
};

struct SolveOptions {
    double eps_feas = 1e-7;
    int max_iter = 5000;
    /// Optimization pushes the margin toward this value before stopping;
    /// feasibility is still judged against eps_feas.
    double target_margin = -1e-4;
    Vec warm_start;  // empty = start from zero
};

/// Feasibility search: minimize the smoothed maximum eigenvalue over all
/// blocks with L-BFGS, annealing the smoothing parameter. Deterministic for
/// identical inputs. A `feasible` status is always re-verified by an exact
/// eigenvalue evaluation at the returned point.
FeasibilityResult solve(const AffineLmiSystem& sys, const SolveOptions& opts);
FeasibilityResult solve(const AffineLmiSystem& sys, double eps_feas = 1e-7, int max_iter = 5000);

/// Max over blocks of lambda_max(F_b(point)).
double eigen_margin(const AffineLmiSystem& sys, const Vec& point);

/// Blockwise convex combination (1-eta) f1 + eta f2. Shapes must agree.
AffineLmiSystem homotopy_blend(const AffineLmiSystem& f1, const AffineLmiSystem& f2, double eta);

}  // namespace fomas
