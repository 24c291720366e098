#pragma once

#include "fomas/frac_stability.hpp"
#include "fomas/lmi.hpp"
#include "fomas/model.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace fomas {

struct HomotopyConfig {
    int t_steps = 10;          // homotopy grid eta = i / t_steps
    int max_refinements = 6;   // step-halving budget per failed grid step
    double eps_feas = 1e-7;
    double q_shift = 1.0;      // Q = A_K + q_shift I, so A_K - Q = -q_shift I
    double mu_min = 1e-6;
    int max_iter = 5000;       // per LMI solve
    bool nominal = false;      // drop the uncertainty channels (Corollary 1 form)
    std::ostream* log = nullptr;
};

struct SynthesisResult {
    DecentralizedController controller;
    Mat x11, x12, x21, x22;
    double mu = 0.0;  // 0 in nominal mode
    std::vector<std::pair<double, double>> eta_trace;  // (eta, margin) accepted steps
    bool robustly_stable = false;
};

/// Robust consensus inequality for a fixed controller, affine in
/// {X_11, X_21 symmetric; X_12, X_22 skew; mu}:
///   sum_ij [[Sym{Theta_ij (x) (A_cl X_ij)}, Theta_ij (x) M, I_2 (x) (X_ij^T R^T)],
///           [*, -mu I, mu I],
///           [*, *, -Sym{I_2 (x) (I_{N-1} (x) J)} - mu I]] < 0,
/// plus the two positivity pairs and mu >= mu_min.
AffineLmiSystem theorem1_constraints(const FomasProblem& p, const DecentralizedController& k,
                                     double mu_min = 1e-6);

/// Nominal consensus inequality for a fixed controller, affine in the X's:
/// sum_ij Sym{Theta_ij (x) (A_cl X_ij)} < 0 plus the positivity pairs.
AffineLmiSystem corollary1_constraints(const FomasProblem& p, const DecentralizedController& k);

/// The eta = 0 end of the homotopy: the consensus inequality with A_cl
/// replaced by the Hurwitz matrix A_K - Q. Throws if A_K - Q is not Hurwitz.
AffineLmiSystem f1_constraints(const FomasProblem& p, const Mat& q, bool nominal = false,
                               double mu_min = 1e-6);

/// The consensus inequality as an LMI in the free (decentralized) entries of
/// K, with the X's and mu held fixed.
AffineLmiSystem k_step_constraints(const FomasProblem& p, const Mat& x11, const Mat& x12,
                                   const Mat& x21, const Mat& x22, double mu_fixed,
                                   bool nominal = false, double mu_min = 1e-6);

/// Variable layout used by the X-form systems above
/// (groups X11, X12, X21, X22, then mu when robust).
VarLayout synthesis_x_layout(int n_cl, bool robust);

/// Homotopy continuation: solve the eta = 0 LMI for an initial certificate,
/// then march eta to 1 alternating X- and K-steps with step halving.
/// Post-verifies the produced controller spectrally against the problem's
/// delta realizations and their worst case.
SynthesisResult synthesize(const FomasProblem& p, const HomotopyConfig& cfg);

}  // namespace fomas
