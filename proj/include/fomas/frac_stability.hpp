#pragma once

#include "fomas/lmi.hpp"
#include "fomas/var_layout.hpp"

namespace fomas {

/// The four 2x2 rotation blocks of the fractional stability inequality,
/// theta = alpha * pi / 2.
struct ThetaBlocks {
    double theta = 0.0;
    Mat t11, t12, t21, t22;

    const Mat& at(int i, int j) const;
};

ThetaBlocks theta_blocks(double alpha);

/// Sector test: D^alpha x = A x (0 < alpha < 1) is asymptotically stable iff
/// every eigenvalue satisfies |arg(lambda)| > alpha*pi/2. Boundary
/// eigenvalues (within 1e-9 rad) count as unstable.
bool spectral_stable(const Mat& a, double alpha);

/// Worst sector slack: min over eigenvalues of |arg(lambda)| - alpha*pi/2
/// (positive = stable side).
double sector_margin(const Mat& a, double alpha);

/// Certificate produced by a feasible stability LMI.
struct StabilityCertificate {
    Mat p11, p12, p21, p22;
    double margin = 0.0;
};

/// LMI formulation of the sector test, over symmetric P_11, P_21 and
/// skew-symmetric P_12, P_22:
///   sum_ij Sym{Theta_ij (x) (A P_ij)} < 0,
///   [[P_k1, P_k2], [-P_k2, P_k1]] > 0  for k = 1, 2.
AffineLmiSystem lemma1_lmi(const Mat& a, double alpha);

/// Variable layout used by lemma1_lmi (groups ordered P11, P12, P21, P22).
VarLayout lemma1_layout(int dim);

StabilityCertificate decode_lemma1_certificate(const AffineLmiSystem& sys, const Vec& point,
                                               int dim);

}  // namespace fomas
