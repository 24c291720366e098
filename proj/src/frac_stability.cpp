#include "fomas/frac_stability.hpp"

#include <cmath>
#include <numbers>

namespace fomas {

const Mat& ThetaBlocks::at(int i, int j) const {
    if (i == 1 && j == 1)
        return t11;
    if (i == 1 && j == 2)
        return t12;
    if (i == 2 && j == 1)
        return t21;
    if (i == 2 && j == 2)
        return t22;
    throw std::invalid_argument("ThetaBlocks::at: indices must be 1 or 2");
}

ThetaBlocks theta_blocks(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("theta_blocks: alpha must lie in (0,1)");
    ThetaBlocks tb;
    tb.theta = alpha * std::numbers::pi / 2.0;
    const double s = std::sin(tb.theta);
    const double c = std::cos(tb.theta);
    tb.t11 = (Mat(2, 2) << s, -c, c, s).finished();
    tb.t12 = (Mat(2, 2) << c, s, -s, c).finished();
    tb.t21 = (Mat(2, 2) << s, c, -c, s).finished();
    tb.t22 = (Mat(2, 2) << -c, s, -s, -c).finished();
    return tb;
}

double sector_margin(const Mat& a, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("sector_margin: alpha must lie in (0,1)");
    const Spectrum eigs = spectrum(a);
    double worst = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        const double arg = std::abs(std::atan2(eigs(i).imag(), eigs(i).real()));
        worst = std::min(worst, arg - alpha * std::numbers::pi / 2.0);
    }
    return worst;
}

bool spectral_stable(const Mat& a, double alpha) {
    return sector_margin(a, alpha) > 1e-9;
}

VarLayout lemma1_layout(int dim) {
    VarLayout layout;
    layout.add_symmetric("P11", dim);
    layout.add_skew("P12", dim);
    layout.add_symmetric("P21", dim);
    layout.add_skew("P22", dim);
    return layout;
}

AffineLmiSystem lemma1_lmi(const Mat& a, double alpha) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("lemma1_lmi: matrix must be square");
    const int d = static_cast<int>(a.rows());
    const ThetaBlocks tb = theta_blocks(alpha);
    const VarLayout layout = lemma1_layout(d);

    AffineLmiSystem sys(layout.n_vars());
    sys.var_labels() = layout.labels();

    // sum_ij Sym{Theta_ij (x) (A P_ij)} < 0
    const int main_blk = sys.add_empty_block(2 * d);
    const Mat* thetas[4] = {&tb.t11, &tb.t12, &tb.t21, &tb.t22};
    for (int g = 0; g < 4; ++g) {
        layout.for_each_basis(g, [&](int var, const Mat& basis) {
            sys.block_add_coeff(main_blk, var, sym(kron(*thetas[g], a * basis)));
        });
    }

    // [[P_k1, P_k2], [-P_k2, P_k1]] > 0 for k = 1, 2, encoded as -pair < 0.
    for (int k = 0; k < 2; ++k) {
        const int pos_blk = sys.add_empty_block(2 * d);
        const int sym_group = 2 * k;
        const int skew_group = 2 * k + 1;
        layout.for_each_basis(sym_group, [&](int var, const Mat& basis) {
            Mat coeff = Mat::Zero(2 * d, 2 * d);
            coeff.topLeftCorner(d, d) = -basis;
            coeff.bottomRightCorner(d, d) = -basis;
            sys.block_add_coeff(pos_blk, var, coeff);
        });
        layout.for_each_basis(skew_group, [&](int var, const Mat& basis) {
            Mat coeff = Mat::Zero(2 * d, 2 * d);
            coeff.topRightCorner(d, d) = -basis;
            coeff.bottomLeftCorner(d, d) = basis;
            sys.block_add_coeff(pos_blk, var, coeff);
        });
    }
    return sys;
}

StabilityCertificate decode_lemma1_certificate(const AffineLmiSystem& sys, const Vec& point,
                                               int dim) {
    const VarLayout layout = lemma1_layout(dim);
    if (layout.n_vars() != sys.n_vars() || point.size() != sys.n_vars())
        throw std::invalid_argument("decode_lemma1_certificate: layout mismatch");
    StabilityCertificate cert;
    cert.p11 = layout.unpack(0, point);
    cert.p12 = layout.unpack(1, point);
    cert.p21 = layout.unpack(2, point);
    cert.p22 = layout.unpack(3, point);
    cert.margin = eigen_margin(sys, point);
    return cert;
}

}  // namespace fomas
