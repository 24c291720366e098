#include "fomas/var_layout.hpp"

namespace fomas {

int VarLayout::add_symmetric(const std::string& name, int dim) {
    Group g{name, Kind::symmetric, dim, dim, Mat(), n_vars_, dim * (dim + 1) / 2};
    n_vars_ += g.count;
    groups_.push_back(std::move(g));
    return static_cast<int>(groups_.size()) - 1;
}

int VarLayout::add_skew(const std::string& name, int dim) {
    Group g{name, Kind::skew, dim, dim, Mat(), n_vars_, dim * (dim - 1) / 2};
    n_vars_ += g.count;
    groups_.push_back(std::move(g));
    return static_cast<int>(groups_.size()) - 1;
}

int VarLayout::add_scalar(const std::string& name) {
    Group g{name, Kind::scalar, 1, 1, Mat(), n_vars_, 1};
    n_vars_ += 1;
    groups_.push_back(std::move(g));
    return static_cast<int>(groups_.size()) - 1;
}

int VarLayout::add_masked(const std::string& name, const Mat& mask) {
    Group g{name, Kind::masked, static_cast<int>(mask.rows()), static_cast<int>(mask.cols()),
            mask, n_vars_, 0};
    for (Eigen::Index r = 0; r < mask.rows(); ++r)
        for (Eigen::Index c = 0; c < mask.cols(); ++c)
            if (mask(r, c) != 0.0)
                ++g.count;
    n_vars_ += g.count;
    groups_.push_back(std::move(g));
    return static_cast<int>(groups_.size()) - 1;
}

std::vector<std::string> VarLayout::labels() const {
    std::vector<std::string> out(static_cast<std::size_t>(n_vars_));
    for (const Group& g : groups_)
        for (int k = 0; k < g.count; ++k)
            out[static_cast<std::size_t>(g.offset + k)] = g.name + "[" + std::to_string(k) + "]";
    return out;
}

void VarLayout::for_each_basis(int id, const std::function<void(int, const Mat&)>& fn) const {
    const Group& g = group(id);
    int k = g.offset;
    switch (g.kind) {
        case Kind::symmetric:
            for (int i = 0; i < g.dim; ++i)
                for (int j = i; j < g.dim; ++j) {
                    Mat basis = Mat::Zero(g.dim, g.dim);
                    basis(i, j) = 1.0;
                    basis(j, i) = 1.0;
                    fn(k++, basis);
                }
            break;
        case Kind::skew:
            for (int i = 0; i < g.dim; ++i)
                for (int j = i + 1; j < g.dim; ++j) {
                    Mat basis = Mat::Zero(g.dim, g.dim);
                    basis(i, j) = 1.0;
                    basis(j, i) = -1.0;
                    fn(k++, basis);
                }
            break;
        case Kind::scalar:
            fn(k, Mat::Ones(1, 1));
            break;
        case Kind::masked:
            for (int r = 0; r < g.dim; ++r)
                for (int c = 0; c < g.cols; ++c)
                    if (g.mask(r, c) != 0.0) {
                        Mat basis = Mat::Zero(g.dim, g.cols);
                        basis(r, c) = 1.0;
                        fn(k++, basis);
                    }
            break;
    }
}

Mat VarLayout::unpack(int id, const Vec& theta) const {
    const Group& g = group(id);
    Mat out = Mat::Zero(g.dim, g.cols);
    for_each_basis(id, [&](int k, const Mat& basis) { out += theta(k) * basis; });
    return out;
}

double VarLayout::unpack_scalar(int id, const Vec& theta) const {
    return theta(group(id).offset);
}

void VarLayout::pack(int id, const Mat& value, Vec& theta) const {
    const Group& g = group(id);
    int k = g.offset;
    switch (g.kind) {
        case Kind::symmetric:
            for (int i = 0; i < g.dim; ++i)
                for (int j = i; j < g.dim; ++j)
                    theta(k++) = 0.5 * (value(i, j) + value(j, i));
            break;
        case Kind::skew:
            for (int i = 0; i < g.dim; ++i)
                for (int j = i + 1; j < g.dim; ++j)
                    theta(k++) = 0.5 * (value(i, j) - value(j, i));
            break;
        case Kind::scalar:
            theta(k) = value(0, 0);
            break;
        case Kind::masked:
            for (int r = 0; r < g.dim; ++r)
                for (int c = 0; c < g.cols; ++c)
                    if (g.mask(r, c) != 0.0)
                        theta(k++) = value(r, c);
            break;
    }
}

void VarLayout::pack_scalar(int id, double value, Vec& theta) const {
    theta(group(id).offset) = value;
}

}  // namespace fomas
