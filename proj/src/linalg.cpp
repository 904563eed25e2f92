#include "projstruct/linalg.hpp"

#include <cmath>
#include <string>

#include "projstruct/errors.hpp"

namespace projstruct {

namespace {

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pivoted_qr(const Mat& basis) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis.rows(), basis.cols());
    qr.setThreshold(kRankTolerance);
    qr.compute(basis);
    return qr;
}

}  // namespace

Eigen::MatrixXd orthonormal_span(const Mat& basis) {
    if (basis.rows() < 1) throw ContractError("orthonormal_span: empty basis");
    if (basis.cols() == 0 || basis.norm() == 0.0) return Eigen::MatrixXd(basis.rows(), 0);
    auto qr = pivoted_qr(basis);
    const auto rank = qr.rank();
    Eigen::MatrixXd q = qr.householderQ();
    return q.leftCols(rank);
}

int column_rank(const Mat& basis) {
    if (basis.cols() == 0 || basis.norm() == 0.0) return 0;
    return static_cast<int>(pivoted_qr(basis).rank());
}

Vec least_squares_project(const Mat& basis, const Vec& y) {
    if (basis.rows() != y.size()) {
        throw ContractError("least_squares_project: basis has " + std::to_string(basis.rows()) +
                            " rows but y has length " + std::to_string(y.size()));
    }
    if (basis.cols() > basis.rows()) {
        throw ContractError("least_squares_project: more columns than rows");
    }
    const Eigen::MatrixXd q = orthonormal_span(basis);
    if (q.cols() == 0) return Vec::Zero(y.size());
    return q * (q.transpose() * y);
}

double sq_norm(const Vec& y) {
    if (y.size() < 1) throw ContractError("sq_norm: empty vector");
    return y.squaredNorm();
}

void require_finite(const Vec& y, const char* what) {
    if (y.size() < 1) throw ContractError(std::string(what) + ": empty vector");
    if (!y.allFinite()) throw ContractError(std::string(what) + ": non-finite entry");
}

Vec vectorize(const Mat& m) {
    Vec v(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
    return v;
}

Mat unvectorize(const Vec& v, int rows, int cols) {
    if (v.size() != static_cast<Eigen::Index>(rows) * cols)
        throw ContractError("unvectorize: size mismatch");
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = v(static_cast<Eigen::Index>(i) * cols + j);
    return m;
}

}  // namespace projstruct
