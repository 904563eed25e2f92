#pragma once

#include <Eigen/Dense>

namespace projstruct {

// Parameters and observations. Matrix-valued parameters are vectorized
// row-major: entry (i, j) of an r x c matrix lives at index i * c + j.
using Vec = Eigen::VectorXd;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Relative column-drop threshold for rank-deficient spans.
inline constexpr double kRankTolerance = 1e-10;

// Orthogonal projection of y onto the column span of basis (n x k, k <= n).
// Redundant columns are dropped by a column-pivoted QR.
Vec least_squares_project(const Mat& basis, const Vec& y);

// Orthonormal basis (n x rank) for the column span of basis.
Eigen::MatrixXd orthonormal_span(const Mat& basis);

// Numerical rank with the same threshold as least_squares_project.
int column_rank(const Mat& basis);

double sq_norm(const Vec& y);

// Throws ContractError if any entry is NaN/inf or the vector is empty.
void require_finite(const Vec& y, const char* what);

// Vectorize an r x c matrix row-major, and the inverse.
Vec vectorize(const Mat& m);
Mat unvectorize(const Vec& v, int rows, int cols);

}  // namespace projstruct
