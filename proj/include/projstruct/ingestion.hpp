#pragma once

#include <string>
#include <utility>
#include <vector>

#include "projstruct/linalg.hpp"

namespace projstruct {

// Trigonometric basis on [0, 1], 1-based: phi_1 = 1, phi_{2k} = sqrt2 cos(2 pi k x),
// phi_{2k+1} = sqrt2 sin(2 pi k x).
double trig_basis(int index, double x);

struct DensitySequence {
    Vec y;         // Y_i = (1/n) sum_l phi_i(X_l)
    double sigma;  // sigma_n = sqrt(C log n / n)
};
DensitySequence density_to_sequence(const std::vector<double>& samples, int n_coeffs, double c);

// Y = (1/n) sum_l x_l x_l^T for the rows x_l of `rows` (n x p).
Mat covariance_to_matrix(const std::vector<std::vector<double>>& rows);

struct LaplacianEigen {
    Vec eigenvalues;        // ascending
    Eigen::MatrixXd basis;  // columns are eigenvectors; first nonzero entry of each positive
};
LaplacianEigen laplacian_eigen_order(const Mat& adjacency);

// Coordinates of a signal in the eigenbasis: basis^T f.
Vec to_eigen_coordinates(const LaplacianEigen& le, const Vec& f);

// One real per line (blank lines and '#' comments skipped).
std::vector<double> read_samples_csv(const std::string& path);
// Comma-separated reals per line.
std::vector<std::vector<double>> read_matrix_csv(const std::string& path);

}  // namespace projstruct
