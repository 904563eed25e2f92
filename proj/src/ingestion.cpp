#include "projstruct/ingestion.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "projstruct/errors.hpp"

namespace projstruct {

double trig_basis(int index, double x) {
    if (index < 1) throw ContractError("trig_basis: index must be >= 1");
    if (index == 1) return 1.0;
    const int k = index / 2;
    const double arg = 2 * std::numbers::pi * k * x;
    return std::numbers::sqrt2 * (index % 2 == 0 ? std::cos(arg) : std::sin(arg));
}

DensitySequence density_to_sequence(const std::vector<double>& samples, int n_coeffs, double c) {
    if (samples.empty()) throw ContractError("density_to_sequence: no samples");
    if (n_coeffs < 1) throw ContractError("density_to_sequence: n_coeffs must be >= 1");
    if (!(c > 0)) throw ContractError("density_to_sequence: C must be positive");
    for (double x : samples)
        if (!(x >= 0 && x <= 1))
            throw ContractError("density_to_sequence: sample " + std::to_string(x) + " outside [0, 1]");
    const double n = static_cast<double>(samples.size());
    Vec y = Vec::Zero(n_coeffs);
    for (double x : samples)
        for (int i = 1; i <= n_coeffs; ++i) y(i - 1) += trig_basis(i, x);
    y /= n;
    return {y, std::sqrt(c * std::log(n) / n)};
}

Mat covariance_to_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ContractError("covariance_to_matrix: no rows");
    const std::size_t p = rows.front().size();
    if (p == 0) throw ContractError("covariance_to_matrix: empty rows");
    Mat y = Mat::Zero(p, p);
    for (const auto& r : rows) {
        if (r.size() != p) throw ContractError("covariance_to_matrix: ragged rows");
        const Eigen::Map<const Vec> x(r.data(), static_cast<Eigen::Index>(p));
        y.noalias() += x * x.transpose();
    }
    y /= static_cast<double>(rows.size());
    // Exact symmetry regardless of accumulation order.
    const Mat sym = 0.5 * (y + y.transpose());
    return sym;
}

LaplacianEigen laplacian_eigen_order(const Mat& adjacency) {
    const auto n = adjacency.rows();
    if (n < 1 || adjacency.cols() != n) throw ContractError("laplacian: adjacency must be square");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (adjacency(i, i) != 0) throw ContractError("laplacian: self-loops are not allowed");
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = adjacency(i, j);
            if (a != adjacency(j, i)) throw ContractError("laplacian: adjacency must be symmetric");
            if (a != 0 && a != 1) throw ContractError("laplacian: adjacency must be 0/1");
        }
    }
    Eigen::MatrixXd lap = -Eigen::MatrixXd(adjacency);
    for (Eigen::Index i = 0; i < n; ++i) lap(i, i) = adjacency.row(i).sum();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
    if (es.info() != Eigen::Success) throw Error("laplacian: eigen decomposition failed");
    LaplacianEigen out{es.eigenvalues(), es.eigenvectors()};
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            const double v = out.basis(r, c);
            if (std::abs(v) > 1e-12) {
                if (v < 0) out.basis.col(c) *= -1;
                break;
            }
        }
    }
    return out;
}

Vec to_eigen_coordinates(const LaplacianEigen& le, const Vec& f) {
    if (f.size() != le.basis.rows()) throw ContractError("to_eigen_coordinates: length mismatch");
    return le.basis.transpose() * f;
}

namespace {

std::vector<double> parse_line(const std::string& line, const std::string& path, int lineno) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
        }
    }
    return out;
}

template <class Fn>
void for_each_data_line(const std::string& path, Fn fn) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        fn(parse_line(line, path, lineno), lineno);
    }
}

}  // namespace

std::vector<double> read_samples_csv(const std::string& path) {
    std::vector<double> out;
    for_each_data_line(path, [&](const std::vector<double>& v, int lineno) {
        if (v.size() != 1)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected one value per line");
        out.push_back(v[0]);
    });
    return out;
}

std::vector<std::vector<double>> read_matrix_csv(const std::string& path) {
    std::vector<std::vector<double>> out;
    for_each_data_line(path, [&](const std::vector<double>& v, int) { out.push_back(v); });
    return out;
}

}  // namespace projstruct
