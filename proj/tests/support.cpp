#include "support.hpp"

namespace testsupport {

std::vector<projstruct::FamilyPtr> small_families(std::mt19937_64& rng) {
    using namespace projstruct;
    std::vector<FamilyPtr> out;
    out.push_back(std::make_shared<SmoothnessFamily>(8));
    out.push_back(std::make_shared<SparsityFamily>(8));
    out.push_back(std::make_shared<SparsityFamily>(8, SparsityMajorant::RhoPrime));
    out.push_back(std::make_shared<LeveledSparsityFamily>(2));
    out.push_back(std::make_shared<ClusteringFamily>(7, 3));
    out.push_back(std::make_shared<JumpFamily>(9));
    out.push_back(std::make_shared<KnotFamily>(9));
    Mat x(10, 6);
    std::normal_distribution<double> z(0.0, 1.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
    out.push_back(std::make_shared<RegressionFamily>(x));
    Mat collinear = x;
    collinear.col(3) = 2.0 * collinear.col(1);  // rank-deficient design
    out.push_back(std::make_shared<RegressionFamily>(collinear));
    out.push_back(std::make_shared<BandFamily>(4));
    out.push_back(std::make_shared<BiclusterFamily>(3, 3));
    return out;
}

}  // namespace testsupport
