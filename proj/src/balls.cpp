#include "projstruct/balls.hpp"

#include <algorithm>
#include <cmath>

#include "projstruct/errors.hpp"

namespace projstruct {

ConfidenceBall ebr_ball(const Family& f, double sigma, const FrameworkConstants& c,
                        const Structure& i_hat, const Vec& theta_hat, double t, double M) {
    if (!(t >= 0) || !(M >= 0)) throw ContractError("ebr_ball: t and M must be nonnegative");
    if (!(sigma >= 0)) throw ContractError("ebr_ball: sigma must be nonnegative");
    if (theta_hat.size() != f.ambient_dim()) throw ContractError("ebr_ball: center length mismatch");
    const double rho = f.majorant(i_hat);
    const double r2 = sigma * sigma * (1 + rho);
    ConfidenceBall b;
    b.center = theta_hat;
    b.radius_sq = (t + 1) * c.M2 * r2 + (t + 2) * M * sigma * sigma;
    b.kind = BallKind::Ebr;
    b.params = {{"M", M}, {"M2", c.M2}, {"rho_hat", rho}, {"t", t}};
    return b;
}

ConfidenceBall quarter_ball(const Vec& y_prime, const Vec& theta_hat, double sigma, double M,
                            double M1, double v_stat) {
    if (y_prime.size() != theta_hat.size()) throw ContractError("quarter_ball: length mismatch");
    if (!(M >= 0) || !(M1 >= 0)) throw ContractError("quarter_ball: M and M1 must be nonnegative");
    const double n = static_cast<double>(y_prime.size());
    const double g = std::sqrt(M * (M + M1));
    const double s2 = sigma * sigma;
    ConfidenceBall b;
    b.center = theta_hat;
    b.radius_sq = std::max(0.0, (y_prime - theta_hat).squaredNorm() - s2 * v_stat + 2 * s2 * g * std::sqrt(n));
    b.kind = BallKind::Quarter;
    b.params = {{"M", M}, {"M1", M1}, {"sigma", sigma}, {"v_stat", v_stat}};
    return b;
}

std::pair<Vec, Vec> duplicate_gaussian(const Vec& y, double sigma, Rng& rng) {
    const Vec z = standard_normal(rng, static_cast<int>(y.size()));
    return {y + sigma * z, y - sigma * z};
}

double v_statistic(VKind kind, const Vec& y_prime, const Vec& y) {
    if (y_prime.size() != y.size()) throw ContractError("v_statistic: length mismatch");
    if (kind == VKind::UnitVariance) return static_cast<double>(y.size());
    return y_prime.sum() - y_prime.dot(y);
}

bool quarter_ball_supported(const Family& f) { return f.kind() != FamilyKind::Band; }

bool contains(const ConfidenceBall& ball, const Vec& theta) {
    if (theta.size() != ball.center.size()) throw ContractError("contains: dimension mismatch");
    return (theta - ball.center).squaredNorm() <= ball.radius_sq;
}

nlohmann::json to_json(const ConfidenceBall& ball) {
    return {{"center", std::vector<double>(ball.center.data(), ball.center.data() + ball.center.size())},
            {"kind", ball.kind == BallKind::Ebr ? "ebr" : "quarter"},
            {"params", ball.params},
            {"radius_sq", ball.radius_sq}};
}

}  // namespace projstruct
