#pragma once

#include <utility>

#include <json.hpp>

#include "projstruct/family.hpp"
#include "projstruct/oracle.hpp"
#include "projstruct/rng.hpp"

namespace projstruct {

enum class BallKind { Ebr, Quarter };

struct ConfidenceBall {
    Vec center;
    double radius_sq = 0;
    BallKind kind = BallKind::Ebr;
    // EBR: t, M, M2, rho_hat. Quarter: M, M1, v_stat, sigma.
    nlohmann::json params;
};

// r^2 = sigma^2 (1 + rho(I_hat)); R^2 = (t + 1) M2 r^2 + (t + 2) M sigma^2.
ConfidenceBall ebr_ball(const Family& f, double sigma, const FrameworkConstants& c,
                        const Structure& i_hat, const Vec& theta_hat, double t, double M);

// R^2 = (||y' - theta_hat||^2 - sigma^2 V + 2 sigma^2 G_M sqrt(N))_+, G_M = sqrt(M (M + M1)).
// sigma is the noise level of y' (sqrt(2) times the original one after duplication).
ConfidenceBall quarter_ball(const Vec& y_prime, const Vec& theta_hat, double sigma, double M,
                            double M1, double v_stat);

// Y' = Y + sigma Z, Y'' = Y - sigma Z for one standard normal Z.
std::pair<Vec, Vec> duplicate_gaussian(const Vec& y, double sigma, Rng& rng);

enum class VKind { UnitVariance, Bernoulli };
double v_statistic(VKind kind, const Vec& y_prime, const Vec& y);

// The quarter ball needs (A4); it is not available for covariance banding.
bool quarter_ball_supported(const Family& f);

bool contains(const ConfidenceBall& ball, const Vec& theta);

nlohmann::json to_json(const ConfidenceBall& ball);

}  // namespace projstruct
