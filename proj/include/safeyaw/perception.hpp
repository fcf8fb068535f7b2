// Safety-aware perception: a risk density built from CBF values, its analytic
// radial reduction, the convolution with the sensor quality function, and the
// global yaw search.
//
// The density of N points of interest in UAV-centered polar coordinates is
//
//   Phi(r, theta) = sum_k alpha_k / (beta_k [r^2 - 2 r r_k cos(theta - theta_k) + r_k^2] + 1)
//
// and the observed risk for a sensor pointing at psi is
//
//   Gamma(psi) = int_{psi - sigma}^{psi + sigma} H(theta) Q(psi - theta) dtheta,
//   H(theta)   = int_0^rho Phi(r, theta) r dr   (closed form, see radial_profile).
#pragma once

#include <cstddef>
#include <vector>

namespace safeyaw {

struct DensityPeak {
    double r = 0.0;      ///< range from the UAV [m]
    double theta = 0.0;  ///< bearing [rad]
    double alpha = 1.0;  ///< peak height
    double beta = 1.0;   ///< dissipation (sharpness)
};

struct DensityScene {
    std::vector<DensityPeak> peaks;
};

struct RiskParams {
    double alpha_obs = 1.0;
    double gamma = 1.0;
    double beta_obs = 10.0;
    double lambda = 0.5;
};

enum class QualityMode { Binary, Degraded };

struct SensorModel {
    double sigma = 0.7853981633974483;  ///< FOV half-angle [rad]
    double kappa = 0.7853981633974483;  ///< degradation angle [rad], >= sigma in degraded mode
    double rho = 3.0;                   ///< maximum range [m]
    QualityMode mode = QualityMode::Degraded;
};

struct YawOptConfig {
    double epsilon = 0.0;                 ///< weight of the squared yaw-change penalty
    double increment = 0.15707963267948966;  ///< grid step [rad], 9 degrees
    int quadrature_points = 65;           ///< Simpson nodes per convolution
};

/// alpha_k = alpha_obs exp(-gamma h_k). The exponent is clamped to [-700, 700] so alpha stays finite and positive.
double risk_alpha(double h_k, const RiskParams& p);

/// beta_k = beta_obs exp(-lambda tau_k).
double confidence_beta(double tau_k, const RiskParams& p);

double density_eval(const DensityScene& scene, double r, double theta);

/// Q(delta) for an angular offset delta = wrap(psi - theta).
double quality_eval(const SensorModel& sensor, double delta);

/// H(theta): closed-form radial integral of Phi r over [0, rho].
double radial_profile(const DensityScene& scene, double rho, double theta);

/// 4 a_k c_k - b_k^2 in the cancellation-free form 4 beta (beta r_k^2 sin^2(theta - theta_k) + 1).
double radial_discriminant(const DensityPeak& peak, double theta);

/// Gamma(psi) by composite Simpson over [psi - sigma, psi + sigma].
/// An even node count is rounded up to the next odd one.
double objective_gamma(const DensityScene& scene, const SensorModel& sensor, double psi, int quadrature_points);

struct YawDecision {
    double psi = 0.0;          ///< selected yaw, on the grid, in [-pi, pi)
    double value = 0.0;        ///< penalized objective at psi
    std::size_t evaluations = 0;  ///< number of Gamma evaluations performed
};

/// Number of grid points for a given increment: round(2 pi / increment).
std::size_t yaw_grid_size(double increment);

/// Grid point j of the search: -pi + j * 2 pi / n.
double yaw_grid_point(std::size_t j, std::size_t n);

/// Penalized objective Gamma(psi) - epsilon wrap(psi - psi_prev)^2.
double penalized_objective(const DensityScene& scene, const SensorModel& sensor, const YawOptConfig& cfg,
                           double psi, double psi_prev);

/// Exhaustive search of the penalized objective over the yaw grid. Ties (within
/// 1e-12 relative) go to the smallest wrapped distance to psi_prev, then to the
/// smallest angle.
YawDecision optimal_yaw(const DensityScene& scene, const SensorModel& sensor, const YawOptConfig& cfg,
                        double psi_prev);

/// Same search, also returning the sampled penalized objective per grid point.
YawDecision optimal_yaw(const DensityScene& scene, const SensorModel& sensor, const YawOptConfig& cfg,
                        double psi_prev, std::vector<double>* samples);

}  // namespace safeyaw
