#include "safeyaw/perception.hpp"

#include <algorithm>
#include <cmath>

#include "safeyaw/math.hpp"

namespace safeyaw {

double risk_alpha(double h_k, const RiskParams& p) {
    return p.alpha_obs * std::exp(std::clamp(-p.gamma * h_k, -700.0, 700.0));
}

double confidence_beta(double tau_k, const RiskParams& p) { return p.beta_obs * std::exp(-p.lambda * tau_k); }

double density_eval(const DensityScene& scene, double r, double theta) {
    double sum = 0.0;
    for (const DensityPeak& pk : scene.peaks) {
        const double dist2 = r * r - 2.0 * r * pk.r * std::cos(theta - pk.theta) + pk.r * pk.r;
        sum += pk.alpha / (pk.beta * std::max(0.0, dist2) + 1.0);
    }
    return sum;
}

double quality_eval(const SensorModel& sensor, double delta) {
    const double off = std::abs(wrap_angle(delta));
    if (off > sensor.sigma) return 0.0;
    if (sensor.mode == QualityMode::Binary) return 1.0;
    const double ck = std::cos(sensor.kappa);
    return std::max(0.0, (std::cos(off) - ck) / (1.0 - ck));
}

double radial_discriminant(const DensityPeak& peak, double theta) {
    const double s = std::sin(theta - peak.theta);
    return 4.0 * peak.beta * (peak.beta * peak.r * peak.r * s * s + 1.0);
}

namespace {

// Per-peak constants reused across every theta.
struct PreparedPeak {
    double cos_t;
    double sin_t;
    double r;
    double beta;
    double beta_r2;     // beta r_k^2
    double scale;       // alpha / (2 beta)
};

std::vector<PreparedPeak> prepare(const DensityScene& scene) {
    std::vector<PreparedPeak> out;
    out.reserve(scene.peaks.size());
    for (const DensityPeak& pk : scene.peaks) {
        out.push_back({std::cos(pk.theta), std::sin(pk.theta), pk.r, pk.beta, pk.beta * pk.r * pk.r,
                       pk.alpha / (2.0 * pk.beta)});
    }
    return out;
}

// H at a bearing given by its cosine and sine.
double radial_profile_prepared(const std::vector<PreparedPeak>& peaks, double rho, double cos_th, double sin_th) {
    double sum = 0.0;
    for (const PreparedPeak& pk : peaks) {
        const double c = cos_th * pk.cos_t + sin_th * pk.sin_t;  // cos(theta - theta_k)
        const double s = sin_th * pk.cos_t - cos_th * pk.sin_t;  // sin(theta - theta_k)
        const double a = pk.beta;
        const double b = -2.0 * pk.beta * pk.r * c;
        const double cc = pk.beta_r2 + 1.0;
        const double root = std::sqrt(4.0 * pk.beta * (pk.beta_r2 * s * s + 1.0));
        const double log_term = std::log1p((a * rho * rho + b * rho) / cc);
        // atan2 keeps the antiderivative continuous when 2c + b rho < 0.
        const double angle = std::atan2(rho * root, 2.0 * cc + b * rho);
        sum += pk.scale * (log_term - 2.0 * b / root * angle);
    }
    return sum;
}

}  // namespace

double radial_profile(const DensityScene& scene, double rho, double theta) {
    return radial_profile_prepared(prepare(scene), rho, std::cos(theta), std::sin(theta));
}

namespace {

int odd_nodes(int quadrature_points) {
    const int n = std::max(3, quadrature_points);
    return (n % 2 == 0) ? n + 1 : n;
}

double gamma_prepared(const std::vector<PreparedPeak>& peaks, const SensorModel& sensor, double psi, int nodes) {
    if (peaks.empty()) return 0.0;
    const double lo = psi - sensor.sigma;
    const double step = 2.0 * sensor.sigma / static_cast<double>(nodes - 1);
    const double ck = std::cos(sensor.kappa);
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double theta = lo + step * i;
        const double offset = psi - theta;
        double q = 1.0;
        if (sensor.mode == QualityMode::Degraded) q = std::max(0.0, (std::cos(offset) - ck) / (1.0 - ck));
        if (q == 0.0) continue;
        const double w = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * q * radial_profile_prepared(peaks, sensor.rho, std::cos(theta), std::sin(theta));
    }
    return sum * step / 3.0;
}

}  // namespace

double objective_gamma(const DensityScene& scene, const SensorModel& sensor, double psi, int quadrature_points) {
    return gamma_prepared(prepare(scene), sensor, psi, odd_nodes(quadrature_points));
}

std::size_t yaw_grid_size(double increment) {
    return static_cast<std::size_t>(std::max(1.0, std::round(kTwoPi / increment)));
}

double yaw_grid_point(std::size_t j, std::size_t n) {
    return wrap_angle(-kPi + kTwoPi * static_cast<double>(j) / static_cast<double>(n));
}

double penalized_objective(const DensityScene& scene, const SensorModel& sensor, const YawOptConfig& cfg,
                           double psi, double psi_prev) {
    const double d = wrap_angle(psi - psi_prev);
    return objective_gamma(scene, sensor, psi, cfg.quadrature_points) - cfg.epsilon * d * d;
}

YawDecision optimal_yaw(const DensityScene& scene, const SensorModel& sensor, const YawOptConfig& cfg,
                        double psi_prev) {
    return optimal_yaw(scene, sensor, cfg, psi_prev, nullptr);
}

YawDecision optimal_yaw(const DensityScene& scene, const SensorModel& sensor, const YawOptConfig& cfg,
                        double psi_prev, std::vector<double>* samples) {
    const std::vector<PreparedPeak> peaks = prepare(scene);
    const int nodes = odd_nodes(cfg.quadrature_points);
    const std::size_t n = yaw_grid_size(cfg.increment);

    std::vector<double> values(n);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const double psi = yaw_grid_point(j, n);
        const double d = wrap_angle(psi - psi_prev);
        values[j] = gamma_prepared(peaks, sensor, psi, nodes) - cfg.epsilon * d * d;
        best = std::max(best, values[j]);
    }

    const double tie_tol = 1e-12 * std::max(1.0, std::abs(best));
    YawDecision out;
    out.evaluations = n;
    bool have = false;
    double best_dist = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (values[j] < best - tie_tol) continue;
        const double psi = yaw_grid_point(j, n);
        const double dist = std::abs(wrap_angle(psi - psi_prev));
        // Grid order is ascending in angle, so a strict comparison keeps the smallest angle.
        if (!have || dist < best_dist - 1e-12) {
            have = true;
            best_dist = dist;
            out.psi = psi;
            out.value = values[j];
        }
    }
    if (samples != nullptr) *samples = std::move(values);
    return out;
}

}  // namespace safeyaw
