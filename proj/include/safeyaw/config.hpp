// Every tunable of the simulator in one value type, with JSON load/dump.
//
// The JSON document mirrors the struct layout; see configs/default.json and the
// README for the schema. Loading is strict: unknown keys and out-of-range values
// raise ConfigError naming the offending field. Missing keys keep their defaults.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "safeyaw/baselines.hpp"
#include "safeyaw/dynamics.hpp"
#include "safeyaw/perception.hpp"
#include "safeyaw/safety.hpp"
#include "safeyaw/sensing.hpp"
#include "safeyaw/tracking.hpp"

namespace safeyaw {

inline constexpr const char* kVersion = "1.0.0";

enum class MissionKind { Infinity, Corridor };

std::string to_string(MissionKind kind);
/// Accepts infinity / infinity_track and corridor / sine_corridor.
MissionKind mission_kind_from_string(const std::string& name);

struct MissionProfile {
    MissionKind kind = MissionKind::Infinity;
    double duration = 30.0;  ///< [s]
    double period = 10.0;    ///< reference period [s]
    double altitude = 0.5;   ///< [m]
    int obstacle_count = 2;

    // Infinity track: center + (A sin(2 pi t/T), B sin(4 pi t/T) / 2, 0).
    Vec3 center{0.0, 0.0, 0.5};
    double extent_x = 1.0;  ///< A [m]
    double extent_y = 1.0;  ///< B [m]

    // Sine corridor: (x0 + v t, A sin(2 pi t/T), altitude), obstacles inside the box.
    double start_x = 0.0;
    double forward_speed = 0.75;  ///< [m/s]
    double amplitude = 0.5;       ///< [m]
    Vec3 corridor_lo{0.0, -1.0, 0.5};
    Vec3 corridor_hi{15.0, 1.0, 0.5};

    static MissionProfile infinity_track();
    static MissionProfile sine_corridor();
};

struct SafetyConfig {
    double obstacle_radius_true = 0.10;
    double safety_factor = 1.5;

    /// R = safety_factor * (radius_true + uav_radius).
    double barrier_radius(double uav_radius) const { return safety_factor * (obstacle_radius_true + uav_radius); }
};

struct ObstacleGenConfig {
    double speed_min = 0.1;  ///< [m/s]
    double speed_max = 0.5;
    /// Infinity track: obstacles cross the reference path at a random time in
    /// [cross_time_min, duration - cross_time_margin] within aim_spread of r_d.
    double cross_time_min = 3.0;
    double cross_time_margin = 2.0;
    double aim_spread = 0.15;
    /// Required initial horizontal distance from the UAV start, in multiples of R.
    double start_clearance = 3.0;
    int max_attempts = 1000;
};

struct QpConfig {
    Vec3 h_diag{1.0, 1.0, 1.0};
    double xi = 10.0;
    bool use_clf = true;
    double clf_rate = 0.5;
};

struct LqrWeights {
    double q_pos = 16.0;
    double q_vel = 4.0;
    double r = 1.0;
};

/// Low-weight points of interest that pull the sensor toward airspace it has not
/// looked at recently. A point unobserved for tau seconds gets
/// alpha * (1 - exp(-lambda * tau)) and a fixed sharpness beta_obs.
struct ExplorationConfig {
    bool enabled = true;
    double alpha = 0.2;
    double beta_obs = 10.0;
    double lambda = 0.5;
    /// World-frame (x, y) points of interest; z is ignored.
    std::vector<Vec3> points;
    /// Bearings spaced 2 pi / ring_count around the UAV at ring_radius, fixed in the world frame.
    int ring_count = 8;
    double ring_radius = 1.5;  ///< [m]
    /// Adds a constant-weight peak at the position reference this far ahead [s]; 0 disables it.
    double preview_time = 0.0;
};

struct PerceptionConfig {
    RiskParams risk;
    SensorModel sensor;
    YawOptConfig yaw{0.002, 0.15707963267948966, 65};
    ExplorationConfig exploration;
};

struct BaselineConfig {
    double fixed_yaw = 0.0;       ///< [rad]
    double look_ahead_time = 0.5; ///< preview horizon of the look-ahead reference [s]
};

struct SimConfig {
    double dt = 0.002;
    bool omniscient = false;
    CoastMode coast = CoastMode::ConstantVelocity;
    /// Start of the window used for steady-state tracking statistics [s].
    double settle_time = 5.0;
};

struct OutputConfig {
    /// Fill the solve-time columns of summaries; off gives byte-reproducible tables.
    bool timing = true;
};

struct Config {
    UavParams uav;
    LqrWeights lqr;
    AttitudeGains attitude{20000.0, 200.0};
    CbfParams cbf;
    QpConfig qp;
    PerceptionConfig perception;
    BaselineConfig baselines;
    SafetyConfig safety;
    ObstacleGenConfig obstacles;
    MissionProfile infinity = MissionProfile::infinity_track();
    MissionProfile corridor = MissionProfile::sine_corridor();
    SimConfig sim;
    OutputConfig output;

    const MissionProfile& mission(MissionKind kind) const { return kind == MissionKind::Infinity ? infinity : corridor; }
};

/// Throws ConfigError naming the first invalid field.
void validate(const Config& cfg);

nlohmann::json to_json(const Config& cfg);
/// Strict parse: unknown keys are rejected, missing keys keep defaults. Validates.
Config config_from_json(const nlohmann::json& doc);
Config load_config(const std::string& path);

}  // namespace safeyaw
