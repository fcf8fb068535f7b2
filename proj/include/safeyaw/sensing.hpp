// Simulated body-fixed FOV sensor and per-obstacle track maintenance.
#pragma once

#include <vector>

#include "safeyaw/dynamics.hpp"
#include "safeyaw/perception.hpp"
#include "safeyaw/safety.hpp"

namespace safeyaw {

struct ObstacleTrack {
    int id = 0;
    bool ever_seen = false;
    Vec3 last_seen_position;
    Vec3 last_seen_velocity;
    Vec3 position;  ///< current estimate (coasted while unseen)
    Vec3 velocity;
    double tau = 0.0;  ///< time since last detection [s]
    double h = 0.0;    ///< CBF constraint value at the probe acceleration
    double radius_true = 0.1;
    double radius_barrier = 0.1;
};

enum class CoastMode { ConstantVelocity, HoldPosition };

/// Inputs needed to refresh h_k on every track.
struct TrackContext {
    UavState uav;
    Vec3 mu_probe;
    CbfParams cbf;
    CoastMode coast = CoastMode::ConstantVelocity;
};

/// True when the obstacle's horizontal disc lies entirely inside the sensor
/// wedge: center range <= rho - radius and |bearing offset| + asin(radius / range) <= sigma.
/// An interpenetrating obstacle (range < radius) counts as detected.
bool detect(const UavState& uav, double psi, const SensorModel& sensor, const ObstacleState& obs);

/// Starts one unseen track per obstacle, ids 0..n-1.
std::vector<ObstacleTrack> make_tracks(const std::vector<ObstacleState>& truth);

/// Detected tracks snap to truth with tau = 0; seen-but-undetected tracks coast
/// and accumulate dt; never-seen tracks stay inert. h is recomputed for every seen track.
void update_tracks(std::vector<ObstacleTrack>& tracks, const std::vector<bool>& detections,
                   const std::vector<ObstacleState>& truth, double dt, const TrackContext& ctx);

/// Obstacle state implied by a track (zero acceleration).
ObstacleState track_obstacle(const ObstacleTrack& track);

}  // namespace safeyaw
