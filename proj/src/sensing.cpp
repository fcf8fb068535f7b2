#include "safeyaw/sensing.hpp"

#include <cmath>
#include <stdexcept>

namespace safeyaw {

bool detect(const UavState& uav, double psi, const SensorModel& sensor, const ObstacleState& obs) {
    const double dist = horizontal_distance(uav.r, obs.r_c);
    if (dist < obs.radius_true) return true;
    if (dist > sensor.rho - obs.radius_true) return false;
    const double offset = std::abs(wrap_angle(horizontal_bearing(uav.r, obs.r_c) - psi));
    return offset + std::asin(obs.radius_true / dist) <= sensor.sigma;
}

std::vector<ObstacleTrack> make_tracks(const std::vector<ObstacleState>& truth) {
    std::vector<ObstacleTrack> tracks(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        tracks[i].id = static_cast<int>(i);
        tracks[i].radius_true = truth[i].radius_true;
        tracks[i].radius_barrier = truth[i].radius_barrier;
    }
    return tracks;
}

ObstacleState track_obstacle(const ObstacleTrack& track) {
    ObstacleState s;
    s.r_c = track.position;
    s.v_c = track.velocity;
    s.radius_true = track.radius_true;
    s.radius_barrier = track.radius_barrier;
    return s;
}

void update_tracks(std::vector<ObstacleTrack>& tracks, const std::vector<bool>& detections,
                   const std::vector<ObstacleState>& truth, double dt, const TrackContext& ctx) {
    if (!(dt > 0.0)) throw std::invalid_argument("update_tracks: dt must be positive");
    if (detections.size() != tracks.size() || truth.size() != tracks.size())
        throw std::invalid_argument("update_tracks: size mismatch");

    for (std::size_t i = 0; i < tracks.size(); ++i) {
        ObstacleTrack& t = tracks[i];
        if (detections[i]) {
            t.ever_seen = true;
            t.last_seen_position = truth[i].r_c;
            t.last_seen_velocity = truth[i].v_c;
            t.position = truth[i].r_c;
            t.velocity = truth[i].v_c;
            t.tau = 0.0;
        } else if (t.ever_seen) {
            t.tau += dt;
            if (ctx.coast == CoastMode::ConstantVelocity) {
                t.position = t.last_seen_position + t.tau * t.last_seen_velocity;
                t.velocity = t.last_seen_velocity;
            } else {
                t.position = t.last_seen_position;
                t.velocity = {};
            }
        }
        if (!t.ever_seen) continue;
        const ObstacleState est = track_obstacle(t);
        if (norm(est.r_c - ctx.uav.r) > 1e-9) {
            t.h = cbf_row(ctx.uav, ctx.mu_probe, est, Vec3{}, ctx.cbf).h_value;
        }
    }
}

}  // namespace safeyaw
