#include "safeyaw/baselines.hpp"

#include <stdexcept>

namespace safeyaw {

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Fixed: return "fixed";
        case PolicyKind::LookAhead: return "look_ahead";
        case PolicyKind::NearestObstacle: return "nearest";
        case PolicyKind::SafetyAware: return "safety_aware";
    }
    return "safety_aware";
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "fixed") return PolicyKind::Fixed;
    if (name == "look_ahead") return PolicyKind::LookAhead;
    if (name == "nearest" || name == "nearest_obstacle") return PolicyKind::NearestObstacle;
    if (name == "safety_aware") return PolicyKind::SafetyAware;
    throw std::invalid_argument("unknown policy '" + name + "'");
}

double look_ahead(const UavState& uav, const PositionReference& ref, double previous) {
    if (horizontal_distance(uav.r, ref.r_d) < 1e-3) return wrap_angle(previous);
    return wrap_angle(horizontal_bearing(uav.r, ref.r_d));
}

double nearest_obstacle(const UavState& uav, const std::vector<ObstacleTrack>& tracks,
                        const PositionReference& ref, double previous) {
    const ObstacleTrack* best = nullptr;
    double best_dist = 0.0;
    for (const ObstacleTrack& t : tracks) {
        if (!t.ever_seen) continue;
        const double d = horizontal_distance(uav.r, t.position);
        if (best == nullptr || d < best_dist || (d == best_dist && t.id < best->id)) {
            best = &t;
            best_dist = d;
        }
    }
    if (best == nullptr) return look_ahead(uav, ref, previous);
    if (best_dist < 1e-9) return wrap_angle(previous);
    return wrap_angle(horizontal_bearing(uav.r, best->position));
}

}  // namespace safeyaw
