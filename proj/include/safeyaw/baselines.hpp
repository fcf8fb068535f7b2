// Heuristic yaw policies used as comparison arms, plus the policy selector.
#pragma once

#include <string>
#include <vector>

#include "safeyaw/sensing.hpp"
#include "safeyaw/tracking.hpp"

namespace safeyaw {

enum class PolicyKind { Fixed, LookAhead, NearestObstacle, SafetyAware };

struct YawPolicy {
    PolicyKind kind = PolicyKind::SafetyAware;
    double fixed_value = 0.0;  ///< [rad], used by Fixed
};

std::string to_string(PolicyKind kind);
/// Accepts fixed, look_ahead, nearest (or nearest_obstacle), safety_aware.
PolicyKind policy_kind_from_string(const std::string& name);

inline double fixed_yaw(const YawPolicy& policy) { return wrap_angle(policy.fixed_value); }

/// Horizontal bearing of r_d - r; holds `previous` when closer than 1 mm.
double look_ahead(const UavState& uav, const PositionReference& ref, double previous);

/// Bearing of the seen track with minimum horizontal distance (lower id on ties);
/// falls back to look_ahead without tracks.
double nearest_obstacle(const UavState& uav, const std::vector<ObstacleTrack>& tracks,
                        const PositionReference& ref, double previous);

}  // namespace safeyaw
