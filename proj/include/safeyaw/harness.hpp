// Mission profiles, randomized obstacle fields, the closed-loop flight and
// Monte-Carlo batches.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "safeyaw/config.hpp"

namespace safeyaw {

/// Reference and analytic derivatives; t outside [0, duration] clamps to the
/// endpoint with zero derivatives.
PositionReference reference_at(const MissionProfile& profile, double t);

struct ObstacleSpec {
    ObstacleTrajectory trajectory;
    double radius_true = 0.1;
    double radius_barrier = 0.1;
};

class GenerationFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Samples obstacle_count trajectories for the mission. Every obstacle starts at
/// least start_clearance * R (horizontally) from the UAV start.
std::vector<ObstacleSpec> generate_obstacles(const MissionProfile& profile, const SafetyConfig& safety,
                                             const ObstacleGenConfig& gen, double uav_radius, Rng& rng);

/// Generator used by run_flight for a given seed; identical across policies.
Rng obstacle_rng(std::uint64_t seed, MissionKind kind);

struct TrackSnapshot {
    int id = 0;
    Vec3 position;
    Vec3 velocity;
    double tau = 0.0;
    double h = 0.0;
};

struct StepLog {
    double t = 0.0;
    UavState state;
    PositionReference ref;
    Vec3 mu_d;
    Vec3 mu;
    double delta = 0.0;
    double psi_d = 0.0;
    double yaw = 0.0;
    bool qp_infeasible = false;
    std::vector<double> barrier;  ///< B per obstacle (truth)
    std::vector<TrackSnapshot> tracks;  ///< seen tracks only
};

struct Verdict {
    bool collision_free = true;
    bool safe = true;
};

struct FlightRecord {
    std::uint64_t seed = 0;
    MissionKind profile = MissionKind::Infinity;
    PolicyKind policy = PolicyKind::SafetyAware;
    std::vector<ObstacleSpec> obstacles;
    double uav_radius = 0.0;

    std::vector<StepLog> steps;  ///< empty unless requested

    std::size_t step_count = 0;
    std::size_t infeasible_steps = 0;
    double min_barrier = std::numeric_limits<double>::infinity();
    double min_clearance = std::numeric_limits<double>::infinity();
    bool failed = false;  ///< numerical fault; counts as collision and unsafe
    std::string failure;

    // Steady-state tracking statistics over t >= settle_time.
    double max_position_error = 0.0;
    double rms_position_error = 0.0;
    double rms_yaw_error = 0.0;

    // Yaw policy timing.
    std::size_t yaw_calls = 0;
    std::size_t yaw_evaluations = 0;
    double yaw_time_total_us = 0.0;
    double yaw_time_max_us = 0.0;

    Verdict verdict;
};

/// Verdicts from the logged minima (or the per-step logs when present):
/// collision-free iff clearance > 0 throughout, safe iff B >= 0 throughout.
Verdict classify(const FlightRecord& record, const SafetyConfig& safety, double uav_radius);

struct FlightOptions {
    bool keep_steps = false;
};

/// Closed loop at 1/dt: sense, update tracks, choose yaw, LQR, QP filter,
/// force and attitude control, integrate.
FlightRecord run_flight(const Config& cfg, MissionKind profile, const YawPolicy& policy, std::uint64_t seed,
                        const FlightOptions& options = {});

/// Same loop on an explicit obstacle set.
FlightRecord run_flight(const Config& cfg, MissionKind profile, const YawPolicy& policy,
                        const std::vector<ObstacleSpec>& obstacles, std::uint64_t seed,
                        const FlightOptions& options = {});

/// Time since each exploration point and ring bearing was last inside the FOV.
struct ExplorationState {
    std::vector<double> point_tau;
    std::vector<double> ring_tau;
};

ExplorationState make_exploration(const ExplorationConfig& exploration);

/// A point or bearing counts as observed when it lies inside the FOV half-angle
/// (points must also be within range).
void update_exploration(ExplorationState& state, const ExplorationConfig& exploration, const UavState& uav,
                        double yaw, const SensorModel& sensor, double dt);

/// Density scene seen from the UAV: one peak per seen track plus, when exploration
/// is enabled, the exploration peaks and the optional path-preview point.
DensityScene build_scene(const UavState& uav, const std::vector<ObstacleTrack>& tracks, const RiskParams& risk,
                         const ExplorationConfig& exploration, const ExplorationState& explored,
                         const std::optional<Vec3>& preview = std::nullopt);

YawPolicy policy_from_config(const Config& cfg, PolicyKind kind);

struct RateInterval {
    double low = 0.0;
    double high = 1.0;
};

/// Wilson score interval at 95%.
RateInterval wilson_interval(std::size_t successes, std::size_t n);

struct PolicySummary {
    PolicyKind policy = PolicyKind::SafetyAware;
    MissionKind profile = MissionKind::Infinity;
    std::size_t n = 0;
    std::size_t collision_free = 0;
    std::size_t safe = 0;
    std::size_t failed = 0;
    std::size_t infeasible_steps = 0;
    std::size_t total_steps = 0;
    double min_barrier = std::numeric_limits<double>::infinity();
    double mean_solve_us = 0.0;
    double max_solve_us = 0.0;

    double collision_free_rate() const { return n ? static_cast<double>(collision_free) / n : 0.0; }
    double safe_rate() const { return n ? static_cast<double>(safe) / n : 0.0; }
};

struct BatchSummary {
    MissionKind profile = MissionKind::Infinity;
    std::uint64_t base_seed = 0;
    std::size_t runs = 0;
    std::vector<std::uint64_t> skipped_seeds;  ///< obstacle generation failed
    std::vector<PolicySummary> policies;
    /// Per-seed verdicts, policies in the same order as `policies`.
    std::vector<std::vector<Verdict>> verdicts;
};

/// Runs every policy on the same seeds base_seed .. base_seed + n_runs - 1.
/// Results do not depend on `jobs`.
BatchSummary monte_carlo(const Config& cfg, MissionKind profile, const std::vector<PolicyKind>& policies,
                         std::size_t n_runs, std::uint64_t base_seed, unsigned jobs);

}  // namespace safeyaw
