// Serialization of flight records, batch summaries, density scenes and run metadata.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "safeyaw/harness.hpp"

namespace safeyaw {

enum class RecordFormat { Csv, Jsonl };

RecordFormat record_format_from_string(const std::string& name);

/// One JSON object per logged step. Requires a record run with keep_steps.
void write_flight_jsonl(std::ostream& out, const FlightRecord& record);

/// Per-step CSV. Columns, in order:
///   t, x, y, z, vx, vy, vz, qw, qx, qy, qz, wx, wy, wz,
///   xd, yd, zd, mu_d_x, mu_d_y, mu_d_z, mu_x, mu_y, mu_z, delta,
///   psi_d, yaw, qp_infeasible, tracks_seen, B_0 .. B_{n-1}
void write_flight_csv(std::ostream& out, const FlightRecord& record);

/// Flight-level summary (verdict, minima, statistics) as a JSON object.
nlohmann::json flight_summary_json(const FlightRecord& record);

/// Summary table with the columns
///   policy, profile, n, collision_free_rate, safe_rate, ci_low, ci_high, mean_solve_us, max_solve_us
/// The interval belongs to the collision-free rate. Timing columns are left empty
/// when `timing` is false so the table is byte-reproducible.
void write_summary_csv(std::ostream& out, const std::vector<BatchSummary>& batches, bool timing);
std::string summary_csv(const std::vector<BatchSummary>& batches, bool timing);

/// Self-describing metadata: version, seeds, the full configuration and the
/// barrier-radius composition.
nlohmann::json run_metadata(const Config& cfg, const std::string& verb, std::uint64_t seed, std::size_t runs);

class SceneFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// {"peaks": [{"r": .., "theta": .., "alpha": .., "beta": ..}, ...]}
nlohmann::json scene_to_json(const DensityScene& scene);
/// Throws SceneFormatError naming the offending peak index.
DensityScene scene_from_json(const nlohmann::json& doc);

/// Objective sampled over the yaw grid: psi_rad, psi_deg, gamma_bar, optimal.
void write_scene_csv(std::ostream& out, const DensityScene& scene, const SensorModel& sensor,
                     const YawOptConfig& cfg, double psi_prev);

/// Mean optimal_yaw wall time per increment: increment_deg, grid_points, mean_solve_us.
struct SweepRow {
    double increment_deg = 0.0;
    std::size_t grid_points = 0;
    double mean_solve_us = 0.0;
};

/// Times optimal_yaw on `scenes` for each increment, `repeats` passes per increment.
std::vector<SweepRow> timing_sweep(const std::vector<DensityScene>& scenes, const SensorModel& sensor,
                                   const YawOptConfig& base, const std::vector<double>& increments_deg,
                                   int repeats);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Least-squares line y = a + b x and its coefficient of determination.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Random scenes for timing: `count` scenes of `peaks` peaks within range rho.
std::vector<DensityScene> random_scenes(std::size_t count, std::size_t peaks, double rho, std::uint64_t seed);

}  // namespace safeyaw
