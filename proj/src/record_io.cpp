#include "safeyaw/record_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace safeyaw {

using nlohmann::json;

namespace {

// Shortest text that round-trips the double.
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

RecordFormat record_format_from_string(const std::string& name) {
    if (name == "csv") return RecordFormat::Csv;
    if (name == "jsonl") return RecordFormat::Jsonl;
    throw std::invalid_argument("unknown format '" + name + "' (expected csv or jsonl)");
}

void write_flight_jsonl(std::ostream& out, const FlightRecord& record) {
    for (const StepLog& s : record.steps) {
        json tracks = json::array();
        for (const TrackSnapshot& tr : s.tracks)
            tracks.push_back({{"id", tr.id},
                              {"position", vec(tr.position)},
                              {"velocity", vec(tr.velocity)},
                              {"tau", tr.tau},
                              {"h", tr.h}});
        const json line = {{"t", s.t},
                           {"r", vec(s.state.r)},
                           {"v", vec(s.state.v)},
                           {"q", json::array({s.state.q.w, s.state.q.x, s.state.q.y, s.state.q.z})},
                           {"omega", vec(s.state.omega)},
                           {"r_d", vec(s.ref.r_d)},
                           {"mu_d", vec(s.mu_d)},
                           {"mu", vec(s.mu)},
                           {"delta", s.delta},
                           {"psi_d", s.psi_d},
                           {"yaw", s.yaw},
                           {"qp_infeasible", s.qp_infeasible},
                           {"barrier", s.barrier},
                           {"tracks", tracks}};
        out << line.dump() << '\n';
    }
}

void write_flight_csv(std::ostream& out, const FlightRecord& record) {
    out << "t,x,y,z,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,xd,yd,zd,mu_d_x,mu_d_y,mu_d_z,mu_x,mu_y,mu_z,delta,"
           "psi_d,yaw,qp_infeasible,tracks_seen";
    for (std::size_t i = 0; i < record.obstacles.size(); ++i) out << ",B_" << i;
    out << '\n';
    for (const StepLog& s : record.steps) {
        const auto& st = s.state;
        const double row[] = {s.t,        st.r.x,     st.r.y,     st.r.z,     st.v.x,     st.v.y,     st.v.z,
                              st.q.w,     st.q.x,     st.q.y,     st.q.z,     st.omega.x, st.omega.y, st.omega.z,
                              s.ref.r_d.x, s.ref.r_d.y, s.ref.r_d.z, s.mu_d.x, s.mu_d.y, s.mu_d.z, s.mu.x,
                              s.mu.y,     s.mu.z,     s.delta,    s.psi_d,    s.yaw};
        bool first = true;
        for (double v : row) {
            if (!first) out << ',';
            out << num(v);
            first = false;
        }
        out << ',' << (s.qp_infeasible ? 1 : 0) << ',' << s.tracks.size();
        for (double b : s.barrier) out << ',' << num(b);
        out << '\n';
    }
}

json flight_summary_json(const FlightRecord& record) {
    json obstacles = json::array();
    for (const ObstacleSpec& o : record.obstacles) {
        const auto& tr = o.trajectory;
        obstacles.push_back({{"kind", to_string(tr.kind)},
                             {"anchor", vec(tr.anchor)},
                             {"velocity", vec(tr.velocity)},
                             {"amplitude", vec(tr.amplitude)},
                             {"frequency", tr.frequency},
                             {"phase", tr.phase},
                             {"radius_true", o.radius_true},
                             {"radius_barrier", o.radius_barrier}});
    }
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"seed", record.seed},
            {"profile", to_string(record.profile)},
            {"policy", to_string(record.policy)},
            {"collision_free", record.verdict.collision_free},
            {"safe", record.verdict.safe},
            {"failed", record.failed},
            {"failure", record.failure},
            {"steps", record.step_count},
            {"infeasible_steps", record.infeasible_steps},
            {"min_barrier", finite_or_null(record.min_barrier)},
            {"min_clearance", finite_or_null(record.min_clearance)},
            {"max_position_error", record.max_position_error},
            {"rms_position_error", record.rms_position_error},
            {"rms_yaw_error_deg", record.rms_yaw_error * 180.0 / kPi},
            {"yaw_calls", record.yaw_calls},
            {"yaw_evaluations", record.yaw_evaluations},
            {"obstacles", obstacles}};
}

void write_summary_csv(std::ostream& out, const std::vector<BatchSummary>& batches, bool timing) {
    out << "policy,profile,n,collision_free_rate,safe_rate,ci_low,ci_high,mean_solve_us,max_solve_us\n";
    for (const BatchSummary& b : batches) {
        for (const PolicySummary& p : b.policies) {
            const RateInterval ci = wilson_interval(p.collision_free, p.n);
            out << to_string(p.policy) << ',' << to_string(p.profile) << ',' << p.n << ','
                << fixed(p.collision_free_rate(), 4) << ',' << fixed(p.safe_rate(), 4) << ',' << fixed(ci.low, 4)
                << ',' << fixed(ci.high, 4) << ',';
            if (timing) out << fixed(p.mean_solve_us, 3) << ',' << fixed(p.max_solve_us, 3);
            else out << ',';
            out << '\n';
        }
    }
}

std::string summary_csv(const std::vector<BatchSummary>& batches, bool timing) {
    std::ostringstream os;
    write_summary_csv(os, batches, timing);
    return os.str();
}

json run_metadata(const Config& cfg, const std::string& verb, std::uint64_t seed, std::size_t runs) {
    const double r_b = cfg.safety.barrier_radius(cfg.uav.radius);
    return {{"version", kVersion},
            {"verb", verb},
            {"seed", seed},
            {"runs", runs},
            {"barrier_radius",
             {{"formula", "safety_factor * (obstacle_radius_true + uav_radius)"},
              {"safety_factor", cfg.safety.safety_factor},
              {"obstacle_radius_true", cfg.safety.obstacle_radius_true},
              {"uav_radius", cfg.uav.radius},
              {"value", r_b}}},
            {"config", to_json(cfg)}};
}

json scene_to_json(const DensityScene& scene) {
    json peaks = json::array();
    for (const DensityPeak& p : scene.peaks)
        peaks.push_back({{"r", p.r}, {"theta", p.theta}, {"alpha", p.alpha}, {"beta", p.beta}});
    return {{"peaks", peaks}};
}

DensityScene scene_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("peaks") || !doc.at("peaks").is_array())
        throw SceneFormatError("scene: expected an object with a 'peaks' array");
    DensityScene scene;
    const json& peaks = doc.at("peaks");
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        const json& p = peaks[i];
        const std::string where = "scene.peaks[" + std::to_string(i) + "]";
        if (!p.is_object()) throw SceneFormatError(where + ": expected an object");
        for (auto it = p.begin(); it != p.end(); ++it) {
            const std::string& k = it.key();
            if (k != "r" && k != "theta" && k != "alpha" && k != "beta")
                throw SceneFormatError(where + ": unknown key '" + k + "'");
        }
        auto get = [&](const char* key) {
            if (!p.contains(key) || !p.at(key).is_number())
                throw SceneFormatError(where + ": '" + key + "' must be a number");
            const double v = p.at(key).get<double>();
            if (!std::isfinite(v)) throw SceneFormatError(where + ": '" + key + "' must be finite");
            return v;
        };
        DensityPeak pk;
        pk.r = get("r");
        pk.theta = get("theta");
        pk.alpha = get("alpha");
        pk.beta = get("beta");
        if (pk.r < 0.0) throw SceneFormatError(where + ": 'r' must be >= 0");
        if (pk.alpha <= 0.0) throw SceneFormatError(where + ": 'alpha' must be > 0");
        if (pk.beta <= 0.0) throw SceneFormatError(where + ": 'beta' must be > 0");
        pk.theta = wrap_angle(pk.theta);
        scene.peaks.push_back(pk);
    }
    return scene;
}

void write_scene_csv(std::ostream& out, const DensityScene& scene, const SensorModel& sensor,
                     const YawOptConfig& cfg, double psi_prev) {
    std::vector<double> values;
    const YawDecision d = optimal_yaw(scene, sensor, cfg, psi_prev, &values);
    const std::size_t n = values.size();
    out << "psi_rad,psi_deg,gamma_bar,optimal\n";
    for (std::size_t j = 0; j < n; ++j) {
        const double psi = yaw_grid_point(j, n);
        out << num(psi) << ',' << num(psi * 180.0 / kPi) << ',' << num(values[j]) << ',' << (psi == d.psi ? 1 : 0)
            << '\n';
    }
}

std::vector<SweepRow> timing_sweep(const std::vector<DensityScene>& scenes, const SensorModel& sensor,
                                   const YawOptConfig& base, const std::vector<double>& increments_deg,
                                   int repeats) {
    std::vector<SweepRow> rows;
    volatile double sink = 0.0;
    for (double inc : increments_deg) {
        YawOptConfig cfg = base;
        cfg.increment = inc * kPi / 180.0;
        std::size_t calls = 0;
        const auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < repeats; ++r) {
            for (const DensityScene& s : scenes) {
                sink = sink + optimal_yaw(s, sensor, cfg, 0.0).value;
                ++calls;
            }
        }
        const double us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back({inc, yaw_grid_size(cfg.increment), calls ? us / static_cast<double>(calls) : 0.0});
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "increment_deg,grid_points,mean_solve_us\n";
    for (const SweepRow& r : rows) out << num(r.increment_deg) << ',' << r.grid_points << ',' << fixed(r.mean_solve_us, 3) << '\n';
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit fit;
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return fit;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

std::vector<DensityScene> random_scenes(std::size_t count, std::size_t peaks, double rho, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<DensityScene> out(count);
    for (DensityScene& s : out) {
        for (std::size_t k = 0; k < peaks; ++k) {
            DensityPeak p;
            p.r = rng.uniform(0.2, rho);
            p.theta = rng.uniform(-kPi, kPi);
            p.alpha = rng.uniform(0.05, 1.0);
            p.beta = rng.uniform(0.5, 10.0);
            s.peaks.push_back(p);
        }
    }
    return out;
}

}  // namespace safeyaw
