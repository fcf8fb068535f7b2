#include "safeyaw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace safeyaw {

PositionReference reference_at(const MissionProfile& profile, double t) {
    const bool clamped = t < 0.0 || t > profile.duration;
    const double tc = std::clamp(t, 0.0, profile.duration);
    const double w = kTwoPi / profile.period;
    PositionReference ref;
    if (profile.kind == MissionKind::Infinity) {
        const double a = profile.extent_x;
        const double b = profile.extent_y;
        const double s1 = std::sin(w * tc), c1 = std::cos(w * tc);
        const double s2 = std::sin(2.0 * w * tc), c2 = std::cos(2.0 * w * tc);
        ref.r_d = {profile.center.x + a * s1, profile.center.y + 0.5 * b * s2, profile.altitude};
        ref.v_d = {a * w * c1, b * w * c2, 0.0};
        ref.a_d = {-a * w * w * s1, -2.0 * b * w * w * s2, 0.0};
    } else {
        const double a = profile.amplitude;
        const double s = std::sin(w * tc), c = std::cos(w * tc);
        ref.r_d = {profile.start_x + profile.forward_speed * tc, a * s, profile.altitude};
        ref.v_d = {profile.forward_speed, a * w * c, 0.0};
        ref.a_d = {0.0, -a * w * w * s, 0.0};
    }
    if (clamped) {
        ref.v_d = {};
        ref.a_d = {};
    }
    return ref;
}

Rng obstacle_rng(std::uint64_t seed, MissionKind kind) {
    return Rng(seed).derive(kind == MissionKind::Infinity ? 1 : 2);
}

std::vector<ObstacleSpec> generate_obstacles(const MissionProfile& profile, const SafetyConfig& safety,
                                             const ObstacleGenConfig& gen, double uav_radius, Rng& rng) {
    const double radius = safety.barrier_radius(uav_radius);
    const Vec3 start = reference_at(profile, 0.0).r_d;
    std::vector<ObstacleSpec> out;
    out.reserve(profile.obstacle_count);

    for (int i = 0; i < profile.obstacle_count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < gen.max_attempts && !placed; ++attempt) {
            const double heading = rng.uniform(-kPi, kPi);
            const double speed = rng.uniform(gen.speed_min, gen.speed_max);
            const Vec3 u{speed * std::cos(heading), speed * std::sin(heading), 0.0};

            ObstacleSpec spec;
            spec.radius_true = safety.obstacle_radius_true;
            spec.radius_barrier = radius;
            spec.trajectory.kind = TrajectoryKind::Linear;
            spec.trajectory.velocity = u;

            if (profile.kind == MissionKind::Infinity) {
                // Aim at a point of the reference path so the obstacle crosses it.
                const double t_hi = std::max(gen.cross_time_min, profile.duration - gen.cross_time_margin);
                const double t_cross = rng.uniform(gen.cross_time_min, t_hi);
                const double ang = rng.uniform(-kPi, kPi);
                const double rad = gen.aim_spread * std::sqrt(rng.uniform());
                const Vec3 aim = reference_at(profile, t_cross).r_d + Vec3{rad * std::cos(ang), rad * std::sin(ang), 0.0};
                spec.trajectory.anchor = aim - t_cross * u;
                spec.trajectory.anchor.z = profile.altitude;
            } else {
                const Vec3& lo = profile.corridor_lo;
                const Vec3& hi = profile.corridor_hi;
                spec.trajectory.anchor = {rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y), profile.altitude};
                spec.trajectory.box.enabled = true;
                spec.trajectory.box.lo = {lo.x, lo.y, profile.altitude};
                spec.trajectory.box.hi = {hi.x, hi.y, profile.altitude};
            }
            placed = horizontal_distance(spec.trajectory.anchor, start) >= gen.start_clearance * radius;
            if (placed) out.push_back(spec);
        }
        if (!placed) throw GenerationFault("generate_obstacles: could not place obstacle " + std::to_string(i));
    }
    return out;
}

ExplorationState make_exploration(const ExplorationConfig& exploration) {
    ExplorationState st;
    st.point_tau.assign(exploration.points.size(), 0.0);
    st.ring_tau.assign(static_cast<std::size_t>(exploration.ring_count), 0.0);
    return st;
}

namespace {

double ring_bearing(std::size_t j, std::size_t count) {
    return wrap_angle(-kPi + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(count));
}

void push_peak(DensityScene& scene, const UavState& uav, const Vec3& p, double alpha, double beta) {
    DensityPeak pk;
    pk.r = horizontal_distance(uav.r, p);
    pk.theta = pk.r > 0.0 ? horizontal_bearing(uav.r, p) : 0.0;
    pk.alpha = alpha;
    pk.beta = beta;
    scene.peaks.push_back(pk);
}

}  // namespace

void update_exploration(ExplorationState& state, const ExplorationConfig& exploration, const UavState& uav,
                        double yaw, const SensorModel& sensor, double dt) {
    for (std::size_t i = 0; i < state.point_tau.size(); ++i) {
        const Vec3& p = exploration.points[i];
        const bool seen = horizontal_distance(uav.r, p) <= sensor.rho &&
                          std::abs(wrap_angle(horizontal_bearing(uav.r, p) - yaw)) <= sensor.sigma;
        state.point_tau[i] = seen ? 0.0 : state.point_tau[i] + dt;
    }
    const std::size_t n = state.ring_tau.size();
    for (std::size_t j = 0; j < n; ++j) {
        const bool seen = std::abs(wrap_angle(ring_bearing(j, n) - yaw)) <= sensor.sigma;
        state.ring_tau[j] = seen ? 0.0 : state.ring_tau[j] + dt;
    }
}

DensityScene build_scene(const UavState& uav, const std::vector<ObstacleTrack>& tracks, const RiskParams& risk,
                         const ExplorationConfig& exploration, const ExplorationState& explored,
                         const std::optional<Vec3>& preview) {
    DensityScene scene;
    for (const ObstacleTrack& t : tracks) {
        if (!t.ever_seen) continue;
        push_peak(scene, uav, t.position, risk_alpha(t.h, risk), confidence_beta(t.tau, risk));
    }
    if (!exploration.enabled) return scene;

    // Staleness weight; a point observed this very step contributes nothing.
    auto stale = [&](double tau) { return exploration.alpha * -std::expm1(-exploration.lambda * tau); };
    for (std::size_t i = 0; i < exploration.points.size() && i < explored.point_tau.size(); ++i) {
        const double a = stale(explored.point_tau[i]);
        if (a > 0.0) push_peak(scene, uav, exploration.points[i], a, exploration.beta_obs);
    }
    const std::size_t n = explored.ring_tau.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double a = stale(explored.ring_tau[j]);
        if (a <= 0.0) continue;
        const double th = ring_bearing(j, n);
        const Vec3 p{uav.r.x + exploration.ring_radius * std::cos(th), uav.r.y + exploration.ring_radius * std::sin(th),
                     uav.r.z};
        push_peak(scene, uav, p, a, exploration.beta_obs);
    }
    if (preview && horizontal_distance(uav.r, *preview) > 0.0)
        push_peak(scene, uav, *preview, exploration.alpha, exploration.beta_obs);
    return scene;
}

YawPolicy policy_from_config(const Config& cfg, PolicyKind kind) {
    YawPolicy p;
    p.kind = kind;
    p.fixed_value = cfg.baselines.fixed_yaw;
    return p;
}

Verdict classify(const FlightRecord& record, const SafetyConfig& safety, double uav_radius) {
    Verdict v;
    if (record.failed) return {false, false};
    double min_b = record.min_barrier;
    double min_c = record.min_clearance;
    if (!record.steps.empty()) {
        min_b = std::numeric_limits<double>::infinity();
        min_c = std::numeric_limits<double>::infinity();
        for (const StepLog& s : record.steps) {
            for (std::size_t i = 0; i < s.barrier.size(); ++i) {
                const bool known = i < record.obstacles.size();
                const double radius_true = known ? record.obstacles[i].radius_true : safety.obstacle_radius_true;
                const double radius_barrier =
                    known ? record.obstacles[i].radius_barrier : safety.barrier_radius(uav_radius);
                min_b = std::min(min_b, s.barrier[i]);
                // distance = B + R
                min_c = std::min(min_c, s.barrier[i] + radius_barrier - radius_true - uav_radius);
            }
        }
    }
    v.collision_free = min_c > 0.0;
    v.safe = min_b >= 0.0;
    return v;
}

namespace {

double elapsed_us(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

FlightRecord run_flight(const Config& cfg, MissionKind profile_kind, const YawPolicy& policy, std::uint64_t seed,
                        const FlightOptions& options) {
    const MissionProfile& profile = cfg.mission(profile_kind);
    Rng rng = obstacle_rng(seed, profile_kind);
    const auto obstacles = generate_obstacles(profile, cfg.safety, cfg.obstacles, cfg.uav.radius, rng);
    return run_flight(cfg, profile_kind, policy, obstacles, seed, options);
}

FlightRecord run_flight(const Config& cfg, MissionKind profile_kind, const YawPolicy& policy,
                        const std::vector<ObstacleSpec>& obstacles, std::uint64_t seed, const FlightOptions& options) {
    const MissionProfile& profile = cfg.mission(profile_kind);
    const LqrGain gain = lqr_synthesize(cfg.lqr.q_pos, cfg.lqr.q_vel, cfg.lqr.r);
    const double dt = cfg.sim.dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(profile.duration / dt));
    const auto& perception = cfg.perception;

    FlightRecord rec;
    rec.seed = seed;
    rec.profile = profile_kind;
    rec.policy = policy.kind;
    rec.obstacles = obstacles;
    rec.uav_radius = cfg.uav.radius;
    if (options.keep_steps) rec.steps.reserve(n_steps);

    const PositionReference ref0 = reference_at(profile, 0.0);
    UavState state{ref0.r_d, ref0.v_d, Quat::identity(), {}};
    double psi_d = yaw_of(state.q);
    Quat q_d_prev = state.q;

    const std::size_t n_obs = obstacles.size();
    std::vector<ObstacleState> truth(n_obs);
    auto truth_at = [&](double t) {
        for (std::size_t i = 0; i < n_obs; ++i)
            truth[i] = obstacle_state_at(obstacles[i].trajectory, obstacles[i].radius_true,
                                         obstacles[i].radius_barrier, t);
    };
    truth_at(0.0);
    std::vector<ObstacleTrack> tracks = make_tracks(truth);
    std::vector<bool> detections(n_obs, false);
    ExplorationState explored = make_exploration(perception.exploration);

    double sq_pos = 0.0, sq_yaw = 0.0;
    std::size_t n_settled = 0;

    QpProblem problem;
    problem.h_diag = cfg.qp.h_diag;
    problem.xi = cfg.qp.xi;
    problem.use_clf = cfg.qp.use_clf;
    problem.mu_min = cfg.uav.mu_min;
    problem.mu_max = cfg.uav.mu_max;

    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const PositionReference ref = reference_at(profile, t);
        truth_at(t);
        const double yaw = yaw_of(state.q);

        // Sense.
        for (std::size_t i = 0; i < n_obs; ++i)
            detections[i] = cfg.sim.omniscient || detect(state, yaw, perception.sensor, truth[i]);
        const Vec3 mu_d = position_control(state, ref, gain);
        update_tracks(tracks, detections, truth, dt, {state, mu_d, cfg.cbf, cfg.sim.coast});
        update_exploration(explored, perception.exploration, state, yaw, perception.sensor, dt);

        // Yaw reference, slewed to the vehicle's yaw-rate limit.
        const double psi_prev = psi_d;
        const auto t0 = std::chrono::steady_clock::now();
        switch (policy.kind) {
            case PolicyKind::Fixed:
                psi_d = fixed_yaw(policy);
                break;
            case PolicyKind::LookAhead:
                psi_d = look_ahead(state, reference_at(profile, t + cfg.baselines.look_ahead_time), psi_d);
                break;
            case PolicyKind::NearestObstacle:
                psi_d = nearest_obstacle(state, tracks, reference_at(profile, t + cfg.baselines.look_ahead_time), psi_d);
                break;
            case PolicyKind::SafetyAware: {
                std::optional<Vec3> preview;
                if (perception.exploration.preview_time > 0.0)
                    preview = reference_at(profile, t + perception.exploration.preview_time).r_d;
                const DensityScene scene =
                    build_scene(state, tracks, perception.risk, perception.exploration, explored, preview);
                const YawDecision d = optimal_yaw(scene, perception.sensor, perception.yaw, psi_d);
                psi_d = d.psi;
                rec.yaw_evaluations += d.evaluations;
                break;
            }
        }
        const double solve_us = elapsed_us(t0);
        const double max_step = cfg.uav.max_yaw_rate * dt;
        psi_d = wrap_angle(psi_prev + std::clamp(wrap_angle(psi_d - psi_prev), -max_step, max_step));
        rec.yaw_calls += 1;
        rec.yaw_time_total_us += solve_us;
        rec.yaw_time_max_us = std::max(rec.yaw_time_max_us, solve_us);

        // Safety filter.
        problem.mu_d = mu_d;
        problem.cbf.clear();
        for (std::size_t i = 0; i < n_obs; ++i) {
            if (!tracks[i].ever_seen) continue;
            const ObstacleState est = cfg.sim.omniscient ? truth[i] : track_obstacle(tracks[i]);
            if (norm(est.r_c - state.r) <= 1e-9) continue;
            problem.cbf.push_back(cbf_row(state, mu_d, est, est.a_c, cfg.cbf));
        }
        if (problem.use_clf) problem.clf = clf_row(state, ref, cfg.qp.clf_rate);
        const QpSolution sol = solve_qp(problem);
        if (sol.status == QpStatus::Infeasible) ++rec.infeasible_steps;

        // Force, attitude, torque.
        const Vec3 f_d = force_from_mu(sol.mu, cfg.uav.mass);
        Quat q_d = q_d_prev;
        try {
            q_d = compose_desired_attitude(f_d, psi_d);
        } catch (const DegenerateThrust&) {
        }
        // Angular-velocity feedforward from the step-to-step change of q_d.
        Quat dq = quat_error(q_d_prev, q_d);
        if (dq.w < 0.0) dq = Quat{-dq.w, -dq.x, -dq.y, -dq.z};
        const Vec3 omega_d = k == 0 ? Vec3{} : (2.0 / dt) * Vec3{dq.x, dq.y, dq.z};
        q_d_prev = q_d;
        const Vec3 torque = attitude_control(state, q_d, omega_d, {}, cfg.attitude, cfg.uav.inertia);
        const double thrust = thrust_along_body(f_d, state.q);

        // Metrics on the pre-step state.
        StepLog log;
        if (options.keep_steps) log.barrier.resize(n_obs);
        for (std::size_t i = 0; i < n_obs; ++i) {
            const double dist = norm(truth[i].r_c - state.r);
            const double b = dist - obstacles[i].radius_barrier;
            rec.min_barrier = std::min(rec.min_barrier, b);
            rec.min_clearance = std::min(rec.min_clearance, dist - obstacles[i].radius_true - cfg.uav.radius);
            if (options.keep_steps) log.barrier[i] = b;
        }
        if (t >= cfg.sim.settle_time) {
            const double e = norm(ref.r_d - state.r);
            const double ey = wrap_angle(psi_d - yaw);
            rec.max_position_error = std::max(rec.max_position_error, e);
            sq_pos += e * e;
            sq_yaw += ey * ey;
            ++n_settled;
        }
        if (options.keep_steps) {
            log.t = t;
            log.state = state;
            log.ref = ref;
            log.mu_d = mu_d;
            log.mu = sol.mu;
            log.delta = sol.delta;
            log.psi_d = psi_d;
            log.yaw = yaw;
            log.qp_infeasible = sol.status == QpStatus::Infeasible;
            for (const ObstacleTrack& tr : tracks)
                if (tr.ever_seen) log.tracks.push_back({tr.id, tr.position, tr.velocity, tr.tau, tr.h});
            rec.steps.push_back(std::move(log));
        }
        ++rec.step_count;

        try {
            state = step_uav(state, cfg.uav, thrust, torque, dt);
        } catch (const DynamicsFault& e) {
            rec.failed = true;
            rec.failure = e.what();
            break;
        }
    }

    if (n_settled > 0) {
        rec.rms_position_error = std::sqrt(sq_pos / static_cast<double>(n_settled));
        rec.rms_yaw_error = std::sqrt(sq_yaw / static_cast<double>(n_settled));
    }
    rec.verdict = classify(rec, cfg.safety, cfg.uav.radius);
    return rec;
}

RateInterval wilson_interval(std::size_t successes, std::size_t n) {
    if (n == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double denom = 1.0 + z * z / nn;
    const double center = (p + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

BatchSummary monte_carlo(const Config& cfg, MissionKind profile_kind, const std::vector<PolicyKind>& policies,
                         std::size_t n_runs, std::uint64_t base_seed, unsigned jobs) {
    if (n_runs < 1) throw std::invalid_argument("monte_carlo: n_runs must be >= 1");
    const MissionProfile& profile = cfg.mission(profile_kind);

    BatchSummary out;
    out.profile = profile_kind;
    out.base_seed = base_seed;
    out.runs = n_runs;

    // Obstacle fields first, so every policy flies the same worlds.
    std::vector<std::uint64_t> seeds;
    std::vector<std::vector<ObstacleSpec>> worlds;
    for (std::size_t i = 0; i < n_runs; ++i) {
        const std::uint64_t seed = base_seed + i;
        Rng rng = obstacle_rng(seed, profile_kind);
        try {
            worlds.push_back(generate_obstacles(profile, cfg.safety, cfg.obstacles, cfg.uav.radius, rng));
            seeds.push_back(seed);
        } catch (const GenerationFault&) {
            out.skipped_seeds.push_back(seed);
        }
    }

    struct Outcome {
        Verdict verdict;
        bool failed = false;
        std::size_t infeasible = 0;
        std::size_t steps = 0;
        double min_barrier = 0.0;
        std::size_t yaw_calls = 0;
        double yaw_total = 0.0;
        double yaw_max = 0.0;
    };
    const std::size_t n_pol = policies.size();
    std::vector<Outcome> outcomes(seeds.size() * n_pol);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t task = next++; task < outcomes.size(); task = next++) {
            const std::size_t s = task / n_pol;
            const std::size_t p = task % n_pol;
            const FlightRecord rec = run_flight(cfg, profile_kind, policy_from_config(cfg, policies[p]), worlds[s], seeds[s]);
            outcomes[task] = {rec.verdict,   rec.failed,        rec.infeasible_steps, rec.step_count,
                              rec.min_barrier, rec.yaw_calls, rec.yaw_time_total_us, rec.yaw_time_max_us};
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(outcomes.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    out.verdicts.assign(seeds.size(), std::vector<Verdict>(n_pol));
    for (std::size_t p = 0; p < n_pol; ++p) {
        PolicySummary sum;
        sum.policy = policies[p];
        sum.profile = profile_kind;
        std::size_t calls = 0;
        double total = 0.0;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const Outcome& o = outcomes[s * n_pol + p];
            out.verdicts[s][p] = o.verdict;
            ++sum.n;
            sum.collision_free += o.verdict.collision_free ? 1 : 0;
            sum.safe += o.verdict.safe ? 1 : 0;
            sum.failed += o.failed ? 1 : 0;
            sum.infeasible_steps += o.infeasible;
            sum.total_steps += o.steps;
            sum.min_barrier = std::min(sum.min_barrier, o.min_barrier);
            calls += o.yaw_calls;
            total += o.yaw_total;
            sum.max_solve_us = std::max(sum.max_solve_us, o.yaw_max);
        }
        sum.mean_solve_us = calls ? total / static_cast<double>(calls) : 0.0;
        out.policies.push_back(sum);
    }
    return out;
}

}  // namespace safeyaw
