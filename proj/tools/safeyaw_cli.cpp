// Command-line front end.
//
//   safeyaw fly    --profile infinity --policy safety_aware --seed 3 --out flight.csv
//   safeyaw batch  --runs 100 --jobs 8 --out summary.csv
//   safeyaw scene  scene.json --increment 9
//   safeyaw sweep  --increment 18 --increment 9 --increment 4.5 --increment 2.25
//
// Exit codes: 0 success (for fly: the flight was safe), 1 safety violation,
// 2 configuration or usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "safeyaw/record_io.hpp"

using namespace safeyaw;

namespace {

constexpr int kExitSafe = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;

struct Options {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string policy;
    std::string profile;
    std::size_t runs = 100;
    std::string out;
    std::string format = "csv";
    unsigned jobs = 0;
    std::vector<double> increments;
    std::string scene_path;
    double psi_prev_deg = 0.0;
    int repeats = 20;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Config load(const Options& o) {
    Config cfg = o.config_path.empty() ? Config{} : load_config(o.config_path);
    if (o.increments.size() == 1) {
        cfg.perception.yaw.increment = o.increments.front() * kPi / 180.0;
        validate(cfg);
    }
    return cfg;
}

std::vector<MissionKind> profiles_of(const Options& o) {
    if (o.profile.empty()) return {MissionKind::Infinity, MissionKind::Corridor};
    return {mission_kind_from_string(o.profile)};
}

std::vector<PolicyKind> policies_of(const Options& o) {
    if (o.policy.empty())
        return {PolicyKind::Fixed, PolicyKind::LookAhead, PolicyKind::NearestObstacle, PolicyKind::SafetyAware};
    return {policy_kind_from_string(o.policy)};
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + path + "'");
    return f;
}

void write_meta(const std::string& out, const nlohmann::json& meta) {
    if (out.empty()) return;
    auto f = open_out(out + ".meta.json");
    f << meta.dump(2) << '\n';
}

int cmd_fly(const Options& o) {
    const Config cfg = load(o);
    const MissionKind profile = o.profile.empty() ? MissionKind::Infinity : mission_kind_from_string(o.profile);
    const PolicyKind policy = o.policy.empty() ? PolicyKind::SafetyAware : policy_kind_from_string(o.policy);
    const RecordFormat format = record_format_from_string(o.format);

    const FlightRecord rec = run_flight(cfg, profile, policy_from_config(cfg, policy), o.seed, {true});

    auto emit = [&](std::ostream& os) {
        if (format == RecordFormat::Csv) write_flight_csv(os, rec);
        else write_flight_jsonl(os, rec);
    };
    if (o.out.empty()) {
        emit(std::cout);
    } else {
        auto f = open_out(o.out);
        emit(f);
        nlohmann::json meta = run_metadata(cfg, "fly", o.seed, 1);
        meta["flight"] = flight_summary_json(rec);
        write_meta(o.out, meta);
    }
    std::printf("verdict profile=%s policy=%s seed=%llu collision_free=%d safe=%d min_B=%.6g infeasible_steps=%zu%s\n",
                to_string(profile).c_str(), to_string(policy).c_str(), static_cast<unsigned long long>(o.seed),
                rec.verdict.collision_free ? 1 : 0, rec.verdict.safe ? 1 : 0, rec.min_barrier, rec.infeasible_steps,
                rec.failed ? (" failed=" + rec.failure).c_str() : "");
    return rec.verdict.safe ? kExitSafe : kExitViolation;
}

int cmd_batch(const Options& o) {
    const Config cfg = load(o);
    if (o.runs < 1) throw UsageError("--runs must be >= 1");
    const unsigned jobs = o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
    std::optional<std::ofstream> file;
    if (!o.out.empty()) file = open_out(o.out);

    std::vector<BatchSummary> batches;
    for (MissionKind profile : profiles_of(o))
        batches.push_back(monte_carlo(cfg, profile, policies_of(o), o.runs, o.seed, jobs));

    const std::string csv = summary_csv(batches, cfg.output.timing);
    if (file) {
        *file << csv;
        nlohmann::json meta = run_metadata(cfg, "batch", o.seed, o.runs);
        meta["jobs"] = jobs;
        nlohmann::json skipped = nlohmann::json::object();
        for (const BatchSummary& b : batches) skipped[to_string(b.profile)] = b.skipped_seeds;
        meta["skipped_seeds"] = skipped;
        write_meta(o.out, meta);
    } else {
        std::cout << csv;
    }

    std::FILE* table = file ? stdout : stderr;
    std::fprintf(table, "%-10s %-13s %5s %15s %9s %17s\n", "profile", "policy", "n", "collision_free", "safe",
                 "95% CI (cf)");
    for (const BatchSummary& b : batches) {
        for (const PolicySummary& p : b.policies) {
            const RateInterval ci = wilson_interval(p.collision_free, p.n);
            std::fprintf(table, "%-10s %-13s %5zu %14.1f%% %8.1f%%   [%5.1f%%, %5.1f%%]\n", to_string(b.profile).c_str(),
                         to_string(p.policy).c_str(), p.n, 100.0 * p.collision_free_rate(), 100.0 * p.safe_rate(),
                         100.0 * ci.low, 100.0 * ci.high);
        }
        if (!b.skipped_seeds.empty())
            std::fprintf(table, "%s: %zu seeds skipped (obstacle placement failed)\n", to_string(b.profile).c_str(),
                         b.skipped_seeds.size());
    }
    return kExitSafe;
}

int cmd_scene(const Options& o) {
    const Config cfg = load(o);
    std::ifstream in(o.scene_path);
    if (!in) throw UsageError("cannot read scene '" + o.scene_path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SceneFormatError(std::string("scene: ") + e.what());
    }
    const DensityScene scene = scene_from_json(doc);
    const double psi_prev = wrap_angle(o.psi_prev_deg * kPi / 180.0);
    if (o.out.empty()) {
        write_scene_csv(std::cout, scene, cfg.perception.sensor, cfg.perception.yaw, psi_prev);
    } else {
        auto f = open_out(o.out);
        write_scene_csv(f, scene, cfg.perception.sensor, cfg.perception.yaw, psi_prev);
    }
    const YawDecision d = optimal_yaw(scene, cfg.perception.sensor, cfg.perception.yaw, psi_prev);
    std::fprintf(o.out.empty() ? stderr : stdout, "psi_d = %.6f rad (%.3f deg), objective %.9g\n", d.psi,
                 d.psi * 180.0 / kPi, d.value);
    return kExitSafe;
}

int cmd_sweep(const Options& o) {
    Config cfg = o.config_path.empty() ? Config{} : load_config(o.config_path);
    const std::vector<double> incs = o.increments.empty() ? std::vector<double>{18.0, 9.0, 4.5, 2.25} : o.increments;
    for (double inc : incs) {
        YawOptConfig y = cfg.perception.yaw;
        y.increment = inc * kPi / 180.0;
        cfg.perception.yaw = y;
        validate(cfg);
    }
    const auto scenes = random_scenes(50, 5, cfg.perception.sensor.rho, o.seed);
    const auto rows = timing_sweep(scenes, cfg.perception.sensor, cfg.perception.yaw, incs, o.repeats);
    if (o.out.empty()) {
        write_sweep_csv(std::cout, rows);
    } else {
        auto f = open_out(o.out);
        write_sweep_csv(f, rows);
        write_meta(o.out, run_metadata(cfg, "sweep", o.seed, static_cast<std::size_t>(o.repeats)));
    }
    std::vector<double> x, y;
    for (const SweepRow& r : rows) {
        x.push_back(static_cast<double>(r.grid_points));
        y.push_back(r.mean_solve_us);
    }
    const LinearFit fit = fit_line(x, y);
    std::fprintf(o.out.empty() ? stderr : stdout, "linear fit: %.4f us/point + %.3f us, R^2 = %.5f\n", fit.slope,
                 fit.intercept, fit.r_squared);
    return kExitSafe;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safety-aware yaw perception and CBF safety filter simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Seed (batch: first seed)");
        sub->add_option("--out", o.out, "Output path (default: standard output)");
    };

    CLI::App* fly = app.add_subcommand("fly", "Run one closed-loop flight and write its record");
    common(fly);
    fly->add_option("--policy", o.policy, "fixed | look_ahead | nearest | safety_aware");
    fly->add_option("--profile", o.profile, "infinity | corridor");
    fly->add_option("--format", o.format, "csv | jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    fly->add_option("--increment", o.increments, "Yaw search increment [deg]")->expected(1);

    CLI::App* batch = app.add_subcommand("batch", "Paired Monte-Carlo comparison; writes the summary CSV");
    common(batch);
    batch->add_option("--policy", o.policy, "Single policy (default: all four)");
    batch->add_option("--profile", o.profile, "Single profile (default: both)");
    batch->add_option("--runs", o.runs, "Flights per policy and profile");
    batch->add_option("--jobs", o.jobs, "Worker threads (default: available cores)");
    batch->add_option("--increment", o.increments, "Yaw search increment [deg]")->expected(1);

    CLI::App* scene = app.add_subcommand("scene", "Evaluate the yaw objective over the grid for a scene JSON");
    common(scene);
    scene->add_option("scene", o.scene_path, "Scene JSON file")->required();
    scene->add_option("--increment", o.increments, "Yaw search increment [deg]")->expected(1);
    scene->add_option("--psi-prev", o.psi_prev_deg, "Previous yaw reference [deg]");

    CLI::App* sweep = app.add_subcommand("sweep", "Mean optimal-yaw solve time against search increment");
    common(sweep);
    sweep->add_option("--increment", o.increments, "Increment [deg]; repeat for several");
    sweep->add_option("--runs", o.repeats, "Passes over the timing scenes per increment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (fly->parsed()) return cmd_fly(o);
        if (batch->parsed()) return cmd_batch(o);
        if (scene->parsed()) return cmd_scene(o);
        return cmd_sweep(o);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
    } catch (const SceneFormatError& e) {
        std::fprintf(stderr, "scene error: %s\n", e.what());
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
    }
    return kExitConfig;
}
