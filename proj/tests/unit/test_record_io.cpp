#include "doctest.h"

#include <sstream>

#include "safeyaw/record_io.hpp"

using namespace safeyaw;
using nlohmann::json;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::size_t fields(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

}  // namespace

TEST_CASE("flight CSV and JSONL have one row per step") {
    Config cfg;
    cfg.infinity.duration = 0.1;
    cfg.obstacles.cross_time_min = 0.0;
    cfg.obstacles.cross_time_margin = 0.0;
    cfg.obstacles.start_clearance = 1.0;
    const auto rec = run_flight(cfg, MissionKind::Infinity, policy_from_config(cfg, PolicyKind::LookAhead), 1, {true});
    std::ostringstream csv, jsonl;
    write_flight_csv(csv, rec);
    write_flight_jsonl(jsonl, rec);
    const auto rows = lines_of(csv.str());
    REQUIRE(rows.size() == rec.steps.size() + 1);
    CHECK(rows[0].rfind("t,x,y,z,", 0) == 0);
    CHECK(fields(rows[0]) == 28 + rec.obstacles.size());
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(fields(rows[i]) == fields(rows[0]));
    const auto jl = lines_of(jsonl.str());
    REQUIRE(jl.size() == rec.steps.size());
    const json first = json::parse(jl.front());
    CHECK(first["t"].get<double>() == 0.0);
    CHECK(first["barrier"].size() == rec.obstacles.size());
    const json summary = flight_summary_json(rec);
    CHECK(summary["steps"].get<std::size_t>() == rec.step_count);
}

TEST_CASE("summary CSV layout") {
    BatchSummary b;
    b.profile = MissionKind::Corridor;
    PolicySummary p;
    p.policy = PolicyKind::LookAhead;
    p.profile = MissionKind::Corridor;
    p.n = 10;
    p.collision_free = 8;
    p.safe = 7;
    p.mean_solve_us = 1.5;
    p.max_solve_us = 9.25;
    b.policies = {p};
    const auto with = lines_of(summary_csv({b}, true));
    REQUIRE(with.size() == 2);
    CHECK(with[0] == "policy,profile,n,collision_free_rate,safe_rate,ci_low,ci_high,mean_solve_us,max_solve_us");
    const RateInterval ci = wilson_interval(8, 10);
    char expected[256];
    std::snprintf(expected, sizeof expected, "look_ahead,corridor,10,0.8000,0.7000,%.4f,%.4f,1.500,9.250", ci.low,
                  ci.high);
    CHECK(with[1] == expected);
    const auto without = lines_of(summary_csv({b}, false));
    CHECK(without[1].substr(without[1].size() - 2) == ",,");
}

TEST_CASE("scene JSON round trip and validation") {
    const DensityScene s{{{1.0, 0.5, 0.3, 2.0}, {2.5, -2.0, 1.0, 9.0}}};
    const DensityScene back = scene_from_json(scene_to_json(s));
    REQUIRE(back.peaks.size() == 2);
    CHECK(back.peaks[1].theta == -2.0);
    CHECK(back.peaks[1].beta == 9.0);

    auto error_of = [](const char* text) {
        try {
            scene_from_json(json::parse(text));
        } catch (const SceneFormatError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(error_of(R"({"peaks": [{"r": 1, "theta": 0, "alpha": 1, "beta": 1}, {"r": 1, "theta": 0, "alpha": -1, "beta": 1}]})")
              .find("peaks[1]") != std::string::npos);
    CHECK(error_of(R"({"peaks": [{"r": 1, "theta": 0, "alpha": 1}]})").find("peaks[0]") != std::string::npos);
    CHECK(error_of(R"({"peaks": [{"r": 1, "theta": 0, "alpha": 1, "beta": 1, "z": 2}]})").find("'z'") !=
          std::string::npos);
    CHECK_FALSE(error_of(R"({"nope": []})").empty());
}

TEST_CASE("scene CSV covers the grid and flags the optimum") {
    const SensorModel sensor;
    YawOptConfig cfg;
    std::ostringstream os;
    write_scene_csv(os, {}, sensor, cfg, 0.0);
    const auto rows = lines_of(os.str());
    REQUIRE(rows.size() == 41);
    int flagged = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].find(",0,") != std::string::npos);  // zero objective
        flagged += rows[i].back() == '1';
    }
    CHECK(flagged == 1);
    CHECK(rows[21].rfind("0,0,0,1", 0) == 0);  // psi_prev = 0 is a grid point

    std::ostringstream peak;
    write_scene_csv(peak, {{{1.5, 1.0, 1.0, 8.0}}}, sensor, cfg, 0.0);
    const auto prow = lines_of(peak.str());
    for (std::size_t i = 1; i < prow.size(); ++i) {
        if (prow[i].back() != '1') continue;
        const double psi = std::stod(prow[i].substr(0, prow[i].find(',')));
        CHECK(std::abs(psi - 1.0) <= cfg.increment / 2);
    }
}

TEST_CASE("line fit and timing sweep") {
    const LinearFit f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r_squared == doctest::Approx(1.0));
    const auto scenes = random_scenes(3, 2, 3.0, 1);
    const auto rows = timing_sweep(scenes, SensorModel{}, YawOptConfig{}, {18.0, 9.0}, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].grid_points == 20);
    CHECK(rows[1].grid_points == 40);
    std::ostringstream os;
    write_sweep_csv(os, rows);
    CHECK(lines_of(os.str())[0] == "increment_deg,grid_points,mean_solve_us");
}

TEST_CASE("metadata embeds version, seed and the full configuration") {
    const Config cfg;
    const json meta = run_metadata(cfg, "batch", 7, 100);
    CHECK(meta["version"] == kVersion);
    CHECK(meta["seed"] == 7);
    CHECK(meta["barrier_radius"]["value"].get<double>() == doctest::Approx(0.24));
    CHECK(config_from_json(meta["config"]).qp.xi == cfg.qp.xi);
}
