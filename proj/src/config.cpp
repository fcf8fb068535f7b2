#include "safeyaw/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace safeyaw {

using nlohmann::json;

std::string to_string(MissionKind kind) { return kind == MissionKind::Infinity ? "infinity" : "corridor"; }

MissionKind mission_kind_from_string(const std::string& name) {
    if (name == "infinity" || name == "infinity_track") return MissionKind::Infinity;
    if (name == "corridor" || name == "sine_corridor") return MissionKind::Corridor;
    throw ConfigError("unknown profile '" + name + "'");
}

MissionProfile MissionProfile::infinity_track() { return MissionProfile{}; }

MissionProfile MissionProfile::sine_corridor() {
    MissionProfile p;
    p.kind = MissionKind::Corridor;
    p.duration = 20.0;
    p.period = 5.0;
    p.obstacle_count = 20;
    return p;
}

namespace {

constexpr double kDeg = kPi / 180.0;

void require(bool ok, const std::string& field, const std::string& rule) {
    if (!ok) throw ConfigError(field + ": " + rule);
}

void require_positive(double v, const std::string& field) { require(v > 0.0 && std::isfinite(v), field, "must be > 0"); }

void require_positive(const Vec3& v, const std::string& field) {
    require(v.x > 0.0 && v.y > 0.0 && v.z > 0.0 && is_finite(v), field, "entries must be > 0");
}

void validate_mission(const MissionProfile& m, const std::string& f) {
    require_positive(m.duration, f + ".duration");
    require_positive(m.period, f + ".period");
    require(m.obstacle_count >= 0, f + ".obstacle_count", "must be >= 0");
    require(m.extent_x >= 0.0 && m.extent_y >= 0.0, f + ".extent", "must be >= 0");
    require(m.amplitude >= 0.0, f + ".amplitude", "must be >= 0");
    require(m.corridor_lo.x <= m.corridor_hi.x && m.corridor_lo.y <= m.corridor_hi.y &&
                m.corridor_lo.z <= m.corridor_hi.z,
            f + ".corridor_lo", "must be <= corridor_hi componentwise");
}

}  // namespace

void validate(const Config& c) {
    require_positive(c.uav.mass, "uav.mass");
    require_positive(c.uav.inertia, "uav.inertia");
    require_positive(c.uav.max_yaw_rate, "uav.max_yaw_rate");
    require(c.uav.mu_min.x < c.uav.mu_max.x && c.uav.mu_min.y < c.uav.mu_max.y && c.uav.mu_min.z < c.uav.mu_max.z,
            "uav.mu_min", "must be < uav.mu_max componentwise");
    require(c.uav.mu_min.z > kGravity.z, "uav.mu_min", "z bound must exceed -9.81 so thrust stays positive");
    require(c.uav.radius >= 0.0, "uav.radius", "must be >= 0");

    require_positive(c.lqr.q_pos, "lqr.q_pos");
    require(c.lqr.q_vel >= 0.0, "lqr.q_vel", "must be >= 0");
    require_positive(c.lqr.r, "lqr.r");
    require_positive(c.attitude.k_q, "attitude.k_q");
    require_positive(c.attitude.k_omega, "attitude.k_omega");

    require(c.cbf.zeta >= 1.0, "cbf.zeta", "must be >= 1 (characteristic roots of the exponential CBF must be real and negative)");
    require_positive(c.cbf.omega_n, "cbf.omega_n");

    require_positive(c.qp.h_diag, "qp.h_diag");
    require_positive(c.qp.xi, "qp.xi");
    require_positive(c.qp.clf_rate, "qp.clf_rate");

    const auto& r = c.perception.risk;
    require_positive(r.alpha_obs, "perception.risk.alpha_obs");
    require_positive(r.gamma, "perception.risk.gamma");
    require_positive(r.beta_obs, "perception.risk.beta_obs");
    require_positive(r.lambda, "perception.risk.lambda");
    const auto& s = c.perception.sensor;
    require(s.sigma > 0.0 && s.sigma <= kPi, "perception.sensor.sigma_deg", "must lie in (0, 180]");
    require(s.mode == QualityMode::Binary || (s.kappa >= s.sigma && s.kappa <= kPi),
            "perception.sensor.kappa_deg", "must lie in [sigma, 180] in degraded mode");
    require_positive(s.rho, "perception.sensor.range");
    const auto& y = c.perception.yaw;
    require(y.epsilon >= 0.0, "perception.yaw.epsilon", "must be >= 0");
    require(y.increment > 0.0 && yaw_grid_size(y.increment) >= 8, "perception.yaw.increment_deg",
            "must divide the circle into at least 8 samples");
    require(y.quadrature_points >= 16, "perception.yaw.quadrature_points", "must be >= 16");
    const auto& e = c.perception.exploration;
    require_positive(e.alpha, "perception.exploration.alpha");
    require_positive(e.beta_obs, "perception.exploration.beta_obs");
    require_positive(e.lambda, "perception.exploration.lambda");
    require(e.ring_count >= 0 && e.ring_count <= 360, "perception.exploration.ring_count", "must be in [0, 360]");
    require_positive(e.ring_radius, "perception.exploration.ring_radius");
    require(e.preview_time >= 0.0 && std::isfinite(e.preview_time), "perception.exploration.preview_time",
            "must be finite and >= 0");

    require(c.baselines.look_ahead_time >= 0.0, "baselines.look_ahead_time", "must be >= 0");

    require_positive(c.safety.obstacle_radius_true, "safety.obstacle_radius");
    require(c.safety.safety_factor >= 1.0, "safety.safety_factor", "must be >= 1");

    const auto& o = c.obstacles;
    require(o.speed_min >= 0.0 && o.speed_min <= o.speed_max, "obstacles.speed_min", "must lie in [0, speed_max]");
    require(o.cross_time_min >= 0.0, "obstacles.cross_time_min", "must be >= 0");
    require(o.cross_time_margin >= 0.0, "obstacles.cross_time_margin", "must be >= 0");
    require(o.aim_spread >= 0.0, "obstacles.aim_spread", "must be >= 0");
    require(o.start_clearance >= 1.0, "obstacles.start_clearance", "must be >= 1");
    require(o.max_attempts >= 1, "obstacles.max_attempts", "must be >= 1");

    validate_mission(c.infinity, "missions.infinity");
    validate_mission(c.corridor, "missions.corridor");
    require(c.infinity.kind == MissionKind::Infinity, "missions.infinity", "wrong kind");
    require(c.corridor.kind == MissionKind::Corridor, "missions.corridor", "wrong kind");

    require(c.sim.dt > 0.0 && c.sim.dt <= 0.01, "sim.dt", "must lie in (0, 0.01]");
    require(c.sim.settle_time >= 0.0, "sim.settle_time", "must be >= 0");
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json mission_json(const MissionProfile& m) {
    json j;
    j["duration"] = m.duration;
    j["period"] = m.period;
    j["altitude"] = m.altitude;
    j["obstacle_count"] = m.obstacle_count;
    if (m.kind == MissionKind::Infinity) {
        j["center"] = vec(m.center);
        j["extent_x"] = m.extent_x;
        j["extent_y"] = m.extent_y;
    } else {
        j["start_x"] = m.start_x;
        j["forward_speed"] = m.forward_speed;
        j["amplitude"] = m.amplitude;
        j["corridor_lo"] = vec(m.corridor_lo);
        j["corridor_hi"] = vec(m.corridor_hi);
    }
    return j;
}

// Reads one JSON object, remembering which keys were consumed so that any
// leftover key can be reported.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "config: must be an object" : path_ + ": must be an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        auto it = obj_.find(key);
        if (it == obj_.end()) return nullptr;
        used_.insert(key);
        return &*it;
    }

    void number(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw ConfigError(field(key) + ": must be a number");
            out = v->get<double>();
        }
    }

    void degrees(const std::string& key, double& out_rad) {
        double deg = out_rad / kDeg;
        number(key, deg);
        out_rad = deg * kDeg;
    }

    void integer(const std::string& key, int& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) throw ConfigError(field(key) + ": must be an integer");
            out = v->get<int>();
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw ConfigError(field(key) + ": must be true or false");
            out = v->get<bool>();
        }
    }

    void string(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(field(key) + ": must be a string");
            out = v->get<std::string>();
        }
    }

    void vec3(const std::string& key, Vec3& out) {
        if (const json* v = find(key)) {
            if (!v->is_array() || v->size() != 3 || !(*v)[0].is_number() || !(*v)[1].is_number() ||
                !(*v)[2].is_number())
                throw ConfigError(field(key) + ": must be an array of 3 numbers");
            out = {(*v)[0].get<double>(), (*v)[1].get<double>(), (*v)[2].get<double>()};
        }
    }

    template <typename Fn>
    void child(const std::string& key, Fn&& fn) {
        if (const json* v = find(key)) {
            Section sub(*v, field(key));
            fn(sub);
            sub.finish();
        }
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!used_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> used_;
};

void read_mission(Section& s, MissionProfile& m) {
    s.number("duration", m.duration);
    s.number("period", m.period);
    s.number("altitude", m.altitude);
    s.integer("obstacle_count", m.obstacle_count);
    if (m.kind == MissionKind::Infinity) {
        s.vec3("center", m.center);
        s.number("extent_x", m.extent_x);
        s.number("extent_y", m.extent_y);
    } else {
        s.number("start_x", m.start_x);
        s.number("forward_speed", m.forward_speed);
        s.number("amplitude", m.amplitude);
        s.vec3("corridor_lo", m.corridor_lo);
        s.vec3("corridor_hi", m.corridor_hi);
    }
}

}  // namespace

json to_json(const Config& c) {
    json j;
    j["uav"] = {{"mass", c.uav.mass},
                {"inertia", vec(c.uav.inertia)},
                {"mu_min", vec(c.uav.mu_min)},
                {"mu_max", vec(c.uav.mu_max)},
                {"radius", c.uav.radius},
                {"max_yaw_rate", c.uav.max_yaw_rate}};
    j["lqr"] = {{"q_pos", c.lqr.q_pos}, {"q_vel", c.lqr.q_vel}, {"r", c.lqr.r}};
    j["attitude"] = {{"k_q", c.attitude.k_q}, {"k_omega", c.attitude.k_omega}};
    j["cbf"] = {{"zeta", c.cbf.zeta}, {"omega_n", c.cbf.omega_n}};
    j["qp"] = {{"h_diag", vec(c.qp.h_diag)}, {"xi", c.qp.xi}, {"use_clf", c.qp.use_clf}, {"clf_rate", c.qp.clf_rate}};

    const auto& p = c.perception;
    json points = json::array();
    for (const Vec3& pt : p.exploration.points) points.push_back(json::array({pt.x, pt.y}));
    j["perception"] = {
        {"risk",
         {{"alpha_obs", p.risk.alpha_obs}, {"gamma", p.risk.gamma}, {"beta_obs", p.risk.beta_obs}, {"lambda", p.risk.lambda}}},
        {"sensor",
         {{"sigma_deg", p.sensor.sigma / kDeg},
          {"kappa_deg", p.sensor.kappa / kDeg},
          {"range", p.sensor.rho},
          {"mode", p.sensor.mode == QualityMode::Binary ? "binary" : "degraded"}}},
        {"yaw",
         {{"epsilon", p.yaw.epsilon},
          {"increment_deg", p.yaw.increment / kDeg},
          {"quadrature_points", p.yaw.quadrature_points}}},
        {"exploration",
         {{"enabled", p.exploration.enabled},
          {"alpha", p.exploration.alpha},
          {"beta_obs", p.exploration.beta_obs},
          {"lambda", p.exploration.lambda},
          {"points", points},
          {"ring_count", p.exploration.ring_count},
          {"ring_radius", p.exploration.ring_radius},
          {"preview_time", p.exploration.preview_time}}}};
    j["baselines"] = {{"fixed_yaw_deg", c.baselines.fixed_yaw / kDeg}, {"look_ahead_time", c.baselines.look_ahead_time}};
    j["safety"] = {{"obstacle_radius", c.safety.obstacle_radius_true}, {"safety_factor", c.safety.safety_factor}};
    j["obstacles"] = {{"speed_min", c.obstacles.speed_min},
                      {"speed_max", c.obstacles.speed_max},
                      {"cross_time_min", c.obstacles.cross_time_min},
                      {"cross_time_margin", c.obstacles.cross_time_margin},
                      {"aim_spread", c.obstacles.aim_spread},
                      {"start_clearance", c.obstacles.start_clearance},
                      {"max_attempts", c.obstacles.max_attempts}};
    j["missions"] = {{"infinity", mission_json(c.infinity)}, {"corridor", mission_json(c.corridor)}};
    j["sim"] = {{"dt", c.sim.dt},
                {"omniscient", c.sim.omniscient},
                {"coast", c.sim.coast == CoastMode::ConstantVelocity ? "constant_velocity" : "hold"},
                {"settle_time", c.sim.settle_time}};
    j["output"] = {{"timing", c.output.timing}};
    return j;
}

Config config_from_json(const json& doc) {
    Config c;
    Section root(doc, "");
    root.child("uav", [&](Section& s) {
        s.number("mass", c.uav.mass);
        s.vec3("inertia", c.uav.inertia);
        s.vec3("mu_min", c.uav.mu_min);
        s.vec3("mu_max", c.uav.mu_max);
        s.number("radius", c.uav.radius);
        s.number("max_yaw_rate", c.uav.max_yaw_rate);
    });
    root.child("lqr", [&](Section& s) {
        s.number("q_pos", c.lqr.q_pos);
        s.number("q_vel", c.lqr.q_vel);
        s.number("r", c.lqr.r);
    });
    root.child("attitude", [&](Section& s) {
        s.number("k_q", c.attitude.k_q);
        s.number("k_omega", c.attitude.k_omega);
    });
    root.child("cbf", [&](Section& s) {
        s.number("zeta", c.cbf.zeta);
        s.number("omega_n", c.cbf.omega_n);
    });
    root.child("qp", [&](Section& s) {
        s.vec3("h_diag", c.qp.h_diag);
        s.number("xi", c.qp.xi);
        s.boolean("use_clf", c.qp.use_clf);
        s.number("clf_rate", c.qp.clf_rate);
    });
    root.child("perception", [&](Section& s) {
        auto& p = c.perception;
        s.child("risk", [&](Section& r) {
            r.number("alpha_obs", p.risk.alpha_obs);
            r.number("gamma", p.risk.gamma);
            r.number("beta_obs", p.risk.beta_obs);
            r.number("lambda", p.risk.lambda);
        });
        s.child("sensor", [&](Section& r) {
            r.degrees("sigma_deg", p.sensor.sigma);
            r.degrees("kappa_deg", p.sensor.kappa);
            r.number("range", p.sensor.rho);
            std::string mode = p.sensor.mode == QualityMode::Binary ? "binary" : "degraded";
            r.string("mode", mode);
            if (mode == "binary") p.sensor.mode = QualityMode::Binary;
            else if (mode == "degraded") p.sensor.mode = QualityMode::Degraded;
            else throw ConfigError(r.field("mode") + ": must be 'binary' or 'degraded'");
        });
        s.child("yaw", [&](Section& r) {
            r.number("epsilon", p.yaw.epsilon);
            r.degrees("increment_deg", p.yaw.increment);
            r.integer("quadrature_points", p.yaw.quadrature_points);
        });
        s.child("exploration", [&](Section& r) {
            r.boolean("enabled", p.exploration.enabled);
            r.number("alpha", p.exploration.alpha);
            r.number("beta_obs", p.exploration.beta_obs);
            r.number("lambda", p.exploration.lambda);
            r.integer("ring_count", p.exploration.ring_count);
            r.number("ring_radius", p.exploration.ring_radius);
            r.number("preview_time", p.exploration.preview_time);
            if (const json* pts = r.find("points")) {
                if (!pts->is_array()) throw ConfigError(r.field("points") + ": must be an array of [x, y]");
                p.exploration.points.clear();
                for (const json& pt : *pts) {
                    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
                        throw ConfigError(r.field("points") + ": every entry must be [x, y]");
                    p.exploration.points.push_back({pt[0].get<double>(), pt[1].get<double>(), 0.0});
                }
            }
        });
    });
    root.child("baselines", [&](Section& s) {
        s.degrees("fixed_yaw_deg", c.baselines.fixed_yaw);
        s.number("look_ahead_time", c.baselines.look_ahead_time);
    });
    root.child("safety", [&](Section& s) {
        s.number("obstacle_radius", c.safety.obstacle_radius_true);
        s.number("safety_factor", c.safety.safety_factor);
    });
    root.child("obstacles", [&](Section& s) {
        s.number("speed_min", c.obstacles.speed_min);
        s.number("speed_max", c.obstacles.speed_max);
        s.number("cross_time_min", c.obstacles.cross_time_min);
        s.number("cross_time_margin", c.obstacles.cross_time_margin);
        s.number("aim_spread", c.obstacles.aim_spread);
        s.number("start_clearance", c.obstacles.start_clearance);
        s.integer("max_attempts", c.obstacles.max_attempts);
    });
    root.child("missions", [&](Section& s) {
        s.child("infinity", [&](Section& m) { read_mission(m, c.infinity); });
        s.child("corridor", [&](Section& m) { read_mission(m, c.corridor); });
    });
    root.child("sim", [&](Section& s) {
        s.number("dt", c.sim.dt);
        s.boolean("omniscient", c.sim.omniscient);
        std::string coast = c.sim.coast == CoastMode::ConstantVelocity ? "constant_velocity" : "hold";
        s.string("coast", coast);
        if (coast == "constant_velocity") c.sim.coast = CoastMode::ConstantVelocity;
        else if (coast == "hold") c.sim.coast = CoastMode::HoldPosition;
        else throw ConfigError(s.field("coast") + ": must be 'constant_velocity' or 'hold'");
        s.number("settle_time", c.sim.settle_time);
    });
    root.child("output", [&](Section& s) { s.boolean("timing", c.output.timing); });
    root.finish();
    validate(c);
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config: cannot read '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("--config: '" + path + "' is not valid JSON (" + e.what() + ")");
    }
    return config_from_json(doc);
}

}  // namespace safeyaw
