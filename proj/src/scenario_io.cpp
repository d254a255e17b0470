#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "magnet/errors.hpp"
#include "magnet/scenario.hpp"

namespace magnet {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw InvalidConfig(field + ": " + what);
}

void require_positive(double v, const std::string& field) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be positive and finite");
}

void require_finite(double v, const std::string& field) {
    if (!std::isfinite(v)) fail(field, "must be finite");
}

void require_extent(Extent e, const std::string& field) {
    require_finite(e.min, field);
    require_finite(e.max, field);
    if (!(e.max > e.min)) fail(field, "max must exceed min");
}

// Reads JSON objects while tracking the dotted path for error messages and
// rejecting keys the schema does not know.
class Reader {
public:
    Reader(const json& node, std::string path, std::set<std::string> allowed)
        : node_(node), path_(std::move(path)), allowed_(std::move(allowed)) {
        if (!node_.is_object()) fail(path_, "expected an object");
        for (const auto& item : node_.items()) {
            if (!allowed_.count(item.key())) fail(field(item.key()), "unknown field");
        }
    }

    std::string field(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }
    bool has(const std::string& key) const { return node_.contains(key); }
    const json& raw(const std::string& key) const {
        if (!has(key)) fail(field(key), "missing required field");
        return node_.at(key);
    }

    double number(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number()) fail(field(key), "expected a number");
        return v.get<double>();
    }
    double number_or(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }
    std::optional<double> optional_number(const std::string& key,
                                          std::optional<double> fallback) const {
        return has(key) ? std::optional<double>(number(key)) : fallback;
    }
    long long integer(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number_integer()) fail(field(key), "expected an integer");
        return v.get<long long>();
    }
    std::string text(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_string()) fail(field(key), "expected a string");
        return v.get<std::string>();
    }
    std::vector<double> numbers(const std::string& key, std::size_t expected = 0) const {
        const json& v = raw(key);
        if (!v.is_array()) fail(field(key), "expected an array");
        if (expected != 0 && v.size() != expected) {
            fail(field(key), "expected " + std::to_string(expected) + " entries");
        }
        std::vector<double> out;
        for (const json& e : v) {
            if (!e.is_number()) fail(field(key), "expected numeric entries");
            out.push_back(e.get<double>());
        }
        return out;
    }
    Vec3 vec3(const std::string& key) const {
        const auto v = numbers(key, 3);
        return Vec3(v[0], v[1], v[2]);
    }
    Extent extent(const std::string& key) const {
        const auto v = numbers(key, 2);
        return Extent{v[0], v[1]};
    }
    ModelKind kind(const std::string& key) const {
        try {
            return parse_model_kind(text(key));
        } catch (const InvalidConfig&) {
            fail(field(key), "expected \"scalar\" or \"vector\"");
        }
    }
    std::vector<ModelKind> kinds(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) fail(field(key), "expected a non-empty array");
        std::vector<ModelKind> out;
        for (const json& e : v) {
            if (!e.is_string()) fail(field(key), "expected string entries");
            try {
                out.push_back(parse_model_kind(e.get<std::string>()));
            } catch (const InvalidConfig&) {
                fail(field(key), "expected \"scalar\" or \"vector\"");
            }
        }
        return out;
    }
    Reader child(const std::string& key, std::set<std::string> allowed) const {
        return Reader(raw(key), field(key), std::move(allowed));
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> allowed_;
};

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(Extent e) { return json::array({e.min, e.max}); }
json to_json(const std::vector<ModelKind>& kinds) {
    json out = json::array();
    for (ModelKind k : kinds) out.push_back(std::string(to_string(k)));
    return out;
}

ArraySpec read_array(const Reader& root) {
    const Reader r = root.child(
        "array", {"layout", "x_extent", "y_extent", "spacing_m", "depth_m", "positions_m", "model"});
    ArraySpec spec;
    spec.kind = r.kind("model");
    const std::string layout = r.text("layout");
    if (layout == "grid") {
        spec.layout = ArraySpec::Layout::kGrid;
        spec.x = r.extent("x_extent");
        spec.y = r.extent("y_extent");
        spec.spacing = r.number("spacing_m");
        spec.depth = r.number("depth_m");
    } else if (layout == "explicit") {
        spec.layout = ArraySpec::Layout::kExplicit;
        const json& list = r.raw("positions_m");
        if (!list.is_array()) fail(r.field("positions_m"), "expected an array of [x, y, z]");
        for (const json& p : list) {
            if (!p.is_array() || p.size() != 3) {
                fail(r.field("positions_m"), "each position needs 3 numbers");
            }
            for (const json& c : p) {
                if (!c.is_number()) fail(r.field("positions_m"), "expected numeric entries");
            }
            spec.positions.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
        }
    } else {
        fail(r.field("layout"), "expected \"grid\" or \"explicit\"");
    }
    return spec;
}

TrajectorySpec read_trajectory(const Reader& root) {
    const Reader r = root.child("trajectory", {"kind", "center_m", "radius_m", "speed_mps",
                                               "initial_bearing_rad", "start_m", "velocity_mps",
                                               "dt_s", "duration_s"});
    TrajectorySpec spec;
    const std::string kind = r.text("kind");
    if (kind == "circular") {
        spec.kind = TrajectorySpec::Kind::kCircular;
        spec.center = r.vec3("center_m");
        spec.radius = r.number("radius_m");
        spec.speed = r.number("speed_mps");
        spec.initial_bearing = r.number_or("initial_bearing_rad", 0.0);
    } else if (kind == "line") {
        spec.kind = TrajectorySpec::Kind::kLine;
        spec.start = r.vec3("start_m");
        spec.velocity = r.vec3("velocity_mps");
    } else {
        fail(r.field("kind"), "expected \"circular\" or \"line\"");
    }
    spec.dt = r.number("dt_s");
    spec.duration = r.number("duration_s");
    return spec;
}

ExperimentSpec read_experiment(const Reader& root) {
    ExperimentSpec spec;
    if (!root.has("experiment")) return spec;
    const Reader r = root.child(
        "experiment", {"runs", "master_seed", "failure_threshold_m", "map", "resilience"});
    if (r.has("runs")) spec.runs = static_cast<int>(r.integer("runs"));
    if (r.has("master_seed")) {
        const long long seed = r.integer("master_seed");
        if (seed < 0) fail(r.field("master_seed"), "must be non-negative");
        spec.master_seed = static_cast<std::uint64_t>(seed);
    }
    spec.failure_threshold_m = r.number_or("failure_threshold_m", spec.failure_threshold_m);
    if (r.has("map")) {
        const Reader m =
            r.child("map", {"x_extent", "y_extent", "nx", "ny", "target_z_m", "models"});
        MapSpec map;
        map.x = m.extent("x_extent");
        map.y = m.extent("y_extent");
        map.nx = static_cast<int>(m.integer("nx"));
        map.ny = static_cast<int>(m.integer("ny"));
        map.target_z = m.number_or("target_z_m", 0.0);
        map.kinds = m.kinds("models");
        spec.map = map;
    }
    if (r.has("resilience")) {
        const Reader s = r.child("resilience", {"failed_counts", "noise_levels_t", "models"});
        ResilienceSpec res;
        const json& counts = s.raw("failed_counts");
        if (!counts.is_array() || counts.empty()) {
            fail(s.field("failed_counts"), "expected a non-empty array");
        }
        for (const json& c : counts) {
            if (!c.is_number_integer()) fail(s.field("failed_counts"), "expected integers");
            res.failed_counts.push_back(c.get<int>());
        }
        res.noise_levels = s.numbers("noise_levels_t");
        res.kinds = s.kinds("models");
        spec.resilience = res;
    }
    return spec;
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
    const ArraySpec& a = cfg.array;
    if (a.layout == ArraySpec::Layout::kGrid) {
        if (!(a.x.max >= a.x.min) || !std::isfinite(a.x.min) || !std::isfinite(a.x.max)) {
            fail("array.x_extent", "max must not be below min");
        }
        if (!(a.y.max >= a.y.min) || !std::isfinite(a.y.min) || !std::isfinite(a.y.max)) {
            fail("array.y_extent", "max must not be below min");
        }
        require_positive(a.spacing, "array.spacing_m");
        require_finite(a.depth, "array.depth_m");
    } else if (a.positions.empty()) {
        fail("array.positions_m", "must list at least one sensor");
    }
    require_positive(cfg.noise_std, "noise.std_t");
    if (!cfg.moment.value.allFinite()) fail("target.moment_am2", "must be finite");

    if (cfg.trajectory) {
        const TrajectorySpec& t = *cfg.trajectory;
        require_positive(t.dt, "trajectory.dt_s");
        if (!(t.duration >= 0.0) || !std::isfinite(t.duration)) {
            fail("trajectory.duration_s", "must be non-negative");
        }
        if (t.kind == TrajectorySpec::Kind::kCircular) {
            require_positive(t.radius, "trajectory.radius_m");
            require_positive(t.speed, "trajectory.speed_mps");
            if (!t.center.allFinite()) fail("trajectory.center_m", "must be finite");
        } else if (!t.start.allFinite() || !t.velocity.allFinite()) {
            fail("trajectory.start_m", "start and velocity must be finite");
        }
    }

    const FilterSpec& f = cfg.filter;
    require_positive(f.kappa, "filter.kappa");
    if (!(f.jerk_psd >= 0.0) || !std::isfinite(f.jerk_psd)) {
        fail("filter.jerk_psd", "must be non-negative");
    }
    require_positive(f.init_position_std, "filter.init_position_std_m");
    require_positive(f.init_velocity_std, "filter.init_velocity_std_mps");
    require_positive(f.init_acceleration_std, "filter.init_acceleration_std_mps2");
    if (f.vertical_jerk_psd &&
        (!(*f.vertical_jerk_psd >= 0.0) || !std::isfinite(*f.vertical_jerk_psd))) {
        fail("filter.vertical_jerk_psd", "must be non-negative");
    }
    if (f.init_vertical_std) require_positive(*f.init_vertical_std, "filter.init_vertical_std_m");
    if (f.init_vertical_velocity_std) {
        require_positive(*f.init_vertical_velocity_std, "filter.init_vertical_velocity_std_mps");
    }

    const ExperimentSpec& e = cfg.experiment;
    if (e.runs < 1) fail("experiment.runs", "must be at least 1");
    require_positive(e.failure_threshold_m, "experiment.failure_threshold_m");
    if (e.map) {
        require_extent(e.map->x, "experiment.map.x_extent");
        require_extent(e.map->y, "experiment.map.y_extent");
        if (e.map->nx < 2) fail("experiment.map.nx", "must be at least 2");
        if (e.map->ny < 2) fail("experiment.map.ny", "must be at least 2");
        require_finite(e.map->target_z, "experiment.map.target_z_m");
        if (e.map->kinds.empty()) fail("experiment.map.models", "must not be empty");
    }
    if (e.resilience) {
        for (int c : e.resilience->failed_counts) {
            if (c < 0) fail("experiment.resilience.failed_counts", "must be non-negative");
        }
        for (double n : e.resilience->noise_levels) {
            require_positive(n, "experiment.resilience.noise_levels_t");
        }
        if (e.resilience->noise_levels.empty()) {
            fail("experiment.resilience.noise_levels_t", "must not be empty");
        }
    }
}

ScenarioConfig parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
    }
    const Reader root(doc, "",
                      {"name", "array", "noise", "target", "trajectory", "filter", "experiment"});
    ScenarioConfig cfg;
    cfg.name = root.has("name") ? root.text("name") : std::string();
    cfg.array = read_array(root);
    cfg.noise_std = root.child("noise", {"std_t"}).number("std_t");
    cfg.moment = MagneticMoment(root.child("target", {"moment_am2"}).vec3("moment_am2"));
    if (root.has("trajectory")) cfg.trajectory = read_trajectory(root);
    if (root.has("filter")) {
        const Reader f = root.child(
            "filter", {"kappa", "jerk_psd", "vertical_jerk_psd", "init_position_std_m",
                       "init_vertical_std_m", "init_velocity_std_mps",
                       "init_vertical_velocity_std_mps", "init_acceleration_std_mps2"});
        cfg.filter.kappa = f.number_or("kappa", cfg.filter.kappa);
        cfg.filter.jerk_psd = f.number_or("jerk_psd", cfg.filter.jerk_psd);
        cfg.filter.init_position_std =
            f.number_or("init_position_std_m", cfg.filter.init_position_std);
        cfg.filter.init_velocity_std =
            f.number_or("init_velocity_std_mps", cfg.filter.init_velocity_std);
        cfg.filter.init_acceleration_std =
            f.number_or("init_acceleration_std_mps2", cfg.filter.init_acceleration_std);
        cfg.filter.vertical_jerk_psd =
            f.optional_number("vertical_jerk_psd", cfg.filter.vertical_jerk_psd);
        cfg.filter.init_vertical_std =
            f.optional_number("init_vertical_std_m", cfg.filter.init_vertical_std);
        cfg.filter.init_vertical_velocity_std = f.optional_number(
            "init_vertical_velocity_std_mps", cfg.filter.init_vertical_velocity_std);
    }
    cfg.experiment = read_experiment(root);
    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfig(path + ": cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
    json doc;
    doc["name"] = cfg.name;

    json array;
    array["model"] = std::string(to_string(cfg.array.kind));
    if (cfg.array.layout == ArraySpec::Layout::kGrid) {
        array["layout"] = "grid";
        array["x_extent"] = to_json(cfg.array.x);
        array["y_extent"] = to_json(cfg.array.y);
        array["spacing_m"] = cfg.array.spacing;
        array["depth_m"] = cfg.array.depth;
    } else {
        array["layout"] = "explicit";
        json list = json::array();
        for (const Vec3& p : cfg.array.positions) list.push_back(to_json(p));
        array["positions_m"] = list;
    }
    doc["array"] = array;
    doc["noise"] = {{"std_t", cfg.noise_std}};
    doc["target"] = {{"moment_am2", to_json(cfg.moment.value)}};

    if (cfg.trajectory) {
        const TrajectorySpec& t = *cfg.trajectory;
        json traj;
        if (t.kind == TrajectorySpec::Kind::kCircular) {
            traj["kind"] = "circular";
            traj["center_m"] = to_json(t.center);
            traj["radius_m"] = t.radius;
            traj["speed_mps"] = t.speed;
            traj["initial_bearing_rad"] = t.initial_bearing;
        } else {
            traj["kind"] = "line";
            traj["start_m"] = to_json(t.start);
            traj["velocity_mps"] = to_json(t.velocity);
        }
        traj["dt_s"] = t.dt;
        traj["duration_s"] = t.duration;
        doc["trajectory"] = traj;
    }

    doc["filter"] = {{"kappa", cfg.filter.kappa},
                     {"jerk_psd", cfg.filter.jerk_psd},
                     {"init_position_std_m", cfg.filter.init_position_std},
                     {"init_velocity_std_mps", cfg.filter.init_velocity_std},
                     {"init_acceleration_std_mps2", cfg.filter.init_acceleration_std}};
    if (cfg.filter.vertical_jerk_psd) {
        doc["filter"]["vertical_jerk_psd"] = *cfg.filter.vertical_jerk_psd;
    }
    if (cfg.filter.init_vertical_std) {
        doc["filter"]["init_vertical_std_m"] = *cfg.filter.init_vertical_std;
    }
    if (cfg.filter.init_vertical_velocity_std) {
        doc["filter"]["init_vertical_velocity_std_mps"] = *cfg.filter.init_vertical_velocity_std;
    }

    const ExperimentSpec& e = cfg.experiment;
    json exp{{"runs", e.runs},
             {"master_seed", e.master_seed},
             {"failure_threshold_m", e.failure_threshold_m}};
    if (e.map) {
        exp["map"] = {{"x_extent", to_json(e.map->x)}, {"y_extent", to_json(e.map->y)},
                      {"nx", e.map->nx},                {"ny", e.map->ny},
                      {"target_z_m", e.map->target_z}, {"models", to_json(e.map->kinds)}};
    }
    if (e.resilience) {
        exp["resilience"] = {{"failed_counts", e.resilience->failed_counts},
                             {"noise_levels_t", e.resilience->noise_levels},
                             {"models", to_json(e.resilience->kinds)}};
    }
    doc["experiment"] = exp;
    return doc.dump(2) + "\n";
}

SensorArray build_array(const ScenarioConfig& cfg) {
    const ArraySpec& a = cfg.array;
    if (a.layout == ArraySpec::Layout::kGrid) {
        return grid_array(a.x, a.y, a.spacing, a.depth, a.kind, cfg.noise_std);
    }
    return SensorArray(a.positions, a.kind, cfg.noise_std);
}

Trajectory build_trajectory(const ScenarioConfig& cfg) {
    if (!cfg.trajectory) throw InvalidConfig("trajectory: scenario has no trajectory section");
    const TrajectorySpec& t = *cfg.trajectory;
    if (t.kind == TrajectorySpec::Kind::kCircular) {
        return circular_trajectory(t.center, t.radius, t.speed, t.dt, t.duration,
                                   t.initial_bearing);
    }
    return line_trajectory(t.start, t.velocity, t.dt, t.duration);
}

ProcessModel build_process_model(const ScenarioConfig& cfg) {
    ProcessModel pm;
    pm.dt = cfg.trajectory ? cfg.trajectory->dt : 1.0;
    pm.jerk_psd = cfg.filter.jerk_psd;
    pm.vertical_jerk_psd = cfg.filter.vertical_jerk_psd;
    return pm;
}

UkfConfig build_ukf_config(const ScenarioConfig& cfg) {
    UkfConfig u;
    u.kappa = cfg.filter.kappa;
    return u;
}

}  // namespace magnet
