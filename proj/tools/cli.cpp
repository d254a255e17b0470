#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "magnet/crlb.hpp"
#include "magnet/errors.hpp"
#include "magnet/experiments.hpp"
#include "magnet/scenario.hpp"
#include "magnet/ukf.hpp"

namespace magnet::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kToolVersion = "1.0.0";

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    unsigned threads = 0;
    bool log10 = false;
};

// Shortest representation that reads back to the same double.
std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfig("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content) {
        fs::create_directories(dir_);
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw Error("cannot write output file: " + (dir_ / name).string());
        f << content;
        files_.push_back({name, sha256_hex(content)});
    }

    json listing() const {
        json out = json::array();
        for (const auto& [name, hash] : files_) out.push_back({{"file", name}, {"sha256", hash}});
        return out;
    }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

struct RunContext {
    std::string command;
    Options opts;
    std::string config_text;
    ScenarioConfig cfg;
    std::vector<std::string> warnings;
};

void write_manifest(OutputSet& outputs, const RunContext& ctx, double seconds) {
    json m;
    m["command"] = ctx.command;
    m["tool_version"] = kToolVersion;
    m["config_path"] = ctx.opts.config_path;
    m["config_sha256"] = sha256_hex(ctx.config_text);
    m["master_seed"] = ctx.cfg.experiment.master_seed;
    m["outputs"] = outputs.listing();
    m["wall_clock_s"] = seconds;
    m["warnings"] = ctx.warnings;
    // The manifest is not listed in itself.
    fs::create_directories(outputs.dir());
    std::ofstream f(outputs.dir() / "manifest.json", std::ios::binary);
    f << m.dump(2) << "\n";
}

std::string map_csv(const CrlbMap& map, bool log10) {
    std::ostringstream s;
    s << "x_m,y_m,value_m,observable";
    if (log10) s << ",log10_value";
    s << "\n";
    for (std::size_t iy = 0; iy < map.ys.size(); ++iy) {
        for (std::size_t ix = 0; ix < map.xs.size(); ++ix) {
            const CrlbValue& v = map.at(ix, iy);
            s << num(map.xs[ix]) << ',' << num(map.ys[iy]) << ',' << num(v.value_or_inf()) << ','
              << (v.observable() ? 1 : 0);
            if (log10) s << ',' << num(std::log10(v.value_or_inf()));
            s << "\n";
        }
    }
    return s.str();
}

void cmd_crlb_map(RunContext& ctx, OutputSet& outputs) {
    const ScenarioConfig& cfg = ctx.cfg;
    if (!cfg.experiment.map) throw InvalidConfig("experiment.map: required by crlb-map");
    const MapSpec& spec = *cfg.experiment.map;
    const MapRegion region{spec.x, spec.y, spec.nx, spec.ny, spec.target_z};
    const SensorArray base = build_array(cfg);
    for (ModelKind kind : spec.kinds) {
        const CrlbMap map = crlb_map(base.with_kind(kind), region, cfg.moment, ctx.opts.threads);
        outputs.write("crlb_map_" + std::string(to_string(kind)) + ".csv",
                      map_csv(map, ctx.opts.log10));
    }
    if (cfg.trajectory) {
        const Trajectory traj = build_trajectory(cfg);
        const auto scalar = crlb_along_trajectory(base.with_kind(ModelKind::kScalar), traj,
                                                  cfg.moment);
        const auto vector = crlb_along_trajectory(base.with_kind(ModelKind::kVector), traj,
                                                  cfg.moment);
        std::ostringstream s;
        s << "k,t_s,x_m,y_m,z_m,value_scalar_m,value_vector_m\n";
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            const Vec3 p = traj.states[k].position();
            s << k << ',' << num(static_cast<double>(k) * traj.dt) << ',' << num(p.x()) << ','
              << num(p.y()) << ',' << num(p.z()) << ',' << num(scalar[k].value_or_inf()) << ','
              << num(vector[k].value_or_inf()) << "\n";
        }
        outputs.write("crlb_trajectory.csv", s.str());
    }
}

void cmd_track(RunContext& ctx, OutputSet& outputs) {
    const ScenarioConfig& cfg = ctx.cfg;
    const Trajectory truth = build_trajectory(cfg);
    const SensorArray array = build_array(cfg);

    const auto bounds = crlb_along_trajectory(array, truth, cfg.moment);
    std::size_t unobservable = 0;
    for (const CrlbValue& b : bounds) unobservable += b.observable() ? 0 : 1;
    if (unobservable > 0) {
        ctx.warnings.push_back("UNOBSERVABLE geometry: position FIM is singular at " +
                               std::to_string(unobservable) + " of " +
                               std::to_string(bounds.size()) + " steps");
    }

    const FilterEstimate init = initial_estimate(cfg, truth.states.front(), 0);
    RandomStream noise =
        RandomStream::derive(cfg.experiment.master_seed, 0, StreamPurpose::kMeasurementNoise);
    TrackOptions options;
    options.failure_threshold_m = cfg.experiment.failure_threshold_m;
    const TrackResult r = track(truth, array, cfg.moment, build_ukf_config(cfg),
                                build_process_model(cfg), init, noise, options);
    if (r.diverged) {
        ctx.warnings.push_back("filter diverged numerically at step " +
                               std::to_string(r.failure_step.value_or(0)));
    } else if (r.failed) {
        ctx.warnings.push_back("tracking error exceeded the failure threshold at step " +
                               std::to_string(r.failure_step.value_or(0)));
    }

    std::ostringstream s;
    s << "k,t_s";
    for (int i = 0; i < kStateDim; ++i) s << ",mean" << i;
    s << ",error_m,trace_cov\n";
    for (std::size_t k = 0; k < r.estimates.size(); ++k) {
        const FilterEstimate& e = r.estimates[k];
        s << k << ',' << num(static_cast<double>(k) * truth.dt);
        for (int i = 0; i < kStateDim; ++i) s << ',' << num(e.mean(i));
        s << ',' << num(r.errors[k]) << ',' << num(e.covariance.trace()) << "\n";
    }
    outputs.write("track.csv", s.str());
}

std::string rmse_csv(const Aggregate& a, double dt) {
    std::ostringstream s;
    s << "k,t_s,rmse_m,n_alive_trials\n";
    for (std::size_t k = 0; k < a.rmse.size(); ++k) {
        s << k << ',' << num(static_cast<double>(k) * dt) << ',' << num(a.rmse[k]) << ','
          << a.alive[k] << "\n";
    }
    return s.str();
}

json rates_json(const Aggregate& a) {
    return {{"trials", a.trials}, {"failed", a.failed}, {"failure_rate", a.failure_rate}};
}

void cmd_montecarlo(RunContext& ctx, OutputSet& outputs) {
    const ScenarioConfig& cfg = ctx.cfg;
    if (!cfg.trajectory) throw InvalidConfig("trajectory: required by montecarlo");
    const Aggregate a = monte_carlo(cfg, ctx.opts.threads);
    outputs.write("rmse.csv", rmse_csv(a, cfg.trajectory->dt));
    json doc;
    doc["config"] = json::parse(serialize_scenario(cfg));
    doc["result"] = rates_json(a);
    outputs.write("failure_rate.json", doc.dump(2) + "\n");
}

void cmd_resilience(RunContext& ctx, OutputSet& outputs) {
    const ScenarioConfig& cfg = ctx.cfg;
    if (!cfg.trajectory) throw InvalidConfig("trajectory: required by resilience");
    if (!cfg.experiment.resilience) {
        throw InvalidConfig("experiment.resilience: required by resilience");
    }
    const ResilienceSpec& spec = *cfg.experiment.resilience;
    std::vector<std::size_t> counts(spec.failed_counts.begin(), spec.failed_counts.end());

    std::ostringstream table;
    table << "failed_count,noise_pT,model_kind,failure_rate\n";
    json rows = json::array();
    for (double noise : spec.noise_levels) {
        for (ModelKind kind : spec.kinds) {
            ScenarioConfig c = cfg;
            c.noise_std = noise;
            c.array.kind = kind;
            const auto result = resilience_study(c, counts, c.experiment.runs, ctx.opts.threads);
            for (const ResilienceRow& row : result) {
                table << row.failed_count << ',' << num(noise * 1e12) << ',' << to_string(kind)
                      << ',' << num(row.aggregate.failure_rate) << "\n";
                json entry = rates_json(row.aggregate);
                entry["failed_count"] = row.failed_count;
                entry["noise_t"] = noise;
                entry["model"] = std::string(to_string(kind));
                rows.push_back(entry);
                outputs.write("rmse_" + std::string(to_string(kind)) + "_" + num(noise * 1e12) +
                                  "pT_" + std::to_string(row.failed_count) + "failed.csv",
                              rmse_csv(row.aggregate, c.trajectory->dt));
            }
        }
    }
    outputs.write("resilience.csv", table.str());
    json doc;
    doc["config"] = json::parse(serialize_scenario(cfg));
    doc["result"] = rows;
    outputs.write("failure_rate.json", doc.dump(2) + "\n");
}

using Command = void (*)(RunContext&, OutputSet&);

int execute(const std::string& name, Command command, const Options& opts, std::ostream& out,
            std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    RunContext ctx;
    ctx.command = name;
    ctx.opts = opts;
    try {
        ctx.config_text = read_file(opts.config_path);
        ctx.cfg = parse_scenario(ctx.config_text);
        if (opts.seed) ctx.cfg.experiment.master_seed = *opts.seed;
        if (opts.runs) {
            ctx.cfg.experiment.runs = *opts.runs;
        }
        validate(ctx.cfg);
        if (command == nullptr) {
            out << "ok: " << ctx.cfg.name << "\n";
            return kExitOk;
        }
        OutputSet outputs{fs::path(opts.out_dir)};
        command(ctx, outputs);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(outputs, ctx, seconds);
        for (const std::string& w : ctx.warnings) err << "warning: " << w << "\n";
        out << name << ": wrote " << outputs.listing().size() << " file(s) to " << opts.out_dir
            << "\n";
        return kExitOk;
    } catch (const InvalidConfig& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Magnetic dipole tracking and Cramer-Rao analysis"};
    app.require_subcommand(1);
    Options opts;

    struct Sub {
        const char* name;
        const char* help;
        Command command;
    };
    const Sub subs[] = {
        {"crlb-map", "Cramer-Rao bound maps and along-trajectory bounds", cmd_crlb_map},
        {"track", "Single filter run with a per-step trace", cmd_track},
        {"montecarlo", "Monte Carlo RMSE and failure rate", cmd_montecarlo},
        {"resilience", "Failure rates under random sensor outages", cmd_resilience},
        {"validate-config", "Parse and validate a scenario file", nullptr},
    };
    std::vector<std::pair<CLI::App*, const Sub*>> registered;
    for (const Sub& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", opts.config_path, "Scenario JSON file")->required();
        if (s.command != nullptr) {
            sub->add_option("--out", opts.out_dir, "Output directory");
            sub->add_option("--seed", opts.seed, "Override the master seed");
            sub->add_option("--runs", opts.runs, "Override the Monte Carlo run count")
                ->check(CLI::PositiveNumber);
            sub->add_option("--threads", opts.threads, "Worker threads (0 = auto)");
            sub->add_flag("--log10", opts.log10, "Add a log10 column to map CSVs");
        }
        registered.emplace_back(sub, &s);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    for (const auto& [sub, s] : registered) {
        if (sub->parsed()) return execute(s->name, s->command, opts, out, err);
    }
    return kExitConfig;
}

}  // namespace magnet::cli
