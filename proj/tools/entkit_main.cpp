// entkit command-line front end: figure-data regeneration, parameter sweeps
// and state file handling.  Each subcommand reads a JSON config (strict keys),
// evaluates the requested table and writes CSV or JSON with 17 significant
// digits.  Exit codes: 0 success, 2 config error, 3 numerical-validity error.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "entkit/bridge.hpp"
#include "entkit/cavity.hpp"
#include "entkit/distill.hpp"
#include "entkit/errors.hpp"
#include "entkit/fock.hpp"
#include "entkit/gaussian.hpp"
#include "entkit/jumpmc.hpp"
#include "entkit/state_io.hpp"

using entkit::config_error;
using entkit::numeric_error;
using nlohmann::json;

namespace {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_table(const Table& table, const std::string& out_path, const std::string& format) {
    std::ostringstream os;
    if (format == "csv") {
        for (size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
        os << "\n";
        for (const auto& row : table.rows) {
            for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
            os << "\n";
        }
    } else if (format == "json") {
        os << "{\n  \"columns\": [";
        for (size_t i = 0; i < table.columns.size(); ++i)
            os << (i ? ", " : "") << "\"" << table.columns[i] << "\"";
        os << "],\n  \"rows\": [\n";
        for (size_t r = 0; r < table.rows.size(); ++r) {
            os << "    [";
            for (size_t i = 0; i < table.rows[r].size(); ++i)
                os << (i ? ", " : "") << format_number(table.rows[r][i]);
            os << "]" << (r + 1 < table.rows.size() ? "," : "") << "\n";
        }
        os << "  ]\n}\n";
    } else {
        throw config_error("unknown output format '" + format + "' (use csv or json)");
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << os.str();
    } else {
        std::ofstream f(out_path);
        if (!f) throw config_error("cannot write output file: " + out_path);
        f << os.str();
    }
}

struct GridSpec {
    double min = 0.0, max = 1.0;
    int points = 2;
};

GridSpec grid_from_json(const json& j, const std::string& context) {
    entkit::io::require_keys(j, {"min", "max", "points"}, context);
    GridSpec g;
    if (!j.contains("min") || !j.contains("max") || !j.contains("points"))
        throw config_error(context + ": needs min, max, points");
    g.min = j.at("min").get<double>();
    g.max = j.at("max").get<double>();
    g.points = j.at("points").get<int>();
    if (g.points < 1) throw config_error(context + ": points must be >= 1");
    return g;
}

double grid_value(const GridSpec& g, int i) {
    if (g.points == 1) return g.min;
    return g.min + (g.max - g.min) * static_cast<double>(i) / (g.points - 1);
}

int default_threads() {
    if (const char* env = std::getenv("ENTKIT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(threads, n); ++t)
        pool.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    for (auto& t : pool) t.join();
}

// sweeps replace the values at the given JSON pointers, one table row per entry
struct SweepSpec {
    std::vector<std::string> paths;
    std::vector<double> values;
};

std::optional<SweepSpec> sweep_from_json(const json& cfg) {
    if (!cfg.contains("sweep")) return std::nullopt;
    const json& j = cfg.at("sweep");
    entkit::io::require_keys(j, {"paths", "values"}, "sweep");
    SweepSpec s;
    for (const auto& p : j.at("paths")) s.paths.push_back(p.get<std::string>());
    for (const auto& v : j.at("values")) s.values.push_back(v.get<double>());
    if (s.paths.empty() || s.values.empty()) throw config_error("sweep: needs paths and values");
    return s;
}

json apply_sweep(json base, const SweepSpec& sweep, double value) {
    base.erase("sweep");
    for (const auto& p : sweep.paths) base[json::json_pointer(p)] = value;
    return base;
}

// ---------------------------------------------------------------- cavity

Table run_cavity_ideal(const json& cfg) {
    entkit::io::require_keys(cfg, {"gtau"}, "cavity-ideal config");
    if (!cfg.contains("gtau")) throw config_error("cavity-ideal config: needs a gtau grid");
    const GridSpec grid = grid_from_json(cfg.at("gtau"), "gtau");
    Table t;
    t.columns = {"gtau", "fidelity", "p_success"};
    for (int i = 0; i < grid.points; ++i) {
        const double g = grid_value(grid, i);
        t.rows.push_back({g, entkit::cavity::fidelity_ideal(g), entkit::cavity::success_probability(g)});
    }
    return t;
}

entkit::cavity::CavityGeometry geometry_from_json(const json& j) {
    entkit::io::require_keys(j, {"L", "R_curv", "lambda", "D0", "D1"}, "geometry");
    entkit::cavity::CavityGeometry g;
    g.L = j.at("L").get<double>();
    g.R_curv = j.at("R_curv").get<double>();
    g.lambda = j.at("lambda").get<double>();
    g.D0 = j.at("D0").get<double>();
    g.D1 = j.at("D1").get<double>();
    g.validate();
    return g;
}

entkit::cavity::AtomPath path_from_json(const json& j) {
    entkit::io::require_keys(j, {"y0", "z0", "phi", "theta", "v"}, "path");
    entkit::cavity::AtomPath p;
    if (j.contains("y0")) p.y0 = j.at("y0").get<double>();
    if (j.contains("z0")) p.z0 = j.at("z0").get<double>();
    if (j.contains("phi")) p.phi = j.at("phi").get<double>();
    if (j.contains("theta")) p.theta = j.at("theta").get<double>();
    if (j.contains("v")) p.v = j.at("v").get<double>();
    return p;
}

Table run_cavity_path(const json& cfg, int threads) {
    entkit::io::require_keys(cfg, {"gtau", "epsilon", "geometry", "path", "scale"}, "cavity-path config");
    if (!cfg.contains("gtau")) throw config_error("cavity-path config: needs gtau");
    const double gtau = cfg.at("gtau").get<double>();
    Table t;
    if (cfg.contains("epsilon")) {
        const GridSpec grid = grid_from_json(cfg.at("epsilon"), "epsilon");
        t.columns = {"epsilon", "fidelity"};
        t.rows.resize(grid.points);
        parallel_for(grid.points, threads, [&](int i) {
            const double e = grid_value(grid, i);
            t.rows[i] = {e, entkit::cavity::fidelity_asymmetric(gtau, e)};
        });
        return t;
    }
    if (!cfg.contains("geometry") || !cfg.contains("path") || !cfg.contains("scale"))
        throw config_error("cavity-path config: needs either an epsilon grid or geometry+path+scale");
    const auto geo = geometry_from_json(cfg.at("geometry"));
    const auto base = path_from_json(cfg.at("path"));
    const GridSpec grid = grid_from_json(cfg.at("scale"), "scale");
    t.columns = {"scale", "epsilon_estimate", "epsilon_exact", "fidelity"};
    t.rows.resize(grid.points);
    parallel_for(grid.points, threads, [&](int i) {
        const double s = grid_value(grid, i);
        entkit::cavity::AtomPath p = base;
        p.y0 *= s;
        p.z0 *= s;
        p.phi *= s;
        p.theta *= s;
        const double est = entkit::cavity::epsilon_estimate(geo, p);
        const double ta = entkit::cavity::effective_interaction_time(geo, p, 0);
        const double tb = entkit::cavity::effective_interaction_time(geo, p, 1);
        const double exact = 1.0 - tb / ta;
        t.rows[i] = {s, est, exact, entkit::cavity::fidelity_asymmetric(gtau, exact)};
    });
    return t;
}

// -------------------------------------------------------------------- mc

entkit::jumpmc::JumpConfig jump_config_from_json(const json& cfg) {
    entkit::io::require_keys(cfg, {"params", "cutoff", "dt", "T_wait", "eta", "dark_rate",
                                   "n_traj", "seed", "model", "sweep"},
                             "mc config");
    entkit::jumpmc::JumpConfig jc;
    if (cfg.contains("params")) {
        const json& p = cfg.at("params");
        entkit::io::require_keys(p, {"Omega", "Delta", "kappa", "gamma_A", "gamma_B"}, "mc params");
        if (p.contains("Omega")) jc.params.Omega = p.at("Omega").get<double>();
        if (p.contains("Delta")) jc.params.Delta = p.at("Delta").get<double>();
        if (p.contains("kappa")) jc.params.kappa = p.at("kappa").get<double>();
        if (p.contains("gamma_A")) jc.params.gamma_A = p.at("gamma_A").get<double>();
        if (p.contains("gamma_B")) jc.params.gamma_B = p.at("gamma_B").get<double>();
    }
    if (cfg.contains("cutoff")) jc.cutoff = cfg.at("cutoff").get<int>();
    if (cfg.contains("dt")) jc.dt = cfg.at("dt").get<double>();
    if (cfg.contains("T_wait")) jc.T_wait = cfg.at("T_wait").get<double>();
    if (cfg.contains("eta")) jc.eta = cfg.at("eta").get<double>();
    if (cfg.contains("dark_rate")) jc.dark_rate = cfg.at("dark_rate").get<double>();
    if (cfg.contains("n_traj")) jc.n_traj = cfg.at("n_traj").get<int>();
    if (cfg.contains("seed")) jc.seed = cfg.at("seed").get<std::uint64_t>();
    if (cfg.contains("model")) {
        const std::string m = cfg.at("model").get<std::string>();
        if (m == "auto")
            jc.model = entkit::jumpmc::Model::automatic;
        else if (m == "adiabatic")
            jc.model = entkit::jumpmc::Model::adiabatic;
        else if (m == "full")
            jc.model = entkit::jumpmc::Model::full;
        else
            throw config_error("mc config: unknown model '" + m + "'");
    }
    return jc;
}

void append_trajectory_log(const std::string& path, int offset,
                           const std::vector<entkit::jumpmc::TrajectoryRecord>& recs) {
    std::ofstream f(path, offset == 0 ? std::ios::trunc : std::ios::app);
    if (!f) throw config_error("cannot write trajectory log: " + path);
    for (size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        const char* outcome = r.outcome == entkit::jumpmc::Outcome::click
                                  ? "click"
                                  : (r.outcome == entkit::jumpmc::Outcome::lost ? "lost" : "no_click");
        f << "{\"traj\":" << offset + static_cast<long>(i) << ",\"outcome\":\"" << outcome << "\"";
        if (r.outcome == entkit::jumpmc::Outcome::click) {
            f << ",\"t_click\":" << format_number(r.t_click) << ",\"detector\":" << r.detector
              << ",\"fidelity\":" << format_number(r.fidelity) << ",\"n_clicks\":" << r.n_clicks
              << ",\"dark\":" << (r.dark ? "true" : "false");
        }
        f << "}\n";
    }
}

Table run_mc(const json& cfg, int threads, const std::string& log_path) {
    Table t;
    t.columns = {"sweep_value", "p_success", "p_success_err", "fidelity", "fidelity_err",
                 "fidelity_single", "fidelity_single_err", "t_first", "t_first_err",
                 "n_traj", "n_clicks"};
    const auto sweep = sweep_from_json(cfg);
    std::vector<json> configs;
    std::vector<double> values;
    if (sweep) {
        for (double v : sweep->values) {
            configs.push_back(apply_sweep(cfg, *sweep, v));
            values.push_back(v);
        }
    } else {
        configs.push_back(cfg);
        values.push_back(0.0);
    }
    int log_offset = 0;
    for (size_t i = 0; i < configs.size(); ++i) {
        entkit::jumpmc::JumpConfig jc = jump_config_from_json(configs[i]);
        jc.threads = threads;
        jc.seed += static_cast<std::uint64_t>(i) * 0x9E3779B9ULL;  // independent substream per point
        const auto [recs, st] = entkit::jumpmc::run_trajectories(jc);
        if (!log_path.empty()) {
            append_trajectory_log(log_path, log_offset, recs);
            log_offset += static_cast<int>(recs.size());
        }
        t.rows.push_back({values[i], st.p_success.value, st.p_success.stderr_, st.mean_fidelity.value,
                          st.mean_fidelity.stderr_, st.mean_fidelity_single_click.value,
                          st.mean_fidelity_single_click.stderr_, st.mean_first_click_time.value,
                          st.mean_first_click_time.stderr_, static_cast<double>(st.n_traj),
                          static_cast<double>(st.n_clicks)});
    }
    return t;
}

// --------------------------------------------------------------- distill

Table run_distill(const json& cfg, int threads, int cutoff_override) {
    entkit::io::require_keys(cfg, {"input", "iterations", "detector_eta", "channel", "cutoff",
                                   "max_cutoff", "sweep"},
                             "distill config");
    const auto sweep = sweep_from_json(cfg);
    std::vector<json> configs;
    std::vector<double> values;
    if (sweep) {
        for (double v : sweep->values) {
            configs.push_back(apply_sweep(cfg, *sweep, v));
            values.push_back(v);
        }
    } else {
        configs.push_back(cfg);
        values.push_back(0.0);
    }

    Table t;
    t.columns = {"sweep_value", "iteration", "log_negativity", "vn_entropy", "probability",
                 "distance_to_limit", "truncated_weight"};
    std::vector<std::vector<std::vector<double>>> results(configs.size());
    parallel_for(static_cast<int>(configs.size()), threads, [&](int i) {
        const json& c = configs[static_cast<size_t>(i)];
        if (!c.contains("input")) throw config_error("distill config: needs an input state spec");
        entkit::distill::ProtocolConfig pc;
        if (c.contains("iterations")) pc.iterations = c.at("iterations").get<int>();
        if (c.contains("detector_eta")) pc.detector_eta = c.at("detector_eta").get<double>();
        if (c.contains("cutoff")) pc.cutoff = c.at("cutoff").get<int>();
        if (cutoff_override > 0) pc.cutoff = cutoff_override;
        if (c.contains("max_cutoff")) pc.max_cutoff = c.at("max_cutoff").get<int>();
        pc.max_cutoff = std::max(pc.max_cutoff, pc.cutoff);
        if (c.contains("channel")) pc.channel = entkit::io::channel_from_json(c.at("channel"), &pc.channel_on_both);
        const auto rho = entkit::io::state_from_spec(c.at("input"), pc.cutoff);
        const auto recs = entkit::distill::run_protocol(rho, pc);
        for (const auto& r : recs)
            results[static_cast<size_t>(i)].push_back({values[static_cast<size_t>(i)],
                                                       static_cast<double>(r.iteration), r.log_negativity,
                                                       r.vn_entropy, r.probability, r.distance_to_limit,
                                                       r.truncated_weight});
    });
    for (const auto& block : results)
        for (const auto& row : block) t.rows.push_back(row);
    return t;
}

// ---------------------------------------------------------------- wigner

Table run_wigner(const json& cfg, int cutoff_override) {
    entkit::io::require_keys(cfg, {"input", "iterations", "mode", "grid", "cutoff"}, "wigner config");
    if (!cfg.contains("input")) throw config_error("wigner config: needs an input state spec");
    int cutoff = cfg.contains("cutoff") ? cfg.at("cutoff").get<int>() : 8;
    if (cutoff_override > 0) cutoff = cutoff_override;
    auto rho = entkit::io::state_from_spec(cfg.at("input"), cutoff);
    const int iterations = cfg.contains("iterations") ? cfg.at("iterations").get<int>() : 0;
    for (int i = 0; i < iterations; ++i) rho = entkit::distill::gaussify_mixed_step(rho).state;
    const int mode = cfg.contains("mode") ? cfg.at("mode").get<int>() : 0;
    auto reduced = entkit::fock::partial_trace(rho, mode == 0 ? 1 : 0);
    entkit::bridge::WignerGrid grid;
    if (cfg.contains("grid")) {
        const json& g = cfg.at("grid");
        entkit::io::require_keys(g, {"min", "max", "points", "xi_extent", "xi_points"}, "wigner grid");
        if (g.contains("min")) grid.min = g.at("min").get<double>();
        if (g.contains("max")) grid.max = g.at("max").get<double>();
        if (g.contains("points")) grid.points = g.at("points").get<int>();
        if (g.contains("xi_extent")) grid.xi_extent = g.at("xi_extent").get<double>();
        if (g.contains("xi_points")) grid.xi_points = g.at("xi_points").get<int>();
    }
    const auto field = entkit::bridge::wigner(reduced, grid);
    Table t;
    t.columns = {"x", "p", "w"};
    for (int i = 0; i < field.x.size(); ++i)
        for (int j = 0; j < field.p.size(); ++j) t.rows.push_back({field.x(i), field.p(j), field.w(i, j)});
    return t;
}

// ----------------------------------------------------------------- state

int run_state(const std::string& in_path, const std::string& save_path, bool measure,
              const std::string& out_path, const std::string& format, int cutoff_override) {
    const json j = entkit::io::load_json_file(in_path);
    entkit::fock::FockDensityMatrix rho =
        j.contains("kind") ? entkit::io::state_from_spec(j, cutoff_override > 0 ? cutoff_override : 8)
                           : entkit::io::fock_from_json(j);
    if (!save_path.empty()) entkit::io::save_json_file(save_path, entkit::io::fock_to_json(rho));
    if (measure) {
        Table t;
        t.columns = {"trace", "log_negativity", "vn_entropy", "purity", "truncated_weight"};
        entkit::fock::FockDensityMatrix norm = rho;
        norm.normalize();
        const double purity = (norm.rho * norm.rho).trace().real();
        const double en = (rho.n_modes == 2) ? entkit::fock::log_negativity(rho) : 0.0;
        t.rows.push_back({rho.trace(), en, entkit::fock::vn_entropy(rho), purity, rho.truncated_weight});
        write_table(t, out_path, format);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-optical entanglement generation and distillation toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv", log_path;
    int seed_override = -1, cutoff_override = -1, threads = default_threads();

    auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
        if (needs_config) cmd->add_option("--config", config_path, "JSON config file")->required();
        cmd->add_option("--out", out_path, "output path (default stdout)");
        cmd->add_option("--format", format, "output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--seed", seed_override, "override the config seed");
        cmd->add_option("--cutoff", cutoff_override, "override the Fock cutoff");
        cmd->add_option("--threads", threads, "worker threads (default ENTKIT_THREADS or 1)");
    };

    CLI::App* c_ideal = app.add_subcommand("cavity-ideal", "fidelity and success probability vs g*tau");
    add_common(c_ideal);
    CLI::App* c_path = app.add_subcommand("cavity-path", "interaction-time asymmetry and collimation error");
    add_common(c_path);
    CLI::App* c_mc = app.add_subcommand("mc", "quantum-jump Monte Carlo of the two-ion scheme");
    add_common(c_mc);
    c_mc->add_option("--log", log_path, "JSON-lines trajectory log");
    CLI::App* c_distill = app.add_subcommand("distill", "Gaussification protocol iterations");
    add_common(c_distill);
    CLI::App* c_wigner = app.add_subcommand("wigner", "Wigner function of a reduced one-mode state");
    add_common(c_wigner);

    CLI::App* c_state = app.add_subcommand("state", "load, save and measure state files");
    std::string state_in, state_save;
    bool state_measure = false;
    c_state->add_option("--in", state_in, "input state file (dump or spec)")->required();
    c_state->add_option("--save", state_save, "write the state in dump format");
    c_state->add_flag("--measure", state_measure, "print trace, negativity, entropy");
    add_common(c_state, false);

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg;
        if (!config_path.empty()) {
            cfg = entkit::io::load_json_file(config_path);
            if (seed_override >= 0) cfg["seed"] = seed_override;
        }
        if (app.got_subcommand(c_ideal)) {
            write_table(run_cavity_ideal(cfg), out_path, format);
        } else if (app.got_subcommand(c_path)) {
            write_table(run_cavity_path(cfg, threads), out_path, format);
        } else if (app.got_subcommand(c_mc)) {
            write_table(run_mc(cfg, threads, log_path), out_path, format);
        } else if (app.got_subcommand(c_distill)) {
            write_table(run_distill(cfg, threads, cutoff_override), out_path, format);
        } else if (app.got_subcommand(c_wigner)) {
            write_table(run_wigner(cfg, cutoff_override), out_path, format);
        } else if (app.got_subcommand(c_state)) {
            return run_state(state_in, state_save, state_measure, out_path, format, cutoff_override);
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
