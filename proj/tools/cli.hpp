#pragma once

// Command-line front end. `run` is the whole program minus process setup, so
// tests can drive it in-process.
//
// Exit codes: 0 success, 1 input error, 2 integration stopped near a
// singularity, 3 expectation violated (variation --expect-critical).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <schwarz/schwarz.hpp>

namespace schwarz::cli {

using nlohmann::json;

enum class LogLevel { error = 0, info = 1, debug = 2 };

inline LogLevel log_level_from_env() {
    const char* env = std::getenv("SCHWARZ_LOG");
    if (!env) return LogLevel::error;
    const std::string s = env;
    if (s == "debug") return LogLevel::debug;
    if (s == "info") return LogLevel::info;
    return LogLevel::error;
}

class Logger {
public:
    Logger(std::ostream& err, LogLevel level) : err_(err), level_(level) {}
    void error(const std::string& m) const { err_ << "error: " << m << "\n"; }
    void info(const std::string& m) const {
        if (level_ >= LogLevel::info) err_ << "[info] " << m << "\n";
    }
    void debug(const std::string& m) const {
        if (level_ >= LogLevel::debug) err_ << "[debug] " << m << "\n";
    }

private:
    std::ostream& err_;
    LogLevel level_;
};

struct InputError : Error {
    using Error::Error;
};

inline std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError(std::string("malformed ") + what + " '" + text + "'");
        }
    }
    if (expected && out.size() != expected) {
        throw InputError(std::string(what) + " needs " + std::to_string(expected) + " comma-separated values, got '" +
                         text + "'");
    }
    return out;
}

inline Jet4 parse_jet(const std::string& text) {
    const auto v = parse_list(text, 5, "jet");
    return {v[0], v[1], v[2], v[3], v[4]};
}

inline json jet_json(const Jet4& j) { return json::array({j.t, j.u, j.p, j.q, j.r}); }

// Option text as JSON: numbers where the whole string is numeric.
inline json config_value(const std::string& text) {
    const json v = json::parse(text, nullptr, false);
    return v.is_number() ? v : json(text);
}

// Effective configuration of a subcommand: every option with a value.
inline json effective_config(const CLI::App& app) {
    json cfg = json::object();
    for (const CLI::Option* opt : app.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help" || name == "config") continue;
        if (opt->count() > 0) {
            const auto& res = opt->results();
            if (opt->get_expected_max() == 0) {
                cfg[name] = true;
            } else if (opt->get_items_expected_max() > 1 || res.size() > 1) {
                json arr = json::array();
                for (const auto& r : res) arr.push_back(config_value(r));
                cfg[name] = arr;
            } else {
                cfg[name] = config_value(res.front());
            }
        } else if (!opt->get_default_str().empty()) {
            cfg[name] = config_value(opt->get_default_str());
        }
    }
    return cfg;
}

// Turn a JSON config into extra arguments for flags the user did not pass.
inline std::vector<std::string> config_args(const json& cfg, const std::vector<std::string>& user_args) {
    std::vector<std::string> out;
    auto given = [&](const std::string& flag) {
        for (const auto& a : user_args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    auto scalar = [](const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_array()) {
            std::string s;
            for (const auto& x : v) s += (s.empty() ? "" : ",") + x.dump();
            return s;
        }
        return v.dump();
    };
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        if (given(flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) out.push_back(flag);
        } else if (value.is_array() && !value.empty() && (value.front().is_array() || value.front().is_string())) {
            for (const auto& item : value) {
                out.push_back(flag);
                out.push_back(scalar(item));
            }
        } else {
            out.push_back(flag);
            out.push_back(scalar(value));
        }
    }
    return out;
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw InputError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

inline OdeField field_from(const std::string& field_name, const std::string& expr) {
    if (!expr.empty()) return OdeField(expr);
    if (field_name == "EL" || field_name.empty()) return OdeField::euler_lagrange();
    throw InputError("unknown field '" + field_name + "' (use EL or --F)");
}

inline BaseSolution base_from(const std::string& name) {
    if (name == "t" || name == "line") return BaseSolution::line;
    if (name == "exp") return BaseSolution::exp;
    if (name == "tan") return BaseSolution::tan;
    throw InputError("unknown base '" + name + "' (use t, exp or tan)");
}

struct FamilyFlags {
    double A = 1.0, B = 0.0, C = 0.0, D = 1.0;
    std::optional<double> sigma;

    void add(CLI::App* cmd, bool sigma_required) {
        for (auto [name, slot] : {std::pair{"--A", &A}, {"--B", &B}, {"--C", &C}, {"--D", &D}}) {
            auto* opt = cmd->add_option(name, *slot, std::string("Moebius parameter ") + (name + 2));
            if (sigma_required) opt->capture_default_str();
        }
        auto* opt = cmd->add_option("--sigma", sigma, "constant Schwarzian of the family");
        if (sigma_required) opt->required();
    }
    MobiusFamily make() const { return {A, B, C, D, sigma.value_or(0.0)}; }
};

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const Logger log(err, log_level_from_env());

    CLI::App app{"Schwarzian variational laboratory", "schwarz"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with flag values (flags win)");

    // integrate
    auto* integ = app.add_subcommand("integrate", "integrate the Euler-Lagrange equation; writes CSV");
    std::string jet_text, out_path;
    double t_end = 0.0, tol = 1e-10;
    integ->add_option("--jet", jet_text, "initial jet t,u,p,q,r")->required();
    integ->add_option("--t-end", t_end, "final time")->required();
    integ->add_option("--tol", tol, "integrator tolerance")->capture_default_str();
    integ->add_option("--out", out_path, "output file (default stdout)");
    integ->add_option("--config", config_path, "JSON config file");

    // invariants
    auto* inv = app.add_subcommand("invariants", "Wuenschmann invariants W0, W1 of u''''=F; writes JSON");
    std::string field_name = "EL", field_expr;
    std::vector<std::string> jets;
    int random_n = 0;
    std::uint64_t seed = 1;
    double p_min = 0.1, p_max = 10.0;
    inv->add_option("--field", field_name, "named field (EL)")->capture_default_str();
    inv->add_option("--F", field_expr, "field as an expression in t,u,p,q,r");
    inv->add_option("--jet", jets, "jet t,u,p,q,r (repeatable)");
    inv->add_option("--random", random_n, "number of random jets");
    inv->add_option("--seed", seed, "random seed")->capture_default_str();
    inv->add_option("--p-min", p_min, "smallest |p| of random jets")->capture_default_str();
    inv->add_option("--p-max", p_max, "largest |p| of random jets")->capture_default_str();
    inv->add_option("--out", out_path, "output file (default stdout)");
    inv->add_option("--config", config_path, "JSON config file");

    // family
    auto* fam = app.add_subcommand("family", "closed-form solution family; writes JSON");
    FamilyFlags ff;
    ff.add(fam, true);
    std::vector<double> times;
    int verify_n = 0;
    std::string interval_text = "0,1";
    bool want_singular = false;
    fam->add_option("--t", times, "evaluate the jet at these times (repeatable)");
    fam->add_option("--verify", verify_n, "number of verification samples");
    fam->add_option("--interval", interval_text, "t0,t1 for --verify and --singularities")->capture_default_str();
    fam->add_flag("--singularities", want_singular, "list poles in the interval");
    fam->add_option("--out", out_path, "output file (default stdout)");
    fam->add_option("--config", config_path, "JSON config file");

    // linearize
    auto* lin = app.add_subcommand("linearize", "linearized equation along a base solution; writes JSON");
    std::string base_name = "exp";
    std::vector<double> lin_times;
    int basis_points = 0;
    FamilyFlags lf;
    lin->add_option("--field", field_name, "named field (EL)")->capture_default_str();
    lin->add_option("--F", field_expr, "field as an expression in t,u,p,q,r");
    lin->add_option("--base", base_name, "base solution: t, exp or tan")->capture_default_str();
    lf.add(lin, false);
    lin->add_option("--t", lin_times, "sample times (repeatable)")->required();
    lin->add_option("--basis-check", basis_points, "check the standard solution basis on this many points of [0,1]");
    lin->add_option("--out", out_path, "output file (default stdout)");
    lin->add_option("--config", config_path, "JSON config file");

    // variation
    auto* var = app.add_subcommand("variation", "critical-point test of the integrated Schwarzian; writes JSON");
    std::string u_expr;
    FamilyFlags vf;
    int n_var = 50;
    double eps_fraction = 0.02;
    bool expect_critical = false;
    std::string var_interval = "0,1";
    var->add_option("--u", u_expr, "curve u as an expression in t");
    vf.add(var, false);
    var->add_option("--interval", var_interval, "t0,t1")->capture_default_str();
    var->add_option("--n", n_var, "number of admissible variations")->capture_default_str();
    var->add_option("--seed", seed, "random seed")->capture_default_str();
    var->add_option("--eps-fraction", eps_fraction, "parabola width as a fraction of the interval")->capture_default_str();
    var->add_flag("--expect-critical", expect_critical, "exit 3 if a witness is found");
    var->add_option("--out", out_path, "output file (default stdout)");
    var->add_option("--config", config_path, "JSON config file");

    // Merge --config before parsing: JSON values become flags the user did not give.
    std::vector<std::string> argv_all = args;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config" || args[i].rfind("--config=", 0) == 0) {
            const std::string path = args[i] == "--config" ? args[i + 1] : args[i].substr(9);
            std::ifstream in(path);
            if (!in) {
                log.error("cannot read config file '" + path + "'");
                return 1;
            }
            json cfg;
            try {
                in >> cfg;
            } catch (const std::exception& e) {
                log.error(std::string("invalid config JSON: ") + e.what());
                return 1;
            }
            const auto extra = config_args(cfg, args);
            argv_all.insert(argv_all.end(), extra.begin(), extra.end());
            break;
        }
    }

    try {
        std::vector<std::string> reversed(argv_all.rbegin(), argv_all.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        log.error(e.what());
        return 1;
    }

    try {
        if (integ->parsed()) {
            const Jet4 init = parse_jet(jet_text);
            if (!(std::abs(init.p) >= kTrajectoryPFloor)) throw InputError("singular initial jet (p=0)");
            log.info("config " + effective_config(*integ).dump());
            const Trajectory tr = integrate(init, t_end, tol);
            Output o(out_path, out);
            write_trajectory_csv(o.stream(), tr);
            const auto drift = invariant_drift(tr);
            char buf[160];
            std::snprintf(buf, sizeof buf, "samples %zu, status %s, drift S %.3e, drift C %.3e", tr.samples.size(),
                          to_string(tr.status), drift.s, drift.c);
            log.info(buf);
            log.debug("rejected steps " + std::to_string(tr.rejected_steps));
            return tr.status == TrajectoryStatus::completed ? 0 : 2;
        }

        if (inv->parsed()) {
            const bool is_el = field_expr.empty() && (field_name == "EL");
            const OdeField field = field_from(field_name, field_expr);
            std::vector<Jet4> points;
            for (const auto& j : jets) points.push_back(parse_jet(j));
            if (random_n > 0) {
                std::mt19937_64 rng(seed);
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                for (int i = 0; i < random_n; ++i) {
                    const double mag = p_min * std::pow(p_max / p_min, unit(rng));
                    const double p = unit(rng) < 0.5 ? -mag : mag;
                    points.push_back({-2 + 4 * unit(rng), -2 + 4 * unit(rng), p, -3 + 6 * unit(rng), -3 + 6 * unit(rng)});
                }
            }
            if (points.empty()) throw InputError("no jets given (use --jet or --random)");
            json rows = json::array();
            for (const Jet4& j : points) {
                const Invariants w = invariants(field, j);
                json row = w;
                row["jet"] = jet_json(j);
                if (is_el) row["S"] = schwarzian(j);
                rows.push_back(row);
            }
            Output o(out_path, out);
            o.stream() << json{{"config", effective_config(*inv)}, {"rows", rows}}.dump(2) << "\n";
            return 0;
        }

        if (fam->parsed()) {
            const MobiusFamily f = ff.make();
            json doc{{"config", effective_config(*fam)}, {"family", f}, {"class", to_string(f.family_class())}};
            json jrows = json::array();
            for (double t : times) {
                const auto d = family_derivatives(f, t);
                const Jet4 j{t, d[0], d[1], d[2], d[3]};
                jrows.push_back({{"jet", jet_json(j)}, {"u4", d[4]}, {"S", schwarzian(j)}, {"C", mercator_c(j)}});
            }
            doc["jets"] = jrows;
            const auto iv = parse_list(interval_text, 2, "interval");
            if (want_singular) doc["singularities"] = family_singularities(f, iv[0], iv[1]);
            if (verify_n > 0) {
                const auto r = family_verify(f, verify_n, iv[0], iv[1]);
                doc["verify"] = {{"samples", r.samples},
                                 {"skipped_near_pole", r.skipped},
                                 {"interval", iv},
                                 {"max_schwarzian_residual", r.max_schwarzian},
                                 {"max_el_residual", r.max_el}};
            }
            Output o(out_path, out);
            o.stream() << doc.dump(2) << "\n";
            return 0;
        }

        if (lin->parsed()) {
            const OdeField field = field_from(field_name, field_expr);
            const bool custom = lf.sigma.has_value();
            const MobiusFamily base = custom ? lf.make() : base_family(base_from(base_name));
            json rows = json::array();
            for (double t : lin_times) {
                const Linearization c = linearize(field, base, t);
                rows.push_back({{"t", t}, {"a1", c.a1}, {"a2", c.a2}, {"a3", c.a3}});
            }
            json doc{{"config", effective_config(*lin)}, {"base", base}, {"rows", rows}};
            if (basis_points > 1) {
                if (custom) throw InputError("--basis-check needs one of the standard bases (t, exp, tan)");
                std::vector<double> ts;
                for (int i = 0; i < basis_points; ++i) ts.push_back(static_cast<double>(i) / (basis_points - 1));
                const auto basis = linearization_basis(base_from(base_name));
                doc["basis_residual"] = verify_linear_basis(LinearizedOde(field, base), basis, ts);
            }
            Output o(out_path, out);
            o.stream() << doc.dump(2) << "\n";
            return 0;
        }

        if (var->parsed()) {
            const auto iv = parse_list(var_interval, 2, "interval");
            if (u_expr.empty() && !vf.sigma) throw InputError("give the curve with --u or a family (--sigma ...)");
            const CurveFn u = u_expr.empty() ? CurveFn::from_family(vf.make(), iv[0], iv[1])
                                             : CurveFn::from_expr(parse(u_expr), iv[0], iv[1]);
            log.debug("curve " + u.label() + " on [" + var_interval + "], seed " + std::to_string(seed));
            const CriticalReport rep = critical_test(u, iv[0], iv[1], n_var, {seed, eps_fraction});
            json doc = rep;
            doc["config"] = effective_config(*var);
            Output o(out_path, out);
            o.stream() << doc.dump(2) << "\n";
            if (expect_critical && rep.witness) {
                log.error("curve is not critical: |delta I_S| = " + std::to_string(rep.max_delta));
                return 3;
            }
            return 0;
        }
    } catch (const SingularJetError& e) {
        log.error(e.what());
        return 1;
    } catch (const Error& e) {
        log.error(e.what());
        return 1;
    } catch (const nlohmann::json::exception& e) {
        log.error(e.what());
        return 1;
    }
    return 1;
}

}  // namespace schwarz::cli
