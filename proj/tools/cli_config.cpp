#include "cli_config.hpp"

#include "impactkit/errors.hpp"
#include "impactkit/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <vector>

namespace impactkit::cli {

namespace {

using nlohmann::json;

std::map<std::string, std::string> parse_kv(const std::string& spec, std::string& name) {
    const auto colon = spec.find(':');
    name = spec.substr(0, colon);
    std::map<std::string, std::string> kv;
    if (colon == std::string::npos) return kv;
    std::stringstream rest(spec.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw config_error("bad spec item '" + item + "' in '" + spec + "'");
        }
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

double want_double(const std::map<std::string, std::string>& kv, const std::string& key,
                   const std::string& spec) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw config_error("spec '" + spec + "' is missing key '" + key + "'");
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw config_error("spec '" + spec + "': bad numeric value for '" + key + "'");
    }
}

std::int64_t want_int(const std::map<std::string, std::string>& kv, const std::string& key,
                      const std::string& spec) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw config_error("spec '" + spec + "' is missing key '" + key + "'");
    }
    std::int64_t v = 0;
    const auto [p, ec] =
        std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc{} || p != it->second.data() + it->second.size()) {
        throw config_error("spec '" + spec + "': bad integer value for '" + key + "'");
    }
    return v;
}

void reject_unknown_keys(const std::map<std::string, std::string>& kv,
                         std::initializer_list<const char*> allowed,
                         const std::string& spec) {
    for (const auto& [key, value] : kv) {
        if (std::find_if(allowed.begin(), allowed.end(), [&key](const char* a) {
                return key == a;
            }) == allowed.end()) {
            throw config_error("spec '" + spec + "': unknown key '" + key + "'");
        }
    }
}

} // namespace

SizeDistribution parse_dist_spec(const std::string& spec) {
    if (spec.empty()) {
        throw config_error("missing distribution spec (--dist)");
    }
    std::string name;
    const auto kv = parse_kv(spec, name);
    try {
        if (name == "pareto") {
            reject_unknown_keys(kv, {"beta"}, spec);
            return make_pareto(want_double(kv, "beta", spec));
        }
        if (name == "truncated_pareto") {
            reject_unknown_keys(kv, {"beta", "m"}, spec);
            return make_truncated_pareto(want_double(kv, "beta", spec),
                                         want_int(kv, "m", spec));
        }
        if (name == "stretched") {
            reject_unknown_keys(kv, {"lambda", "renormalize"}, spec);
            const bool renorm =
                kv.count("renormalize") != 0 && kv.at("renormalize") != "0";
            return make_stretched_exponential(want_double(kv, "lambda", spec), renorm);
        }
        if (name == "geometric") {
            reject_unknown_keys(kv, {"q"}, spec);
            return make_geometric(want_double(kv, "q", spec));
        }
        if (name == "tabulated") {
            reject_unknown_keys(kv, {"file"}, spec);
            const auto it = kv.find("file");
            if (it == kv.end()) {
                throw config_error("spec '" + spec + "' is missing key 'file'");
            }
            return load_tabulated(it->second);
        }
        if (name == "random") {
            reject_unknown_keys(kv, {"m", "seed"}, spec);
            const std::int64_t m = want_int(kv, "m", spec);
            if (m < 2 || m > 100000) {
                throw config_error("random tabulated law needs 2 <= m <= 100000");
            }
            const auto seed =
                kv.count("seed") != 0 ? static_cast<std::uint64_t>(want_int(kv, "seed", spec)) : 1u;
            Rng rng(seed, 0xD157);
            std::vector<double> weights(static_cast<std::size_t>(m));
            for (double& w : weights) w = 0.1 + rng.next_unit();
            return make_tabulated(weights);
        }
    } catch (const domain_error& err) {
        throw config_error("spec '" + spec + "': " + err.what());
    }
    throw config_error("unknown distribution family '" + name + "' in '" + spec + "'");
}

InformationDensity parse_density_spec(const std::string& spec) {
    if (spec.empty()) {
        throw config_error("missing density spec (--density)");
    }
    std::string name;
    const auto kv = parse_kv(spec, name);
    try {
        if (name == "uniform") {
            reject_unknown_keys(kv, {"a", "b"}, spec);
            return InformationDensity::uniform(want_double(kv, "a", spec),
                                               want_double(kv, "b", spec));
        }
        if (name == "pareto_tail") {
            reject_unknown_keys(kv, {"exponent", "xmin"}, spec);
            return InformationDensity::pareto_tail(want_double(kv, "exponent", spec),
                                                   want_double(kv, "xmin", spec));
        }
        if (name == "table") {
            reject_unknown_keys(kv, {"file"}, spec);
            const auto it = kv.find("file");
            if (it == kv.end()) {
                throw config_error("spec '" + spec + "' is missing key 'file'");
            }
            return InformationDensity::load_table(it->second);
        }
    } catch (const domain_error& err) {
        throw config_error("spec '" + spec + "': " + err.what());
    }
    throw config_error("unknown density family '" + name + "' in '" + spec + "'");
}

CorruptSpec parse_corrupt_spec(const std::string& spec) {
    // rtilde:<t>:x<factor>
    std::stringstream ss(spec);
    std::string kind, t_str, f_str;
    if (!std::getline(ss, kind, ':') || !std::getline(ss, t_str, ':') ||
        !std::getline(ss, f_str) || kind != "rtilde" || f_str.empty() || f_str[0] != 'x') {
        throw config_error("bad corrupt spec '" + spec + "', expected rtilde:<t>:x<factor>");
    }
    CorruptSpec out;
    try {
        out.t = std::stoll(t_str);
        out.factor = std::stod(f_str.substr(1));
    } catch (const std::exception&) {
        throw config_error("bad corrupt spec '" + spec + "'");
    }
    if (out.t < 1) {
        throw config_error("corrupt spec '" + spec + "': t must be >= 1");
    }
    return out;
}

std::string RunConfig::to_canonical_json() const {
    json j;
    j["command"] = command;
    j["dist"] = dist;
    j["null_dist"] = null_dist;
    j["density"] = density;
    j["r0"] = r0;
    j["rtilde1"] = rtilde1;
    j["horizon"] = horizon;
    j["out"] = out;
    j["format"] = format;
    j["seed"] = seed;
    j["paths"] = paths;
    j["mu"] = mu;
    j["eta_scale"] = eta_scale;
    j["eta_kind"] = eta_kind;
    j["k"] = k_traders;
    j["s0"] = s0;
    j["corrupt"] = corrupt;
    j["figure_id"] = figure_id;
    return j.dump(2);
}

namespace {

void apply_json_key(RunConfig& cfg, const std::string& key, const json& value) {
    try {
        if (key == "command") {
            cfg.command = value.get<std::string>();
        } else if (key == "dist") {
            cfg.dist = value.get<std::string>();
        } else if (key == "null_dist") {
            cfg.null_dist = value.get<std::string>();
        } else if (key == "density") {
            cfg.density = value.get<std::string>();
        } else if (key == "r0") {
            cfg.r0 = value.get<double>();
        } else if (key == "rtilde1") {
            cfg.rtilde1 = value.get<double>();
        } else if (key == "horizon") {
            cfg.horizon = value.get<std::int64_t>();
        } else if (key == "out") {
            cfg.out = value.get<std::string>();
        } else if (key == "format") {
            cfg.format = value.get<std::string>();
        } else if (key == "seed") {
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "paths") {
            cfg.paths = value.get<std::int64_t>();
        } else if (key == "mu") {
            cfg.mu = value.get<double>();
        } else if (key == "eta_scale") {
            cfg.eta_scale = value.get<double>();
        } else if (key == "eta_kind") {
            cfg.eta_kind = value.get<std::string>();
        } else if (key == "k") {
            cfg.k_traders = value.get<std::int64_t>();
        } else if (key == "s0") {
            cfg.s0 = value.get<double>();
        } else if (key == "corrupt") {
            cfg.corrupt = value.get<std::string>();
        } else if (key == "figure_id") {
            cfg.figure_id = value.get<int>();
        } else {
            throw config_error("unknown config key '" + key + "'");
        }
    } catch (const json::exception&) {
        throw config_error("config key '" + key + "' has the wrong type");
    }
}

} // namespace

RunConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& err) {
        throw config_error(std::string("config JSON parse failure: ") + err.what());
    }
    if (!j.is_object()) {
        throw config_error("config JSON must be an object");
    }
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        apply_json_key(cfg, key, value);
    }
    return cfg;
}

RunConfig merge_config_file(const RunConfig& base, const std::string& file_text,
                            const std::vector<std::string>& given) {
    json j;
    try {
        j = json::parse(file_text);
    } catch (const json::exception& err) {
        throw config_error(std::string("config JSON parse failure: ") + err.what());
    }
    if (!j.is_object()) {
        throw config_error("config JSON must be an object");
    }
    RunConfig merged = base;
    const auto was_given = [&given](const std::string& key) {
        return std::find(given.begin(), given.end(), key) != given.end();
    };
    for (const auto& [key, value] : j.items()) {
        if (key == "command") {
            const auto file_cmd = value.get<std::string>();
            if (!base.command.empty() && file_cmd != base.command) {
                throw config_error("config file command '" + file_cmd +
                                   "' conflicts with subcommand '" + base.command + "'");
            }
            continue;
        }
        if (was_given(key)) continue; // explicit flags override file values
        apply_json_key(merged, key, value);
    }
    return merged;
}

} // namespace impactkit::cli
