#include "commands.hpp"

#include "impactkit/errors.hpp"
#include "impactkit/game.hpp"
#include "impactkit/impact.hpp"
#include "impactkit/information.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace impactkit::cli {

namespace {

std::int64_t default_horizon(const SizeDistribution& dist, std::int64_t requested,
                             std::int64_t unbounded_default) {
    if (requested > 0) return requested;
    return dist.finite_support() ? dist.max_size() : unbounded_default;
}

void write_text(const std::string& path, const std::string& text, std::ostream& stdout_) {
    if (path.empty() || path == "-") {
        stdout_ << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw config_error("cannot open output file '" + path + "'");
    }
    f << text;
}

std::string schedule_json(const ImpactSchedule& schedule, const SizeDistribution& dist) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["r0"] = schedule.r0;
    j["rtilde1"] = schedule.rtilde1;
    j["horizon"] = schedule.horizon;
    j["dist"] = dist.spec_string();
    j["Rtilde"] = schedule.rtilde;
    j["R"] = schedule.rrev;
    j["I_immediate"] = schedule.immediate;
    j["I_permanent"] = schedule.permanent;
    return j.dump(2);
}

ImpactSchedule solve_for_config(const RunConfig& config, const SizeDistribution& dist,
                                std::int64_t horizon, double* r0_out = nullptr,
                                double* rtilde1_out = nullptr) {
    double r0 = config.r0;
    double rtilde1 = config.rtilde1;
    if (!config.density.empty()) {
        const InformationDensity density = parse_density_spec(config.density);
        const InformationMap map = build_map(density, dist, std::max<std::int64_t>(horizon, 2));
        const ScaleCalibration cal = calibrate_scale(map, dist);
        r0 = cal.r0;
        rtilde1 = cal.rtilde1;
    }
    if (r0_out) *r0_out = r0;
    if (rtilde1_out) *rtilde1_out = rtilde1;
    return solve_schedule(dist, r0, rtilde1, horizon);
}

struct CheckLine {
    std::string name;
    int state = 0; // 0 pass, 1 fail, 2 skip
    std::string detail;
};

void print_checks(const std::vector<CheckLine>& checks, std::ostream& out) {
    for (const auto& check : checks) {
        const char* tag = check.state == 0 ? "PASS" : (check.state == 1 ? "FAIL" : "SKIP");
        out << tag << ' ' << check.name;
        if (!check.detail.empty()) out << ' ' << check.detail;
        out << '\n';
    }
}

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

} // namespace

int cmd_impact(const RunConfig& config, std::ostream& out, std::ostream& err) {
    (void)err;
    const SizeDistribution dist = parse_dist_spec(config.dist);
    const std::int64_t horizon = default_horizon(dist, config.horizon, 1000);
    const ImpactSchedule schedule = solve_for_config(config, dist, horizon);
    if (config.format == "csv") {
        std::ostringstream csv;
        write_schedule_csv(csv, schedule, dist);
        write_text(config.out, csv.str(), out);
    } else if (config.format == "json") {
        write_text(config.out, schedule_json(schedule, dist) + "\n", out);
    } else {
        throw config_error("unknown format '" + config.format + "' (csv|json)");
    }
    return kExitOk;
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    (void)err;
    const SizeDistribution dist = parse_dist_spec(config.dist);
    if (!dist.finite_support()) {
        throw config_error("simulate requires a finite-support size law");
    }
    const std::int64_t horizon = dist.max_size();
    const ImpactSchedule schedule = solve_for_config(config, dist, horizon);

    GameConfig game = default_game_config(dist, schedule);
    game.mu = config.mu;
    game.k_traders = config.k_traders;
    game.null_dist = parse_dist_spec(config.null_dist);
    game.s0 = config.s0;
    game.n_paths = config.paths;
    game.seed = config.seed;
    if (config.eta_scale >= 0.0) game.eta.scale = config.eta_scale;
    if (config.eta_kind == "gaussian") {
        game.eta.kind = EtaLaw::Kind::gaussian;
    } else if (config.eta_kind == "uniform") {
        game.eta.kind = EtaLaw::Kind::uniform;
    } else {
        throw config_error("unknown eta kind '" + config.eta_kind + "' (gaussian|uniform)");
    }

    const SimulationOutcome outcome = run_paths(game);
    write_text(config.out, outcome_summary_json(outcome) + "\n", out);
    return kExitOk;
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
    (void)err;
    const SizeDistribution dist = parse_dist_spec(config.dist);
    const std::int64_t horizon = default_horizon(dist, config.horizon, 200);
    const bool full_support = dist.finite_support() && horizon == dist.max_size();

    double r0 = 0.0, rtilde1 = 0.0;
    ImpactSchedule schedule = solve_for_config(config, dist, horizon, &r0, &rtilde1);
    const ImpactSchedule recursive = solve_schedule_recursive(dist, r0, rtilde1, horizon);
    if (!config.corrupt.empty()) {
        const CorruptSpec corrupt = parse_corrupt_spec(config.corrupt);
        schedule = with_scaled_rtilde(schedule, corrupt.t, corrupt.factor);
    }

    std::vector<CheckLine> checks;
    const auto push = [&checks](const std::string& name, bool ok, const std::string& detail) {
        checks.push_back({name, ok ? 0 : 1, detail});
    };

    // closed form vs recursion
    {
        double worst = 0.0;
        for (std::int64_t t = 1; t <= schedule.rtilde_steps(); ++t) {
            const double a = schedule.rtilde_at(t);
            const double b = recursive.rtilde_at(t);
            worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}));
        }
        // the corruption is applied only to the closed-form copy, so this
        // check reports on the uncorrupted agreement when corrupt is set
        if (!config.corrupt.empty()) {
            worst = 0.0;
            const ImpactSchedule clean = solve_schedule(dist, r0, rtilde1, horizon);
            for (std::int64_t t = 1; t <= clean.rtilde_steps(); ++t) {
                const double a = clean.rtilde_at(t);
                const double b = recursive.rtilde_at(t);
                worst = std::max(worst,
                                 std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}));
            }
        }
        push("closed_vs_recursive", worst < 1e-10, "max_rel=" + sci(worst));
    }

    // martingale condition on the (possibly corrupted) schedule
    {
        double worst = 0.0;
        for (std::int64_t t = 1; t <= schedule.rtilde_steps() && t < horizon; ++t) {
            const double st = dist.survival(t);
            const double pcont = dist.survival(t + 1) / st;
            const double lhs = pcont * schedule.rtilde_at(t);
            const double rhs = (1.0 - pcont) * schedule.rrev_at(t);
            const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
        push("martingale", worst < 1e-12, "max_residual=" + sci(worst));
    }

    // fair pricing pi_N = 0 on the interior
    {
        double worst = 0.0;
        const std::int64_t top = full_support ? horizon - 1 : horizon;
        for (std::int64_t n = 2; n <= top; ++n) {
            const double scale = std::max(1.0, std::abs(schedule.immediate_at(n)));
            worst = std::max(worst, std::abs(schedule.profit_per_lot(n)) / scale);
        }
        push("fair_pricing", worst < 1e-12, "max_pi_interior=" + sci(worst));
    }

    if (full_support) {
        const ProfitReport report = profit_report(schedule, dist);
        const std::int64_t m = dist.max_size();
        {
            double scale = 1.0;
            for (std::int64_t n = 1; n <= m; ++n) {
                scale = std::max(scale, std::abs(static_cast<double>(n) *
                                                 report.pi[static_cast<std::size_t>(n - 1)] *
                                                 dist.pmf(n)));
            }
            push("overall_profit", std::abs(report.overall) < 1e-10 * scale,
                 "|sum p N pi|=" + sci(std::abs(report.overall)));
        }
        {
            bool ok = true;
            std::string detail;
            double min_partial = std::numeric_limits<double>::infinity();
            for (std::int64_t nbar = 1; nbar < m && ok; ++nbar) {
                try {
                    const double v = partial_profit(report, schedule, dist, nbar);
                    min_partial = std::min(min_partial, v);
                    if (v < -1e-12) {
                        ok = false;
                        detail = "negative partial sum at nbar=" + std::to_string(nbar);
                    }
                } catch (const numerical_error& e) {
                    ok = false;
                    detail = e.what();
                }
            }
            if (ok) detail = "min_partial=" + sci(min_partial);
            push("partial_sums", ok, detail);
        }
        {
            const double pi1 = report.pi.front();
            const double pim = report.pi.back();
            const double link = dist.pmf(1) * pi1 +
                                static_cast<double>(m) * pim * dist.pmf(m);
            const bool ok = pi1 > 0.0 && pim < 0.0 && std::abs(link) < 1e-12 *
                            std::max(1.0, std::abs(dist.pmf(1) * pi1));
            push("endpoint_profits", ok,
                 "pi_1=" + sci(pi1) + " pi_M=" + sci(pim) + " link=" + sci(link));
        }
    } else {
        checks.push_back({"overall_profit", 2, "(unbounded support; Prop 1 needs finite M)"});
        checks.push_back({"endpoint_profits", 2, "(unbounded support)"});
        checks.push_back({"partial_sums", 2, "(unbounded support)"});
    }

    // Nash: no profitable one-lot deviation at the solved schedule
    {
        bool ok = true;
        double worst = -std::numeric_limits<double>::infinity();
        for (std::int64_t n = 2; n < horizon; ++n) {
            for (int delta : {-1, +1}) {
                const double dpi = nash_deviation(schedule, config.k_traders, n, delta);
                worst = std::max(worst, dpi);
                if (dpi > 1e-12) ok = false;
            }
        }
        push("nash_deviation", ok, "max_dPi=" + sci(worst));
    }

    print_checks(checks, out);
    const bool any_fail = std::any_of(checks.begin(), checks.end(),
                                      [](const CheckLine& c) { return c.state == 1; });
    return any_fail ? kExitVerifyFailed : kExitOk;
}

int cmd_figure(const RunConfig& config, std::ostream& out, std::ostream& err) {
    (void)err;
    char buf[64];
    const auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    if (config.figure_id == 2) {
        const std::string prefix = (config.out.empty() || config.out == "-") ? "figure2"
                                                                             : config.out;
        std::ostringstream impact_csv;
        impact_csv << "beta,t,I_immediate,I_permanent\n";
        for (double beta : {1.0, 1.5, 2.0, 2.5}) {
            const SizeDistribution dist = make_pareto(beta);
            const ImpactSchedule schedule =
                solve_schedule(dist, config.r0, config.rtilde1, 1000);
            for (std::int64_t t = 1; t <= 1000; ++t) {
                impact_csv << fmt(beta) << ',' << t << ',' << fmt(schedule.immediate_at(t))
                           << ',' << fmt(schedule.permanent_at(t)) << '\n';
            }
        }
        write_text(prefix + "_impact.csv", impact_csv.str(), out);

        // expected price profile of an N = 20 metaorder at beta = 1.5:
        // rides the immediate-impact curve, then reverts to I_20
        std::ostringstream rev_csv;
        rev_csv << "t,price\n";
        const SizeDistribution dist = make_pareto(1.5);
        const ImpactSchedule schedule = solve_schedule(dist, config.r0, config.rtilde1, 21);
        for (std::int64_t t = 1; t <= 20; ++t) {
            rev_csv << t << ',' << fmt(schedule.immediate_at(t)) << '\n';
        }
        rev_csv << 21 << ',' << fmt(schedule.permanent_at(20)) << '\n';
        write_text(prefix + "_reversion.csv", rev_csv.str(), out);
        return kExitOk;
    }
    if (config.figure_id == 3) {
        const std::string prefix = (config.out.empty() || config.out == "-") ? "figure3"
                                                                             : config.out;
        std::ostringstream impact_csv;
        impact_csv << "beta,t,I_immediate\n";
        for (double beta : {1.5, 2.0, 2.5}) {
            const SizeDistribution dist = make_truncated_pareto(beta, 1000);
            const ImpactSchedule schedule =
                solve_schedule(dist, config.r0, config.rtilde1, 1000);
            for (std::int64_t t = 1; t <= 1000; ++t) {
                impact_csv << fmt(beta) << ',' << t << ',' << fmt(schedule.immediate_at(t))
                           << '\n';
            }
        }
        write_text(prefix + "_impact.csv", impact_csv.str(), out);
        return kExitOk;
    }
    throw config_error("unknown figure id " + std::to_string(config.figure_id) +
                       " (have: 2, 3)");
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.command == "impact") return cmd_impact(config, out, err);
        if (config.command == "simulate") return cmd_simulate(config, out, err);
        if (config.command == "verify") return cmd_verify(config, out, err);
        if (config.command == "figure") return cmd_figure(config, out, err);
        err << "error: config: unknown command '" << config.command << "'\n";
        return kExitConfig;
    } catch (const config_error& e) {
        err << "error: config: " << e.what() << '\n';
        return kExitConfig;
    } catch (const domain_error& e) {
        err << "error: config: " << e.what() << '\n';
        return kExitConfig;
    } catch (const numerical_error& e) {
        err << "error: numerical: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace impactkit::cli
