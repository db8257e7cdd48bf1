#include "impactkit/game.hpp"

#include "impactkit/errors.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <thread>

namespace impactkit {

namespace {

constexpr std::int64_t kBlockSize = 4096;

unsigned worker_count(std::int64_t blocks) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("IMPACT_KIT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) n = static_cast<unsigned>(v);
    }
    if (blocks < static_cast<std::int64_t>(n)) n = static_cast<unsigned>(blocks);
    return std::max(1u, n);
}

struct BlockAccumulator {
    std::vector<RunningStat> residual_by_t;
    std::vector<RunningStat> profit_by_n;
    std::int64_t present = 0;
    std::int64_t absent = 0;
    std::vector<PathRecord> records;

    void ensure_t(std::size_t t) {
        if (residual_by_t.size() < t) residual_by_t.resize(t);
    }
    void ensure_n(std::size_t n) {
        if (profit_by_n.size() < n) profit_by_n.resize(n);
    }
};

void validate(const GameConfig& config) {
    if (!(config.mu >= 0.0 && config.mu <= 1.0)) {
        throw domain_error("run_paths: mu must lie in [0,1]");
    }
    if (config.k_traders < 1) {
        throw domain_error("run_paths: K must be >= 1");
    }
    if (config.n_paths < 1) {
        throw domain_error("run_paths: n_paths must be >= 1");
    }
    if (!config.dist.finite_support()) {
        throw domain_error("run_paths: metaorder size law must have finite support");
    }
    if (config.schedule.horizon < config.dist.max_size()) {
        throw domain_error("run_paths: schedule horizon " +
                           std::to_string(config.schedule.horizon) +
                           " does not cover the size law support " +
                           std::to_string(config.dist.max_size()));
    }
    if (!(config.eta.scale >= 0.0)) {
        throw domain_error("run_paths: eta scale must be nonnegative");
    }
}

void simulate_block(const GameConfig& config, std::int64_t first, std::int64_t last,
                    BlockAccumulator& acc) {
    std::vector<double> etas;
    std::vector<double> prices;
    for (std::int64_t path = first; path < last; ++path) {
        Rng rng(config.seed, static_cast<std::uint64_t>(path));
        const bool present = rng.next_unit() < config.mu;
        const std::int64_t n = sample_size(present ? config.dist : config.null_dist, rng);

        etas.resize(static_cast<std::size_t>(n));
        for (std::int64_t t = 0; t < n; ++t) etas[static_cast<std::size_t>(t)] = config.eta.draw(rng);

        const double alpha = present ? config.schedule.permanent_at(n) : 0.0;
        prices.resize(static_cast<std::size_t>(n));
        double noise = 0.0;
        for (std::int64_t t = 1; t <= n; ++t) {
            noise += etas[static_cast<std::size_t>(t - 1)];
            const double impact = present ? config.schedule.immediate_at(t) : 0.0;
            prices[static_cast<std::size_t>(t - 1)] = config.s0 + impact + noise;
        }
        const double final_price = config.s0 + alpha + noise;

        acc.ensure_t(static_cast<std::size_t>(n));
        for (std::int64_t t = 1; t < n; ++t) {
            acc.residual_by_t[static_cast<std::size_t>(t - 1)].add(
                prices[static_cast<std::size_t>(t)] - prices[static_cast<std::size_t>(t - 1)]);
        }
        acc.residual_by_t[static_cast<std::size_t>(n - 1)].add(
            final_price - prices[static_cast<std::size_t>(n - 1)]);

        if (present) {
            ++acc.present;
            double mean_price = 0.0;
            for (double p : prices) mean_price += p;
            mean_price /= static_cast<double>(n);
            acc.ensure_n(static_cast<std::size_t>(n));
            acc.profit_by_n[static_cast<std::size_t>(n - 1)].add(mean_price - final_price);
        } else {
            ++acc.absent;
        }

        if (config.record_paths) {
            PathRecord rec;
            rec.present = present;
            rec.n = n;
            rec.alpha = present ? alpha : 0.0;
            rec.prices = prices;
            rec.final_price = final_price;
            rec.day_orders.resize(static_cast<std::size_t>(n));
            for (std::int64_t t = 0; t < n; ++t) {
                const double e = etas[static_cast<std::size_t>(t)];
                rec.day_orders[static_cast<std::size_t>(t)] =
                    config.day_order_size ? config.day_order_size(e) : e;
            }
            acc.records.push_back(std::move(rec));
        }
    }
}

} // namespace

GameConfig default_game_config(SizeDistribution dist, ImpactSchedule schedule) {
    GameConfig config;
    config.eta.scale = 0.5 * schedule.rtilde1;
    config.dist = std::move(dist);
    config.null_dist = make_geometric(0.5);
    config.schedule = std::move(schedule);
    return config;
}

SimulationOutcome run_paths(const GameConfig& config) {
    validate(config);

    const std::int64_t blocks = (config.n_paths + kBlockSize - 1) / kBlockSize;
    std::vector<BlockAccumulator> per_block(static_cast<std::size_t>(blocks));

    const unsigned workers = worker_count(blocks);
    if (workers <= 1) {
        for (std::int64_t b = 0; b < blocks; ++b) {
            simulate_block(config, b * kBlockSize,
                           std::min(config.n_paths, (b + 1) * kBlockSize),
                           per_block[static_cast<std::size_t>(b)]);
        }
    } else {
        std::atomic<std::int64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::int64_t b = next.fetch_add(1);
                    if (b >= blocks) return;
                    simulate_block(config, b * kBlockSize,
                                   std::min(config.n_paths, (b + 1) * kBlockSize),
                                   per_block[static_cast<std::size_t>(b)]);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    SimulationOutcome out;
    for (const auto& blk : per_block) {
        if (out.residual_by_t.size() < blk.residual_by_t.size()) {
            out.residual_by_t.resize(blk.residual_by_t.size());
        }
        for (std::size_t i = 0; i < blk.residual_by_t.size(); ++i) {
            out.residual_by_t[i].merge(blk.residual_by_t[i]);
        }
        if (out.profit_by_n.size() < blk.profit_by_n.size()) {
            out.profit_by_n.resize(blk.profit_by_n.size());
        }
        for (std::size_t i = 0; i < blk.profit_by_n.size(); ++i) {
            out.profit_by_n[i].merge(blk.profit_by_n[i]);
        }
        out.paths_present += blk.present;
        out.paths_absent += blk.absent;
        if (config.record_paths) {
            out.paths.insert(out.paths.end(), blk.records.begin(), blk.records.end());
        }
    }

    out.mu = config.mu;
    out.s0 = config.s0;
    out.k_traders = config.k_traders;
    out.n_paths = config.n_paths;
    out.seed = config.seed;
    out.dist_spec = config.dist.spec_string();
    out.null_spec = config.null_dist.spec_string();
    out.eta_kind = config.eta.name();
    out.eta_scale = config.eta.scale;
    out.horizon = config.schedule.horizon;
    return out;
}

MartingaleDiagnostic martingale_diagnostic(const SimulationOutcome& outcome) {
    if (outcome.residual_by_t.empty()) {
        throw domain_error("martingale_diagnostic: empty outcome");
    }
    MartingaleDiagnostic diag;
    diag.mean.reserve(outcome.residual_by_t.size());
    for (const auto& stat : outcome.residual_by_t) {
        diag.mean.push_back(stat.mean());
        diag.std_error.push_back(stat.std_error());
        diag.count.push_back(stat.count);
    }
    return diag;
}

double nash_deviation(const ImpactSchedule& schedule, std::int64_t k_traders,
                      std::int64_t n, int delta) {
    if (n <= 1 || n >= schedule.horizon) {
        throw domain_error("nash_deviation: requires 1 < N < M");
    }
    if (delta < -1 || delta > 1) {
        throw domain_error("nash_deviation: delta must be -1, 0 or +1");
    }
    if (k_traders < 1) {
        throw domain_error("nash_deviation: K must be >= 1");
    }
    const double pi_n = schedule.profit_per_lot(n);
    if (delta == 0) return -pi_n;

    double avg = 0.0;
    for (std::int64_t t = 1; t <= n; ++t) {
        avg += schedule.immediate_at(t);
    }
    avg /= static_cast<double>(n);
    const double bracket = schedule.immediate_at(n + 1) - avg;
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k_traders);
    const double share = (nd + delta) / (nd * kd + delta);
    return -pi_n - share * bracket;
}

double nash_deviation(const GameConfig& config, std::int64_t n, int delta) {
    return nash_deviation(config.schedule, config.k_traders, n, delta);
}

DetectionResult detection_time(double q, double z) {
    if (!(q > 0.0)) {
        throw domain_error("detection_time: requires q > 0");
    }
    if (!(z > 0.0 && z <= 1.0)) {
        throw domain_error("detection_time: requires participation rate z in (0,1]");
    }
    DetectionResult r;
    r.q = q;
    r.z = z;
    r.steps = (q / z) * (q / z);
    return r;
}

std::string outcome_summary_json(const SimulationOutcome& outcome, int indent) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["config"] = {
        {"mu", outcome.mu},
        {"k_traders", outcome.k_traders},
        {"s0", outcome.s0},
        {"n_paths", outcome.n_paths},
        {"seed", outcome.seed},
        {"dist", outcome.dist_spec},
        {"null_dist", outcome.null_spec},
        {"eta", {{"kind", outcome.eta_kind}, {"scale", outcome.eta_scale}}},
        {"horizon", outcome.horizon},
    };
    j["counts"] = {{"present", outcome.paths_present}, {"absent", outcome.paths_absent}};

    auto per_t = nlohmann::json::array();
    for (std::size_t i = 0; i < outcome.residual_by_t.size(); ++i) {
        const auto& stat = outcome.residual_by_t[i];
        if (stat.count == 0) continue;
        per_t.push_back({{"t", i + 1},
                         {"mean_residual", stat.mean()},
                         {"std_error", stat.count > 1 ? stat.std_error() : 0.0},
                         {"count", stat.count}});
    }
    j["per_t"] = std::move(per_t);

    auto per_n = nlohmann::json::array();
    for (std::size_t i = 0; i < outcome.profit_by_n.size(); ++i) {
        const auto& stat = outcome.profit_by_n[i];
        if (stat.count == 0) continue;
        per_n.push_back({{"N", i + 1},
                         {"pi_hat", stat.mean()},
                         {"std_error", stat.count > 1 ? stat.std_error() : 0.0},
                         {"count", stat.count}});
    }
    j["per_N"] = std::move(per_n);
    return j.dump(indent);
}

} // namespace impactkit
