#pragma once

#include "impactkit/distributions.hpp"
#include "impactkit/information.hpp"

#include <cstdint>
#include <string>

namespace impactkit::cli {

/// One fully-resolved command invocation. Round-trips through canonical JSON.
struct RunConfig {
    std::string command;        // impact | simulate | verify | figure
    std::string dist;           // size-law spec string
    std::string null_dist = "geometric:q=0.5";
    std::string density;        // information density spec ("" = none)
    double r0 = 1.0;
    double rtilde1 = 1.0;
    std::int64_t horizon = 0;   // 0 = per-command default
    std::string out = "-";      // "-" = stdout; figure: file prefix
    std::string format = "csv"; // csv | json
    std::uint64_t seed = 0;
    std::int64_t paths = 100000;
    double mu = 0.5;
    double eta_scale = -1.0;    // < 0 = default 0.5 * rtilde1
    std::string eta_kind = "gaussian";
    std::int64_t k_traders = 100;
    double s0 = 100.0;
    std::string corrupt;        // "rtilde:<t>:x<factor>"
    int figure_id = 0;

    /// Canonical JSON form (stable key order).
    std::string to_canonical_json() const;

    bool operator==(const RunConfig&) const = default;
};

/// Parse the canonical JSON form; unknown keys are rejected.
RunConfig config_from_json_text(const std::string& text);

/// Overlay file values onto `base` for every key the command line left at
/// its default (`given` lists flag names that were set explicitly).
RunConfig merge_config_file(const RunConfig& base, const std::string& file_text,
                            const std::vector<std::string>& given);

/// "pareto:beta=1.5", "tabulated:file=w.txt", "truncated_pareto:beta=1.5,m=1000",
/// "stretched:lambda=0.7[,renormalize=1]", "geometric:q=0.5",
/// "random:m=50,seed=1" (seeded positive tabulated weights).
SizeDistribution parse_dist_spec(const std::string& spec);

/// "uniform:a=0,b=1", "pareto_tail:exponent=4,xmin=1", "table:file=d.txt".
InformationDensity parse_density_spec(const std::string& spec);

struct CorruptSpec {
    std::int64_t t = 0;
    double factor = 1.0;
};

/// "rtilde:<t>:x<factor>", e.g. "rtilde:2:x2".
CorruptSpec parse_corrupt_spec(const std::string& spec);

} // namespace impactkit::cli
