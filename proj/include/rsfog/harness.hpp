#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsfog/baselines.hpp"

namespace rsfog {

struct SweepSpec {
    SystemConfig base;
    std::string param;  // K | L_max_bit | F_k_cyc_s | power_pair_dBm
    std::vector<double> values;
    std::vector<SchemeKind> schemes;
    std::vector<std::uint64_t> seeds;
    /// Throws std::invalid_argument on unknown parameter, empty seeds, or a
    /// value list that is not strictly increasing.
    void validate() const;
};

struct ResultRow {
    std::string scheme;
    std::string seed;   // decimal seed, or "mean" for aggregate rows
    std::string param;  // swept parameter name, or "none" for single solves
    double value = 0;
    double T_u = 0, T_p = 0, T_d = 0, T_total = 0;
    double iterations = 0;
    std::string status;
    double wall_ms = 0;
};

inline constexpr const char* kCsvHeader =
    "scheme,seed,param,value,T_u,T_p,T_d,T_total,iterations,status,wall_ms";
std::string csv_line(const ResultRow& row);

/// power_pair_dBm couples P_k = v with P_b = v + 15 so both ends of the link scale together.
void apply_param(SystemConfig& cfg, const std::string& param, double value);

struct RunOutput {
    ResultRow row;
    Solution sol;
};

/// One AO run; when out_dir is non-empty, writes result.csv and solution.json.
RunOutput run_solve(const SystemConfig& cfg, SchemeKind scheme, std::uint64_t seed,
                    const std::string& out_dir);

struct SweepResult {
    std::vector<ResultRow> rows;  // detail rows, then per-(scheme,value) means
    int excluded = 0;             // non-converged cells left out of the means
};

/// Runs every (scheme, value, seed) cell on a bounded worker pool; scenarios
/// are redrawn per seed and positions held fixed across values. When out_dir
/// is non-empty writes sweep.csv and plot.gp. workers <= 0 means one per
/// logical CPU.
SweepResult run_sweep(const SweepSpec& spec, const std::string& out_dir, int workers = 0);

/// Invariant suite on small fixed instances; one PASS/FAIL line per check.
bool run_selftest(std::ostream& os);

} // namespace rsfog
