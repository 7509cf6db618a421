#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsfog/harness.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::vector<double> parse_values(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split_commas(s)) {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("bad value: " + tok);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty value list");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rate-splitting fog offloading solver"};
    app.require_subcommand(1);

    std::string config, scheme_name = "RS_FOG", out_dir;
    std::uint64_t seed = 0;
    auto* solve = app.add_subcommand("solve", "run one scheme on one scenario");
    solve->add_option("--config", config, "key=value config file")->required();
    solve->add_option("--scheme", scheme_name, "RS_FOG | SDMA | NOMA | RS_CLOUD");
    solve->add_option("--seed", seed, "scenario seed");
    solve->add_option("--out", out_dir, "output directory (result.csv, solution.json)");

    std::string param, values_str, schemes_str = "RS_FOG";
    int n_seeds = 20, workers = 0;
    auto* sweep = app.add_subcommand("sweep", "parameter sweep with per-value means");
    sweep->add_option("--config", config, "key=value config file")->required();
    sweep->add_option("--param", param, "K | L_max_bit | F_k_cyc_s | power_pair_dBm")
        ->required();
    sweep->add_option("--values", values_str, "comma-separated, strictly increasing")
        ->required();
    sweep->add_option("--schemes", schemes_str, "comma-separated scheme names");
    sweep->add_option("--seeds", n_seeds, "number of seeds (0..N-1)");
    sweep->add_option("--workers", workers, "worker threads (default: logical CPUs)");
    sweep->add_option("--out", out_dir, "output directory (sweep.csv, plot.gp)");

    auto* selftest = app.add_subcommand("selftest", "run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*solve) {
            const rsfog::SystemConfig cfg = rsfog::load_config(config);
            const rsfog::SchemeKind kind = rsfog::scheme_from_string(scheme_name);
            const auto out = rsfog::run_solve(cfg, kind, seed, out_dir);
            std::cout << rsfog::kCsvHeader << "\n" << rsfog::csv_line(out.row) << "\n";
            return out.sol.status == rsfog::SolveStatus::Infeasible ? 1 : 0;
        }
        if (*sweep) {
            rsfog::SweepSpec spec;
            spec.base = rsfog::load_config(config);
            spec.param = param;
            spec.values = parse_values(values_str);
            for (const auto& s : split_commas(schemes_str))
                spec.schemes.push_back(rsfog::scheme_from_string(s));
            if (n_seeds <= 0) throw std::invalid_argument("--seeds must be positive");
            for (int i = 0; i < n_seeds; ++i) spec.seeds.push_back(i);
            const auto res = rsfog::run_sweep(spec, out_dir, workers);
            std::cout << rsfog::kCsvHeader << "\n";
            for (const auto& r : res.rows) std::cout << rsfog::csv_line(r) << "\n";
            std::cerr << "non-converged cells excluded from means: " << res.excluded << "\n";
            return 0;
        }
        if (*selftest) return rsfog::run_selftest(std::cout) ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
