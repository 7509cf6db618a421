#include "rsfog/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace rsfog {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

AoOptions opts_from(const SystemConfig& cfg) {
    AoOptions o;
    o.tol_ao = cfg.tol_ao;
    o.max_iter = cfg.max_iter;
    return o;
}

ResultRow make_row(SchemeKind scheme, std::uint64_t seed, const std::string& param,
                   double value, const Solution& sol, double wall_ms) {
    ResultRow r;
    r.scheme = to_string(scheme);
    r.seed = std::to_string(seed);
    r.param = param;
    r.value = value;
    r.T_u = sol.report.times.T_u;
    r.T_p = sol.report.times.T_p;
    r.T_d = sol.report.times.T_d;
    r.T_total = sol.report.times.total();
    r.iterations = sol.iterations;
    r.status = to_string(sol.status);
    r.wall_ms = wall_ms;
    return r;
}

nlohmann::json solution_json(const SystemConfig& cfg, SchemeKind scheme, std::uint64_t seed,
                             const Solution& sol) {
    nlohmann::json j;
    j["scheme"] = to_string(scheme);
    j["seed"] = seed;
    j["status"] = to_string(sol.status);
    j["iterations"] = sol.iterations;
    j["objective_trace"] = sol.trace;
    j["carryover_violation"] = sol.carryover_violation;
    if (!sol.message.empty()) j["message"] = sol.message;
    j["T_u"] = sol.report.times.T_u;
    j["T_p"] = sol.report.times.T_p;
    j["T_d"] = sol.report.times.T_d;
    j["T_total"] = sol.report.times.total();
    j["beta"] = sol.state.beta;
    j["f"] = sol.state.f;
    j["f_tilde"] = sol.state.f_tilde;
    j["Rd_c"] = sol.report.Rd_c;
    j["Rd_c_alloc"] = sol.report.Rd_c_alloc;
    j["Rd_p"] = sol.report.Rd_p;
    j["Ru"] = sol.report.Ru;
    if (scheme == SchemeKind::NOMA) j["sic_layers_per_user"] = cfg.K - 1;
    return j;
}

} // namespace

std::string csv_line(const ResultRow& r) {
    return r.scheme + "," + r.seed + "," + r.param + "," + num(r.value) + "," + num(r.T_u) +
           "," + num(r.T_p) + "," + num(r.T_d) + "," + num(r.T_total) + "," +
           num(r.iterations) + "," + r.status + "," + num(r.wall_ms);
}

void apply_param(SystemConfig& cfg, const std::string& param, double value) {
    if (param == "K") cfg.K = static_cast<int>(value);
    else if (param == "L_max_bit") cfg.L_max_bit = value;
    else if (param == "F_k_cyc_s") cfg.F_k_cyc_s = value;
    else if (param == "power_pair_dBm") {
        cfg.P_k_dBm = value;
        cfg.P_b_dBm = value + 15.0;
    } else throw std::invalid_argument("unknown sweep parameter: " + param);
}

void SweepSpec::validate() const {
    base.validate();
    if (seeds.empty()) throw std::invalid_argument("sweep: need at least one seed");
    if (schemes.empty()) throw std::invalid_argument("sweep: need at least one scheme");
    if (values.empty()) throw std::invalid_argument("sweep: need at least one value");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw std::invalid_argument("sweep: values must be strictly increasing");
    SystemConfig probe = base;
    apply_param(probe, param, values.front());  // rejects unknown parameter names
}

RunOutput run_solve(const SystemConfig& cfg, SchemeKind scheme, std::uint64_t seed,
                    const std::string& out_dir) {
    cfg.validate();
    const Scenario sc = build_scenario(cfg, seed);
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput out;
    out.sol = solve_scheme(sc, scheme, opts_from(cfg));
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.row = make_row(scheme, seed, "none", 0.0, out.sol, ms);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir + "/result.csv");
        csv << kCsvHeader << "\n" << csv_line(out.row) << "\n";
        std::ofstream js(out_dir + "/solution.json");
        js << solution_json(cfg, scheme, seed, out.sol).dump(2) << "\n";
    }
    return out;
}

SweepResult run_sweep(const SweepSpec& spec, const std::string& out_dir, int workers) {
    spec.validate();
    struct Cell {
        SchemeKind scheme;
        double value;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (SchemeKind s : spec.schemes)
        for (double v : spec.values)
            for (std::uint64_t seed : spec.seeds) cells.push_back({s, v, seed});

    std::vector<ResultRow> detail(cells.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];
            SystemConfig cfg = spec.base;
            apply_param(cfg, spec.param, c.value);
            try {
                cfg.validate();
                const Scenario sc = build_scenario(cfg, c.seed);
                const auto t0 = std::chrono::steady_clock::now();
                const Solution sol = solve_scheme(sc, c.scheme, opts_from(cfg));
                const double ms = std::chrono::duration<double, std::milli>(
                                      std::chrono::steady_clock::now() - t0)
                                      .count();
                detail[i] = make_row(c.scheme, c.seed, spec.param, c.value, sol, ms);
            } catch (const std::exception&) {
                ResultRow r;
                r.scheme = to_string(c.scheme);
                r.seed = std::to_string(c.seed);
                r.param = spec.param;
                r.value = c.value;
                r.status = "infeasible";
                detail[i] = r;
            }
        }
    };
    int nw = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    nw = std::max(1, std::min<int>(nw, static_cast<int>(cells.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nw; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    SweepResult res;
    res.rows = detail;
    // per-(scheme, value) means over converged cells, in cell order
    for (SchemeKind s : spec.schemes)
        for (double v : spec.values) {
            ResultRow mean;
            mean.scheme = to_string(s);
            mean.seed = "mean";
            mean.param = spec.param;
            mean.value = v;
            int cnt = 0;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i].scheme != s || cells[i].value != v) continue;
                if (detail[i].status != "converged") {
                    ++res.excluded;
                    continue;
                }
                ++cnt;
                mean.T_u += detail[i].T_u;
                mean.T_p += detail[i].T_p;
                mean.T_d += detail[i].T_d;
                mean.T_total += detail[i].T_total;
                mean.iterations += detail[i].iterations;
                mean.wall_ms += detail[i].wall_ms;
            }
            if (cnt > 0) {
                mean.T_u /= cnt;
                mean.T_p /= cnt;
                mean.T_d /= cnt;
                mean.T_total /= cnt;
                mean.iterations /= cnt;
                mean.wall_ms /= cnt;
                mean.status = "converged";
            } else {
                mean.status = "infeasible";
            }
            res.rows.push_back(mean);
        }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir + "/sweep.csv");
        csv << kCsvHeader << "\n";
        for (const auto& r : res.rows) csv << csv_line(r) << "\n";
        std::ofstream gp(out_dir + "/plot.gp");
        gp << "# mean T_total vs " << spec.param << " per scheme (" << res.excluded
           << " non-converged cells excluded)\n";
        gp << "set xlabel '" << spec.param << "'\nset ylabel 'mean T_total (s)'\n";
        for (SchemeKind s : spec.schemes) {
            gp << "$" << to_string(s) << " << EOD\n";
            for (const auto& r : res.rows)
                if (r.seed == "mean" && r.scheme == to_string(s) && r.status == "converged")
                    gp << num(r.value) << " " << num(r.T_total) << "\n";
            gp << "EOD\n";
        }
        gp << "plot";
        for (std::size_t i = 0; i < spec.schemes.size(); ++i)
            gp << (i ? "," : "") << " $" << to_string(spec.schemes[i])
               << " using 1:2 with linespoints title '" << to_string(spec.schemes[i]) << "'";
        gp << "\n";
    }
    return res;
}

bool run_selftest(std::ostream& os) {
    bool all = true;
    auto report = [&](const std::string& name, bool ok, const std::string& info = "") {
        all = all && ok;
        os << (ok ? "PASS " : "FAIL ") << name;
        if (!info.empty()) os << " (" << info << ")";
        os << "\n";
    };

    SystemConfig cfg;
    cfg.K = 3;
    cfg.validate();

    // Surrogate tightness at closed-form auxiliaries
    {
        double worst = 0;
        for (std::uint64_t seed : {11u, 12u, 13u}) {
            const Scenario sc = build_scenario(cfg, seed);
            const SchemeModel scheme = make_scheme(SchemeKind::RS_FOG, sc);
            const TransmitState st = initialize(sc, scheme);
            const FullAux fa = update_aux(sc, scheme, st);
            for (int k = 0; k < cfg.K; ++k) {
                for (int m = 0; m < scheme.M; ++m) {
                    const double ex =
                        stream_rate_for_set(st.W, sc.H_up, scheme.up_interf[k][m], k, m);
                    const double su =
                        eval_uplink_surrogate_set(fa.aux.Y[k][m], fa.aux.Phi[k][m], st.W,
                                                  sc.H_up, scheme.up_interf[k][m], k, m);
                    worst = std::max(worst, std::abs(ex - su));
                }
                double I_kc = 1.0;
                for (int j = 0; j < cfg.K; ++j) I_kc += std::norm(sc.h_down[k].dot(st.p.p[j]));
                const double S_kp = std::norm(sc.h_down[k].dot(st.p.p[k]));
                const double ex_c =
                    std::log2(1.0 + std::norm(sc.h_down[k].dot(st.p.p_c)) / I_kc);
                const double ex_p = std::log2(1.0 + S_kp / (I_kc - S_kp));
                worst = std::max(worst, std::abs(ex_c - eval_downlink_surrogate(
                                                             fa.aux.y_c[k], st.p, sc.h_down,
                                                             DownlinkPart::Common, k)));
                worst = std::max(worst, std::abs(ex_p - eval_downlink_surrogate(
                                                             fa.aux.y_p[k], st.p, sc.h_down,
                                                             DownlinkPart::Private, k)));
            }
        }
        report("surrogate-tightness", worst < 1e-9, "max gap " + num(worst));
    }

    // Uplink sum-rate conservation across SIC orders
    {
        double worst = 0;
        for (std::uint64_t seed : {21u, 22u}) {
            const Scenario sc = build_scenario(cfg, seed);
            const SchemeModel scheme = make_scheme(SchemeKind::RS_FOG, sc);
            const TransmitState st = initialize(sc, scheme);
            Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(cfg.A_br, cfg.A_br) * 0.0;
            for (int k = 0; k < cfg.K; ++k)
                for (int m = 0; m < scheme.M; ++m) {
                    const Eigen::MatrixXcd T = sc.H_up[k].adjoint() * st.W.W[k][m];
                    S += T * T.adjoint();
                }
            const double cap = logdet_i_plus(S);
            double sum = 0;
            for (int k = 0; k < cfg.K; ++k)
                for (int m = 0; m < scheme.M; ++m)
                    sum += uplink_stream_rate(st.W, sc.H_up, scheme.order, k, m);
            worst = std::max(worst, std::abs(cap - sum));
        }
        report("sum-rate-conservation", worst < 1e-9, "max gap " + num(worst));
    }

    // Monotone descent, convergence, local/remote time equalization
    {
        bool mono = true, conv = true, eq = true;
        for (std::uint64_t seed : {31u, 32u, 33u}) {
            const Scenario sc = build_scenario(cfg, seed);
            const Solution sol = ao_minimize(sc, opts_from(cfg));
            conv = conv && sol.status == SolveStatus::Converged;
            for (std::size_t i = 1; i < sol.trace.size(); ++i)
                mono = mono && sol.trace[i] <= sol.trace[i - 1] + 1e-6;
            bool interior = true;
            for (double b : sol.state.beta) interior = interior && b > 0.01 && b < 0.99;
            if (interior && sol.status == SolveStatus::Converged) {
                for (int k = 0; k < cfg.K; ++k) {
                    const double tl = cfg.omega_cyc_bit *
                                      (1.0 - sol.state.beta[k] * sol.state.beta[k]) *
                                      sc.L_bit[k] / sol.state.f_tilde[k];
                    eq = eq && std::abs(tl - sol.report.times.T_p) / sol.report.times.T_p <= 1e-2;
                }
            }
        }
        report("monotone-descent", mono);
        report("converged", conv);
        report("time-equalization", eq);
    }

    // Single-user scheme equivalence and nesting
    {
        SystemConfig c1 = cfg;
        c1.K = 1;
        const Scenario sc = build_scenario(c1, 41);
        const double rs = solve_scheme(sc, SchemeKind::RS_FOG, opts_from(c1)).trace.back();
        const double sd = solve_scheme(sc, SchemeKind::SDMA, opts_from(c1)).trace.back();
        report("single-user-equivalence", std::abs(rs - sd) <= 1e-3,
               "RS " + num(rs) + " vs SDMA " + num(sd));
    }
    {
        const Scenario sc = build_scenario(cfg, 51);
        const AoOptions opts = opts_from(cfg);
        const Solution sdma = solve_sdma(sc, opts);
        const SchemeModel rs = make_scheme(SchemeKind::RS_FOG, sc);
        const Solution warm = ao_run(sc, rs, opts, embed_sdma_state(sc, sdma.state));
        report("sdma-nesting", warm.trace.back() <= sdma.trace.back() + 1e-3,
               "RS " + num(warm.trace.back()) + " vs SDMA " + num(sdma.trace.back()));
    }
    return all;
}

} // namespace rsfog
