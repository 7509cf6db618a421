#include "ao_detail.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rsfog {

std::string to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::RS_FOG: return "RS_FOG";
        case SchemeKind::SDMA: return "SDMA";
        case SchemeKind::NOMA: return "NOMA";
        case SchemeKind::RS_CLOUD: return "RS_CLOUD";
    }
    return "?";
}

SchemeKind scheme_from_string(const std::string& name) {
    if (name == "RS_FOG") return SchemeKind::RS_FOG;
    if (name == "SDMA") return SchemeKind::SDMA;
    if (name == "NOMA") return SchemeKind::NOMA;
    if (name == "RS_CLOUD") return SchemeKind::RS_CLOUD;
    throw std::invalid_argument("unknown scheme: " + name);
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIter: return "max-iter";
        case SolveStatus::Infeasible: return "infeasible";
    }
    return "?";
}

SchemeModel make_scheme(SchemeKind kind, const Scenario& sc) {
    const int K = sc.cfg.K;
    SchemeModel s;
    s.kind = kind;
    switch (kind) {
        case SchemeKind::RS_FOG: break;
        case SchemeKind::RS_CLOUD: s.cloud = true; break;
        case SchemeKind::SDMA:
            s.M = 1;
            s.has_common = false;
            break;
        case SchemeKind::NOMA:
            s.M = 1;
            s.has_common = false;
            s.noma_downlink = true;
            break;
    }
    s.up_interf.assign(K, std::vector<std::vector<std::pair<int, int>>>(s.M));
    if (kind == SchemeKind::SDMA) {
        for (int k = 0; k < K; ++k)
            for (int i = 0; i < K; ++i)
                if (i != k) s.up_interf[k][0].emplace_back(i, 0);
    } else {
        s.order = default_decoding_order(sc.H_up, s.M);
        for (int k = 0; k < K; ++k)
            for (int m = 0; m < s.M; ++m) s.up_interf[k][m] = streams_after(s.order, k, m);
    }
    if (s.noma_downlink) {
        s.dl_order.resize(K);
        std::iota(s.dl_order.begin(), s.dl_order.end(), 0);
        std::stable_sort(s.dl_order.begin(), s.dl_order.end(), [&](int a, int b) {
            return sc.h_down[a].norm() > sc.h_down[b].norm();
        });
    }
    return s;
}

FullAux update_aux(const Scenario& sc, const SchemeModel& scheme, const TransmitState& state) {
    const int K = sc.cfg.K, M = scheme.M;
    FullAux fa;
    fa.aux.Y.assign(K, std::vector<Eigen::MatrixXcd>(M));
    fa.aux.Phi.assign(K, std::vector<Eigen::MatrixXcd>(M));
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m)
            std::tie(fa.aux.Y[k][m], fa.aux.Phi[k][m]) =
                update_uplink_aux_stream(state.W, sc.H_up, scheme.up_interf[k][m], k, m);
    if (!scheme.noma_downlink) {
        std::tie(fa.aux.y_c, fa.aux.y_p) = update_downlink_aux(state.p, sc.h_down);
    } else {
        fa.aux.y_c.assign(K, 0.0);
        fa.aux.y_p.assign(K, 0.0);
        fa.y_pair.assign(K, std::vector<std::complex<double>>(K, 0.0));
        for (int jj = 0; jj < K; ++jj) {
            const int uj = scheme.dl_order[jj];
            if (state.p.p[uj].size() == 0) continue;
            for (int ii = 0; ii <= jj; ++ii) {
                const int ui = scheme.dl_order[ii];
                double I = 1.0;
                for (int ll = 0; ll < jj; ++ll) {
                    const int ul = scheme.dl_order[ll];
                    if (state.p.p[ul].size() > 0)
                        I += std::norm(sc.h_down[ui].dot(state.p.p[ul]));
                }
                fa.y_pair[ii][jj] = sc.h_down[ui].dot(state.p.p[uj]) / I;
            }
        }
    }
    return fa;
}

TransmitState initialize(const Scenario& sc, const SchemeModel& scheme) {
    const auto& cfg = sc.cfg;
    const int K = cfg.K, M = scheme.M, A_u = cfg.A_u, A_bt = cfg.A_bt;
    const double P_k = cfg.user_power_w(), P_b = cfg.bs_power_w();

    TransmitState st;
    st.W.W.assign(K, std::vector<Eigen::MatrixXcd>(M));
    for (int k = 0; k < K; ++k) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sc.H_up[k], Eigen::ComputeThinU);
        const Eigen::MatrixXcd U = svd.matrixU().leftCols(A_u);
        for (int m = 0; m < M; ++m) st.W.W[k][m] = std::sqrt(P_k / (M * A_u)) * U;
    }
    const double priv_share = scheme.has_common ? 0.9 : 1.0;
    st.p.p.assign(K, Eigen::VectorXcd::Zero(A_bt));
    for (int k = 0; k < K; ++k) {
        const double nn = sc.h_down[k].norm();
        if (nn > 0) st.p.p[k] = std::sqrt(priv_share * P_b / K) / nn * sc.h_down[k];
    }
    if (scheme.has_common) {
        Eigen::MatrixXcd G(A_bt, K);
        for (int k = 0; k < K; ++k) G.col(k) = sc.h_down[k];
        st.p.p_c = Eigen::VectorXcd::Zero(A_bt);
        if (G.norm() > 0) {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G, Eigen::ComputeThinU);
            st.p.p_c = std::sqrt(0.1 * P_b) * svd.matrixU().col(0);
        }
    }
    st.beta.assign(K, scheme.cloud ? 1.0 : 0.5);
    st.f.assign(K, cfg.F_b_cyc_s / K);
    st.f_tilde.assign(K, 0.0);
    if (!scheme.cloud) {
        for (int k = 0; k < K; ++k)
            st.f_tilde[k] = optimal_local_frequency(P_k, cfg.kappa, cfg.F_k_cyc_s);
        // Shrink the server shares until the (conservative) energy-rate bound
        // sum_k kappa f~ f^2 beta^2/(1-beta^2) <= P_b holds with headroom, so
        // the equal-split start is feasible at low BS power.
        double e = 0;
        for (int k = 0; k < K; ++k) {
            const double b2 = st.beta[k] * st.beta[k];
            e += cfg.kappa * st.f_tilde[k] * st.f[k] * st.f[k] * b2 / (1.0 - b2);
        }
        if (e > 0.9 * P_b)
            for (double& f : st.f) f *= std::sqrt(0.9 * P_b / e);
    }
    st.Rdc_alloc.assign(K, 0.0);
    return st;
}

RateReport evaluate_state(const Scenario& sc, const SchemeModel& scheme,
                          const TransmitState& st) {
    const auto& cfg = sc.cfg;
    const int K = cfg.K, M = scheme.M;
    const double B = cfg.bandwidth_hz, omega = cfg.omega_cyc_bit;
    constexpr double inf = std::numeric_limits<double>::infinity();

    RateReport rep;
    rep.Ru.assign(K, std::vector<double>(M, 0.0));
    std::vector<double> Ru_user(K, 0.0), Rd_user(K, 0.0);
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m) {
            rep.Ru[k][m] = stream_rate_for_set(st.W, sc.H_up, scheme.up_interf[k][m], k, m);
            Ru_user[k] += rep.Ru[k][m];
        }

    if (scheme.noma_downlink) {
        rep.Rd_p = detail::noma_downlink_rates(st.p, sc.h_down, scheme.dl_order);
        rep.Rd_c_alloc.assign(K, 0.0);
        Rd_user = rep.Rd_p;
    } else {
        rep.Rd_p = downlink_rates(st.p, sc.h_down).second;
        // Common cap over the users that actually decode the common stream
        // (those needing feedback); idle users do not constrain it.
        const bool pc = st.p.p_c.size() > 0 && st.p.p_c.squaredNorm() > 0;
        double cap = inf;
        bool any = false;
        if (pc) {
            for (int k = 0; k < K; ++k) {
                if (!(st.beta[k] > 0.0)) continue;
                any = true;
                double I_kc = 1.0;
                for (int j = 0; j < K; ++j)
                    if (st.p.p[j].size() > 0) I_kc += std::norm(sc.h_down[k].dot(st.p.p[j]));
                cap = std::min(cap,
                               std::log2(1.0 + std::norm(sc.h_down[k].dot(st.p.p_c)) / I_kc));
            }
        }
        rep.Rd_c = (pc && any) ? cap : 0.0;
        rep.Rd_c_alloc = st.Rdc_alloc;
        double s = 0;
        for (double v : rep.Rd_c_alloc) s += v;
        if (s > rep.Rd_c && s > 0)
            for (double& v : rep.Rd_c_alloc) v *= rep.Rd_c / s;
        for (int k = 0; k < K; ++k) Rd_user[k] = rep.Rd_c_alloc[k] + rep.Rd_p[k];
    }

    auto safe = [&](double num, double den) {
        if (num == 0.0) return 0.0;
        return den > 0.0 ? num / den : inf;
    };
    StageTimes t;
    for (int k = 0; k < K; ++k) {
        const double alpha = st.beta[k] * st.beta[k];
        const double L = sc.L_bit[k];
        t.T_u = std::max(t.T_u, safe(alpha * L, B * Ru_user[k]));
        t.T_d = std::max(t.T_d, safe(cfg.epsilon_compress * alpha * L, B * Rd_user[k]));
        t.T_p = std::max(t.T_p, safe(omega * alpha * L, st.f[k]));
        t.T_p = std::max(t.T_p, safe(omega * (1.0 - alpha) * L, st.f_tilde[k]));
    }
    if (scheme.cloud) {
        // the BS energy-rate budget can stretch the processing phase
        double e = 0;
        for (int k = 0; k < K; ++k)
            e += cfg.kappa * st.f[k] * st.f[k] * omega * sc.L_bit[k];
        t.T_p = std::max(t.T_p, e / cfg.bs_power_w());
    }
    rep.times = t;
    return rep;
}

double true_objective(const Scenario& sc, const SchemeModel& scheme, const TransmitState& st) {
    return evaluate_state(sc, scheme, st).times.total();
}

Solution ao_run(const Scenario& sc, const SchemeModel& scheme, const AoOptions& opts,
                const TransmitState& init) {
    Solution sol;
    TransmitState cur = init;
    sol.trace.push_back(true_objective(sc, scheme, cur));
    for (int it = 1; it <= opts.max_iter; ++it) {
        SubproblemSpec spec;
        TransmitState next;
        try {
            const FullAux aux = update_aux(sc, scheme, cur);
            spec = assemble_subproblem(sc, scheme, aux, cur, opts);
            sol.carryover_violation =
                std::max(sol.carryover_violation, spec.carryover_violation);
            next = solve_subproblem(sc, scheme, spec, opts);
        } catch (const std::exception& e) {
            sol.message = e.what();
            if (it == 1) sol.status = SolveStatus::Infeasible;
            break;
        }
        cur = std::move(next);
        const double obj = true_objective(sc, scheme, cur);
        const double prev = sol.trace.back();
        sol.trace.push_back(obj);
        sol.iterations = it;
        if (std::isfinite(prev) &&
            std::abs(prev - obj) <= opts.tol_ao * std::max(std::abs(prev), 1e-300)) {
            sol.status = SolveStatus::Converged;
            break;
        }
    }
    sol.state = std::move(cur);
    sol.report = evaluate_state(sc, scheme, sol.state);
    return sol;
}

Solution ao_minimize(const Scenario& sc, const AoOptions& opts) {
    const SchemeModel scheme = make_scheme(SchemeKind::RS_FOG, sc);
    return ao_run(sc, scheme, opts, initialize(sc, scheme));
}

AuditReport audit_solution(const Scenario& sc, const SchemeModel& scheme, const Solution& sol) {
    const auto& cfg = sc.cfg;
    const int K = cfg.K;
    const TransmitState& st = sol.state;
    const RateReport rep = evaluate_state(sc, scheme, st);
    AuditReport rpt;
    auto check = [&](const std::string& what, double val, double cap) {
        const double rel = (val - cap) / std::max(std::abs(cap), 1e-12);
        if (rel > rpt.max_rel_violation) rpt.max_rel_violation = rel;
        if (rel > 1e-6)
            rpt.violations.push_back(what + ": " + std::to_string(val) + " > " +
                                     std::to_string(cap));
    };

    for (int k = 0; k < K; ++k) {
        double pw = 0;
        for (const auto& Wkm : st.W.W[k]) pw += Wkm.squaredNorm();
        check("user_power[" + std::to_string(k) + "]", pw, cfg.user_power_w());
        check("beta_ub[" + std::to_string(k) + "]", st.beta[k], 1.0);
        check("beta_lb[" + std::to_string(k) + "]", -st.beta[k], 0.0 + 1e-18);
        if (!scheme.cloud) {
            check("local_cpu_cap[" + std::to_string(k) + "]", st.f_tilde[k], cfg.F_k_cyc_s);
            // true user-side energy budget E_l <= P_k * T_p
            const auto [tl, el] = local_cost(st.beta[k], sc.L_bit[k], cfg.omega_cyc_bit,
                                             st.f_tilde[k], cfg.kappa);
            (void)tl;
            check("user_energy[" + std::to_string(k) + "]", el,
                  cfg.user_power_w() * rep.times.T_p);
        }
        check("rdc_alloc_nonneg[" + std::to_string(k) + "]", -st.Rdc_alloc[k], 1e-18);
    }
    double pb = st.p.p_c.size() > 0 ? st.p.p_c.squaredNorm() : 0.0;
    for (const auto& pk : st.p.p) pb += pk.squaredNorm();
    check("bs_power", pb, cfg.bs_power_w());
    double fsum = 0;
    for (double f : st.f) fsum += f;
    check("server_share", fsum, cfg.F_b_cyc_s);
    double es = 0;
    for (int k = 0; k < K; ++k)
        es += server_cost(st.beta[k], sc.L_bit[k], cfg.omega_cyc_bit, st.f[k], cfg.kappa).second;
    check("bs_energy", es, cfg.bs_power_w() * rep.times.T_p);
    double alloc = 0;
    for (double v : st.Rdc_alloc) alloc += v;
    if (alloc > 0) check("common_rate", alloc, rep.Rd_c);
    return rpt;
}

} // namespace rsfog
