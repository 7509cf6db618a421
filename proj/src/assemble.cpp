#include "ao_detail.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace rsfog {

namespace detail {

Eigen::VectorXd re_im(const Eigen::VectorXcd& z) {
    Eigen::VectorXd v(2 * z.size());
    v.head(z.size()) = z.real();
    v.tail(z.size()) = z.imag();
    return v;
}

Eigen::MatrixXd lower_complex(const Eigen::MatrixXcd& G) {
    const int r = static_cast<int>(G.rows()), c = static_cast<int>(G.cols());
    Eigen::MatrixXd L(2 * r, 2 * c);
    L.topLeftCorner(r, c) = G.real();
    L.topRightCorner(r, c) = -G.imag();
    L.bottomLeftCorner(r, c) = G.imag();
    L.bottomRightCorner(r, c) = G.real();
    return L;
}

Eigen::VectorXd pack_cols(const Eigen::MatrixXcd& W) {
    const int r = static_cast<int>(W.rows()), c = static_cast<int>(W.cols());
    Eigen::VectorXd v(2 * r * c);
    for (int j = 0; j < c; ++j) v.segment(2 * r * j, 2 * r) = re_im(W.col(j));
    return v;
}

Eigen::MatrixXcd unpack_cols(const Eigen::Ref<const Eigen::VectorXd>& v, int rows, int cols) {
    Eigen::MatrixXcd W(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
            W(i, j) = {v(2 * rows * j + i), v(2 * rows * j + rows + i)};
    return W;
}

Eigen::MatrixXcd herm_sqrt(const Eigen::MatrixXcd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (A + A.adjoint()));
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<double> noma_downlink_rates(const DownlinkPrecoders& p,
                                        const std::vector<Eigen::VectorXcd>& h,
                                        const std::vector<int>& dl_order) {
    const int K = static_cast<int>(h.size());
    std::vector<double> rate(K, 0.0);
    auto nz = [&](int u) { return p.p[u].size() > 0 && p.p[u].squaredNorm() > 0; };
    for (int jj = 0; jj < K; ++jj) {
        const int uj = dl_order[jj];
        if (!nz(uj)) continue;
        double r = std::numeric_limits<double>::infinity();
        for (int ii = 0; ii <= jj; ++ii) {
            const int ui = dl_order[ii];
            if (ii != jj && !nz(ui)) continue;
            double I = 1.0;
            for (int ll = 0; ll < jj; ++ll)
                if (nz(dl_order[ll])) I += std::norm(h[ui].dot(p.p[dl_order[ll]]));
            r = std::min(r, std::log2(1.0 + std::norm(h[ui].dot(p.p[uj])) / I));
        }
        rate[uj] = r;
    }
    return rate;
}

} // namespace detail

namespace {

using detail::lower_complex;
using detail::pack_cols;
using detail::re_im;

constexpr double kLn2 = 0.6931471805599453;
constexpr double kRateThresh = 1e-7;  // streams below this (bit/s/Hz) are pinned
constexpr double kCapEps = 1e-9;
constexpr double kFloorF = 1e-9;      // normalized server-share floor

struct Activity {
    std::vector<std::vector<char>> stream;
    std::vector<char> offload, priv, common_ok;
    bool common = false;
};

void derive_activity(Activity& a, const SchemeModel& scheme) {
    const int K = static_cast<int>(a.offload.size());
    for (int pass = 0; pass < K + 2; ++pass) {
        bool changed = false;
        for (int k = 0; k < K; ++k) {
            bool up = false;
            for (char s : a.stream[k]) up = up || s;
            const bool fb = a.priv[k] || (a.common && a.common_ok[k]);
            const char off = (up && fb) ? 1 : 0;
            if (off != a.offload[k]) {
                a.offload[k] = off;
                changed = true;
            }
            if (!off) {
                for (auto& s : a.stream[k])
                    if (s) { s = 0; changed = true; }
                if (a.priv[k]) {
                    a.priv[k] = 0;
                    changed = true;
                }
            }
        }
        if (a.common) {
            bool any_off = false, all_ok = true;
            for (int k = 0; k < K; ++k)
                if (a.offload[k]) {
                    any_off = true;
                    all_ok = all_ok && a.common_ok[k];
                }
            if (!(any_off && all_ok)) {
                a.common = false;
                changed = true;
            }
        }
        if (!changed) break;
    }
    if (scheme.cloud)
        for (int k = 0; k < K; ++k)
            if (!a.offload[k])
                throw std::runtime_error("assemble: user " + std::to_string(k) +
                                         " has no usable offload path under full offloading");
}

Activity initial_activity(const Scenario& sc, const SchemeModel& scheme,
                          const TransmitState& prev) {
    const int K = sc.cfg.K, M = scheme.M;
    Activity a;
    a.stream.assign(K, std::vector<char>(M, 0));
    a.offload.assign(K, 1);
    a.priv.assign(K, 0);
    a.common_ok.assign(K, 0);
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m) {
            const auto& Wkm = prev.W.W[k][m];
            if (Wkm.size() == 0 || Wkm.squaredNorm() == 0) continue;
            a.stream[k][m] =
                stream_rate_for_set(prev.W, sc.H_up, scheme.up_interf[k][m], k, m) > kRateThresh;
        }
    if (scheme.noma_downlink) {
        const auto rates = detail::noma_downlink_rates(prev.p, sc.h_down, scheme.dl_order);
        for (int k = 0; k < K; ++k) a.priv[k] = rates[k] > kRateThresh;
    } else {
        const bool pc = prev.p.p_c.size() > 0 && prev.p.p_c.squaredNorm() > 0;
        for (int k = 0; k < K; ++k) {
            double I_kc = 1.0;
            for (int j = 0; j < K; ++j)
                if (prev.p.p[j].size() > 0) I_kc += std::norm(sc.h_down[k].dot(prev.p.p[j]));
            const double S_kp =
                prev.p.p[k].size() > 0 ? std::norm(sc.h_down[k].dot(prev.p.p[k])) : 0.0;
            a.priv[k] = std::log2(1.0 + S_kp / (I_kc - S_kp)) > kRateThresh;
            if (pc)
                a.common_ok[k] =
                    std::log2(1.0 + std::norm(sc.h_down[k].dot(prev.p.p_c)) / I_kc) > kRateThresh;
        }
        a.common = scheme.has_common && pc;
    }
    derive_activity(a, scheme);
    return a;
}

struct CapRef {
    int con, var, kind, k, m;  // kind 0: uplink stream, 1: private/message
};

struct Build {
    SubproblemSpec spec;
    std::string carryover_tag;
    bool ok = true;
    std::set<std::pair<int, int>> drop_streams;
    std::set<int> drop_priv;
    bool drop_common = false;
};

Build build_once(const Scenario& sc, const SchemeModel& scheme, const FullAux& fa,
                 const TransmitState& prev, const AoOptions& opts, const Activity& act) {
    const auto& cfg = sc.cfg;
    const int K = cfg.K, M = scheme.M, A_ut = cfg.A_ut, A_u = cfg.A_u, A_bt = cfg.A_bt;
    const double s_w = std::sqrt(cfg.user_power_w());
    const double s_p = std::sqrt(cfg.bs_power_w());
    const double F = cfg.F_b_cyc_s;
    const double B = cfg.bandwidth_hz, omega = cfg.omega_cyc_bit, P_b = cfg.bs_power_w();
    const int wsz = 2 * A_ut * A_u, psz = 2 * A_bt;

    Build out;
    Layout& lay = out.spec.lay;
    lay = Layout{};
    int n = 0;
    auto take = [&](int sz) { int o = n; n += sz; return o; };

    lay.w_off.assign(K, std::vector<int>(M, -1));
    lay.pk_off.assign(K, -1);
    lay.f_idx.assign(K, -1);
    lay.beta_idx.assign(K, -1);
    lay.Ru_idx.assign(K, std::vector<int>(M, -1));
    lay.Rdc_idx.assign(K, -1);
    lay.Rdp_idx.assign(K, -1);
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m)
            if (act.stream[k][m]) lay.w_off[k][m] = take(wsz);
    if (act.common) lay.pc_off = take(psz);
    for (int k = 0; k < K; ++k)
        if (act.priv[k]) lay.pk_off[k] = take(psz);
    for (int k = 0; k < K; ++k)
        if (act.offload[k]) {
            lay.f_idx[k] = take(1);
            if (!scheme.cloud) lay.beta_idx[k] = take(1);
        }
    lay.Tu = take(1);
    lay.Tp = take(1);
    lay.Td = take(1);
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m)
            if (act.stream[k][m]) lay.Ru_idx[k][m] = take(1);
    for (int k = 0; k < K; ++k) {
        if (act.common && act.offload[k]) lay.Rdc_idx[k] = take(1);
        if (act.priv[k]) lay.Rdp_idx[k] = take(1);
    }
    lay.n = n;

    convex::Program& prog = out.spec.prog;
    prog.n = n;
    prog.cost = Eigen::VectorXd::Zero(n);
    prog.cost(lay.Tu) = prog.cost(lay.Tp) = prog.cost(lay.Td) = 1.0;

    auto zvec = [&] { return Eigen::VectorXd::Zero(n); };
    auto push = [&](convex::Constraint&& c) {
        if (c.a.size() == 0) c.a = zvec();
        prog.cons.push_back(std::move(c));
        return static_cast<int>(prog.cons.size()) - 1;
    };

    std::vector<CapRef> caps;
    std::vector<int> common_cons, tu_cons, tp_cons, td_cons, cloud_energy;

    // (vi) uplink surrogate rate caps, one per active stream
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m) {
            if (!act.stream[k][m]) continue;
            const Eigen::MatrixXcd& Y = fa.aux.Y[k][m];
            const Eigen::MatrixXcd& Phi = fa.aux.Phi[k][m];
            const Eigen::MatrixXcd A =
                Eigen::MatrixXcd::Identity(A_u, A_u) + 0.5 * (Phi + Phi.adjoint());
            const Eigen::MatrixXcd Asq = detail::herm_sqrt(A);
            const double c_km = logdet_i_plus(Phi) -
                                (Phi.trace().real() + (A * (Y.adjoint() * Y)).trace().real()) / kLn2;
            convex::Constraint con;
            con.kind = convex::Constraint::Kind::Quadratic;
            con.tag = "uplink_cap";
            con.a = zvec();
            con.a(lay.Ru_idx[k][m]) = 1.0;
            con.b = -c_km;
            const Eigen::MatrixXcd Mlin = sc.H_up[k] * Y * A;  // A_ut x A_u
            for (int j = 0; j < A_u; ++j)
                con.a.segment(lay.w_off[k][m] + 2 * A_ut * j, 2 * A_ut) -=
                    (2.0 * s_w / kLn2) * re_im(Mlin.col(j));
            auto add_quad = [&](int ti, int tj) {
                if (!act.stream[ti][tj]) return;
                const Eigen::MatrixXcd G =
                    (s_w / std::sqrt(kLn2)) * Asq * Y.adjoint() * sc.H_up[ti].adjoint();
                const Eigen::MatrixXd Gr = lower_complex(G);
                for (int j = 0; j < A_u; ++j)
                    con.factors.emplace_back(lay.w_off[ti][tj] + 2 * A_ut * j, Gr);
            };
            add_quad(k, m);
            for (const auto& [ti, tj] : scheme.up_interf[k][m]) add_quad(ti, tj);
            caps.push_back({push(std::move(con)), lay.Ru_idx[k][m], 0, k, m});
        }

    // (v) downlink surrogate caps
    if (act.common) {
        for (int i = 0; i < K; ++i) {
            if (!act.offload[i]) continue;
            const std::complex<double> y = fa.aux.y_c[i];
            convex::Constraint con;
            con.kind = convex::Constraint::Kind::LogQuad;
            con.tag = "common_cap";
            con.a = zvec();
            for (int k = 0; k < K; ++k)
                if (lay.Rdc_idx[k] >= 0) con.a(lay.Rdc_idx[k]) = 1.0;
            con.phi_c0 = 1.0 - std::norm(y);
            con.phi_a = zvec();
            con.phi_a.segment(lay.pc_off, psz) = 2.0 * s_p * re_im(sc.h_down[i] * y);
            for (int j = 0; j < K; ++j)
                if (act.priv[j])
                    con.factors.emplace_back(
                        lay.pk_off[j], std::abs(y) * s_p * lower_complex(sc.h_down[i].adjoint()));
            common_cons.push_back(push(std::move(con)));
        }
    }
    if (!scheme.noma_downlink) {
        for (int k = 0; k < K; ++k) {
            if (!act.priv[k]) continue;
            const std::complex<double> y = fa.aux.y_p[k];
            convex::Constraint con;
            con.kind = convex::Constraint::Kind::LogQuad;
            con.tag = "private_cap";
            con.a = zvec();
            con.a(lay.Rdp_idx[k]) = 1.0;
            con.phi_c0 = 1.0 - std::norm(y);
            con.phi_a = zvec();
            con.phi_a.segment(lay.pk_off[k], psz) = 2.0 * s_p * re_im(sc.h_down[k] * y);
            for (int j = 0; j < K; ++j)
                if (j != k && act.priv[j])
                    con.factors.emplace_back(
                        lay.pk_off[j], std::abs(y) * s_p * lower_complex(sc.h_down[k].adjoint()));
            caps.push_back({push(std::move(con)), lay.Rdp_idx[k], 1, k, 0});
        }
    } else {
        // one surrogate per (decoder, message) pair, all capping the message rate
        for (int jj = 0; jj < K; ++jj) {
            const int uj = scheme.dl_order[jj];
            if (!act.priv[uj]) continue;
            for (int ii = 0; ii <= jj; ++ii) {
                const int ui = scheme.dl_order[ii];
                if (ii != jj && !act.priv[ui]) continue;
                const std::complex<double> y = fa.y_pair[ii][jj];
                convex::Constraint con;
                con.kind = convex::Constraint::Kind::LogQuad;
                con.tag = "private_cap";
                con.a = zvec();
                con.a(lay.Rdp_idx[uj]) = 1.0;
                con.phi_c0 = 1.0 - std::norm(y);
                con.phi_a = zvec();
                con.phi_a.segment(lay.pk_off[uj], psz) = 2.0 * s_p * re_im(sc.h_down[ui] * y);
                for (int ll = 0; ll < jj; ++ll) {
                    const int ul = scheme.dl_order[ll];
                    if (act.priv[ul])
                        con.factors.emplace_back(lay.pk_off[ul], std::abs(y) * s_p *
                                                                     lower_complex(sc.h_down[ui].adjoint()));
                }
                caps.push_back({push(std::move(con)), lay.Rdp_idx[uj], 1, uj, 0});
            }
        }
    }

    // (i), (ii), (iv) delay constraints as quadratic-over-linear atoms
    for (int k = 0; k < K; ++k) {
        if (!act.offload[k]) continue;
        const double L = sc.L_bit[k];
        auto num_beta = [&](convex::Ratio& r) {
            r.a = zvec();
            if (scheme.cloud) r.a0 = 1.0;
            else r.a(lay.beta_idx[k]) = 1.0;
        };
        {
            convex::Constraint con;
            con.kind = convex::Constraint::Kind::RatioSum;
            con.tag = "offload_delay";
            con.a = zvec();
            con.a(lay.Tu) = -1.0;
            convex::Ratio r;
            r.c = L;
            num_beta(r);
            r.d = zvec();
            for (int m = 0; m < M; ++m)
                if (lay.Ru_idx[k][m] >= 0) r.d(lay.Ru_idx[k][m]) = B;
            con.ratios.push_back(std::move(r));
            tu_cons.push_back(push(std::move(con)));
        }
        {
            convex::Constraint con;
            con.kind = convex::Constraint::Kind::RatioSum;
            con.tag = "server_time";
            con.a = zvec();
            con.a(lay.Tp) = -1.0;
            convex::Ratio r;
            r.c = omega * L / F;
            num_beta(r);
            r.d = zvec();
            r.d(lay.f_idx[k]) = 1.0;
            con.ratios.push_back(std::move(r));
            tp_cons.push_back(push(std::move(con)));
        }
        {
            convex::Constraint con;
            con.kind = convex::Constraint::Kind::RatioSum;
            con.tag = "feedback_delay";
            con.a = zvec();
            con.a(lay.Td) = -1.0;
            convex::Ratio r;
            r.c = cfg.epsilon_compress * L;
            num_beta(r);
            r.d = zvec();
            if (lay.Rdc_idx[k] >= 0) r.d(lay.Rdc_idx[k]) = B;
            if (lay.Rdp_idx[k] >= 0) r.d(lay.Rdp_idx[k]) = B;
            con.ratios.push_back(std::move(r));
            td_cons.push_back(push(std::move(con)));
        }
    }

    // (iii) linearized local-time constraints
    if (!scheme.cloud) {
        std::vector<double> beta_prev(K, 0.0);
        for (int k = 0; k < K; ++k)
            if (act.offload[k]) beta_prev[k] = prev.beta[k];
        const auto lt = local_time_constraint_terms(beta_prev, prev.f_tilde, sc.L_bit, omega);
        for (int k = 0; k < K; ++k) {
            convex::Constraint con;
            con.tag = "local_time";
            con.a = zvec();
            con.a(lay.Tp) = -1.0;
            if (lay.beta_idx[k] >= 0) con.a(lay.beta_idx[k]) = lt[k].lin_beta;
            con.b = lt[k].constant;
            tp_cons.push_back(push(std::move(con)));
        }
    }

    // (vii) power constraints
    for (int k = 0; k < K; ++k) {
        bool any = false;
        for (int m = 0; m < M; ++m) any = any || act.stream[k][m];
        if (!any) continue;
        convex::Constraint con;
        con.kind = convex::Constraint::Kind::Quadratic;
        con.tag = "user_power";
        con.b = -1.0;
        for (int m = 0; m < M; ++m)
            if (act.stream[k][m])
                con.factors.emplace_back(lay.w_off[k][m], Eigen::MatrixXd::Identity(wsz, wsz));
        push(std::move(con));
    }
    {
        convex::Constraint con;
        con.kind = convex::Constraint::Kind::Quadratic;
        con.tag = "bs_power";
        con.b = -1.0;
        if (lay.pc_off >= 0)
            con.factors.emplace_back(lay.pc_off, Eigen::MatrixXd::Identity(psz, psz));
        for (int k = 0; k < K; ++k)
            if (lay.pk_off[k] >= 0)
                con.factors.emplace_back(lay.pk_off[k], Eigen::MatrixXd::Identity(psz, psz));
        if (!con.factors.empty()) push(std::move(con));
    }

    // (viii) linear constraints: server share, floors, beta bounds, nonnegativity
    {
        bool any = false;
        convex::Constraint con;
        con.tag = "server_share";
        con.a = zvec();
        con.b = -1.0;
        for (int k = 0; k < K; ++k)
            if (lay.f_idx[k] >= 0) {
                con.a(lay.f_idx[k]) = 1.0;
                any = true;
            }
        if (any) push(std::move(con));
    }
    for (int k = 0; k < K; ++k) {
        if (lay.f_idx[k] >= 0) {
            convex::Constraint con;
            con.tag = "f_floor";
            con.a = zvec();
            con.a(lay.f_idx[k]) = -1.0;
            con.b = kFloorF;
            push(std::move(con));
        }
        if (lay.beta_idx[k] >= 0) {
            convex::Constraint ub;
            ub.tag = "beta_ub";
            ub.a = zvec();
            ub.a(lay.beta_idx[k]) = 1.0;
            ub.b = -opts.beta_max;
            push(std::move(ub));
            convex::Constraint lb;
            lb.tag = "beta_lb";
            lb.a = zvec();
            lb.a(lay.beta_idx[k]) = -1.0;
            push(std::move(lb));
        }
    }
    for (int v : {lay.Tu, lay.Tp, lay.Td}) {
        convex::Constraint con;
        con.tag = "t_nonneg";
        con.a = zvec();
        con.a(v) = -1.0;
        push(std::move(con));
    }
    for (int k = 0; k < K; ++k) {
        std::vector<int> rvars;
        for (int m = 0; m < M; ++m)
            if (lay.Ru_idx[k][m] >= 0) rvars.push_back(lay.Ru_idx[k][m]);
        if (lay.Rdc_idx[k] >= 0) rvars.push_back(lay.Rdc_idx[k]);
        if (lay.Rdp_idx[k] >= 0) rvars.push_back(lay.Rdp_idx[k]);
        for (int v : rvars) {
            convex::Constraint con;
            con.tag = "rate_nonneg";
            con.a = zvec();
            con.a(v) = -1.0;
            push(std::move(con));
        }
    }

    // (ix) BS energy-rate constraint
    if (scheme.cloud) {
        convex::Constraint con;
        con.kind = convex::Constraint::Kind::RatioSum;
        con.tag = "bs_energy";
        con.a = zvec();
        con.b = -P_b;
        for (int k = 0; k < K; ++k) {
            convex::Ratio r;
            r.c = cfg.kappa * omega * sc.L_bit[k] * F * F;
            r.a = zvec();
            r.a(lay.f_idx[k]) = 1.0;
            r.d = zvec();
            r.d(lay.Tp) = 1.0;
            con.ratios.push_back(std::move(r));
        }
        cloud_energy.push_back(push(std::move(con)));
    } else {
        bool any = false;
        for (int k = 0; k < K; ++k) any = any || act.offload[k];
        if (any) {
            const auto et = energy_constraint_terms(prev.f_tilde, prev.f, cfg.kappa);
            convex::Constraint con;
            con.kind = convex::Constraint::Kind::RatioSum;
            con.tag = "bs_energy";
            con.a = zvec();
            con.b = -P_b;
            for (int k = 0; k < K; ++k) {
                if (!act.offload[k]) continue;
                con.a(lay.f_idx[k]) += et[k].lin_f * F;
                con.b += et[k].constant;
                for (double sgn : {-1.0, 1.0}) {
                    convex::Ratio r;
                    r.c = et[k].ratio_c * F * F;
                    r.a = zvec();
                    r.a(lay.f_idx[k]) = 1.0;
                    r.d = zvec();
                    r.d(lay.beta_idx[k]) = sgn;
                    r.d0 = 1.0;
                    con.ratios.push_back(std::move(r));
                }
            }
            push(std::move(con));
        }
    }

    // ---- map the previous iterate into the variable space ----
    auto set_times = [&](Eigen::VectorXd& x, double rel, double abs) {
        x(lay.Tu) = x(lay.Tp) = x(lay.Td) = 0.0;
        auto need = [&](const std::vector<int>& cs) {
            double v = 0;
            for (int ci : cs) v = std::max(v, prog.cons[ci].eval(x));
            return v;
        };
        x(lay.Tu) = need(tu_cons) * (1.0 + rel) + abs;
        x(lay.Tp) = need(tp_cons) * (1.0 + rel) + abs;
        x(lay.Td) = need(td_cons) * (1.0 + rel) + abs;
        for (int ci : cloud_energy) {
            double s = 0;
            for (const auto& r : prog.cons[ci].ratios) {
                const double u = r.a.dot(x) + r.a0;
                s += r.c * u * u;
            }
            x(lay.Tp) = std::max(x(lay.Tp), (s / P_b) * (1.0 + rel) + abs);
        }
    };

    auto map_point = [&](bool strict, Eigen::VectorXd& x) -> bool {
        x = zvec();
        for (int k = 0; k < K; ++k) {
            double sn = 0;
            for (int m = 0; m < M; ++m)
                if (lay.w_off[k][m] >= 0) sn += prev.W.W[k][m].squaredNorm() / (s_w * s_w);
            const double g = (strict && sn > 1.0 - 1e-3) ? std::sqrt((1.0 - 1e-3) / sn) : 1.0;
            for (int m = 0; m < M; ++m)
                if (lay.w_off[k][m] >= 0)
                    x.segment(lay.w_off[k][m], wsz) = (g / s_w) * pack_cols(prev.W.W[k][m]);
        }
        {
            double sn = 0;
            if (lay.pc_off >= 0) sn += prev.p.p_c.squaredNorm() / (s_p * s_p);
            for (int k = 0; k < K; ++k)
                if (lay.pk_off[k] >= 0) sn += prev.p.p[k].squaredNorm() / (s_p * s_p);
            const double g = (strict && sn > 1.0 - 1e-3) ? std::sqrt((1.0 - 1e-3) / sn) : 1.0;
            if (lay.pc_off >= 0) x.segment(lay.pc_off, psz) = (g / s_p) * re_im(prev.p.p_c);
            for (int k = 0; k < K; ++k)
                if (lay.pk_off[k] >= 0) x.segment(lay.pk_off[k], psz) = (g / s_p) * re_im(prev.p.p[k]);
        }
        {
            double sum = 0;
            for (int k = 0; k < K; ++k)
                if (lay.f_idx[k] >= 0) {
                    x(lay.f_idx[k]) = std::max(prev.f[k] / F, strict ? 1e-6 : 2.0 * kFloorF);
                    sum += x(lay.f_idx[k]);
                }
            if (sum > 1.0 - (strict ? 1e-3 : 0.0))
                for (int k = 0; k < K; ++k)
                    if (lay.f_idx[k] >= 0) x(lay.f_idx[k]) *= (1.0 - (strict ? 1e-3 : 1e-12)) / sum;
        }
        for (int k = 0; k < K; ++k)
            if (lay.beta_idx[k] >= 0)
                x(lay.beta_idx[k]) =
                    strict ? std::clamp(prev.beta[k], 1e-3, opts.beta_max * (1.0 - 1e-3))
                           : std::clamp(prev.beta[k], 0.0, opts.beta_max);

        // rate variables from the cap constraints evaluated at zero rates
        const double fac = strict ? 0.99 : 1.0;
        std::vector<double> capv(n, std::numeric_limits<double>::infinity());
        for (const auto& c : caps) capv[c.var] = std::min(capv[c.var], -prog.cons[c.con].eval(x));
        bool fail = false;
        for (const auto& c : caps) {
            if (capv[c.var] > kCapEps) continue;
            fail = true;
            if (c.kind == 0) out.drop_streams.insert({c.k, c.m});
            else out.drop_priv.insert(c.k);
        }
        if (!common_cons.empty()) {
            double mincap = std::numeric_limits<double>::infinity();
            for (int ci : common_cons) mincap = std::min(mincap, -prog.cons[ci].eval(x));
            if (mincap <= kCapEps) {
                fail = true;
                out.drop_common = true;
            } else {
                const double total = (strict ? 0.9 : 1.0) * mincap;
                int cnt = 0;
                for (int k = 0; k < K; ++k) cnt += lay.Rdc_idx[k] >= 0;
                double s = 0;
                for (int k = 0; k < K; ++k)
                    if (lay.Rdc_idx[k] >= 0) {
                        x(lay.Rdc_idx[k]) =
                            prev.Rdc_alloc[k] + (strict ? total * 1e-3 / cnt : 0.0);
                        s += x(lay.Rdc_idx[k]);
                    }
                if (s > total)
                    for (int k = 0; k < K; ++k)
                        if (lay.Rdc_idx[k] >= 0) x(lay.Rdc_idx[k]) *= total / s;
            }
        }
        if (fail && strict) return false;
        for (const auto& c : caps) x(c.var) = fac * std::max(capv[c.var], 0.0);
        set_times(x, strict ? 1e-2 : 0.0, strict ? 1e-9 : 0.0);
        return true;
    };

    Eigen::VectorXd x0;
    if (!map_point(true, x0)) {
        out.ok = false;
        return out;
    }

    auto feasible = [&](const Eigen::VectorXd& v) {
        for (const auto& c : prog.cons)
            if (!c.in_domain(v) || c.eval(v) >= 0.0) return false;
        return true;
    };
    if (!feasible(x0)) {
        // pull back toward a deep-interior anchor (small beta, slack times)
        Eigen::VectorXd xa = x0;
        for (int k = 0; k < K; ++k)
            if (lay.beta_idx[k] >= 0) xa(lay.beta_idx[k]) = std::min(xa(lay.beta_idx[k]), 0.1);
        set_times(xa, 0.05, 1e-9);
        if (!feasible(xa))
            throw std::runtime_error("assemble: could not construct a strictly interior start");
        bool done = false;
        for (double th : {1e-6, 1e-4, 1e-2, 0.1, 0.5}) {
            Eigen::VectorXd xb = (1.0 - th) * x0 + th * xa;
            if (feasible(xb)) {
                x0 = xb;
                done = true;
                break;
            }
        }
        if (!done) x0 = xa;
    }
    out.spec.x0 = x0;

    Eigen::VectorXd xp;
    map_point(false, xp);
    out.spec.x_prev = xp;
    double viol = 0;
    for (const auto& c : prog.cons) {
        if (!c.in_domain(xp)) {
            viol = std::numeric_limits<double>::infinity();
            out.carryover_tag = c.tag + " (domain)";
            break;
        }
        const double g = c.eval(xp);
        if (g > viol) {
            viol = g;
            out.carryover_tag = c.tag;
        }
    }
    out.spec.carryover_violation = viol;
    out.spec.f_tilde = prev.f_tilde;
    return out;
}

} // namespace

SubproblemSpec assemble_subproblem(const Scenario& sc, const SchemeModel& scheme,
                                   const FullAux& aux, const TransmitState& prev,
                                   const AoOptions& opts) {
    Activity act = initial_activity(sc, scheme, prev);
    const int max_passes = sc.cfg.K * (scheme.M + 2) + 4;
    for (int pass = 0; pass < max_passes; ++pass) {
        Build b = build_once(sc, scheme, aux, prev, opts, act);
        if (b.ok) {
            if (b.spec.carryover_violation > 1e-5)
                throw std::runtime_error("assemble: previous iterate violates the new subproblem "
                                         "(stale auxiliaries), violation " +
                                         std::to_string(b.spec.carryover_violation) + " in " +
                                         b.carryover_tag);
            return std::move(b.spec);
        }
        for (const auto& [k, m] : b.drop_streams) act.stream[k][m] = 0;
        for (int k : b.drop_priv) act.priv[k] = 0;
        if (b.drop_common) act.common = false;
        derive_activity(act, scheme);
    }
    throw std::runtime_error("assemble: stream activity did not stabilize");
}

TransmitState solve_subproblem(const Scenario& sc, const SchemeModel& scheme,
                               const SubproblemSpec& spec, const AoOptions& opts) {
    const auto res = convex::ipm_solve(spec.prog, spec.x0, opts.ipm);
    if (!res.converged && res.gap > 1e-4 * std::max(1.0, std::abs(res.obj)))
        throw std::runtime_error("solve_subproblem: " + res.message);

    const auto& cfg = sc.cfg;
    const int K = cfg.K, M = scheme.M, A_ut = cfg.A_ut, A_u = cfg.A_u, A_bt = cfg.A_bt;
    const double s_w = std::sqrt(cfg.user_power_w());
    const double s_p = std::sqrt(cfg.bs_power_w());
    const Layout& lay = spec.lay;
    const Eigen::VectorXd& x = res.x;

    TransmitState st;
    st.W.W.assign(K, std::vector<Eigen::MatrixXcd>(M));
    st.p.p.assign(K, Eigen::VectorXcd::Zero(A_bt));
    st.p.p_c = scheme.has_common ? Eigen::VectorXcd::Zero(A_bt).eval() : Eigen::VectorXcd();
    st.f.assign(K, 0.0);
    st.beta.assign(K, scheme.cloud ? 1.0 : 0.0);
    st.f_tilde = spec.f_tilde;
    st.Rdc_alloc.assign(K, 0.0);
    for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) {
            if (lay.w_off[k][m] >= 0)
                st.W.W[k][m] =
                    s_w * detail::unpack_cols(x.segment(lay.w_off[k][m], 2 * A_ut * A_u), A_ut, A_u);
            else st.W.W[k][m] = Eigen::MatrixXcd::Zero(A_ut, A_u);
        }
        if (lay.pk_off[k] >= 0) {
            const auto seg = x.segment(lay.pk_off[k], 2 * A_bt);
            st.p.p[k] = s_p * (seg.head(A_bt) + std::complex<double>(0, 1) * seg.tail(A_bt));
        }
        if (lay.f_idx[k] >= 0) st.f[k] = cfg.F_b_cyc_s * x(lay.f_idx[k]);
        if (lay.beta_idx[k] >= 0) st.beta[k] = x(lay.beta_idx[k]);
        if (lay.Rdc_idx[k] >= 0) st.Rdc_alloc[k] = x(lay.Rdc_idx[k]);
    }
    if (lay.pc_off >= 0) {
        const auto seg = x.segment(lay.pc_off, 2 * A_bt);
        st.p.p_c = s_p * (seg.head(A_bt) + std::complex<double>(0, 1) * seg.tail(A_bt));
    }
    return st;
}

} // namespace rsfog
