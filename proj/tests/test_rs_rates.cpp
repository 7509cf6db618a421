#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rsfog/rs_rates.hpp"

using namespace rsfog;

namespace {

Scenario small_scenario(int K, std::uint64_t seed = 3) {
    SystemConfig cfg;
    cfg.K = K;
    return build_scenario(cfg, seed);
}

UplinkPrecoders random_precoders(const Scenario& sc, int M, std::uint64_t seed) {
    Rng r(seed);
    auto cg = [&] { return r.cgauss(); };
    UplinkPrecoders W;
    W.W.resize(sc.cfg.K);
    const double s = std::sqrt(sc.cfg.user_power_w() / (2.0 * M * sc.cfg.A_u));
    for (int k = 0; k < sc.cfg.K; ++k) {
        W.W[k].resize(M);
        for (int m = 0; m < M; ++m) {
            W.W[k][m] = Eigen::MatrixXcd::NullaryExpr(sc.cfg.A_ut, sc.cfg.A_u,
                                                      [&](Eigen::Index, Eigen::Index) { return cg(); });
            W.W[k][m] *= s;
        }
    }
    return W;
}

} // namespace

TEST_CASE("logdet_i_plus on diagonal input and PD guard") {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(3, 3);
    A(0, 0) = 1.0;
    A(1, 1) = 3.0;
    A(2, 2) = 7.0;
    CHECK(logdet_i_plus(A) == doctest::Approx(1.0 + 2.0 + 3.0).epsilon(1e-12));
    CHECK_THROWS((void)logdet_i_plus(-2.0 * Eigen::MatrixXcd::Identity(2, 2)));
}

TEST_CASE("decoding order bookkeeping") {
    DecodingOrder o;
    o.seq = {{1, 0}, {0, 0}, {0, 1}, {1, 1}};
    CHECK(o.position(1, 0) == 0);
    CHECK(o.position(0, 1) == 2);
    CHECK_THROWS((void)o.position(2, 0));
    const auto after = streams_after(o, 0, 0);
    REQUIRE(after.size() == 2);
    CHECK(after[0] == std::make_pair(0, 1));
    CHECK(after[1] == std::make_pair(1, 1));
}

TEST_CASE("SIC sum rate equals the MIMO MAC capacity chain rule") {
    const Scenario sc = small_scenario(3);
    const auto W = random_precoders(sc, 2, 11);
    const DecodingOrder order = default_decoding_order(sc.H_up, 2);

    double sum = 0;
    for (const auto& [k, m] : order.seq) sum += uplink_stream_rate(W, sc.H_up, order, k, m);

    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(sc.cfg.A_br, sc.cfg.A_br);
    for (int k = 0; k < sc.cfg.K; ++k)
        for (int m = 0; m < 2; ++m) {
            const Eigen::MatrixXcd S = sc.H_up[k].adjoint() * W.W[k][m];
            total += S * S.adjoint();
        }
    CHECK(sum == doctest::Approx(logdet_i_plus(total)).epsilon(1e-11));
}

TEST_CASE("SIC sum rate is invariant to the decoding order") {
    const Scenario sc = small_scenario(3, 9);
    const auto W = random_precoders(sc, 2, 21);
    DecodingOrder fwd = default_decoding_order(sc.H_up, 2);
    DecodingOrder rev = fwd;
    std::reverse(rev.seq.begin(), rev.seq.end());

    auto sum_under = [&](const DecodingOrder& o) {
        double s = 0;
        for (const auto& [k, m] : o.seq) s += uplink_stream_rate(W, sc.H_up, o, k, m);
        return s;
    };
    CHECK(sum_under(fwd) == doctest::Approx(sum_under(rev)).epsilon(1e-11));
}

TEST_CASE("later-decoded streams see less interference") {
    const Scenario sc = small_scenario(2, 4);
    const auto W = random_precoders(sc, 2, 5);
    const DecodingOrder order = default_decoding_order(sc.H_up, 2);
    // The last stream in the order is interference-free: rate equals its
    // single-stream capacity.
    const auto [lk, lm] = order.seq.back();
    const Eigen::MatrixXcd S = sc.H_up[lk].adjoint() * W.W[lk][lm];
    CHECK(uplink_stream_rate(W, sc.H_up, order, lk, lm) ==
          doctest::Approx(logdet_i_plus(S * S.adjoint())).epsilon(1e-11));
    // Zero precoder contributes a zero rate.
    UplinkPrecoders Wz = W;
    Wz.W[lk][lm].setZero();
    CHECK(uplink_stream_rate(Wz, sc.H_up, order, lk, lm) == 0.0);
}

TEST_CASE("default decoding order sorts by descending channel norm, split-major") {
    const Scenario sc = small_scenario(4, 12);
    const DecodingOrder o = default_decoding_order(sc.H_up, 2);
    REQUIRE(o.seq.size() == 8);
    for (int i = 0; i + 1 < 4; ++i) {
        CHECK(sc.H_up[o.seq[i].first].norm() >= sc.H_up[o.seq[i + 1].first].norm());
        CHECK(o.seq[i].second == 0);
        CHECK(o.seq[i + 4].second == 1);
        CHECK(o.seq[i + 4].first == o.seq[i].first);  // same user order per split
    }
}

TEST_CASE("downlink rates: single user aligned beam hits the SNR capacity") {
    Eigen::VectorXcd h(4);
    h << std::complex<double>(1, 1), std::complex<double>(0, 2), std::complex<double>(-1, 0),
        std::complex<double>(0.5, -0.5);
    DownlinkPrecoders p;
    p.p.resize(1);
    const double P = 2.0;
    p.p[0] = std::sqrt(P) * h / h.norm();
    const auto [rc, rp] = downlink_rates(p, {h});
    CHECK(rc == 0.0);  // no common stream
    CHECK(rp[0] == doctest::Approx(std::log2(1.0 + P * h.squaredNorm())).epsilon(1e-12));
}

TEST_CASE("downlink common cap is the minimum over users and excludes the common power "
          "from its own interference") {
    Eigen::VectorXcd h1 = Eigen::VectorXcd::Zero(2), h2 = Eigen::VectorXcd::Zero(2);
    h1(0) = 2.0;
    h2(1) = 1.0;
    DownlinkPrecoders p;
    p.p_c = Eigen::VectorXcd::Constant(2, std::complex<double>(1.0, 0.0));
    p.p.assign(2, Eigen::VectorXcd::Zero(2));
    p.p[0](0) = 0.5;  // private for user 1 only
    const auto [rc, rp] = downlink_rates(p, {h1, h2});
    // User 1: |h1^H p_c|^2 = 4, privates interference |h1^H p_1|^2 = 1.
    const double r1 = std::log2(1.0 + 4.0 / (1.0 + 1.0));
    // User 2: |h2^H p_c|^2 = 1, no private interference at user 2.
    const double r2 = std::log2(1.0 + 1.0 / 1.0);
    CHECK(rc == doctest::Approx(std::min(r1, r2)).epsilon(1e-12));
    // User 1 private rate: signal 1, interference only the common is excluded
    // from I_kc... the private sees the other privates (none) plus noise.
    CHECK(rp[0] == doctest::Approx(std::log2(1.0 + 1.0)).epsilon(1e-12));
    CHECK(rp[1] == 0.0);
}

TEST_CASE("stage_times matches the closed forms and guards zero rates") {
    SystemConfig cfg;
    cfg.K = 2;
    Scenario sc = build_scenario(cfg, 1);
    sc.L_bit = {4e6, 2e6};
    const std::vector<double> Ru = {2.0, 1.0}, Rd = {3.0, 0.5};
    const std::vector<double> beta = {0.8, 0.6}, f = {5e8, 5e8}, ft = {1e7, 1e7};
    const auto t = stage_times(Ru, Rd, beta, f, ft, sc);
    const double B = cfg.bandwidth_hz, w = cfg.omega_cyc_bit, e = cfg.epsilon_compress;
    const double a0 = 0.64, a1 = 0.36;
    CHECK(t.T_u == doctest::Approx(std::max(a0 * 4e6 / (B * 2.0), a1 * 2e6 / (B * 1.0))));
    CHECK(t.T_d ==
          doctest::Approx(std::max(e * a0 * 4e6 / (B * 3.0), e * a1 * 2e6 / (B * 0.5))));
    const double tp0 = std::max(w * a0 * 4e6 / 5e8, w * (1 - a0) * 4e6 / 1e7);
    const double tp1 = std::max(w * a1 * 2e6 / 5e8, w * (1 - a1) * 2e6 / 1e7);
    CHECK(t.T_p == doctest::Approx(std::max(tp0, tp1)));
    CHECK(t.total() == doctest::Approx(t.T_u + t.T_p + t.T_d));

    // Fully local user contributes nothing to radio/server times even with
    // zero rates; offloading against a zero rate must throw.
    const auto tl = stage_times({0.0, 1.0}, {1.0, 1.0}, {0.0, 0.6}, {0.0, 5e8}, ft, sc);
    CHECK(tl.T_u == doctest::Approx(a1 * 2e6 / (B * 1.0)));
    CHECK_THROWS((void)stage_times({0.0, 1.0}, {1.0, 1.0}, {0.5, 0.6}, {5e8, 5e8}, ft, sc));
}
