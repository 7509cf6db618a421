#include <doctest.h>

#include "rsfog/baselines.hpp"

using namespace rsfog;

namespace {

Scenario small_scenario(int K, std::uint64_t seed) {
    SystemConfig cfg;
    cfg.K = K;
    return build_scenario(cfg, seed);
}

} // namespace

TEST_CASE("every baseline converges and passes its audit on a small instance") {
    const Scenario sc = small_scenario(3, 29);
    for (SchemeKind kind :
         {SchemeKind::RS_FOG, SchemeKind::SDMA, SchemeKind::NOMA, SchemeKind::RS_CLOUD}) {
        CAPTURE(to_string(kind));
        const Solution sol = solve_scheme(sc, kind);
        CHECK(sol.status == SolveStatus::Converged);
        const auto audit = audit_solution(sc, make_scheme(kind, sc), sol);
        INFO((audit.violations.empty() ? std::string() : audit.violations.front()));
        CHECK(audit.ok());
    }
}

TEST_CASE("SDMA uses one split per user and no common stream") {
    const Scenario sc = small_scenario(2, 31);
    const Solution sol = solve_sdma(sc);
    REQUIRE(sol.status == SolveStatus::Converged);
    for (int k = 0; k < 2; ++k) CHECK(sol.state.W.W[k].size() == 1);
    CHECK(sol.state.p.p_c.size() == 0);
    for (double a : sol.state.Rdc_alloc) CHECK(a == 0.0);
}

TEST_CASE("cloud scheme offloads everything") {
    const Scenario sc = small_scenario(2, 37);
    const Solution sol = solve_cloud(sc);
    REQUIRE(sol.status == SolveStatus::Converged);
    for (int k = 0; k < 2; ++k) {
        CHECK(sol.state.beta[k] == 1.0);
        CHECK(sol.state.f_tilde[k] == 0.0);
        CHECK(sol.state.f[k] > 0.0);
    }
    // Server energy rate must respect the BS budget.
    double e = 0;
    for (int k = 0; k < 2; ++k)
        e += sc.cfg.kappa * sol.state.f[k] * sol.state.f[k] * sc.cfg.omega_cyc_bit * sc.L_bit[k];
    CHECK(e <= sc.cfg.bs_power_w() * sol.report.times.T_p * (1 + 1e-6));
}

TEST_CASE("with one user, rate splitting collapses to SDMA") {
    const Scenario sc = small_scenario(1, 41);
    const double rs = solve_scheme(sc, SchemeKind::RS_FOG).trace.back();
    const double sdma = solve_sdma(sc).trace.back();
    CHECK(rs == doctest::Approx(sdma).epsilon(1e-3));
}

TEST_CASE("embedding an SDMA state into the RS shape preserves its objective") {
    const Scenario sc = small_scenario(3, 43);
    const Solution sdma = solve_sdma(sc);
    REQUIRE(sdma.status == SolveStatus::Converged);
    const TransmitState lifted = embed_sdma_state(sc, sdma.state);
    for (int k = 0; k < 3; ++k) {
        REQUIRE(lifted.W.W[k].size() == 2);
        CHECK(lifted.W.W[k][1].squaredNorm() == 0.0);
    }
    const SchemeModel rs = make_scheme(SchemeKind::RS_FOG, sc);
    const double lifted_obj = true_objective(sc, rs, lifted);
    CHECK(lifted_obj <= sdma.trace.back() * (1 + 1e-6));

    // Warm-starting RS from the lifted state can only improve on SDMA.
    const Solution warm = ao_run(sc, rs, AoOptions{}, lifted);
    CHECK(warm.trace.back() <= sdma.trace.back() + 1e-3);
}

TEST_CASE("NOMA solves with single-split users and a SIC downlink") {
    const Scenario sc = small_scenario(3, 47);
    const Solution sol = solve_noma(sc);
    REQUIRE(sol.status == SolveStatus::Converged);
    for (int k = 0; k < 3; ++k) CHECK(sol.state.W.W[k].size() == 1);
    CHECK(sol.state.p.p_c.size() == 0);
    // NOMA cannot beat the full RS scheme by more than numerical slack.
    const Solution rs = solve_scheme(sc, SchemeKind::RS_FOG);
    CHECK(rs.trace.back() <= sol.trace.back() * (1 + 1e-2));
}
