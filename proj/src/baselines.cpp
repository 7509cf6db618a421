#include "rsfog/baselines.hpp"

namespace rsfog {

Solution solve_scheme(const Scenario& sc, SchemeKind kind, const AoOptions& opts) {
    const SchemeModel scheme = make_scheme(kind, sc);
    return ao_run(sc, scheme, opts, initialize(sc, scheme));
}

Solution solve_sdma(const Scenario& sc, const AoOptions& opts) {
    return solve_scheme(sc, SchemeKind::SDMA, opts);
}

Solution solve_noma(const Scenario& sc, const AoOptions& opts) {
    return solve_scheme(sc, SchemeKind::NOMA, opts);
}

Solution solve_cloud(const Scenario& sc, const AoOptions& opts) {
    return solve_scheme(sc, SchemeKind::RS_CLOUD, opts);
}

TransmitState embed_sdma_state(const Scenario& sc, const TransmitState& sdma) {
    const int K = sc.cfg.K, A_ut = sc.cfg.A_ut, A_u = sc.cfg.A_u, A_bt = sc.cfg.A_bt;
    TransmitState st = sdma;
    st.W.W.assign(K, std::vector<Eigen::MatrixXcd>(2, Eigen::MatrixXcd::Zero(A_ut, A_u)));
    for (int k = 0; k < K; ++k) st.W.W[k][0] = sdma.W.W[k][0];
    st.p.p_c = Eigen::VectorXcd::Zero(A_bt);
    st.Rdc_alloc.assign(K, 0.0);
    return st;
}

} // namespace rsfog
