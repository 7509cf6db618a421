#include "rsfog/rs_rates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rsfog {

int DecodingOrder::position(int k, int m) const {
    for (int i = 0; i < static_cast<int>(seq.size()); ++i)
        if (seq[i].first == k && seq[i].second == m) return i;
    throw std::invalid_argument("DecodingOrder: stream not in order");
}

double logdet_i_plus(const Eigen::MatrixXcd& A) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(A.rows(), A.cols()) + 0.5 * (A + A.adjoint());
    Eigen::LLT<Eigen::MatrixXcd> llt(M);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("logdet_i_plus: matrix not positive definite");
    double ld = 0;
    const auto& L = llt.matrixLLT();
    for (int i = 0; i < M.rows(); ++i) ld += std::log(L(i, i).real());
    return 2.0 * ld / std::log(2.0);
}

Eigen::MatrixXcd interference_cov(const UplinkPrecoders& W,
                                  const std::vector<Eigen::MatrixXcd>& H,
                                  const std::vector<std::pair<int, int>>& set) {
    const int A_br = static_cast<int>(H.at(0).cols());
    Eigen::MatrixXcd Omega = Eigen::MatrixXcd::Identity(A_br, A_br);
    for (const auto& [i, j] : set) {
        const Eigen::MatrixXcd& Wij = W.W.at(i).at(j);
        if (Wij.size() == 0) continue;
        if (Wij.rows() != H.at(i).rows())
            throw std::invalid_argument("interference_cov: dimension mismatch");
        const Eigen::MatrixXcd S = H[i].adjoint() * Wij; // A_br x A_u
        Omega += S * S.adjoint();
    }
    return 0.5 * (Omega + Omega.adjoint());
}

std::vector<std::pair<int, int>> streams_after(const DecodingOrder& order, int k, int m) {
    const int pos = order.position(k, m);
    return {order.seq.begin() + pos + 1, order.seq.end()};
}

Eigen::MatrixXcd uplink_interference(const UplinkPrecoders& W,
                                     const std::vector<Eigen::MatrixXcd>& H,
                                     const DecodingOrder& order, int k, int m) {
    return interference_cov(W, H, streams_after(order, k, m));
}

double stream_rate_for_set(const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                           const std::vector<std::pair<int, int>>& interferers, int k, int m) {
    const Eigen::MatrixXcd& Wkm = W.W.at(k).at(m);
    if (Wkm.size() == 0 || Wkm.squaredNorm() == 0.0) return 0.0;
    const Eigen::MatrixXcd Omega = interference_cov(W, H, interferers);
    const Eigen::MatrixXcd S = H[k].adjoint() * Wkm;                   // A_br x A_u
    const Eigen::MatrixXcd Gamma = S.adjoint() * Omega.llt().solve(S); // A_u x A_u
    return logdet_i_plus(Gamma);
}

double uplink_stream_rate(const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                          const DecodingOrder& order, int k, int m) {
    return stream_rate_for_set(W, H, streams_after(order, k, m), k, m);
}

std::pair<double, std::vector<double>> downlink_rates(const DownlinkPrecoders& p,
                                                      const std::vector<Eigen::VectorXcd>& h) {
    const int K = static_cast<int>(h.size());
    std::vector<double> Rd_p(K, 0.0);
    double Rd_c = std::numeric_limits<double>::infinity();
    const bool has_common = p.p_c.size() > 0 && p.p_c.squaredNorm() > 0;
    for (int k = 0; k < K; ++k) {
        double I_kc = 1.0; // unit noise
        for (int j = 0; j < K; ++j)
            if (p.p[j].size() > 0) I_kc += std::norm(h[k].dot(p.p[j]));
        const double S_kp = p.p[k].size() > 0 ? std::norm(h[k].dot(p.p[k])) : 0.0;
        const double I_kp = I_kc - S_kp;
        Rd_p[k] = std::log2(1.0 + S_kp / I_kp);
        if (has_common) {
            const double S_kc = std::norm(h[k].dot(p.p_c));
            Rd_c = std::min(Rd_c, std::log2(1.0 + S_kc / I_kc));
        }
    }
    if (!has_common) Rd_c = 0.0;
    return {Rd_c, Rd_p};
}

DecodingOrder default_decoding_order(const std::vector<Eigen::MatrixXcd>& H, int splits) {
    const int K = static_cast<int>(H.size());
    std::vector<int> idx(K);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return H[a].norm() > H[b].norm(); });
    DecodingOrder order;
    for (int m = 0; m < splits; ++m)
        for (int k : idx) order.seq.emplace_back(k, m);
    return order;
}

StageTimes stage_times(const std::vector<double>& Ru_user, const std::vector<double>& Rd_user,
                       const std::vector<double>& beta, const std::vector<double>& f,
                       const std::vector<double>& f_tilde, const Scenario& sc) {
    const int K = sc.cfg.K;
    const double B = sc.cfg.bandwidth_hz;
    const double omega = sc.cfg.omega_cyc_bit;
    StageTimes t;
    auto ratio = [](double num, double den, const char* what) {
        if (num == 0.0) return 0.0;
        if (den <= 0.0) throw std::runtime_error(std::string("stage_times: infeasible rate for ") + what);
        return num / den;
    };
    for (int k = 0; k < K; ++k) {
        const double alpha = beta[k] * beta[k];
        const double L = sc.L_bit[k];
        t.T_u = std::max(t.T_u, ratio(alpha * L, B * Ru_user[k], "offload"));
        t.T_d = std::max(t.T_d, ratio(sc.cfg.epsilon_compress * alpha * L, B * Rd_user[k], "feedback"));
        const double srv = ratio(omega * alpha * L, f[k], "server");
        const double loc = ratio(omega * (1.0 - alpha) * L, f_tilde[k], "local");
        t.T_p = std::max(t.T_p, std::max(srv, loc));
    }
    return t;
}

} // namespace rsfog
