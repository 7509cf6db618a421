#include "rsfog/surrogate.hpp"

#include <cmath>
#include <stdexcept>

namespace rsfog {

namespace {
constexpr double kLn2 = 0.6931471805599453;

// Interference powers of the downlink power bookkeeping (unit noise).
std::pair<double, double> downlink_interference(const DownlinkPrecoders& p,
                                                const std::vector<Eigen::VectorXcd>& h, int k) {
    double I_kc = 1.0;
    for (const auto& pj : p.p)
        if (pj.size() > 0) I_kc += std::norm(h[k].dot(pj));
    const double S_kp = p.p[k].size() > 0 ? std::norm(h[k].dot(p.p[k])) : 0.0;
    return {I_kc, I_kc - S_kp};
}
} // namespace

std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>>
update_downlink_aux(const DownlinkPrecoders& p, const std::vector<Eigen::VectorXcd>& h) {
    const int K = static_cast<int>(h.size());
    std::vector<std::complex<double>> y_c(K, 0.0), y_p(K, 0.0);
    for (int k = 0; k < K; ++k) {
        const auto [I_kc, I_kp] = downlink_interference(p, h, k);
        if (p.p_c.size() > 0) y_c[k] = h[k].dot(p.p_c) / I_kc;
        if (p.p[k].size() > 0) y_p[k] = h[k].dot(p.p[k]) / I_kp;
    }
    return {y_c, y_p};
}

double eval_downlink_surrogate(const std::complex<double>& y, const DownlinkPrecoders& p,
                               const std::vector<Eigen::VectorXcd>& h, DownlinkPart part, int k) {
    const auto [I_kc, I_kp] = downlink_interference(p, h, k);
    std::complex<double> hp = 0.0;
    double I = 1.0;
    if (part == DownlinkPart::Common) {
        if (p.p_c.size() > 0) hp = h[k].dot(p.p_c);
        I = I_kc;
    } else {
        if (p.p[k].size() > 0) hp = h[k].dot(p.p[k]);
        I = I_kp;
    }
    const double arg = 1.0 + 2.0 * std::real(std::conj(y) * hp) - std::norm(y) * I;
    if (arg <= 0.0) throw std::domain_error("eval_downlink_surrogate: non-positive log argument");
    return std::log2(arg);
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>
update_uplink_aux_stream(const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                         const std::vector<std::pair<int, int>>& interferers, int k, int m) {
    const Eigen::MatrixXcd& Wkm = W.W.at(k).at(m);
    const Eigen::MatrixXcd Omega = interference_cov(W, H, interferers);
    const int A_br = static_cast<int>(Omega.rows());
    const int A_u = static_cast<int>(Wkm.cols());
    if (Wkm.size() == 0)
        return {Eigen::MatrixXcd::Zero(A_br, A_u), Eigen::MatrixXcd::Zero(A_u, A_u)};
    const Eigen::MatrixXcd S = H[k].adjoint() * Wkm; // A_br x A_u
    Eigen::MatrixXcd denom = Omega + S * S.adjoint();
    denom = 0.5 * (denom + denom.adjoint());
    const Eigen::MatrixXcd Y = denom.llt().solve(S);
    Eigen::MatrixXcd Phi = S.adjoint() * Omega.llt().solve(S);
    Phi = 0.5 * (Phi + Phi.adjoint());
    return {Y, Phi};
}

std::pair<std::vector<std::vector<Eigen::MatrixXcd>>, std::vector<std::vector<Eigen::MatrixXcd>>>
update_uplink_aux(const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                  const DecodingOrder& order) {
    const int K = W.users();
    std::vector<std::vector<Eigen::MatrixXcd>> Y(K), Phi(K);
    for (int k = 0; k < K; ++k) {
        const int M = static_cast<int>(W.W[k].size());
        Y[k].resize(M);
        Phi[k].resize(M);
        for (int m = 0; m < M; ++m)
            std::tie(Y[k][m], Phi[k][m]) =
                update_uplink_aux_stream(W, H, streams_after(order, k, m), k, m);
    }
    return {Y, Phi};
}

double eval_uplink_surrogate_set(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Phi,
                                 const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                                 const std::vector<std::pair<int, int>>& interferers, int k, int m) {
    const Eigen::MatrixXcd& Wkm = W.W.at(k).at(m);
    const Eigen::MatrixXcd Omega = interference_cov(W, H, interferers);
    const int A_u = static_cast<int>(Y.cols());
    const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(A_u, A_u) + Phi;
    Eigen::MatrixXcd S(Omega.rows(), A_u);
    if (Wkm.size() == 0) S.setZero();
    else S = H[k].adjoint() * Wkm;
    const Eigen::MatrixXcd X =
        2.0 * S.adjoint() * Y - Y.adjoint() * (S * S.adjoint() + Omega) * Y;
    const double tr = std::real((A * X).trace()) - std::real(Phi.trace());
    return logdet_i_plus(Phi) + tr / kLn2;
}

double eval_uplink_surrogate(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Phi,
                             const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                             const DecodingOrder& order, int k, int m) {
    return eval_uplink_surrogate_set(Y, Phi, W, H, streams_after(order, k, m), k, m);
}

} // namespace rsfog
