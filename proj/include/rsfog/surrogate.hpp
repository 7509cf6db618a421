#pragma once

#include "rsfog/rs_rates.hpp"

namespace rsfog {

/// Quadratic-transform auxiliaries. y_c/y_p are the downlink scalars,
/// Y/Phi the uplink matrix pairs per stream.
struct AuxState {
    std::vector<std::complex<double>> y_c, y_p;
    std::vector<std::vector<Eigen::MatrixXcd>> Y;    // A_br x A_u
    std::vector<std::vector<Eigen::MatrixXcd>> Phi;  // A_u x A_u, Hermitian PSD
};

enum class DownlinkPart { Common, Private };

/// Closed-form downlink auxiliary update: y = I^{-1} h^H p.
std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>>
update_downlink_aux(const DownlinkPrecoders& p, const std::vector<Eigen::VectorXcd>& h);

/// Scalar quadratic-transform surrogate log2(1 + 2Re(y* h^H p_x) - |y|^2 I_kx).
/// Throws on a non-positive log argument (stale auxiliary).
double eval_downlink_surrogate(const std::complex<double>& y, const DownlinkPrecoders& p,
                               const std::vector<Eigen::VectorXcd>& h, DownlinkPart part, int k);

/// Closed-form uplink auxiliary update for one stream against an explicit
/// interferer set: Y = (Omega + S S^H)^{-1} S, Phi = S^H Omega^{-1} S with
/// S = H_k^H W_km.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>
update_uplink_aux_stream(const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                         const std::vector<std::pair<int, int>>& interferers, int k, int m);

/// All streams under a SIC decoding order.
std::pair<std::vector<std::vector<Eigen::MatrixXcd>>, std::vector<std::vector<Eigen::MatrixXcd>>>
update_uplink_aux(const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                  const DecodingOrder& order);

/// Matrix surrogate for one stream (value in bits):
/// log2 det(I+Phi) + (1/ln2) Tr((I+Phi)(2Re(W^H H Y) - Y^H (H^H W W^H H + Omega) Y) - Phi).
double eval_uplink_surrogate_set(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Phi,
                                 const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                                 const std::vector<std::pair<int, int>>& interferers, int k, int m);

double eval_uplink_surrogate(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Phi,
                             const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                             const DecodingOrder& order, int k, int m);

} // namespace rsfog
