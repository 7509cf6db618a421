#pragma once

#include <utility>
#include <vector>

#include "rsfog/scenario.hpp"

namespace rsfog {

/// Uplink precoders W[k][m], each A_ut x A_u. The number of splits per user
/// is W[k].size() (2 for rate splitting, 1 for single-stream schemes).
struct UplinkPrecoders {
    std::vector<std::vector<Eigen::MatrixXcd>> W;
    int users() const { return static_cast<int>(W.size()); }
    int splits() const { return W.empty() ? 0 : static_cast<int>(W[0].size()); }
};

struct DownlinkPrecoders {
    Eigen::VectorXcd p_c;                // zero-size means no common stream
    std::vector<Eigen::VectorXcd> p;     // private precoders
};

/// SIC decoding order at the BS: a permutation of all (user, split) pairs.
struct DecodingOrder {
    std::vector<std::pair<int, int>> seq;
    /// Position of (k, m) in the order; throws if absent.
    int position(int k, int m) const;
};

struct StageTimes {
    double T_u = 0, T_p = 0, T_d = 0;
    double total() const { return T_u + T_p + T_d; }
};

struct RateReport {
    std::vector<std::vector<double>> Ru;  // exact uplink stream rates (bit/s/Hz)
    double Rd_c = 0;                      // common-rate cap (min over users)
    std::vector<double> Rd_c_alloc;       // allocated common portions
    std::vector<double> Rd_p;             // private rates
    StageTimes times;
};

/// log2 det(I + A) for Hermitian PSD A, via Cholesky of the symmetrized sum.
double logdet_i_plus(const Eigen::MatrixXcd& A);

/// Interference covariance sum over an explicit stream set, plus identity:
/// sum_{(i,j) in set} H_i^H W_ij W_ij^H H_i + I.
Eigen::MatrixXcd interference_cov(const UplinkPrecoders& W,
                                  const std::vector<Eigen::MatrixXcd>& H,
                                  const std::vector<std::pair<int, int>>& set);

/// Streams decoded after (k, m) under the given order.
std::vector<std::pair<int, int>> streams_after(const DecodingOrder& order, int k, int m);

/// Omega_{k,m}: interference seen when decoding stream (k, m) under SIC.
Eigen::MatrixXcd uplink_interference(const UplinkPrecoders& W,
                                     const std::vector<Eigen::MatrixXcd>& H,
                                     const DecodingOrder& order, int k, int m);

/// Exact stream rate log2 det(I + W^H H Omega^{-1} H^H W) for a given
/// interferer set (shared by SIC- and treat-as-noise schemes).
double stream_rate_for_set(const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                           const std::vector<std::pair<int, int>>& interferers, int k, int m);

double uplink_stream_rate(const UplinkPrecoders& W, const std::vector<Eigen::MatrixXcd>& H,
                          const DecodingOrder& order, int k, int m);

/// Downlink RS rates: (common cap min_k log2(1+SINR_kc), private rates).
std::pair<double, std::vector<double>> downlink_rates(const DownlinkPrecoders& p,
                                                      const std::vector<Eigen::VectorXcd>& h);

/// Users sorted by descending ||H_k||_F, split 1 for all users then split 2;
/// ties broken by user index.
DecodingOrder default_decoding_order(const std::vector<Eigen::MatrixXcd>& H, int splits = 2);

/// Stage times from per-user total rates (bit/s/Hz) and compute decisions.
/// A zero numerator yields a zero term; a positive numerator over a zero
/// denominator throws.
StageTimes stage_times(const std::vector<double>& Ru_user, const std::vector<double>& Rd_user,
                       const std::vector<double>& beta, const std::vector<double>& f,
                       const std::vector<double>& f_tilde, const Scenario& sc);

} // namespace rsfog
