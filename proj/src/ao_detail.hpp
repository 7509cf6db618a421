#pragma once

#include "rsfog/ao_solver.hpp"

namespace rsfog::detail {

/// [Re z; Im z]. Doubles as the lowering of Re(a^H z): dot(re_im(a), re_im(z)).
Eigen::VectorXd re_im(const Eigen::VectorXcd& z);

/// [[Re G, -Im G], [Im G, Re G]], so that lower(G) * re_im(z) = re_im(G z).
Eigen::MatrixXd lower_complex(const Eigen::MatrixXcd& G);

/// Columns of W stacked as [re_im(col 0); re_im(col 1); ...].
Eigen::VectorXd pack_cols(const Eigen::MatrixXcd& W);
Eigen::MatrixXcd unpack_cols(const Eigen::Ref<const Eigen::VectorXd>& v, int rows, int cols);

/// Hermitian square root (eigenvalues clamped at zero).
Eigen::MatrixXcd herm_sqrt(const Eigen::MatrixXcd& A);

/// Exact NOMA downlink message rates, min over decoders at or above the
/// message's position in dl_order. Zero precoders yield zero rate and are
/// skipped as decoders/interferers.
std::vector<double> noma_downlink_rates(const DownlinkPrecoders& p,
                                        const std::vector<Eigen::VectorXcd>& h,
                                        const std::vector<int>& dl_order);

} // namespace rsfog::detail
