#include "rsfog/compute_model.hpp"

#include <cmath>
#include <stdexcept>

namespace rsfog {

std::pair<double, double> server_cost(double beta_k, double L, double omega, double f_k,
                                      double kappa) {
    const double alpha = beta_k * beta_k;
    if (alpha == 0.0) return {0.0, 0.0};
    if (f_k <= 0.0) throw std::runtime_error("server_cost: offloading with zero server share");
    return {omega * alpha * L / f_k, kappa * f_k * f_k * omega * alpha * L};
}

std::pair<double, double> local_cost(double beta_k, double L, double omega, double f_tilde,
                                     double kappa) {
    const double rem = 1.0 - beta_k * beta_k;
    if (rem == 0.0) return {0.0, 0.0};
    if (f_tilde <= 0.0) throw std::runtime_error("local_cost: local work with zero local frequency");
    return {omega * rem * L / f_tilde, kappa * f_tilde * f_tilde * omega * rem * L};
}

double optimal_local_frequency(double P_k_w, double kappa, double F_k) {
    return std::min(std::cbrt(P_k_w / kappa), F_k);
}

std::vector<EnergyTerms> energy_constraint_terms(const std::vector<double>& f_tilde,
                                                 const std::vector<double>& f_prev, double kappa) {
    std::vector<EnergyTerms> out(f_tilde.size());
    for (std::size_t k = 0; k < f_tilde.size(); ++k) {
        const double c = kappa * f_tilde[k];
        out[k].lin_f = -2.0 * c * f_prev[k];
        out[k].constant = c * f_prev[k] * f_prev[k];
        out[k].ratio_c = c / 2.0;
    }
    return out;
}

std::vector<LocalTimeTerms> local_time_constraint_terms(const std::vector<double>& beta_prev,
                                                        const std::vector<double>& f_tilde,
                                                        const std::vector<double>& L_bit,
                                                        double omega) {
    std::vector<LocalTimeTerms> out(beta_prev.size());
    for (std::size_t k = 0; k < beta_prev.size(); ++k) {
        const double base = omega * L_bit[k] / f_tilde[k];
        out[k].lin_beta = -2.0 * base * beta_prev[k];
        out[k].constant = base * (1.0 + beta_prev[k] * beta_prev[k]);
    }
    return out;
}

} // namespace rsfog
