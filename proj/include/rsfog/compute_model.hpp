#pragma once

#include <utility>
#include <vector>

namespace rsfog {

/// Split variables and CPU allocations. The offload fraction is beta^2.
struct ComputeDecision {
    std::vector<double> beta;     // in [0, beta_max]
    std::vector<double> f;        // server CPU share, cycles/s
    std::vector<double> f_tilde;  // local CPU frequency, cycles/s
};

/// Server-side time/energy for one user: (omega beta^2 L / f, kappa f^2 omega beta^2 L).
std::pair<double, double> server_cost(double beta_k, double L, double omega, double f_k,
                                      double kappa);

/// Local-side mirror with factor (1 - beta^2).
std::pair<double, double> local_cost(double beta_k, double L, double omega, double f_tilde,
                                     double kappa);

/// Closed-form optimal local frequency min(cbrt(P_k / kappa), F_k).
double optimal_local_frequency(double P_k_w, double kappa, double F_k);

/// One user's contribution to the convexified BS-energy constraint
/// sum_k [lin_f * f + constant + ratio_c * f^2/(1-beta) + ratio_c * f^2/(1+beta)] <= P_b.
/// The -kappa*ft*f^2 part of the partial-fraction identity is linearized at
/// f_prev; the two ratio terms stay exact convex atoms.
struct EnergyTerms {
    double lin_f;     // -2 kappa ft f_prev
    double constant;  // +kappa ft f_prev^2
    double ratio_c;   // kappa ft / 2
};
std::vector<EnergyTerms> energy_constraint_terms(const std::vector<double>& f_tilde,
                                                 const std::vector<double>& f_prev, double kappa);

/// Linear-in-beta local-time constraint lin_beta * beta + constant <= T_p,
/// the first-order expansion of omega (1 - beta^2) L / f_tilde at beta_prev.
struct LocalTimeTerms {
    double lin_beta;  // -2 omega L beta_prev / f_tilde
    double constant;  // omega L (1 + beta_prev^2) / f_tilde
};
std::vector<LocalTimeTerms> local_time_constraint_terms(const std::vector<double>& beta_prev,
                                                        const std::vector<double>& f_tilde,
                                                        const std::vector<double>& L_bit,
                                                        double omega);

} // namespace rsfog
