#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rsfog {

/// All scalar system parameters plus solver controls. Defaults follow the
/// simulation setup this library targets (8 users, 10 MHz, -100 dBm noise).
struct SystemConfig {
    int K = 8;              // number of users
    int A_ut = 2;           // transmit antennas per user
    int A_br = 2;           // receive antennas at the BS
    int A_bt = 4;           // transmit antennas at the BS
    int A_u = 2;            // streams per user (A_u <= min(A_ut, A_br))
    double P_k_dBm = 10.0;  // per-user transmit power budget
    double P_b_dBm = 30.0;  // BS power budget (radio and compute-energy rate)
    double F_k_cyc_s = 3e6; // per-user CPU cap
    double F_b_cyc_s = 1e9; // server CPU cap
    double omega_cyc_bit = 297.2;
    double kappa = 1e-24;          // J s^2 / cycle^3
    double epsilon_compress = 0.5; // feedback compression factor
    double bandwidth_hz = 10e6;
    double noise_dBm = -100.0;
    double cell_radius_m = 100.0;
    double L_min_bit = 1e6;
    double L_max_bit = 5e6;
    double tol_ao = 1e-4;
    int max_iter = 30;

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;

    double user_power_w() const { return dbm_to_w(P_k_dBm); }
    double bs_power_w() const { return dbm_to_w(P_b_dBm); }
    double noise_w() const { return dbm_to_w(noise_dBm); }

    static double dbm_to_w(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
};

/// One immutable problem instance. Channels are noise-normalized: every entry
/// is pre-divided by the noise standard deviation, so all SINR expressions
/// downstream use identity noise.
struct Scenario {
    SystemConfig cfg;
    std::vector<double> dist_km;           // user-to-BS distance
    std::vector<double> L_bit;             // task sizes
    std::vector<Eigen::MatrixXcd> H_up;    // A_ut x A_br per user
    std::vector<Eigen::VectorXcd> h_down;  // A_bt per user
    std::uint64_t seed = 0;
};

/// Deterministic RNG used for all scenario draws. Distributions are
/// hand-rolled (ldexp + Box-Muller) so results are identical across
/// standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);
    double uniform();               // [0, 1)
    double normal();                // N(0, 1), Box-Muller
    std::complex<double> cgauss();  // CN(0, 1)

  private:
    std::uint64_t next();           // xoshiro256++
    std::uint64_t s_[4];
};

/// 128.1 + 37.6 log10(d_km); throws on d_km <= 0.
double path_loss_db(double d_km);

/// Amplitude gain that folds path loss and noise normalization into the
/// channel: g = sqrt(10^(-PL/10) / sigma^2).
double channel_gain(double d_km, const SystemConfig& cfg);

/// Draws noise-normalized Rayleigh channels for the given user distances.
void draw_channels(const std::vector<double>& dist_km, const SystemConfig& cfg,
                   std::uint64_t seed, std::vector<Eigen::MatrixXcd>& H_up,
                   std::vector<Eigen::VectorXcd>& h_down);

/// Variant with injectable fast fading, used by tests (e.g. zero-variance stubs).
void draw_channels_with(const std::vector<double>& dist_km, const SystemConfig& cfg,
                        const std::function<std::complex<double>()>& fading,
                        std::vector<Eigen::MatrixXcd>& H_up,
                        std::vector<Eigen::VectorXcd>& h_down);

/// Full instance: positions uniform over the disc (d = R sqrt(u), min 1 m),
/// task sizes uniform in [L_min, L_max], channels via draw_channels.
/// Identical (cfg, seed) yields a bit-identical Scenario.
Scenario build_scenario(const SystemConfig& cfg, std::uint64_t seed);

/// key=value config file ('#' comments, blank lines ok); unknown keys throw.
SystemConfig load_config(const std::string& path);
SystemConfig parse_config(const std::string& text);

/// Canonical text serialization (used for byte-identity checks and dumps).
std::string serialize_scenario(const Scenario& sc);

} // namespace rsfog
