#include "rsfog/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rsfog {

void SystemConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemConfig: " + msg); };
    if (K < 1) fail("K must be >= 1");
    if (A_ut < 1 || A_br < 1 || A_bt < 1 || A_u < 1) fail("antenna counts must be positive");
    if (A_u > std::min(A_ut, A_br)) fail("A_u must satisfy A_u <= min(A_ut, A_br)");
    if (F_k_cyc_s <= 0 || F_b_cyc_s <= 0) fail("CPU caps must be positive");
    if (omega_cyc_bit <= 0) fail("omega_cyc_bit must be positive");
    if (kappa <= 0) fail("kappa must be positive");
    if (epsilon_compress <= 0 || epsilon_compress > 1) fail("epsilon_compress must be in (0, 1]");
    if (bandwidth_hz <= 0) fail("bandwidth_hz must be positive");
    if (cell_radius_m <= 0) fail("cell_radius_m must be positive");
    if (L_min_bit <= 0 || L_max_bit < L_min_bit) fail("task size range invalid");
    if (tol_ao <= 0) fail("tol_ao must be positive");
    if (max_iter < 1) fail("max_iter must be >= 1");
}

// ---------------------------------------------------------------------------
// RNG: xoshiro256++ seeded through splitmix64.

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return std::ldexp(static_cast<double>(next() >> 11), -53); }

double Rng::normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::complex<double> Rng::cgauss() {
    // Re/Im each N(0, 1/2) so |entry|^2 has unit mean.
    const double re = normal() * M_SQRT1_2;
    const double im = normal() * M_SQRT1_2;
    return {re, im};
}

// ---------------------------------------------------------------------------

double path_loss_db(double d_km) {
    if (d_km <= 0.0) throw std::domain_error("path_loss_db: distance must be positive");
    return 128.1 + 37.6 * std::log10(d_km);
}

double channel_gain(double d_km, const SystemConfig& cfg) {
    const double pl = path_loss_db(d_km);
    return std::sqrt(std::pow(10.0, -pl / 10.0) / cfg.noise_w());
}

void draw_channels_with(const std::vector<double>& dist_km, const SystemConfig& cfg,
                        const std::function<std::complex<double>()>& fading,
                        std::vector<Eigen::MatrixXcd>& H_up,
                        std::vector<Eigen::VectorXcd>& h_down) {
    const int K = static_cast<int>(dist_km.size());
    H_up.assign(K, Eigen::MatrixXcd(cfg.A_ut, cfg.A_br));
    h_down.assign(K, Eigen::VectorXcd(cfg.A_bt));
    for (int k = 0; k < K; ++k) {
        const double g = channel_gain(dist_km[k], cfg);
        for (int c = 0; c < cfg.A_br; ++c)
            for (int r = 0; r < cfg.A_ut; ++r) H_up[k](r, c) = g * fading();
        for (int r = 0; r < cfg.A_bt; ++r) h_down[k](r) = g * fading();
    }
}

void draw_channels(const std::vector<double>& dist_km, const SystemConfig& cfg,
                   std::uint64_t seed, std::vector<Eigen::MatrixXcd>& H_up,
                   std::vector<Eigen::VectorXcd>& h_down) {
    Rng rng(seed);
    draw_channels_with(dist_km, cfg, [&rng] { return rng.cgauss(); }, H_up, h_down);
}

Scenario build_scenario(const SystemConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Scenario sc;
    sc.cfg = cfg;
    sc.seed = seed;
    Rng rng(seed);
    sc.dist_km.resize(cfg.K);
    sc.L_bit.resize(cfg.K);
    for (int k = 0; k < cfg.K; ++k) {
        // Uniform over the disc; 1 m floor keeps the path loss finite.
        const double d_m = std::max(1.0, cfg.cell_radius_m * std::sqrt(rng.uniform()));
        sc.dist_km[k] = d_m / 1000.0;
    }
    for (int k = 0; k < cfg.K; ++k)
        sc.L_bit[k] = cfg.L_min_bit + rng.uniform() * (cfg.L_max_bit - cfg.L_min_bit);
    draw_channels(sc.dist_km, cfg, seed ^ 0xc2b2ae3d27d4eb4fULL, sc.H_up, sc.h_down);
    return sc;
}

// ---------------------------------------------------------------------------
// Config file I/O.

namespace {
void assign_key(SystemConfig& cfg, const std::string& key, const std::string& val) {
    auto as_d = [&] { return std::stod(val); };
    auto as_i = [&] { return std::stoi(val); };
    if (key == "K") cfg.K = as_i();
    else if (key == "A_ut") cfg.A_ut = as_i();
    else if (key == "A_br") cfg.A_br = as_i();
    else if (key == "A_bt") cfg.A_bt = as_i();
    else if (key == "A_u") cfg.A_u = as_i();
    else if (key == "P_k_dBm") cfg.P_k_dBm = as_d();
    else if (key == "P_b_dBm") cfg.P_b_dBm = as_d();
    else if (key == "F_k_cyc_s") cfg.F_k_cyc_s = as_d();
    else if (key == "F_b_cyc_s") cfg.F_b_cyc_s = as_d();
    else if (key == "omega_cyc_bit") cfg.omega_cyc_bit = as_d();
    else if (key == "kappa") cfg.kappa = as_d();
    else if (key == "epsilon_compress") cfg.epsilon_compress = as_d();
    else if (key == "bandwidth_hz") cfg.bandwidth_hz = as_d();
    else if (key == "noise_dBm") cfg.noise_dBm = as_d();
    else if (key == "cell_radius_m") cfg.cell_radius_m = as_d();
    else if (key == "L_min_bit") cfg.L_min_bit = as_d();
    else if (key == "L_max_bit") cfg.L_max_bit = as_d();
    else if (key == "tol_ao") cfg.tol_ao = as_d();
    else if (key == "max_iter") cfg.max_iter = as_i();
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}
} // namespace

SystemConfig parse_config(const std::string& text) {
    SystemConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key=value");
        assign_key(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_scenario(const Scenario& sc) {
    std::ostringstream out;
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    out << "K=" << sc.cfg.K << " seed=" << sc.seed << "\n";
    for (int k = 0; k < sc.cfg.K; ++k) {
        out << "user " << k << " d=";
        put(sc.dist_km[k]);
        out << " L=";
        put(sc.L_bit[k]);
        out << "\nH=";
        for (int c = 0; c < sc.H_up[k].cols(); ++c)
            for (int r = 0; r < sc.H_up[k].rows(); ++r) {
                put(sc.H_up[k](r, c).real());
                out << ",";
                put(sc.H_up[k](r, c).imag());
                out << ";";
            }
        out << "\nh=";
        for (int r = 0; r < sc.h_down[k].size(); ++r) {
            put(sc.h_down[k](r).real());
            out << ",";
            put(sc.h_down[k](r).imag());
            out << ";";
        }
        out << "\n";
    }
    return out.str();
}

} // namespace rsfog
