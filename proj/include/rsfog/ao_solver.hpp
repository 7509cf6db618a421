#pragma once

#include <string>

#include "rsfog/compute_model.hpp"
#include "rsfog/convex.hpp"
#include "rsfog/ipm.hpp"
#include "rsfog/surrogate.hpp"

namespace rsfog {

enum class SchemeKind { RS_FOG, SDMA, NOMA, RS_CLOUD };
std::string to_string(SchemeKind kind);
SchemeKind scheme_from_string(const std::string& name);

/// One iterate of the inherent variable block: precoders, CPU allocations,
/// split variables and common-rate allocations.
struct TransmitState {
    UplinkPrecoders W;
    DownlinkPrecoders p;
    std::vector<double> f;          // server shares, cycles/s
    std::vector<double> beta;       // offload fraction is beta^2
    std::vector<double> f_tilde;    // local frequencies (fixed by the closed form)
    std::vector<double> Rdc_alloc;  // common-rate allocations (bit/s/Hz)
};

enum class SolveStatus { Converged, MaxIter, Infeasible };
std::string to_string(SolveStatus s);

struct AoOptions {
    double tol_ao = 1e-4;
    int max_iter = 30;
    double beta_max = 0.999;  // beta = 1 only in the cloud scheme
    convex::IpmOptions ipm;
};

struct Solution {
    TransmitState state;
    RateReport report;
    std::vector<double> trace;  // true objective; trace[0] at the initial point
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIter;
    double carryover_violation = 0;  // worst g_i(prev) over all iterations
    std::string message;
};

/// Static description of a transmit scheme: how many uplink splits, which
/// streams interfere with which, and the downlink decoding structure.
struct SchemeModel {
    SchemeKind kind = SchemeKind::RS_FOG;
    int M = 2;
    bool has_common = true;
    bool cloud = false;
    bool noma_downlink = false;
    DecodingOrder order;  // uplink SIC order (meaningful for RS/NOMA)
    std::vector<std::vector<std::vector<std::pair<int, int>>>> up_interf;  // per (k, m)
    std::vector<int> dl_order;  // NOMA: users by descending ||h_k||
};
SchemeModel make_scheme(SchemeKind kind, const Scenario& sc);

/// Auxiliary block: the quadratic-transform state plus the per
/// (decoder, message) scalars used by the NOMA downlink.
struct FullAux {
    AuxState aux;
    std::vector<std::vector<std::complex<double>>> y_pair;  // [decoder pos][message pos]
};
FullAux update_aux(const Scenario& sc, const SchemeModel& scheme, const TransmitState& state);

/// Variable layout of the assembled subproblem. Index -1 marks a pinned
/// (degenerate) block that is held at zero for this iteration.
struct Layout {
    int n = 0;
    std::vector<std::vector<int>> w_off;
    int pc_off = -1;
    std::vector<int> pk_off;
    std::vector<int> f_idx;
    std::vector<int> beta_idx;
    int Tu = -1, Tp = -1, Td = -1;
    std::vector<std::vector<int>> Ru_idx;
    std::vector<int> Rdc_idx;
    std::vector<int> Rdp_idx;  // per user; per message for NOMA
};

struct SubproblemSpec {
    convex::Program prog;
    Layout lay;
    Eigen::VectorXd x0;      // strictly feasible start
    Eigen::VectorXd x_prev;  // mapped previous iterate (carryover check)
    double carryover_violation = 0;
    std::vector<double> f_tilde;  // carried through unchanged
};

SubproblemSpec assemble_subproblem(const Scenario& sc, const SchemeModel& scheme,
                                   const FullAux& aux, const TransmitState& prev,
                                   const AoOptions& opts);

/// Solves the assembled convex subproblem and maps the optimum back to a
/// TransmitState. Throws on solver failure.
TransmitState solve_subproblem(const Scenario& sc, const SchemeModel& scheme,
                               const SubproblemSpec& spec, const AoOptions& opts);

/// Feasible starting point: equal-power SVD uplink beams, matched-filter
/// privates with a 10%-power common stream, beta = 0.5, f = F_b/K.
TransmitState initialize(const Scenario& sc, const SchemeModel& scheme);

/// Exact rates, allocations and stage times of a state under the scheme's
/// decoding model (never surrogate values).
RateReport evaluate_state(const Scenario& sc, const SchemeModel& scheme,
                          const TransmitState& state);
double true_objective(const Scenario& sc, const SchemeModel& scheme, const TransmitState& state);

/// Full alternating optimization from a given initial state.
Solution ao_run(const Scenario& sc, const SchemeModel& scheme, const AoOptions& opts,
                const TransmitState& init);

/// The joint uplink/downlink rate-splitting fog scheme (the primary solver).
Solution ao_minimize(const Scenario& sc, const AoOptions& opts = {});

/// Audit of the returned solution against the original (non-surrogate)
/// constraint set: powers, CPU caps, true energy rates, beta range.
struct AuditReport {
    double max_rel_violation = 0;
    std::vector<std::string> violations;
    bool ok(double tol = 1e-6) const { return max_rel_violation <= tol; }
};
AuditReport audit_solution(const Scenario& sc, const SchemeModel& scheme, const Solution& sol);

} // namespace rsfog
