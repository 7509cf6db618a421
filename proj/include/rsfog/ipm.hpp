#pragma once

#include "rsfog/convex.hpp"

namespace rsfog::convex {

struct IpmOptions {
    double tol_gap = 1e-9;    // duality gap m/t, relative to max(1, |obj|)
    double mu = 20.0;         // barrier parameter update factor
    int max_iter = 400;       // total Newton iteration budget
    int max_inner = 60;       // Newton iterations per centering step
};

struct IpmResult {
    Eigen::VectorXd x;
    Eigen::VectorXd lambda;
    double obj = 0;
    double gap = 0;
    int iters = 0;
    bool converged = false;
    std::string message;
};

/// Log-barrier interior-point method for a linear objective over smooth
/// convex inequality constraints. Requires a strictly feasible x0 (all
/// g_i(x0) < 0 and in-domain); throws std::invalid_argument otherwise.
IpmResult ipm_solve(const Program& prog, const Eigen::VectorXd& x0, const IpmOptions& opt = {});

} // namespace rsfog::convex
