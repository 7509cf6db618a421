#include "rsfog/ipm.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace rsfog::convex {

namespace {

bool strictly_feasible(const Program& prog, const Eigen::VectorXd& x) {
    for (const auto& c : prog.cons)
        if (!c.in_domain(x) || c.eval(x) >= 0.0) return false;
    return true;
}

// Barrier objective t*c'x - sum_i log(-g_i(x)); +inf outside the domain.
double barrier_value(const Program& prog, double t, const Eigen::VectorXd& x) {
    double phi = t * prog.cost.dot(x);
    for (const auto& c : prog.cons) {
        if (!c.in_domain(x)) return std::numeric_limits<double>::infinity();
        const double g = c.eval(x);
        if (g >= 0.0) return std::numeric_limits<double>::infinity();
        phi -= std::log(-g);
    }
    return phi;
}

} // namespace

IpmResult ipm_solve(const Program& prog, const Eigen::VectorXd& x0, const IpmOptions& opt) {
    const int n = prog.n;
    const int m = static_cast<int>(prog.cons.size());
    if (x0.size() != n) throw std::invalid_argument("ipm_solve: x0 size mismatch");
    if (!strictly_feasible(prog, x0))
        throw std::invalid_argument("ipm_solve: x0 is not strictly feasible");

    IpmResult res;
    res.x = x0;
    res.obj = prog.cost.dot(x0);
    if (m == 0) { // unconstrained linear objective only makes sense if c == 0
        res.converged = true;
        return res;
    }

    const bool verbose = std::getenv("RSFOG_IPM_VERBOSE") != nullptr;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd g(m);
    double t = m / std::max(1.0, std::abs(res.obj)); // initial gap m/t ~ max(1, |obj|)
    int newton_total = 0;
    double reg = 1e-12;

    for (;;) {
        // Centering: damped Newton on phi_t(x) = t*c'x - sum log(-g_i(x)).
        for (int inner = 0; inner < opt.max_inner; ++inner) {
            Eigen::VectorXd grad = t * prog.cost;
            Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < m; ++i) {
                const auto& c = prog.cons[i];
                g(i) = c.eval(x);
                const Eigen::VectorXd gi = c.grad(x);
                const double inv = 1.0 / (-g(i));
                grad.noalias() += inv * gi;
                c.add_hessian(x, inv, H);
                H.noalias() += (inv * inv) * (gi * gi.transpose());
            }

            Eigen::VectorXd dx;
            for (;;) {
                Eigen::MatrixXd Hr = H;
                Hr.diagonal().array() += reg * (1.0 + H.diagonal().array().abs());
                Eigen::LDLT<Eigen::MatrixXd> ldlt(Hr);
                dx = ldlt.solve(-grad);
                if (ldlt.info() == Eigen::Success && dx.allFinite() && grad.dot(dx) < 0.0) break;
                reg *= 100.0;
                if (reg > 1e2) {
                    res.message = "ipm: Newton system factorization failed";
                    res.gap = m / t;
                    res.converged = res.gap <= 1e-6 * std::max(1.0, std::abs(res.obj));
                    return res;
                }
            }

            const double dec2 = -grad.dot(dx); // squared Newton decrement
            if (verbose)
                std::fprintf(stderr, "ipm t %.3e inner %2d obj %.9e dec2 %.3e\n", t, inner,
                             prog.cost.dot(x), dec2);
            if (dec2 * 0.5 <= 1e-8) break;

            // Backtracking line search on phi (infeasible points get phi = +inf).
            const double phi0 = barrier_value(prog, t, x);
            double s = 1.0;
            bool moved = false;
            for (int bt = 0; bt < 80; ++bt) {
                const Eigen::VectorXd xn = x + s * dx;
                if (barrier_value(prog, t, xn) <= phi0 - 0.25 * s * dec2) {
                    x = xn;
                    moved = true;
                    break;
                }
                s *= 0.5;
            }
            if (!moved) break; // stalled at FP resolution; current x is near-centered

            reg = std::max(1e-12, reg * 0.1);
            if (++newton_total >= opt.max_iter) {
                res.x = x;
                res.obj = prog.cost.dot(x);
                res.gap = m / t;
                res.iters = newton_total;
                res.lambda.resize(m);
                for (int i = 0; i < m; ++i) res.lambda(i) = 1.0 / (t * (-prog.cons[i].eval(x)));
                res.converged = res.gap <= 1e-6 * std::max(1.0, std::abs(res.obj));
                res.message = "ipm: max iterations";
                return res;
            }
        }

        res.x = x;
        res.obj = prog.cost.dot(x);
        res.gap = m / t;
        res.iters = newton_total;
        res.lambda.resize(m);
        for (int i = 0; i < m; ++i) res.lambda(i) = 1.0 / (t * (-prog.cons[i].eval(x)));
        if (res.gap <= opt.tol_gap * std::max(1.0, std::abs(res.obj))) {
            res.converged = true;
            return res;
        }
        t *= opt.mu;
    }
}

} // namespace rsfog::convex
