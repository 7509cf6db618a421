#include "rsfog/convex.hpp"

#include <cmath>

namespace rsfog::convex {

namespace {
constexpr double kLn2 = 0.6931471805599453;

double quad_sum(const std::vector<QuadFactor>& factors, const Eigen::VectorXd& x) {
    double s = 0;
    for (const auto& q : factors) s += (q.F * x.segment(q.offset, q.F.cols())).squaredNorm();
    return s;
}

void quad_grad(const std::vector<QuadFactor>& factors, const Eigen::VectorXd& x, double scale,
               Eigen::VectorXd& g) {
    for (const auto& q : factors)
        g.segment(q.offset, q.F.cols()) += (2.0 * scale) * (q.FtF * x.segment(q.offset, q.F.cols()));
}
} // namespace

double Constraint::phi(const Eigen::VectorXd& x) const {
    return phi_c0 + phi_a.dot(x) - quad_sum(factors, x);
}

bool Constraint::in_domain(const Eigen::VectorXd& x) const {
    switch (kind) {
        case Kind::RatioSum:
            for (const auto& r : ratios)
                if (r.d.dot(x) + r.d0 <= 0.0) return false;
            return true;
        case Kind::LogQuad:
            return phi(x) > 0.0;
        default:
            return true;
    }
}

double Constraint::eval(const Eigen::VectorXd& x) const {
    double g = a.dot(x) + b;
    switch (kind) {
        case Kind::Affine:
            break;
        case Kind::Quadratic:
            g += quad_sum(factors, x);
            break;
        case Kind::RatioSum:
            for (const auto& r : ratios) {
                const double u = r.a.dot(x) + r.a0;
                const double v = r.d.dot(x) + r.d0;
                g += r.c * u * u / v;
            }
            break;
        case Kind::LogQuad:
            g -= std::log2(phi(x));
            break;
    }
    return g;
}

Eigen::VectorXd Constraint::grad(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = a;
    switch (kind) {
        case Kind::Affine:
            break;
        case Kind::Quadratic:
            quad_grad(factors, x, 1.0, g);
            break;
        case Kind::RatioSum:
            for (const auto& r : ratios) {
                const double u = r.a.dot(x) + r.a0;
                const double v = r.d.dot(x) + r.d0;
                g += r.c * (2.0 * u / v) * r.a;
                g -= r.c * (u * u / (v * v)) * r.d;
            }
            break;
        case Kind::LogQuad: {
            // d/dx [-log2 phi] = -phi' / (phi ln2)
            const double ph = phi(x);
            const double s = 1.0 / (ph * kLn2);
            g -= s * phi_a;
            quad_grad(factors, x, s, g);
            break;
        }
    }
    return g;
}

void Constraint::add_hessian(const Eigen::VectorXd& x, double w, Eigen::MatrixXd& H) const {
    switch (kind) {
        case Kind::Affine:
            break;
        case Kind::Quadratic:
            for (const auto& q : factors) {
                const int c = static_cast<int>(q.F.cols());
                H.block(q.offset, q.offset, c, c) += (2.0 * w) * q.FtF;
            }
            break;
        case Kind::RatioSum:
            for (const auto& r : ratios) {
                // hess = (2c/v) (a - (u/v) d)(a - (u/v) d)^T
                const double u = r.a.dot(x) + r.a0;
                const double v = r.d.dot(x) + r.d0;
                const Eigen::VectorXd t = r.a - (u / v) * r.d;
                H.noalias() += (w * 2.0 * r.c / v) * t * t.transpose();
            }
            break;
        case Kind::LogQuad: {
            // hess(-log2 phi) = phi' phi'^T / (phi^2 ln2) - phi'' / (phi ln2),
            // with -phi'' = 2 sum F^T F (PSD).
            const double ph = phi(x);
            Eigen::VectorXd dphi = phi_a;
            quad_grad(factors, x, -1.0, dphi);
            H.noalias() += (w / (ph * ph * kLn2)) * dphi * dphi.transpose();
            const double s = w * 2.0 / (ph * kLn2);
            for (const auto& q : factors) {
                const int c = static_cast<int>(q.F.cols());
                H.block(q.offset, q.offset, c, c) += s * q.FtF;
            }
            break;
        }
    }
}

} // namespace rsfog::convex
