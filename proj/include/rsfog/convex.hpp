#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rsfog::convex {

/// Contributes ||F * x.segment(offset, F.cols())||^2 to a quadratic form.
/// Quadratic structure is block-local by construction (no cross-block terms),
/// which keeps Hessian assembly cheap.
struct QuadFactor {
    int offset = 0;
    Eigen::MatrixXd F;
    Eigen::MatrixXd FtF;  // cached F^T F
    QuadFactor() = default;
    QuadFactor(int off, Eigen::MatrixXd f) : offset(off), F(std::move(f)) { FtF = F.transpose() * F; }
};

/// One term c (a^T x + a0)^2 / (d^T x + d0), the smooth form of a rotated
/// second-order cone atom; requires c >= 0 and d^T x + d0 > 0.
struct Ratio {
    double c = 0;
    Eigen::VectorXd a;
    double a0 = 0;
    Eigen::VectorXd d;
    double d0 = 0;
};

/// A convex inequality g(x) <= 0 in one of four cone-ready forms:
///   Affine:    a^T x + b
///   Quadratic: a^T x + b + sum ||F x_blk||^2
///   RatioSum:  a^T x + b + sum of Ratio terms
///   LogQuad:   a^T x + b - log2(phi(x)),  phi = phi_c0 + phi_a^T x - sum ||F x_blk||^2
/// LogQuad is the exponential-cone atom composed with its concave-quadratic
/// argument; keeping the composition avoids an extra epigraph variable.
class Constraint {
  public:
    enum class Kind { Affine, Quadratic, RatioSum, LogQuad };

    Kind kind = Kind::Affine;
    std::string tag;  // constraint family, for audits and diagnostics
    Eigen::VectorXd a;
    double b = 0;
    std::vector<QuadFactor> factors;
    std::vector<Ratio> ratios;
    double phi_c0 = 0;
    Eigen::VectorXd phi_a;

    bool in_domain(const Eigen::VectorXd& x) const;
    double eval(const Eigen::VectorXd& x) const;
    Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
    /// H += w * hess(g)(x). Assumes in_domain(x).
    void add_hessian(const Eigen::VectorXd& x, double w, Eigen::MatrixXd& H) const;

  private:
    double phi(const Eigen::VectorXd& x) const;
};

struct Program {
    int n = 0;
    Eigen::VectorXd cost;  // linear objective c^T x
    std::vector<Constraint> cons;
};

} // namespace rsfog::convex
