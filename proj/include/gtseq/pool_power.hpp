#pragma once

namespace gtseq {

/// Functions of a pool-positivity rate x of the form
///
///     f(x) = (1 - r)^a * D^(-b),   r = (1 - x)^(1/k),   D = r^2 x / (1 - x),
///
/// with value, first and second derivative in x. With (a, b) = (-2, -1) this
/// is psi; (3, 1) and (5, 2) are the ratios p/psi and p/psi^2 that appear in
/// the moments of the linear two-stage estimator; (2, 1) and (4, 2) are
/// 1/psi and 1/psi^2. Derivatives go through log f, which keeps them accurate
/// for pool sizes in the hundreds.
class PoolPower {
public:
    PoolPower(double a, double b, int k);

    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;

    int k() const { return k_; }

private:
    double log_slope(double x) const;      // (log f)'
    double log_curvature(double x) const;  // (log f)''

    double a_;
    double b_;
    int k_;
};

}  // namespace gtseq
