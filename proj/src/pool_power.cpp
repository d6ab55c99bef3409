#include "gtseq/pool_power.hpp"

#include <cmath>

#include "gtseq/numerics.hpp"

namespace gtseq {

namespace {

struct Root {
    double r;            // (1-x)^(1/k)
    double one_minus_r;  // 1 - r without cancellation
};

Root kth_root_of_complement(double x, int k)
{
    const double l = std::log1p(-x) / k;
    return {std::exp(l), -std::expm1(l)};
}

}  // namespace

PoolPower::PoolPower(double a, double b, int k) : a_(a), b_(b), k_(k)
{
    if (k < 1) {
        throw DomainError("PoolPower: pool size must be >= 1");
    }
}

double PoolPower::value(double x) const
{
    const Root rt = kth_root_of_complement(x, k_);
    const double c = b_ * (2.0 / k_ - 1.0);
    return std::pow(rt.one_minus_r, a_) * std::pow(x, -b_) * std::pow(1.0 - x, -c);
}

// d/dx log(1-r) = r / (k (1-x) (1-r)).
double PoolPower::log_slope(double x) const
{
    const Root rt = kth_root_of_complement(x, k_);
    const double w = rt.r / (k_ * (1.0 - x) * rt.one_minus_r);
    const double c = b_ * (2.0 / k_ - 1.0);
    return a_ * w - b_ / x + c / (1.0 - x);
}

double PoolPower::log_curvature(double x) const
{
    const Root rt = kth_root_of_complement(x, k_);
    const double w = rt.r / (k_ * (1.0 - x) * rt.one_minus_r);
    const double dw = w / (1.0 - x) * (1.0 - 1.0 / k_ - rt.r / (k_ * rt.one_minus_r));
    const double c = b_ * (2.0 / k_ - 1.0);
    return a_ * dw + b_ / (x * x) + c / ((1.0 - x) * (1.0 - x));
}

double PoolPower::d1(double x) const
{
    return value(x) * log_slope(x);
}

double PoolPower::d2(double x) const
{
    const double s = log_slope(x);
    return value(x) * (log_curvature(x) + s * s);
}

}  // namespace gtseq
