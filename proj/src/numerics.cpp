#include "gtseq/numerics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace gtseq {

Probability::Probability(double value) : value_(value)
{
    if (!(value >= 0.0 && value <= 1.0)) {
        std::ostringstream msg;
        msg << "probability out of [0,1]: " << value;
        throw DomainError(msg.str());
    }
}

double std_normal_cdf(double x)
{
    if (std::isnan(x)) {
        throw DomainError("std_normal_cdf: NaN argument");
    }
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation, relative error ~1.15e-9 before refinement.
constexpr std::array<double, 6> kA = {-3.969683028665376e+01, 2.209460984245205e+02,
                                      -2.759285104469687e+02, 1.383577518672690e+02,
                                      -3.066479806614716e+01, 2.506628277459239e+00};
constexpr std::array<double, 5> kB = {-5.447609879822406e+01, 1.615858368580409e+02,
                                      -1.556989798598866e+02, 6.680131188771972e+01,
                                      -1.328068155288572e+01};
constexpr std::array<double, 6> kC = {-7.784894002430293e-03, -3.223964580411365e-01,
                                      -2.400758277161838e+00, -2.549732539343734e+00,
                                      4.374664141464968e+00,  2.938163982698783e+00};
constexpr std::array<double, 4> kD = {7.784695709041462e-03, 3.224671290700398e-01,
                                      2.445134137142996e+00, 3.754408661907416e+00};
constexpr double kLow = 0.02425;

double acklam(double u)
{
    if (u < kLow) {
        const double q = std::sqrt(-2.0 * std::log(u));
        return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
               ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
    }
    if (u > 1.0 - kLow) {
        const double q = std::sqrt(-2.0 * std::log1p(-u));
        return -(((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
               ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
    }
    const double q = u - 0.5;
    const double r = q * q;
    return (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
           (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double u)
{
    if (!(u > 0.0 && u < 1.0)) {
        std::ostringstream msg;
        msg << "std_normal_quantile: u must lie in (0,1), got " << u;
        throw DomainError(msg.str());
    }
    double x = acklam(u);
    // One Halley step. The residual is taken on the smaller tail so that it
    // keeps full relative precision for u near 1.
    const double e = u < 0.5 ? std_normal_cdf(x) - u : (1.0 - u) - std_normal_cdf(-x);
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    const double step = e / pdf;
    x -= step / (1.0 + 0.5 * x * step);
    return x;
}

double chi2_quantile_1df(double u)
{
    if (!(u > 0.0 && u < 1.0)) {
        std::ostringstream msg;
        msg << "chi2_quantile_1df: u must lie in (0,1), got " << u;
        throw DomainError(msg.str());
    }
    const double z = std_normal_quantile(0.5 * (1.0 + u));
    return z * z;
}

double find_root(const std::function<double(double)>& f, Bracket b)
{
    if (!(b.lo < b.hi) || !(b.tol > 0.0)) {
        throw DomainError("find_root: need lo < hi and tol > 0");
    }
    double lo = b.lo;
    double hi = b.hi;
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) {
        return lo;
    }
    if (fhi == 0.0) {
        return hi;
    }
    if (std::signbit(flo) == std::signbit(fhi)) {
        std::ostringstream msg;
        msg << "find_root: no sign change on [" << lo << ", " << hi << "]";
        throw BracketError(msg.str());
    }

    // Alternate secant and bisection so the bracket at least halves every
    // two iterations even when the function is very flat on one side.
    bool try_secant = true;
    while (hi - lo > b.tol) {
        double x = 0.5 * (lo + hi);
        if (try_secant) {
            const double s = hi - fhi * (hi - lo) / (fhi - flo);
            if (s > lo && s < hi && std::isfinite(s)) {
                x = s;
            }
        }
        try_secant = !try_secant;
        if (x <= lo || x >= hi) {
            break;  // bracket exhausted at floating-point resolution
        }
        const double fx = f(x);
        if (fx == 0.0) {
            return x;
        }
        if (std::signbit(fx) == std::signbit(flo)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace gtseq
