#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace gtseq {

/// Raised when an argument lies outside the domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised by find_root when the bracket does not enclose a sign change.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A probability or fraction in [0, 1].
///
/// Converts implicitly from and to double so that it reads like a plain
/// number in formulas; construction validates the range.
class Probability {
public:
    constexpr Probability() = default;
    Probability(double value);  // NOLINT(google-explicit-constructor)

    constexpr operator double() const { return value_; }  // NOLINT
    constexpr double value() const { return value_; }

private:
    double value_ = 0.0;
};

/// Closed search interval for find_root with an absolute width tolerance.
struct Bracket {
    double lo;
    double hi;
    double tol = 1e-12;
};

/// Standard normal CDF, accurate to ~1e-16 absolute.
double std_normal_cdf(double x);

/// Inverse of std_normal_cdf. Throws DomainError unless 0 < u < 1.
double std_normal_quantile(double u);

/// The u-quantile of the chi-squared distribution with one degree of freedom.
double chi2_quantile_1df(double u);

/// Bracketed root of a continuous function.
///
/// Bisection with secant steps; a secant step is only accepted when it falls
/// strictly inside the current bracket, so convergence never depends on it.
/// Returns the midpoint of the final bracket, whose width is <= b.tol.
/// Throws BracketError when f(lo) and f(hi) have the same strict sign.
double find_root(const std::function<double(double)>& f, Bracket b);

}  // namespace gtseq
