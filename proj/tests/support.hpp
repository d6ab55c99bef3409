#pragma once

#include <doctest.h>

#include <cmath>
#include <iomanip>

#define CHECK_NEAR(a, b, tol)                                                       \
    do {                                                                            \
        const double got_ = (a);                                                    \
        const double want_ = (b);                                                   \
        INFO(#a << " = " << std::setprecision(12) << got_ << ", want " << want_    \
                << " +- " << (tol));                                                \
        CHECK(std::abs(got_ - want_) <= (tol));                                     \
    } while (0)

#define CHECK_REL(a, b, rel) CHECK_NEAR(a, b, std::abs(b) * (rel))
