#pragma once

// Bessel functions of integer order and root location for analytic
// characteristic functions.

#include <functional>
#include <string>
#include <vector>

#include "apos/types.hpp"

namespace apos {

inline constexpr int kBesselMaxOrder = 60;
inline constexpr double kBesselMaxArgument = 1e3;

double bessel_j(int k, double x);
double bessel_j_prime(int k, double x);
double bessel_i(int k, double x);
double bessel_i_prime(int k, double x);

/// l-th positive zero of J_k.
double bessel_zero(int k, int l);

struct CharFunction {
    std::string name;
    std::function<Complex(Complex)> value;
    std::function<Complex(Complex)> derivative;

    Complex operator()(Complex z) const { return value(z); }
};

struct Rect {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_min = 0.0;
    double im_max = 0.0;

    bool contains(Complex z, double margin = 0.0) const;
    Complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
    /// Four sub-rectangles cut at the given fractions of the width and
    /// height, ordered SW, SE, NW, NE.
    std::vector<Rect> split(double fx = 0.5, double fy = 0.5) const;
};

struct RootCount {
    int count = 0;
    int samples_per_side = 0;  // resolution at which the count settled
    double rounding_gap = 0.0;
    double min_abs_on_contour = 0.0;
};

/// Winding number of f around the boundary of rect. Samples double until
/// three successive counts agree.
RootCount count_roots_detailed(const CharFunction& f, const Rect& rect, int samples_per_side = 64);
int count_roots(const CharFunction& f, const Rect& rect, int samples_per_side = 64);

struct RefinedRoot {
    Complex value;
    double residual = 0.0;
    int multiplicity = 1;
};

struct RejectedSeed {
    Complex seed;
    Complex last;
    std::string reason;
};

struct RootSet {
    std::vector<RefinedRoot> roots;
    std::vector<RejectedSeed> rejected;
    Rect region;
    int count_by_argument = 0;
    bool mismatch = false;  // count_by_argument differs from Σ multiplicities
};

/// Newton refinement of seeds; roots outside rect are rejected, duplicates
/// within 1e-8 merged.
RootSet refine_roots(const CharFunction& f, const Rect& rect, const std::vector<Complex>& seeds);

/// Seeds from recursive subdivision guided by count_roots, then refine_roots.
RootSet find_roots(const CharFunction& f, const Rect& rect);

/// h(λ) = λ − e^{−2λ} + e^{−λ}.
CharFunction delay_characteristic();
/// det S(λ) = (e^{−λ} − 2)(e^{−λl} − 2) − e^{−λ}e^{−λl}.
CharFunction network_characteristic(double l);
/// √λ J_k′(√λ) + q J_k(√λ), defined for real λ > 0 only.
CharFunction bose_characteristic(int k, double q);

/// Smallest positive root of the Bose condition for order k, bracketed
/// below j_{k,1}². q = 0 is allowed for k ≥ 1.
double bose_first_root(int k, double q);

}  // namespace apos
