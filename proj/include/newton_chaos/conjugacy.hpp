#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "newton_chaos/functions.hpp"
#include "newton_chaos/iteration.hpp"

namespace newton_chaos {

/// x -> a x + b with a != 0.
class AffineMap {
public:
    AffineMap(double a, double b);

    static AffineMap identity() { return {1.0, 0.0}; }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    double operator()(double x) const noexcept { return a_ * x + b_; }
    AffineMap inverse() const { return {1.0 / a_, -b_ / a_}; }
    /// (*this)(inner(x)).
    AffineMap compose(const AffineMap& inner) const { return {a_ * inner.a_, a_ * inner.b_ + b_}; }
    /// (x - b) / a, evaluated directly rather than through inverse().
    double unapply(double x) const noexcept { return (x - b_) / a_; }

private:
    double a_;
    double b_;
};

/// f o T with chain-rule derivatives. Polynomials are re-expanded into
/// coefficients so the result stays polynomial. The window is the preimage
/// of F's window under T.
SmoothFunction conjugate_function(const SmoothFunction& F, const AffineMap& T);

struct ScalingReport {
    /// max |T(map_{f o T}(T^-1 x)) - map_f(x)| / (1 + |map_f(x)|).
    double max_rel_err = 0.0;
    double worst_x = 0.0;
    int checked = 0;
    /// Samples where either side hit the derivative floor.
    std::vector<double> skipped;
    double tol = 0.0;
    bool passed = true;
};

/// Compares the two sides of the affine conjugacy identity for the damped
/// map of `variant` at every sample. lambda = 0 is rejected.
ScalingReport verify_scaling(const SmoothFunction& F, const AffineMap& T, std::span<const double> samples,
                             MapVariant variant, double lambda, double tol);

ScalingReport verify_scaling_N(const SmoothFunction& F, const AffineMap& T, std::span<const double> samples,
                               double lambda, double tol);
ScalingReport verify_scaling_M(const SmoothFunction& F, const AffineMap& T, std::span<const double> samples,
                               double lambda, double tol);

/// `count` points uniform on `range`, drawn from a 64-bit Mersenne twister
/// seeded with `seed`, keeping only points at least `exclusion` away from
/// every critical point of f and whose T-preimage is at least `exclusion`
/// away from every critical point of f o T.
std::vector<double> scaling_samples(const SmoothFunction& F, const AffineMap& T, const Interval& range, int count,
                                    std::uint64_t seed, double exclusion = 1e-3);

}  // namespace newton_chaos
