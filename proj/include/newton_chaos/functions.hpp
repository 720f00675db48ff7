#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newton_chaos/interval.hpp"

namespace newton_chaos {

inline constexpr double kDefaultWindowHalfWidth = 50.0;
inline constexpr int kDefaultGridPoints = 10000;
inline constexpr double kDefaultRootTol = 1e-12;
inline constexpr double kDefaultNewtonClassTol = 1e-8;

inline Interval default_window() { return {-kDefaultWindowHalfWidth, kDefaultWindowHalfWidth}; }

/// Dense real polynomial, coefficients in ascending degree.
class Polynomial {
public:
    explicit Polynomial(std::vector<double> coeffs);
    /// Keeps the extended coefficients for Real evaluation; the double
    /// coefficients are their roundings.
    static Polynomial from_extended(std::vector<Real> coeffs);

    double operator()(double x) const noexcept;
    Real operator()(Real x) const noexcept;
    /// Sum of |c_i| |x|^i, the rounding scale of a Horner evaluation at x.
    double magnitude(double x) const noexcept;
    Polynomial derivative() const;

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    double leading() const noexcept { return coeffs_.back(); }
    std::span<const double> coefficients() const noexcept { return coeffs_; }
    std::span<const Real> extended_coefficients() const noexcept { return ext_; }

private:
    struct Unchecked {};
    Polynomial(std::vector<double> coeffs, std::vector<Real> ext, Unchecked)
        : coeffs_(std::move(coeffs)), ext_(std::move(ext)) {}

    std::vector<double> coeffs_;
    std::vector<Real> ext_;
};

enum class FunctionKind { Polynomial, ClosedForm };

using RealFn = std::function<double(double)>;

/// f together with f' and f'' and the window the numerics are confined to.
///
/// Roots or critical points outside the window are invisible to every scan in
/// this library. Instances are immutable and cheap to copy.
class SmoothFunction {
public:
    static SmoothFunction polynomial(std::vector<double> coeffs, Interval window = default_window());
    static SmoothFunction polynomial(Polynomial p, Interval window = default_window());
    /// Derivatives are taken as given; nothing checks that df really is f'.
    static SmoothFunction closed_form(RealFn f, RealFn df, RealFn ddf, Interval window,
                                      std::string label = "closed-form");

    double f(double x) const;
    double df(double x) const;
    double ddf(double x) const;

    /// Extended-precision evaluation. Polynomials are evaluated in Real;
    /// closed forms go through their double callbacks, so the extra bits are
    /// not meaningful for them (see extended_exact()).
    Real f_ext(Real x) const;
    Real df_ext(Real x) const;
    bool extended_exact() const noexcept { return poly_ != nullptr; }

    const Interval& window() const noexcept { return window_; }
    FunctionKind kind() const noexcept;
    /// Coefficients, for polynomial kind only.
    const Polynomial* as_polynomial() const noexcept;
    const std::string& label() const noexcept { return label_; }

    SmoothFunction with_window(Interval window) const;

private:
    struct PolyParts {
        Polynomial p, dp, ddp;
    };
    struct ClosedParts {
        RealFn f, df, ddf;
    };

    SmoothFunction(std::shared_ptr<const PolyParts> poly, std::shared_ptr<const ClosedParts> closed,
                   Interval window, std::string label);

    std::shared_ptr<const PolyParts> poly_;
    std::shared_ptr<const ClosedParts> closed_;
    Interval window_;
    std::string label_;
};

SmoothFunction make_polynomial(std::vector<double> coeffs, Interval window = default_window());

/// Zeros of `g` on `window` by uniform sign scan, bisection, then one Newton
/// polish with `dg` when supplied. A grid point where g is exactly zero is
/// accepted as a zero and the scan continues after it. `magnitude`, when
/// supplied, gives the rounding scale of g and loosens the residual filter for
/// zeros whose value cannot be resolved below tol * (1 + |x|).
std::vector<double> find_zeros(const RealFn& g, const RealFn* dg, const Interval& window, int grid_n,
                               double tol, const RealFn* magnitude = nullptr);

std::vector<double> find_roots(const SmoothFunction& F, int grid_n = kDefaultGridPoints,
                               double tol = kDefaultRootTol);
std::vector<double> find_critical_points(const SmoothFunction& F, int grid_n = kDefaultGridPoints,
                                         double tol = kDefaultRootTol);

struct CriticalStructure {
    std::vector<double> roots;
    std::vector<double> critical_points;
    /// Every gap between consecutive roots holds a critical point.
    bool interlacing_ok = false;
};

CriticalStructure analyze(const SmoothFunction& F, int grid_n = kDefaultGridPoints,
                          double tol = kDefaultRootTol);

enum class NewtonCondition { Nf2, Nf3 };

struct NewtonClassWitness {
    NewtonCondition condition;
    double x;
    double f, df, ddf;
};

struct NewtonClassReport {
    bool nf2_ok = true;
    bool nf3_ok = true;
    std::vector<NewtonClassWitness> witnesses;

    bool ok() const noexcept { return nf2_ok && nf3_ok; }
};

/// Checks (nf2) simple roots and (nf3) simple critical points on the window.
///
/// Even-multiplicity roots produce no sign change in f, so they are found as
/// critical points where f also vanishes; the same trick on f'' finds double
/// roots of f'.
NewtonClassReport verify_newton_class(const SmoothFunction& F, double tol = kDefaultNewtonClassTol,
                                      int grid_n = kDefaultGridPoints);

const char* to_string(NewtonCondition c) noexcept;

}  // namespace newton_chaos
