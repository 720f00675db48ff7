#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "newton_chaos/functions.hpp"

namespace newton_chaos {

/// Below this |f'(x)| a step is refused. Set at genuine underflow so the
/// steep dynamics next to critical points stays observable.
inline constexpr double kDerivFloor = 1e-300;
/// Steps with |f'(x)| under this are legal but worth flagging.
inline constexpr double kDerivWarn = 1e-12;

inline constexpr int kDefaultMaxIter = 1000;
inline constexpr double kDefaultEscapeRadius = 1e8;
inline constexpr double kDefaultPeriodTol = 1e-9;
inline constexpr int kDefaultMaxPeriodLag = 64;

enum class MapVariant { NewtonClassic, NewtonThirdOrder };

/// Which iteration map, plus its damping multiplier (1 = undamped).
class MapKind {
public:
    MapKind(MapVariant variant, double lambda = 1.0);

    static MapKind newton(double lambda = 1.0) { return {MapVariant::NewtonClassic, lambda}; }
    static MapKind third_order(double lambda = 1.0) { return {MapVariant::NewtonThirdOrder, lambda}; }

    MapVariant variant() const noexcept { return variant_; }
    double lambda() const noexcept { return lambda_; }

    friend bool operator==(const MapKind&, const MapKind&) = default;

private:
    MapVariant variant_;
    double lambda_;
};

const char* to_string(MapVariant v) noexcept;

/// x - lambda f(x)/f'(x). Throws DerivativeBlowup when |f'(x)| <= kDerivFloor.
double newton_step(const SmoothFunction& F, double lambda, double x);

/// N - lambda f(N)/f'(x) with N = newton_step(F, lambda, x). The second
/// correction reuses f'(x), not f'(N).
double third_order_step(const SmoothFunction& F, double lambda, double x);

double step(const SmoothFunction& F, const MapKind& kind, double x);

/// As step(), but nullopt instead of throwing at the derivative floor.
std::optional<double> try_step(const SmoothFunction& F, const MapKind& kind, double x) noexcept;

/// try_step in extended precision.
std::optional<Real> try_step_ext(const SmoothFunction& F, const MapKind& kind, Real x) noexcept;

/// x_{n} after n applications; nullopt if any step hits the derivative floor.
std::optional<double> iterate_n(const SmoothFunction& F, const MapKind& kind, double x, int n) noexcept;

struct OrbitClass {
    enum Kind { ConvergedToRoot, PeriodicSuspect, Escaped, DerivativeBlowup, MaxIter };

    Kind kind = MaxIter;
    /// Root for ConvergedToRoot, offending x for DerivativeBlowup.
    double value = 0.0;
    /// Lag for PeriodicSuspect.
    int period = 0;
    /// Iterate index at which the classification was made.
    int step = 0;

    friend bool operator==(const OrbitClass&, const OrbitClass&) = default;
};

std::string to_string(const OrbitClass& c);

struct OrbitRecord {
    double start = 0.0;
    std::vector<double> iterates;
    OrbitClass classification;
};

struct IterateOptions {
    int max_iter = kDefaultMaxIter;
    double escape_radius = kDefaultEscapeRadius;
    /// Convergence when |f(x_n)| <= tol.
    double tol = kDefaultRootTol;
    /// Revisit tolerance, relative to 1 + |x_n|.
    double period_tol = kDefaultPeriodTol;
    /// Longest lag scanned for revisits.
    int max_period_lag = kDefaultMaxPeriodLag;
};

OrbitRecord iterate(const SmoothFunction& F, const MapKind& kind, double start, const IterateOptions& opts = {});

class EstimationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OrderEstimate {
    double order = 0.0;
    int pairs_used = 0;
};

/// Least-squares slope of log e_{n+1} against log e_n over error pairs with
/// both errors in (1e-12, 1e-2). Throws EstimationFailure below three pairs.
OrderEstimate estimate_order(const SmoothFunction& F, const MapKind& kind, double root, std::span<const double> seeds,
                             int max_steps = 60);

/// root +/- {8e-3, 4e-3, 2e-3, 1e-3}.
std::vector<double> default_order_seeds(double root);

}  // namespace newton_chaos
