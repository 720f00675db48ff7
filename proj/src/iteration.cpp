#include "newton_chaos/iteration.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>

namespace newton_chaos {

MapKind::MapKind(MapVariant variant, double lambda) : variant_(variant), lambda_(lambda) {
    if (!std::isfinite(lambda) || lambda == 0.0) {
        throw InvalidInput("damping parameter lambda must be finite and nonzero");
    }
}

const char* to_string(MapVariant v) noexcept {
    return v == MapVariant::NewtonClassic ? "newton" : "m3";
}

namespace {

double checked_derivative(const SmoothFunction& F, double x) {
    const double d = F.df(x);
    if (!(std::fabs(d) > kDerivFloor)) throw DerivativeBlowup(x);
    return d;
}

}  // namespace

double newton_step(const SmoothFunction& F, double lambda, double x) {
    const double d = checked_derivative(F, x);
    return x - lambda * F.f(x) / d;
}

double third_order_step(const SmoothFunction& F, double lambda, double x) {
    const double d = checked_derivative(F, x);
    const double n = x - lambda * F.f(x) / d;
    return n - lambda * F.f(n) / d;
}

double step(const SmoothFunction& F, const MapKind& kind, double x) {
    return kind.variant() == MapVariant::NewtonClassic ? newton_step(F, kind.lambda(), x)
                                                       : third_order_step(F, kind.lambda(), x);
}

std::optional<double> try_step(const SmoothFunction& F, const MapKind& kind, double x) noexcept {
    const double d = F.df(x);
    if (!(std::fabs(d) > kDerivFloor)) return std::nullopt;
    const double lam = kind.lambda();
    const double n = x - lam * F.f(x) / d;
    if (kind.variant() == MapVariant::NewtonClassic) return n;
    return n - lam * F.f(n) / d;
}

std::optional<Real> try_step_ext(const SmoothFunction& F, const MapKind& kind, Real x) noexcept {
    const Real d = F.df_ext(x);
    if (!(abs(d) > static_cast<Real>(kDerivFloor))) return std::nullopt;
    const Real lam = kind.lambda();
    const Real n = x - lam * F.f_ext(x) / d;
    if (kind.variant() == MapVariant::NewtonClassic) return n;
    return n - lam * F.f_ext(n) / d;
}

std::optional<double> iterate_n(const SmoothFunction& F, const MapKind& kind, double x, int n) noexcept {
    for (int i = 0; i < n; ++i) {
        auto next = try_step(F, kind, x);
        if (!next) return std::nullopt;
        x = *next;
    }
    return x;
}

std::string to_string(const OrbitClass& c) {
    char buf[64];
    switch (c.kind) {
        case OrbitClass::ConvergedToRoot:
            std::snprintf(buf, sizeof buf, "converged:%.17g", c.value);
            return buf;
        case OrbitClass::PeriodicSuspect:
            return "periodic:" + std::to_string(c.period);
        case OrbitClass::Escaped:
            return "escaped";
        case OrbitClass::DerivativeBlowup:
            std::snprintf(buf, sizeof buf, "blowup:%.17g", c.value);
            return buf;
        case OrbitClass::MaxIter:
            return "max_iter";
    }
    return "unknown";
}

OrbitRecord iterate(const SmoothFunction& F, const MapKind& kind, double start, const IterateOptions& opts) {
    if (opts.max_iter < 1) throw InvalidInput("max_iter must be at least 1");
    if (!(opts.escape_radius > 0.0)) throw InvalidInput("escape_radius must be positive");
    if (!(opts.tol > 0.0)) throw InvalidInput("tol must be positive");

    OrbitRecord rec;
    rec.start = start;
    rec.iterates.reserve(static_cast<std::size_t>(std::min(opts.max_iter, 4096)) + 1);
    double x = start;
    for (int n = 0;; ++n) {
        rec.iterates.push_back(x);
        auto finish = [&](OrbitClass::Kind k, double value = 0.0, int period = 0) {
            rec.classification = {k, value, period, n};
            return rec;
        };
        if (!std::isfinite(x)) return finish(OrbitClass::Escaped);
        if (std::fabs(F.f(x)) <= opts.tol) return finish(OrbitClass::ConvergedToRoot, x);
        if (std::fabs(x) > opts.escape_radius) return finish(OrbitClass::Escaped);
        const double revisit = opts.period_tol * (1.0 + std::fabs(x));
        for (int lag = 1; lag <= std::min(n, opts.max_period_lag); ++lag) {
            if (std::fabs(x - rec.iterates[static_cast<std::size_t>(n - lag)]) <= revisit) {
                return finish(OrbitClass::PeriodicSuspect, 0.0, lag);
            }
        }
        if (n == opts.max_iter) return finish(OrbitClass::MaxIter);
        auto next = try_step(F, kind, x);
        if (!next) return finish(OrbitClass::DerivativeBlowup, x);
        x = *next;
    }
}

OrderEstimate estimate_order(const SmoothFunction& F, const MapKind& kind, double root, std::span<const double> seeds,
                             int max_steps) {
    constexpr double kLo = 1e-12, kHi = 1e-2;
    std::vector<double> xs, ys;
    for (double seed : seeds) {
        double x = seed;
        double e = std::fabs(x - root);
        for (int i = 0; i < max_steps; ++i) {
            auto next = try_step(F, kind, x);
            if (!next || !std::isfinite(*next)) break;
            const double e_next = std::fabs(*next - root);
            if (e > kLo && e < kHi && e_next > kLo && e_next < kHi) {
                xs.push_back(std::log(e));
                ys.push_back(std::log(e_next));
            }
            if (e_next == 0.0 || e_next <= kLo) break;
            x = *next;
            e = e_next;
        }
    }
    if (xs.size() < 3) {
        throw EstimationFailure("only " + std::to_string(xs.size()) + " usable error pairs (need 3)");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw EstimationFailure("error pairs are degenerate");
    return {sxy / sxx, static_cast<int>(xs.size())};
}

std::vector<double> default_order_seeds(double root) {
    std::vector<double> seeds;
    for (double h : {8e-3, 4e-3, 2e-3, 1e-3}) {
        seeds.push_back(root + h);
        seeds.push_back(root - h);
    }
    return seeds;
}

}  // namespace newton_chaos
