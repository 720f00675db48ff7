#include "newton_chaos/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "newton_chaos/parallel.hpp"

namespace newton_chaos {

AffineMap::AffineMap(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidInput("affine coefficients must be finite");
    if (a == 0.0) throw InvalidInput("affine scale a must be nonzero");
}

SmoothFunction conjugate_function(const SmoothFunction& F, const AffineMap& T) {
    const double wl = T.unapply(F.window().lo());
    const double wr = T.unapply(F.window().hi());
    const Interval window{std::min(wl, wr), std::max(wl, wr)};

    if (const Polynomial* p = F.as_polynomial()) {
        // sum_i c_i (a y + b)^i, expanded term by term in extended precision.
        const auto c = p->extended_coefficients();
        const std::size_t n = c.size();
        std::vector<Real> out(n, 0);
        std::vector<Real> power{1};  // coefficients of (a y + b)^i
        const Real a = T.a(), b = T.b();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < power.size(); ++k) out[k] += c[i] * power[k];
            std::vector<Real> next(power.size() + 1, 0);
            for (std::size_t k = 0; k < power.size(); ++k) {
                next[k] += b * power[k];
                next[k + 1] += a * power[k];
            }
            power = std::move(next);
        }
        // Rounding the expanded coefficients to double can cancel badly when
        // a y and b nearly cancel, so the extended ones are kept as well.
        return SmoothFunction::polynomial(Polynomial::from_extended(std::move(out)), window);
    }

    const double a = T.a();
    return SmoothFunction::closed_form([F, T](double y) { return F.f(T(y)); },
                                       [F, T, a](double y) { return a * F.df(T(y)); },
                                       [F, T, a](double y) { return a * a * F.ddf(T(y)); }, window,
                                       F.label() + " o affine");
}

ScalingReport verify_scaling(const SmoothFunction& F, const AffineMap& T, std::span<const double> samples,
                             MapVariant variant, double lambda, double tol) {
    const MapKind kind{variant, lambda};
    if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
    const SmoothFunction G = conjugate_function(F, T);

    std::vector<double> err(samples.size(), -1.0);
    parallel_for(samples.size(), [&](std::size_t i) {
        const double x = samples[i];
        const auto rhs = try_step_ext(F, kind, x);
        const auto inner = try_step_ext(G, kind, T.unapply(x));
        if (!rhs || !inner) return;
        const Real lhs = static_cast<Real>(T.a()) * *inner + static_cast<Real>(T.b());
        err[i] = to_double(abs(lhs - *rhs) / (1 + abs(*rhs)));
    });

    ScalingReport r;
    r.tol = tol;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (err[i] < 0.0) {
            r.skipped.push_back(samples[i]);
            continue;
        }
        ++r.checked;
        // NaN sticks as the worst case.
        if (std::isnan(r.max_rel_err)) continue;
        if (r.checked == 1 || !(err[i] <= r.max_rel_err)) {
            r.max_rel_err = err[i];
            r.worst_x = samples[i];
        }
    }
    r.passed = r.max_rel_err <= tol;
    return r;
}

ScalingReport verify_scaling_N(const SmoothFunction& F, const AffineMap& T, std::span<const double> samples,
                               double lambda, double tol) {
    return verify_scaling(F, T, samples, MapVariant::NewtonClassic, lambda, tol);
}

ScalingReport verify_scaling_M(const SmoothFunction& F, const AffineMap& T, std::span<const double> samples,
                               double lambda, double tol) {
    return verify_scaling(F, T, samples, MapVariant::NewtonThirdOrder, lambda, tol);
}

std::vector<double> scaling_samples(const SmoothFunction& F, const AffineMap& T, const Interval& range, int count,
                                    std::uint64_t seed, double exclusion) {
    if (count < 0) throw InvalidInput("sample count must be nonnegative");
    const auto crit_f = find_critical_points(F);
    const auto crit_g = find_critical_points(conjugate_function(F, T));
    auto near = [exclusion](const std::vector<double>& cs, double x) {
        const auto it = std::lower_bound(cs.begin(), cs.end(), x);
        if (it != cs.end() && *it - x < exclusion) return true;
        return it != cs.begin() && x - *std::prev(it) < exclusion;
    };

    std::mt19937_64 rng(seed);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    // Uniform [0, 1) from the top 53 bits; the standard distributions are not
    // reproducible across library implementations.
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (long attempts = 0; static_cast<int>(out.size()) < count; ++attempts) {
        if (attempts > 1000L * (count + 1)) throw InvalidInput("sample range is dominated by critical points");
        const double x = range.lo() + unit() * range.width();
        if (near(crit_f, x) || near(crit_g, T.unapply(x))) continue;
        out.push_back(x);
    }
    return out;
}

}  // namespace newton_chaos
