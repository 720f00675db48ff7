#include "newton_chaos/functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <quadmath.h>

#include "newton_chaos/parallel.hpp"

namespace newton_chaos {

std::ostream& operator<<(std::ostream& os, const Interval& iv) {
    return os << '[' << iv.lo() << ", " << iv.hi() << ']';
}

std::ostream& operator<<(std::ostream& os, const ExtInterval& iv) {
    return os << '[' << format_real(iv.lo(), 21) << ", " << format_real(iv.hi(), 21) << ']';
}

std::string format_real(Real x, int digits) {
    char buf[128];
    quadmath_snprintf(buf, sizeof buf, "%.*Qg", digits, x);
    return buf;
}

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
        throw InvalidInput("polynomial needs at least one coefficient");
    }
    for (double c : coeffs_) {
        if (!std::isfinite(c)) throw InvalidInput("polynomial coefficients must be finite");
    }
    if (coeffs_.back() == 0.0) {
        throw InvalidInput("polynomial leading coefficient must be nonzero");
    }
    ext_.assign(coeffs_.begin(), coeffs_.end());
}

Polynomial Polynomial::from_extended(std::vector<Real> coeffs) {
    std::vector<double> rounded(coeffs.size());
    std::transform(coeffs.begin(), coeffs.end(), rounded.begin(), to_double);
    Polynomial p(std::move(rounded));
    for (Real c : coeffs) {
        if (!is_finite(c)) throw InvalidInput("polynomial coefficients must be finite");
    }
    p.ext_ = std::move(coeffs);
    return p;
}

double Polynomial::operator()(double x) const noexcept {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Real Polynomial::operator()(Real x) const noexcept {
    Real acc = 0;
    for (auto it = ext_.rbegin(); it != ext_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double Polynomial::magnitude(double x) const noexcept {
    double acc = 0.0;
    const double ax = std::fabs(x);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * ax + std::fabs(*it);
    return acc;
}

Polynomial Polynomial::derivative() const {
    // The derivative of a constant is the zero polynomial; it is only ever
    // evaluated, so the nonzero-leading rule is waived for it.
    if (coeffs_.size() == 1) return Polynomial({0.0}, {Real(0)}, Unchecked{});
    std::vector<double> d(coeffs_.size() - 1);
    std::vector<Real> e(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) {
        d[i - 1] = static_cast<double>(i) * coeffs_[i];
        e[i - 1] = static_cast<Real>(i) * ext_[i];
    }
    return Polynomial(std::move(d), std::move(e), Unchecked{});
}

// ------------------------------------------------------------ SmoothFunction

SmoothFunction::SmoothFunction(std::shared_ptr<const PolyParts> poly, std::shared_ptr<const ClosedParts> closed,
                               Interval window, std::string label)
    : poly_(std::move(poly)), closed_(std::move(closed)), window_(window), label_(std::move(label)) {}

SmoothFunction SmoothFunction::polynomial(std::vector<double> coeffs, Interval window) {
    return polynomial(Polynomial(std::move(coeffs)), window);
}

SmoothFunction SmoothFunction::polynomial(Polynomial p, Interval window) {
    if (!window.nondegenerate()) throw InvalidInput("function window must be nondegenerate");
    Polynomial dp = p.derivative();
    Polynomial ddp = dp.derivative();
    auto parts = std::make_shared<const PolyParts>(PolyParts{std::move(p), std::move(dp), std::move(ddp)});
    return SmoothFunction(std::move(parts), nullptr, window, "polynomial");
}

SmoothFunction SmoothFunction::closed_form(RealFn f, RealFn df, RealFn ddf, Interval window, std::string label) {
    if (!f || !df || !ddf) throw InvalidInput("closed-form function needs f, f' and f''");
    if (!window.nondegenerate()) throw InvalidInput("function window must be nondegenerate");
    auto parts = std::make_shared<const ClosedParts>(ClosedParts{std::move(f), std::move(df), std::move(ddf)});
    return SmoothFunction(nullptr, std::move(parts), window, std::move(label));
}

double SmoothFunction::f(double x) const { return poly_ ? poly_->p(x) : closed_->f(x); }
double SmoothFunction::df(double x) const { return poly_ ? poly_->dp(x) : closed_->df(x); }
double SmoothFunction::ddf(double x) const { return poly_ ? poly_->ddp(x) : closed_->ddf(x); }

Real SmoothFunction::f_ext(Real x) const {
    return poly_ ? poly_->p(x) : static_cast<Real>(closed_->f(to_double(x)));
}
Real SmoothFunction::df_ext(Real x) const {
    return poly_ ? poly_->dp(x) : static_cast<Real>(closed_->df(to_double(x)));
}

FunctionKind SmoothFunction::kind() const noexcept {
    return poly_ ? FunctionKind::Polynomial : FunctionKind::ClosedForm;
}

const Polynomial* SmoothFunction::as_polynomial() const noexcept { return poly_ ? &poly_->p : nullptr; }

SmoothFunction SmoothFunction::with_window(Interval window) const {
    if (!window.nondegenerate()) throw InvalidInput("function window must be nondegenerate");
    SmoothFunction copy = *this;
    copy.window_ = window;
    return copy;
}

SmoothFunction make_polynomial(std::vector<double> coeffs, Interval window) {
    return SmoothFunction::polynomial(std::move(coeffs), window);
}

// -------------------------------------------------------------- zero finding

namespace {

bool opposite_signs(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

double scale_of(double x) { return 1.0 + std::fabs(x); }

struct Bracketed {
    double x;
    double gx;
};

Bracketed bisect_then_polish(const RealFn& g, const RealFn* dg, double a, double b, double ga, double tol) {
    const double a0 = a, b0 = b;
    double gb = g(b);
    for (int it = 0; it < 2000; ++it) {
        const double m = a + 0.5 * (b - a);
        if (b - a <= tol * scale_of(m) || m <= a || m >= b) break;
        const double gm = g(m);
        if (gm == 0.0) return {m, 0.0};
        if (opposite_signs(ga, gm)) {
            b = m;
            gb = gm;
        } else {
            a = m;
            ga = gm;
        }
    }
    Bracketed best = std::fabs(ga) <= std::fabs(gb) ? Bracketed{a, ga} : Bracketed{b, gb};
    if (dg != nullptr) {
        const double d = (*dg)(best.x);
        if (d != 0.0 && std::isfinite(d)) {
            const double x1 = best.x - best.gx / d;
            if (x1 >= a0 && x1 <= b0) {
                const double g1 = g(x1);
                if (std::fabs(g1) <= std::fabs(best.gx)) best = {x1, g1};
            }
        }
    }
    return best;
}

}  // namespace

std::vector<double> find_zeros(const RealFn& g, const RealFn* dg, const Interval& window, int grid_n, double tol,
                               const RealFn* magnitude) {
    if (grid_n < 2) throw InvalidInput("grid_n must be at least 2");
    if (!(tol > 0.0)) throw InvalidInput("tol must be positive");

    const auto n = static_cast<std::size_t>(grid_n);
    std::vector<double> xs(n), vs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = i + 1 == n ? window.hi() : window.lerp(static_cast<double>(i) / static_cast<double>(n - 1));
    }
    parallel_for(n, [&](std::size_t i) { vs[i] = g(xs[i]); }, 4096);

    // Each bracket is resolved independently and written by index, so the
    // merged list does not depend on thread count.
    std::vector<std::optional<double>> found(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            if (vs[i] == 0.0) {
                found[i] = xs[i];
                return;
            }
            if (i + 1 >= n || !std::isfinite(vs[i]) || !std::isfinite(vs[i + 1])) return;
            if (!opposite_signs(vs[i], vs[i + 1])) return;
            const Bracketed z = bisect_then_polish(g, dg, xs[i], xs[i + 1], vs[i], tol);
            const double limit = tol * scale_of(z.x);
            double slack = limit;
            if (magnitude != nullptr) {
                slack = std::max(slack, 64.0 * std::numeric_limits<double>::epsilon() * (*magnitude)(z.x));
            }
            // A sign change across a pole bisects onto huge values; drop it.
            if (std::fabs(z.gx) <= slack) found[i] = z.x;
        },
        512);

    std::vector<double> out;
    for (const auto& f : found) {
        if (!f) continue;
        if (!out.empty() && *f - out.back() <= 2.0 * tol * scale_of(*f)) continue;
        out.push_back(*f);
    }
    return out;
}

std::vector<double> find_roots(const SmoothFunction& F, int grid_n, double tol) {
    RealFn g = [&F](double x) { return F.f(x); };
    RealFn dg = [&F](double x) { return F.df(x); };
    if (const Polynomial* p = F.as_polynomial()) {
        RealFn mag = [p](double x) { return p->magnitude(x); };
        return find_zeros(g, &dg, F.window(), grid_n, tol, &mag);
    }
    return find_zeros(g, &dg, F.window(), grid_n, tol);
}

std::vector<double> find_critical_points(const SmoothFunction& F, int grid_n, double tol) {
    RealFn g = [&F](double x) { return F.df(x); };
    RealFn dg = [&F](double x) { return F.ddf(x); };
    if (const Polynomial* p = F.as_polynomial()) {
        const Polynomial dp = p->derivative();
        RealFn mag = [dp](double x) { return dp.magnitude(x); };
        return find_zeros(g, &dg, F.window(), grid_n, tol, &mag);
    }
    return find_zeros(g, &dg, F.window(), grid_n, tol);
}

CriticalStructure analyze(const SmoothFunction& F, int grid_n, double tol) {
    CriticalStructure cs;
    cs.roots = find_roots(F, grid_n, tol);
    cs.critical_points = find_critical_points(F, grid_n, tol);
    cs.interlacing_ok = true;
    for (std::size_t i = 0; i + 1 < cs.roots.size(); ++i) {
        auto it = std::upper_bound(cs.critical_points.begin(), cs.critical_points.end(), cs.roots[i]);
        if (it == cs.critical_points.end() || *it >= cs.roots[i + 1]) {
            cs.interlacing_ok = false;
            break;
        }
    }
    return cs;
}

// -------------------------------------------------------------- nf2 / nf3

namespace {

void add_witness(NewtonClassReport& report, NewtonCondition cond, double x, const SmoothFunction& F) {
    for (const auto& w : report.witnesses) {
        if (w.condition == cond && std::fabs(w.x - x) <= 1e-6 * scale_of(x)) return;
    }
    report.witnesses.push_back({cond, x, F.f(x), F.df(x), F.ddf(x)});
    if (cond == NewtonCondition::Nf2) {
        report.nf2_ok = false;
    } else {
        report.nf3_ok = false;
    }
}

// Vanishing threshold for a value that should be exactly zero at x.
double vanish_limit(const Polynomial* p, double x) {
    double lim = kDefaultRootTol * scale_of(x);
    if (p != nullptr) lim = std::max(lim, 64.0 * std::numeric_limits<double>::epsilon() * p->magnitude(x));
    return lim;
}

}  // namespace

NewtonClassReport verify_newton_class(const SmoothFunction& F, double tol, int grid_n) {
    if (!(tol > 0.0)) throw InvalidInput("tol must be positive");
    NewtonClassReport report;
    const Polynomial* p = F.as_polynomial();
    std::optional<Polynomial> dp;
    if (p != nullptr) dp = p->derivative();

    const auto roots = find_roots(F, grid_n);
    const auto crits = find_critical_points(F, grid_n);

    for (double r : roots) {
        if (!(std::fabs(F.df(r)) > tol)) add_witness(report, NewtonCondition::Nf2, r, F);
    }
    // Double roots of f: f' changes sign there but f does not.
    for (double c : crits) {
        if (std::fabs(F.f(c)) <= vanish_limit(p, c)) add_witness(report, NewtonCondition::Nf2, c, F);
    }
    for (double c : crits) {
        if (!(std::fabs(F.ddf(c)) > tol)) add_witness(report, NewtonCondition::Nf3, c, F);
    }
    // Double roots of f': f'' changes sign there but f' does not.
    RealFn ddf = [&F](double x) { return F.ddf(x); };
    for (double z : find_zeros(ddf, nullptr, F.window(), grid_n, kDefaultRootTol)) {
        if (std::fabs(F.df(z)) <= vanish_limit(dp ? &*dp : nullptr, z)) add_witness(report, NewtonCondition::Nf3, z, F);
    }
    std::sort(report.witnesses.begin(), report.witnesses.end(), [](const auto& a, const auto& b) {
        return a.x < b.x || (a.x == b.x && a.condition < b.condition);
    });
    return report;
}

const char* to_string(NewtonCondition c) noexcept { return c == NewtonCondition::Nf2 ? "nf2" : "nf3"; }

}  // namespace newton_chaos
