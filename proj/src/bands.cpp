#include "newton_chaos/bands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "newton_chaos/parallel.hpp"

namespace newton_chaos {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string HypothesisReport::failure() const {
    std::vector<std::string> parts;
    if (!newton_class.ok()) {
        std::string msg = "(i) not Newton class";
        if (!newton_class.witnesses.empty()) {
            const auto& w = newton_class.witnesses.front();
            msg += std::string(": ") + to_string(w.condition) + " violated at x = " + fmt_num(w.x);
        }
        parts.push_back(std::move(msg));
    }
    if (!opposite_limits) {
        parts.push_back(limits_exact ? "(ii) even degree, limits at +/-infinity have the same sign"
                                     : "(ii) f does not take opposite signs at the window ends");
    }
    if (!enough_roots) {
        parts.push_back("(iii) fewer than four real roots (found " + std::to_string(structure.roots.size()) + ")");
    }
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
    return out;
}

HypothesisReport check_hypotheses(const SmoothFunction& F, int grid_n) {
    HypothesisReport rep;
    rep.newton_class = verify_newton_class(F, kDefaultNewtonClassTol, grid_n);
    if (const Polynomial* p = F.as_polynomial()) {
        rep.limits_exact = true;
        rep.opposite_limits = p->degree() % 2 == 1;
        rep.sign_at_plus_infinity = sign_of(p->leading());
    } else {
        const int lo = sign_of(F.f(F.window().lo()));
        const int hi = sign_of(F.f(F.window().hi()));
        rep.opposite_limits = lo != 0 && hi != 0 && lo != hi;
        rep.sign_at_plus_infinity = hi;
    }
    rep.structure = analyze(F, grid_n);
    rep.enough_roots = rep.structure.roots.size() >= 4;
    return rep;
}

EdgeLimits limits_at_band_edges(const SmoothFunction& F, double c_left, double c_right, double probe_h,
                                double lambda) {
    EdgeLimits out;
    if (!(c_left < c_right)) throw InvalidInput("band edges must satisfy c_left < c_right");
    if (!(probe_h > 0.0 && probe_h < 1.0)) throw InvalidInput("probe_h must lie in (0, 1)");

    const Interval open{c_left, c_right};
    const int scan = 2001;
    const double edge_slack = 1e-9 * (1.0 + std::max(std::fabs(c_left), std::fabs(c_right)));
    RealFn f = [&F](double x) { return F.f(x); };
    RealFn df = [&F](double x) { return F.df(x); };
    RealFn ddf = [&F](double x) { return F.ddf(x); };
    const auto roots = find_zeros(f, &df, open, scan, kDefaultRootTol);
    auto crits = find_zeros(df, &ddf, open, scan, kDefaultRootTol);
    std::erase_if(crits, [&](double c) { return c - c_left <= edge_slack || c_right - c <= edge_slack; });
    if (roots.size() != 1) {
        out.reason = "interval holds " + std::to_string(roots.size()) + " roots of f (need exactly one)";
        return out;
    }
    if (!crits.empty()) {
        out.reason = "interval holds a critical point of f at " + fmt_num(crits.front());
        return out;
    }

    double h = 1.0;
    for (int k = 0; k < 3; ++k) {
        h *= probe_h;
        if (2.0 * h >= c_right - c_left) {
            out.reason = "probe step does not fit inside the interval";
            return out;
        }
        out.probe_h.push_back(h);
        const auto nl = try_step(F, MapKind::newton(lambda), c_left + h);
        const auto nr = try_step(F, MapKind::newton(lambda), c_right - h);
        out.left_values.push_back(nl ? *nl : std::nan(""));
        out.right_values.push_back(nr ? *nr : std::nan(""));
    }

    auto side_sign = [&](const std::vector<double>& vals) {
        int s = sign_of(vals.front());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (!std::isfinite(vals[i]) || sign_of(vals[i]) != s) return 0;
            if (i > 0 && !(std::fabs(vals[i]) > std::fabs(vals[i - 1]))) return 0;
        }
        return s;
    };
    out.sign_left = side_sign(out.left_values);
    out.sign_right = side_sign(out.right_values);
    if (out.sign_left == 0 || out.sign_right == 0) {
        out.reason = "probe values do not grow monotonically with a fixed sign";
        return out;
    }
    if (out.sign_left == out.sign_right) {
        out.reason = "both edges diverge with the same sign";
        return out;
    }
    out.verdict = LimitVerdict::OppositeInfinite;
    return out;
}

std::optional<Interval> sampled_range(const RealFn& g, const Interval& J, int grid) {
    if (grid < 2) throw InvalidInput("range grid must be at least 2");
    const auto n = static_cast<std::size_t>(grid);
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = i + 1 == n ? J.hi() : J.lerp(static_cast<double>(i) / static_cast<double>(n - 1));
    }
    parallel_for(n, [&](std::size_t i) { ys[i] = g(xs[i]); }, 2048);
    if (!std::all_of(ys.begin(), ys.end(), [](double y) { return std::isfinite(y); })) return std::nullopt;

    // Golden-section search for the extremum of sign * g near sample i.
    auto refine = [&](std::size_t i, double sign) {
        double a = xs[i == 0 ? 0 : i - 1];
        double b = xs[std::min(i + 1, n - 1)];
        double best = ys[i];
        const double r = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - r * (b - a), x2 = a + r * (b - a);
        double f1 = sign * g(x1), f2 = sign * g(x2);
        for (int it = 0; it < 80 && b - a > 0.0; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - r * (b - a);
                f1 = sign * g(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + r * (b - a);
                f2 = sign * g(x2);
            }
        }
        for (double v : {f1, f2}) {
            if (std::isfinite(v)) best = sign > 0 ? std::min(best, sign * v) : std::max(best, sign * v);
        }
        return best;
    };
    const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
    const double lo = refine(static_cast<std::size_t>(mn - ys.begin()), 1.0);
    const double hi = refine(static_cast<std::size_t>(mx - ys.begin()), -1.0);
    return Interval{lo, hi};
}

bool BandSystem::certification_monotone() const {
    bool seen = false;
    for (const auto& t : trials) {
        if (!t.valid) continue;
        if (seen && !t.certified) return false;
        seen = seen || t.certified;
    }
    return true;
}

namespace {

struct RootTuple {
    std::array<double, 4> r;
    double c1, c2, c2p, c3;
};

std::optional<RootTuple> tuple_at(const std::vector<double>& roots, const std::vector<double>& crits, std::size_t i) {
    auto inside = [&](double lo, double hi) {
        std::vector<double> out;
        for (double c : crits) {
            if (c > lo && c < hi) out.push_back(c);
        }
        return out;
    };
    RootTuple t{{roots[i], roots[i + 1], roots[i + 2], roots[i + 3]}, 0, 0, 0, 0};
    const auto g1 = inside(t.r[0], t.r[1]);
    const auto g2 = inside(t.r[1], t.r[2]);
    const auto g3 = inside(t.r[2], t.r[3]);
    if (g1.empty() || g2.empty() || g3.empty()) return std::nullopt;
    t.c1 = g1.back();
    t.c2 = g2.front();
    t.c2p = g2.back();
    t.c3 = g3.front();
    return t;
}

}  // namespace

BandSystem build_bands(const SmoothFunction& F, const BandOptions& opts) {
    if (opts.eps_schedule.empty()) throw InvalidInput("epsilon schedule is empty");
    if (opts.cover_grid < 2) throw InvalidInput("cover_grid must be at least 2");
    for (double e : opts.eps_schedule) {
        if (!(e > 0.0)) throw InvalidInput("epsilon values must be positive");
    }
    const MapKind map = MapKind::third_order(opts.lambda);

    HypothesisReport hyp = check_hypotheses(F, opts.grid_n);
    if (!hyp.ok()) throw HypothesisFailure(std::move(hyp));
    const auto& roots = hyp.structure.roots;
    const auto& crits = hyp.structure.critical_points;

    // Candidate windows of four consecutive roots, nearest the window center
    // first; ties go to the leftmost.
    std::vector<std::size_t> order(roots.size() - 3);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const double center = F.window().midpoint();
    auto dist = [&](std::size_t i) { return std::fabs(0.5 * (roots[i] + roots[i + 3]) - center); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
    std::optional<RootTuple> tuple;
    for (std::size_t i : order) {
        if ((tuple = tuple_at(roots, crits, i))) break;
    }
    if (!tuple) throw BandFailure("no four consecutive roots with interlacing critical points");

    RealFn g = [&F, map](double x) {
        const auto y = try_step(F, map, x);
        return y ? *y : std::nan("");
    };

    BandSystem bs;
    bs.roots = tuple->r;
    bs.c1 = tuple->c1;
    bs.c2 = tuple->c2;
    bs.c2_prime = tuple->c2p;
    bs.c3 = tuple->c3;
    bs.lambda = opts.lambda;

    std::optional<std::size_t> chosen, last_valid;
    for (double eps : opts.eps_schedule) {
        EpsilonTrial trial;
        trial.epsilon = eps;
        trial.valid = bs.c1 + eps < bs.c2 - eps && bs.c2_prime + eps < bs.c3 - eps;
        if (trial.valid) {
            const Interval i1{bs.c1 + eps, bs.c2 - eps};
            const Interval i2{bs.c2_prime + eps, bs.c3 - eps};
            trial.range1 = sampled_range(g, i1, opts.cover_grid);
            trial.range2 = sampled_range(g, i2, opts.cover_grid);
            const Interval target = bs.cover_target();
            trial.certified = trial.range1 && trial.range2 && trial.range1->contains(target) &&
                              trial.range2->contains(target);
            last_valid = bs.trials.size();
            if (trial.certified && !chosen) chosen = bs.trials.size();
        }
        bs.trials.push_back(trial);
    }
    if (!last_valid) throw BandFailure("every epsilon in the schedule leaves an empty band");

    const EpsilonTrial& pick = bs.trials[chosen.value_or(*last_valid)];
    bs.epsilon = pick.epsilon;
    bs.certified = pick.certified;
    bs.I1 = Interval{bs.c1 + bs.epsilon, bs.c2 - bs.epsilon};
    bs.I2 = Interval{bs.c2_prime + bs.epsilon, bs.c3 - bs.epsilon};
    return bs;
}

}  // namespace newton_chaos
