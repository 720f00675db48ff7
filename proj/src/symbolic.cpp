#include "newton_chaos/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "newton_chaos/parallel.hpp"

namespace newton_chaos {

namespace {

const Real kNaN = std::numeric_limits<double>::quiet_NaN();

int sgn(Real v) { return (v > 0) - (v < 0); }

std::string num(Real v) { return format_real(v, 17); }

}  // namespace

Map make_map(const SmoothFunction& F, const MapKind& kind) {
    return [F, kind](Real x) {
        const auto y = try_step_ext(F, kind, x);
        return y ? *y : kNaN;
    };
}

Map lift(RealFn g) {
    return [g = std::move(g)](Real x) { return static_cast<Real>(g(to_double(x))); };
}

Real compose_power(const Map& g, Real x, int n) {
    for (int i = 0; i < n && is_finite(x); ++i) x = g(x);
    return x;
}

namespace {

/// Zero of h in [a, b] given h(a), h(b) of opposite sign (or one of them 0),
/// bisected until the bracket is two adjacent representable values.
Real bisect_zero(const Map& h, Real a, Real b, Real ha, Real hb) {
    if (ha == 0) return a;
    if (hb == 0) return b;
    for (int it = 0; it < 20000; ++it) {
        const Real m = a + (b - a) / 2;
        if (m <= a || m >= b) break;
        const Real hm = h(m);
        if (hm == 0) return m;
        if (sgn(hm) == sgn(ha)) {
            a = m;
            ha = hm;
        } else {
            b = m;
            hb = hm;
        }
    }
    return abs(ha) <= abs(hb) ? a : b;
}

bool brackets(Real ha, Real hb) {
    return is_finite(ha) && is_finite(hb) && (ha == 0 || hb == 0 || sgn(ha) != sgn(hb));
}

struct Grid {
    std::vector<Real> xs, ys;
};

Grid sample(const Map& g, const ExtInterval& J, int grid) {
    const auto n = static_cast<std::size_t>(grid);
    Grid s{std::vector<Real>(n), std::vector<Real>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        s.xs[i] = i + 1 == n ? J.hi() : J.lerp(static_cast<Real>(i) / static_cast<Real>(n - 1));
        s.ys[i] = g(s.xs[i]);
    }
    return s;
}

// Greatest x < limit in J with g(x) = t (x <= J.hi when limit is open),
// scanning brackets right to left.
std::optional<Real> last_preimage(const Map& g, const Grid& s, Real t, std::optional<Real> limit) {
    auto h = [&](Real x) { return g(x) - t; };
    for (std::size_t i = s.xs.size() - 1; i-- > 0;) {
        const Real a = s.xs[i];
        if (limit && a >= *limit) continue;
        const bool cut = limit && s.xs[i + 1] > *limit;
        const Real b = cut ? *limit : s.xs[i + 1];
        const Real ha = s.ys[i] - t;
        const Real hb = cut ? h(b) : s.ys[i + 1] - t;
        if (hb == 0 && !cut) return b;
        if (brackets(ha, hb)) {
            const Real z = bisect_zero(h, a, b, ha, hb);
            if (!limit || z < *limit) return z;
        }
    }
    return std::nullopt;
}

// Least x > limit in J with g(x) = t, scanning brackets left to right.
std::optional<Real> first_preimage(const Map& g, const Grid& s, Real t, Real limit) {
    auto h = [&](Real x) { return g(x) - t; };
    for (std::size_t i = 0; i + 1 < s.xs.size(); ++i) {
        const Real b = s.xs[i + 1];
        if (b <= limit) continue;
        const bool cut = s.xs[i] < limit;
        const Real a = cut ? limit : s.xs[i];
        const Real ha = cut ? h(a) : s.ys[i] - t;
        const Real hb = s.ys[i + 1] - t;
        if (ha == 0 && !cut) return a;
        if (brackets(ha, hb)) {
            const Real z = bisect_zero(h, a, b, ha, hb);
            if (z > limit) return z;
        }
    }
    return std::nullopt;
}

}  // namespace

PullbackResult pullback(const Map& g, const ExtInterval& J, const ExtInterval& K, const PullbackOptions& opts) {
    if (opts.grid < 2) throw InvalidInput("pullback grid must be at least 2");
    if (!(opts.tol > 0.0)) throw InvalidInput("pullback tol must be positive");
    const Real a = K.lo(), b = K.hi();

    int grid = opts.grid;
    for (int attempt = 0; attempt <= opts.max_doublings; ++attempt, grid *= 2) {
        const Grid s = sample(g, J, grid);
        const auto c = last_preimage(g, s, a, std::nullopt);
        if (!c) continue;

        Real lo = *c, hi = *c;
        Real lo_target = a, hi_target = a;
        if (a < b) {
            if (const auto d = first_preimage(g, s, b, *c)) {
                hi = *d;
                hi_target = b;
            } else {
                // K.hi is only attained left of c.
                const auto c2 = last_preimage(g, s, b, *c);
                if (!c2) continue;
                const auto d2 = first_preimage(g, s, a, *c2);
                if (!d2) continue;
                lo = *c2;
                lo_target = b;
                hi = *d2;
                hi_target = a;
            }
        }
        PullbackResult out;
        out.L = ExtInterval{lo, hi};
        out.residual = to_double(std::max(abs(g(lo) - lo_target), abs(g(hi) - hi_target)));
        out.grid_used = grid;
        const double allowed = opts.tol * (1.0 + to_double(std::max(abs(a), abs(b))));
        if (opts.enforce_residual && !(out.residual <= allowed)) {
            throw PullbackFailure("endpoint residual " + num(out.residual) + " exceeds " + num(allowed) +
                                  " (map too steep for the working precision here)");
        }
        return out;
    }
    throw PullbackFailure("no preimage of [" + num(a) + ", " + num(b) + "] found on a " + std::to_string(grid / 2) +
                          "-point grid over [" + num(J.lo()) + ", " + num(J.hi()) +
                          "]; grid too coarse or the map does not cover the target");
}

// ---------------------------------------------------------------- itineraries

bool Itinerary::prime_seed() const noexcept {
    for (std::size_t i = 1; i < symbols.size(); ++i) {
        if (symbols[i] == symbols[0]) return false;
    }
    return true;
}

std::vector<Itinerary> enumerate_prime_seeds(int k, int n) {
    if (k < 2) throw InvalidInput("need at least two bands");
    if (n < 1) throw InvalidInput("period must be at least 1");
    std::vector<Itinerary> out;
    for (int first = 1; first <= k; ++first) {
        std::vector<int> others;
        for (int s = 1; s <= k; ++s) {
            if (s != first) others.push_back(s);
        }
        // Odometer over the remaining n - 1 positions.
        std::vector<std::size_t> digits(static_cast<std::size_t>(n - 1), 0);
        while (true) {
            Itinerary it;
            it.kind = ItineraryKind::PeriodicSeed;
            it.symbols.push_back(first);
            for (std::size_t d : digits) it.symbols.push_back(others[d]);
            out.push_back(std::move(it));
            std::size_t pos = digits.size();
            while (pos > 0 && ++digits[pos - 1] == others.size()) digits[--pos] = 0;
            if (pos == 0) break;
        }
    }
    return out;
}

bool RefinementChain::nested(double slack) const {
    ExtInterval prev = base;
    for (const auto& iv : intervals) {
        if (!prev.contains(iv, static_cast<Real>(slack))) return false;
        prev = iv;
    }
    return true;
}

namespace {

void validate_symbols(const std::vector<int>& symbols, std::size_t k) {
    for (int s : symbols) {
        if (s < 1 || static_cast<std::size_t>(s) > k) {
            throw InvalidInput("itinerary symbol " + std::to_string(s) + " outside 1.." + std::to_string(k));
        }
    }
}

void validate_bands(std::span<const Interval> bands) {
    if (bands.size() < 2) throw InvalidInput("need at least two bands");
    for (std::size_t i = 0; i < bands.size(); ++i) {
        if (!bands[i].nondegenerate()) throw InvalidInput("bands must be nondegenerate");
        for (std::size_t j = i + 1; j < bands.size(); ++j) {
            if (bands[i].intersects(bands[j])) throw InvalidInput("bands must be disjoint");
        }
    }
}

}  // namespace

RefinementChain refine_itinerary(const Map& g, std::span<const Interval> bands, const Itinerary& itin,
                                 const PullbackOptions& opts) {
    if (itin.symbols.empty()) throw InvalidInput("itinerary is empty");
    validate_bands(bands);
    validate_symbols(itin.symbols, bands.size());

    RefinementChain chain;
    chain.symbols = itin.symbols;
    if (itin.kind == ItineraryKind::PeriodicSeed) chain.symbols.push_back(itin.symbols.front());
    chain.base = widen(bands[static_cast<std::size_t>(chain.symbols.front() - 1)]);

    ExtInterval current = chain.base;
    const int stages = static_cast<int>(chain.symbols.size()) - 1;
    for (int i = 1; i <= stages; ++i) {
        const ExtInterval target =
            widen(bands[static_cast<std::size_t>(chain.symbols[static_cast<std::size_t>(i)] - 1)]);
        Map gi = [&g, i](Real x) { return compose_power(g, x, i); };
        PullbackResult r;
        try {
            r = pullback(gi, current, target, opts);
        } catch (const PullbackFailure& e) {
            throw RefinementFailure(i, e.what());
        }
        chain.intervals.push_back(r.L);
        chain.targets.push_back(target);
        chain.residuals.push_back(r.residual);
        current = r.L;
    }
    return chain;
}

// ------------------------------------------------------------ periodic points

int band_of(std::span<const Interval> bands, Real x, Real slack) {
    for (std::size_t j = 0; j < bands.size(); ++j) {
        if (widen(bands[j]).contains(x, slack)) return static_cast<int>(j) + 1;
    }
    return 0;
}

PeriodicCertificate find_periodic(const Map& g, std::span<const Interval> bands, const Itinerary& seed,
                                  const PeriodicOptions& opts) {
    if (seed.kind != ItineraryKind::PeriodicSeed) throw InvalidInput("find_periodic needs a periodic seed");
    if (seed.symbols.empty()) throw InvalidInput("itinerary is empty");
    if (!(opts.cert_tol > 0.0)) throw InvalidInput("cert_tol must be positive");
    const int n = static_cast<int>(seed.length());
    if (opts.require_prime && n >= 2 && !seed.prime_seed()) {
        throw InvalidInput("seed does not force prime period: j_1 must differ from every later symbol");
    }

    std::optional<RefinementChain> chain;
    try {
        chain = refine_itinerary(g, bands, seed, opts.pullback);
    } catch (const RefinementFailure& e) {
        throw CertificationFailure(e.what(), std::nullopt);
    }

    // g^n maps A onto I_{j_1}, which contains A, so g^n(x) - x changes sign
    // across A (the fixed-point lemma).
    const ExtInterval A = chain->deepest();
    Map h = [&g, n](Real x) { return compose_power(g, x, n) - x; };
    const Real ha = h(A.lo()), hb = h(A.hi());
    std::optional<Real> p;
    if (brackets(ha, hb)) {
        p = bisect_zero(h, A.lo(), A.hi(), ha, hb);
    } else {
        const Grid s = sample(h, A, 4096);
        for (std::size_t i = 0; i + 1 < s.xs.size() && !p; ++i) {
            if (brackets(s.ys[i], s.ys[i + 1])) p = bisect_zero(h, s.xs[i], s.xs[i + 1], s.ys[i], s.ys[i + 1]);
        }
    }
    if (!p) throw CertificationFailure("no sign change of g^n(x) - x inside the deepest interval", chain);

    PeriodicCertificate cert;
    cert.point = *p;
    cert.period = n;
    cert.itinerary = seed.symbols;
    cert.tolerance = opts.cert_tol * (1.0 + std::fabs(to_double(*p)));
    const Real tol = cert.tolerance;
    Real x = *p;
    for (int i = 0; i < n; ++i) {
        cert.orbit.push_back(x);
        cert.visited_bands.push_back(band_of(bands, x, tol));
        x = g(x);
    }
    cert.residual = to_double(abs(x - *p));
    cert.prime = true;
    for (int m = 1; m < n; ++m) {
        if (!(abs(cert.orbit[static_cast<std::size_t>(m)] - *p) > tol)) cert.prime = false;
    }

    if (!(cert.residual <= cert.tolerance)) {
        throw CertificationFailure("residual " + num(cert.residual) + " exceeds " + num(cert.tolerance), chain);
    }
    if (cert.visited_bands != seed.symbols) {
        throw CertificationFailure("orbit does not follow the itinerary", chain);
    }
    if (opts.require_prime && !cert.prime) {
        throw CertificationFailure("orbit returns early; period is not prime", chain);
    }
    return cert;
}

long long PeriodicCensus::lower_bound() const noexcept {
    long long v = band_count;
    for (int i = 1; i < period; ++i) v *= band_count - 1;
    return v;
}

PeriodicCensus periodic_census(const Map& g, std::span<const Interval> bands, int n, const PeriodicOptions& opts) {
    PeriodicCensus census;
    census.period = n;
    census.band_count = static_cast<int>(bands.size());
    const auto seeds = enumerate_prime_seeds(census.band_count, n);
    census.entries.resize(seeds.size());
    parallel_for(
        seeds.size(),
        [&](std::size_t i) {
            auto& e = census.entries[i];
            e.seed = seeds[i];
            try {
                e.certificate = find_periodic(g, bands, seeds[i], opts);
            } catch (const CertificationFailure& ex) {
                e.failure = ex.what();
            }
        },
        1);

    std::vector<Real> pts;
    for (const auto& e : census.entries) {
        if (!e.certificate) continue;
        pts.push_back(e.certificate->point);
        census.max_residual = std::max(census.max_residual, e.certificate->residual);
    }
    std::sort(pts.begin(), pts.end());
    census.min_separation = std::numeric_limits<double>::infinity();
    census.distinct = pts.empty() ? 0 : 1;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const Real gap = pts[i] - pts[i - 1];
        census.min_separation = std::min(census.min_separation, to_double(gap));
        if (gap > opts.cert_tol * (1 + abs(pts[i]))) ++census.distinct;
    }
    return census;
}

// --------------------------------------------------------- divergence witness

int SymbolPattern::at(std::size_t i) const {
    if (i < prefix.size()) return prefix[i];
    if (cycle.empty()) throw InvalidInput("symbol pattern has an empty cycle");
    return cycle[(i - prefix.size()) % cycle.size()];
}

bool SymbolPattern::eventually_constant() const noexcept {
    return std::adjacent_find(cycle.begin(), cycle.end(), std::not_equal_to<>()) == cycle.end();
}

std::vector<int> SymbolPattern::take(std::size_t n) const {
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
    return out;
}

DivergenceWitness divergence_witness(const Map& g, std::span<const Interval> bands, int prefix_len,
                                     const SymbolPattern& pattern, double cert_tol, const PullbackOptions& opts) {
    if (prefix_len < 2) throw InvalidInput("witness depth must be at least 2");
    if (pattern.cycle.empty() || pattern.eventually_constant()) {
        throw InvalidInput("symbol pattern is eventually constant; its orbits may converge");
    }
    DivergenceWitness w;
    w.requested_prefix = prefix_len;
    w.symbols = pattern.take(static_cast<std::size_t>(prefix_len) + 1);

    // Deep stages lose endpoint accuracy; the orbit check below is what counts.
    PullbackOptions relaxed = opts;
    relaxed.enforce_residual = false;
    w.chain = refine_itinerary(g, bands, Itinerary{w.symbols, ItineraryKind::FinitePrefix}, relaxed);
    w.point = w.chain.deepest().midpoint();

    Real x = w.point;
    bool shadowing = true;
    for (int i = 0; i < prefix_len; ++i) {
        w.orbit.push_back(x);
        const Real slack = cert_tol * (1 + abs(x));
        if (shadowing && band_of(bands, x, slack) == w.symbols[static_cast<std::size_t>(i)]) {
            ++w.verified_prefix;
        } else {
            shadowing = false;
        }
        x = g(x);
    }
    return w;
}

}  // namespace newton_chaos
