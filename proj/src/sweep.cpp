#include "newton_chaos/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "newton_chaos/parallel.hpp"

namespace newton_chaos {

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw InvalidInput("need at least one point");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidInput("range endpoints must be finite");
    if (n == 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    out.back() = hi;
    return out;
}

void SweepSpec::validate() const {
    if (steps < 1) throw InvalidInput("sweep needs at least one parameter step");
    if (burn_in < 0) throw InvalidInput("burn-in must be nonnegative");
    if (tail < 1) throw InvalidInput("tail must be at least 1");
    if (seeds.empty()) throw InvalidInput("sweep needs at least one seed");
    for (double s : seeds) {
        if (!std::isfinite(s)) throw InvalidInput("seeds must be finite");
    }
    if (!(escape_radius > 0.0)) throw InvalidInput("escape radius must be positive");
    if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
    const auto params = parameters();
    if (slot == SweepSlot::Lambda) {
        for (double p : params) {
            if (p == 0.0) throw InvalidInput("lambda sweep reaches lambda = 0");
        }
        return;
    }
    (void)MapKind{variant, lambda};
    const Polynomial* poly = base.as_polynomial();
    if (!poly) throw InvalidInput("coefficient sweeps need a polynomial");
    if (coeff_index < 0 || coeff_index > poly->degree()) {
        throw InvalidInput("coefficient index " + std::to_string(coeff_index) + " outside 0.." +
                           std::to_string(poly->degree()));
    }
    if (coeff_index == poly->degree()) {
        for (double p : params) {
            if (p == 0.0) throw InvalidInput("coefficient sweep zeroes the leading coefficient");
        }
    }
}

namespace {

double sentinel(double v) {
    return std::signbit(v) ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
}

SweepRow run_cell(const SmoothFunction& F, const MapKind& kind, double param, double seed, const SweepSpec& spec) {
    SweepRow row;
    row.param = param;
    row.seed = seed;

    IterateOptions opts;
    opts.max_iter = spec.burn_in + spec.tail;
    opts.escape_radius = spec.escape_radius;
    opts.tol = spec.tol;
    row.classification = iterate(F, kind, seed, opts).classification;
    if (row.classification.kind == OrbitClass::DerivativeBlowup) {
        row.classification = {OrbitClass::Escaped, 0.0, 0, row.classification.step};
    }

    // The tail keeps stepping the raw map past convergence or a revisit.
    row.tail.reserve(static_cast<std::size_t>(spec.tail));
    double x = seed;
    std::optional<double> gone;
    const int total = spec.burn_in + spec.tail;
    for (int n = 0; n < total; ++n) {
        if (!gone && (!std::isfinite(x) || std::fabs(x) > spec.escape_radius)) gone = sentinel(x);
        if (n >= spec.burn_in) row.tail.push_back(gone ? *gone : x);
        if (gone) continue;
        if (const auto next = try_step(F, kind, x)) {
            x = *next;
        } else {
            // Blowup: the step runs off in the direction of -lambda f(x).
            gone = sentinel(-kind.lambda() * F.f(x));
        }
    }
    return row;
}

}  // namespace

SweepDataset run_sweep(const SweepSpec& spec) {
    spec.validate();
    const auto params = spec.parameters();
    const std::size_t ns = spec.seeds.size();

    std::vector<SmoothFunction> fns;
    std::vector<MapKind> kinds;
    for (double p : params) {
        if (spec.slot == SweepSlot::Lambda) {
            fns.push_back(spec.base);
            kinds.emplace_back(spec.variant, p);
        } else {
            auto c = spec.base.as_polynomial()->coefficients();
            std::vector<double> coeffs(c.begin(), c.end());
            coeffs[static_cast<std::size_t>(spec.coeff_index)] = p;
            fns.push_back(make_polynomial(std::move(coeffs), spec.base.window()));
            kinds.emplace_back(spec.variant, spec.lambda);
        }
    }

    SweepDataset data;
    data.tail = spec.tail;
    data.rows.resize(params.size() * ns);
    parallel_for(
        data.rows.size(),
        [&](std::size_t i) {
            const std::size_t p = i / ns;
            data.rows[i] = run_cell(fns[p], kinds[p], params[p], spec.seeds[i % ns], spec);
        },
        16);
    return data;
}

namespace {

std::string csv_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf+" : "inf-";
    return fmt::format("{:.17g}", v);
}

}  // namespace

void write_csv(std::ostream& os, const SweepDataset& data) {
    os << "param,seed,class";
    for (int i = 0; i < data.tail; ++i) os << ",tail_" << i;
    os << '\n';
    for (const auto& row : data.rows) {
        os << csv_number(row.param) << ',' << csv_number(row.seed) << ',' << to_string(row.classification);
        for (double v : row.tail) os << ',' << csv_number(v);
        os << '\n';
    }
}

std::vector<DampingRow> damping_robustness(const SmoothFunction& F, const std::vector<double>& lambdas,
                                           const std::vector<int>& periods, const BandOptions& band_opts,
                                           const PeriodicOptions& periodic_opts) {
    if (lambdas.empty()) throw InvalidInput("no damping values given");
    if (periods.empty()) throw InvalidInput("no periods given");
    for (double l : lambdas) {
        if (!(l > 0.0) || !std::isfinite(l)) throw InvalidInput("damping values must be positive");
    }
    for (int n : periods) {
        if (n < 1) throw InvalidInput("periods must be at least 1");
    }
    const HypothesisReport report = check_hypotheses(F, band_opts.grid_n);
    if (!report.ok()) throw HypothesisFailure(report);

    std::vector<DampingRow> table;
    for (double l : lambdas) {
        DampingRow row;
        row.lambda = l;
        BandOptions opts = band_opts;
        opts.lambda = l;
        try {
            const BandSystem bs = build_bands(F, opts);
            row.certified = bs.certified;
            if (!bs.certified) row.failure = "no epsilon in the schedule certifies the covering";
            const auto bands = bs.bands();
            const Map g = make_map(F, MapKind::third_order(l));
            row.min_count = std::numeric_limits<int>::max();
            for (int n : periods) {
                const PeriodicCensus census = periodic_census(g, bands, n, periodic_opts);
                row.counts.push_back(census.distinct);
                row.min_count = std::min(row.min_count, census.distinct);
                row.lower_bound = std::max(row.lower_bound, census.lower_bound());
            }
            if (!row.certified) row.min_count = 0;
        } catch (const BandFailure& e) {
            row.failure = e.what();
        }
        table.push_back(std::move(row));
    }
    return table;
}

}  // namespace newton_chaos
