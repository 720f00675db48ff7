#include "newton_chaos/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "newton_chaos/bands.hpp"
#include "newton_chaos/conjugacy.hpp"
#include "newton_chaos/iteration.hpp"
#include "newton_chaos/parallel.hpp"
#include "newton_chaos/sweep.hpp"
#include "newton_chaos/symbolic.hpp"

namespace newton_chaos {

using Json = nlohmann::ordered_json;

// ------------------------------------------------------------- spec strings

namespace {

bool is_space(char c) { return c == ' ' || c == '\t'; }

/// Parses the finite decimal at s[begin, end); `what` names it in errors.
double parse_literal(const std::string& s, std::size_t begin, std::size_t end, const char* what) {
    while (begin < end && is_space(s[begin])) ++begin;
    while (end > begin && is_space(s[end - 1])) --end;
    if (begin == end) throw SpecParseError(begin + 1, std::string("empty ") + what);
    const char* first = s.data() + begin;
    const char* last = s.data() + end;
    if (*first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
    if (ec == std::errc::result_out_of_range) {
        throw SpecParseError(begin + 1, std::string(what) + " out of range");
    }
    if (ec != std::errc() || ptr != last) {
        const std::size_t col = ec != std::errc() ? begin + 1 : static_cast<std::size_t>(ptr - s.data()) + 1;
        throw SpecParseError(col, std::string("malformed ") + what + " '" + s.substr(begin, end - begin) + "'");
    }
    if (!std::isfinite(v)) throw SpecParseError(begin + 1, std::string(what) + " must be finite");
    return v;
}

/// Splits s[from..] on `sep` into [begin, end) ranges.
std::vector<std::pair<std::size_t, std::size_t>> split(const std::string& s, std::size_t from, char sep) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t begin = from;
    while (true) {
        const std::size_t pos = s.find(sep, begin);
        if (pos == std::string::npos) {
            out.emplace_back(begin, s.size());
            return out;
        }
        out.emplace_back(begin, pos);
        begin = pos + 1;
    }
}

std::vector<double> parse_list(const std::string& s, std::size_t expected, const char* what) {
    std::vector<double> out;
    for (auto [b, e] : split(s, 0, s.find(',') == std::string::npos ? ':' : ',')) {
        out.push_back(parse_literal(s, b, e, what));
    }
    if (expected && out.size() != expected) {
        throw SpecParseError(1, fmt::format("expected {} values in '{}'", expected, s));
    }
    return out;
}

std::vector<int> parse_symbols(const std::string& s) {
    std::vector<int> out;
    for (auto [b, e] : split(s, 0, ',')) {
        const double v = parse_literal(s, b, e, "symbol");
        if (v != std::floor(v) || v < 1 || v > 1e6) throw SpecParseError(b + 1, "symbols are positive integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

}  // namespace

SmoothFunction parse_function_spec(const std::string& spec, Interval window) {
    static const std::string kPrefix = "poly:";
    if (spec.compare(0, kPrefix.size(), kPrefix) != 0) {
        throw SpecParseError(1, "function spec must start with 'poly:'");
    }
    if (spec.size() == kPrefix.size()) throw SpecParseError(kPrefix.size() + 1, "empty coefficient list");
    std::vector<double> coeffs;
    const auto parts = split(spec, kPrefix.size(), ',');
    for (auto [b, e] : parts) coeffs.push_back(parse_literal(spec, b, e, "coefficient"));
    if (coeffs.back() == 0.0) throw SpecParseError(parts.back().first + 1, "leading coefficient must be nonzero");
    return make_polynomial(std::move(coeffs), window);
}

std::string canonical_spec(const SmoothFunction& F) {
    const Polynomial* p = F.as_polynomial();
    if (!p) throw InvalidInput("closed-form functions have no spec string");
    std::string out = "poly:";
    bool first = true;
    for (double c : p->coefficients()) {
        if (!first) out += ',';
        out += fmt::format("{}", c == 0.0 ? 0.0 : c);
        first = false;
    }
    return out;
}

Interval parse_window(const std::string& s) {
    const auto parts = split(s, 0, ':');
    if (parts.size() != 2) throw SpecParseError(1, "window must look like lo:hi");
    const double lo = parse_literal(s, parts[0].first, parts[0].second, "window bound");
    const double hi = parse_literal(s, parts[1].first, parts[1].second, "window bound");
    if (!(lo < hi)) throw SpecParseError(1, "window needs lo < hi");
    return {lo, hi};
}

// -------------------------------------------------------------------- output

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }
std::string num(Real v) { return format_real(v, 17); }

Json interval_json(const Interval& iv) { return Json::array({iv.lo(), iv.hi()}); }

/// Doubles go out as JSON numbers; Real values also as a 36-digit string.
Json real_json(Real v) { return Json{{"value", to_double(v)}, {"decimal", format_real(v, 36)}}; }

Json orbit_class_json(const OrbitClass& c) {
    static const char* kNames[] = {"converged", "periodic", "escaped", "blowup", "max_iter"};
    Json j{{"kind", kNames[c.kind]}, {"step", c.step}};
    if (c.kind == OrbitClass::ConvergedToRoot || c.kind == OrbitClass::DerivativeBlowup) j["value"] = c.value;
    if (c.kind == OrbitClass::PeriodicSuspect) j["period"] = c.period;
    return j;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s;
}

std::string join(const std::vector<int>& v, const char* sep = ",") {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
    return s;
}

Json hypotheses_json(const HypothesisReport& r) {
    Json w = Json::array();
    for (const auto& x : r.newton_class.witnesses) {
        w.push_back({{"condition", to_string(x.condition)}, {"x", x.x}, {"f", x.f}, {"df", x.df}, {"ddf", x.ddf}});
    }
    return Json{{"nf2_ok", r.newton_class.nf2_ok},
                {"nf3_ok", r.newton_class.nf3_ok},
                {"witnesses", w},
                {"opposite_limits", r.opposite_limits},
                {"limits_exact", r.limits_exact},
                {"root_count", r.structure.roots.size()},
                {"roots", r.structure.roots},
                {"critical_points", r.structure.critical_points},
                {"ok", r.ok()},
                {"failure", r.failure()}};
}

Json bands_json(const BandSystem& b) {
    return Json{{"roots", b.roots},
                {"critical_points", Json::array({b.c1, b.c2, b.c2_prime, b.c3})},
                {"epsilon", b.epsilon},
                {"lambda", b.lambda},
                {"I1", interval_json(b.I1)},
                {"I2", interval_json(b.I2)},
                {"certified", b.certified}};
}

Json certificate_json(const PeriodicCertificate& c) {
    Json orbit = Json::array();
    for (Real x : c.orbit) orbit.push_back(to_double(x));
    return Json{{"itinerary", c.itinerary}, {"point", real_json(c.point)}, {"period", c.period},
                {"residual", c.residual},   {"tolerance", c.tolerance},   {"prime", c.prime},
                {"visited_bands", c.visited_bands}, {"orbit", orbit}};
}

// ------------------------------------------------------------------ commands

struct Common {
    std::string f;
    std::string window;
    double lambda = 1.0;
    bool json = false;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    double root_tol = kDefaultRootTol;
    double cert_tol = kDefaultCertTol;
    double deriv_warn = kDerivWarn;
    std::string map = "m3";
};

struct Context {
    const Common& c;
    std::ostream& out;
    std::ostream& err;
    SmoothFunction F;

    MapKind kind() const {
        return MapKind(c.map == "newton" ? MapVariant::NewtonClassic : MapVariant::NewtonThirdOrder, c.lambda);
    }

    Json header(const char* command) const {
        return Json{{"schema_version", kJsonSchemaVersion},
                    {"command", command},
                    {"function", canonical_spec(F)},
                    {"window", interval_json(F.window())}};
    }

    void emit(const Json& j) const { out << j.dump() << '\n'; }
};

struct BandsOutcome {
    HypothesisReport report;
    std::optional<BandSystem> bands;
};

BandsOutcome obtain_bands(const Context& ctx) {
    BandsOutcome o;
    o.report = check_hypotheses(ctx.F);
    if (!o.report.ok()) return o;
    BandOptions opts;
    opts.lambda = ctx.c.lambda;
    o.bands = build_bands(ctx.F, opts);
    return o;
}

void print_bands(std::ostream& os, const BandSystem& b) {
    os << "roots r1..r4: " << join(std::vector<double>(b.roots.begin(), b.roots.end())) << '\n';
    os << "critical points c1, c2, c2', c3: " << join(std::vector<double>{b.c1, b.c2, b.c2_prime, b.c3}) << '\n';
    os << "epsilon: " << num(b.epsilon) << "  lambda: " << num(b.lambda) << '\n';
    os << "I1: [" << num(b.I1.lo()) << ", " << num(b.I1.hi()) << "]\n";
    os << "I2: [" << num(b.I2.lo()) << ", " << num(b.I2.hi()) << "]\n";
    os << "covering M(I_j) >= [c1, c3]: " << (b.certified ? "numerically certified" : "NOT certified") << '\n';
}

int cmd_orbit(const Context& ctx, double start, int max_iter, double escape) {
    IterateOptions opts;
    opts.max_iter = max_iter;
    opts.escape_radius = escape;
    opts.tol = ctx.c.root_tol;
    const OrbitRecord rec = iterate(ctx.F, ctx.kind(), start, opts);

    for (std::size_t n = 0; n < rec.iterates.size(); ++n) {
        const double x = rec.iterates[n];
        if (std::isfinite(x) && std::fabs(ctx.F.df(x)) < ctx.c.deriv_warn) {
            ctx.err << fmt::format("warning: |f'(x_{})| = {} below {}\n", n, num(std::fabs(ctx.F.df(x))),
                                   num(ctx.c.deriv_warn));
        }
    }
    if (ctx.c.json) {
        Json j = ctx.header("orbit");
        j["map"] = ctx.c.map;
        j["lambda"] = ctx.c.lambda;
        j["start"] = start;
        Json rows = Json::array();
        for (std::size_t n = 0; n < rec.iterates.size(); ++n) {
            const double x = rec.iterates[n];
            rows.push_back({{"n", n}, {"x", x}, {"f", std::isfinite(x) ? Json(ctx.F.f(x)) : Json(nullptr)}});
        }
        j["iterates"] = rows;
        j["classification"] = orbit_class_json(rec.classification);
        ctx.emit(j);
    } else {
        ctx.out << "n,x_n,f_x_n\n";
        for (std::size_t n = 0; n < rec.iterates.size(); ++n) {
            const double x = rec.iterates[n];
            ctx.out << n << ',' << num(x) << ',' << num(ctx.F.f(x)) << '\n';
        }
        ctx.out << "# " << to_string(rec.classification) << '\n';
    }
    return kExitOk;
}

int cmd_bands(const Context& ctx) {
    const BandsOutcome o = obtain_bands(ctx);
    Json j = ctx.header("bands");
    j["hypotheses"] = hypotheses_json(o.report);
    if (o.bands) j["bands"] = bands_json(*o.bands);
    if (!ctx.c.json) {
        if (!o.bands) {
            ctx.out << "hypotheses fail: " << o.report.failure() << '\n';
        } else {
            print_bands(ctx.out, *o.bands);
        }
    }
    ctx.emit(j);
    if (!o.bands) return kExitHypotheses;
    return o.bands->certified ? kExitOk : kExitCertification;
}

int cmd_periodic(const Context& ctx, int period, const std::string& itinerary) {
    const BandsOutcome o = obtain_bands(ctx);
    if (!o.bands) {
        ctx.err << "hypotheses fail: " << o.report.failure() << '\n';
        return kExitHypotheses;
    }
    if (!o.bands->certified) {
        ctx.err << "band covering not certified\n";
        return kExitCertification;
    }
    const auto bands = o.bands->bands();
    const Map g = make_map(ctx.F, MapKind::third_order(ctx.c.lambda));
    PeriodicOptions opts;
    opts.cert_tol = ctx.c.cert_tol;

    std::vector<CensusEntry> entries;
    std::optional<PeriodicCensus> census;
    if (!itinerary.empty()) {
        CensusEntry e;
        e.seed = Itinerary{parse_symbols(itinerary), ItineraryKind::PeriodicSeed};
        if (period != 0 && static_cast<int>(e.seed.length()) != period) {
            throw InvalidInput("itinerary length differs from --period");
        }
        try {
            e.certificate = find_periodic(g, bands, e.seed, opts);
        } catch (const CertificationFailure& ex) {
            e.failure = ex.what();
        }
        entries.push_back(std::move(e));
    } else {
        if (period < 1) throw InvalidInput("--period or --itinerary is required");
        census = periodic_census(g, bands, period, opts);
        entries = census->entries;
    }

    const bool all_ok = std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.certificate; });
    const bool bound_ok = !census || census->meets_bound();
    if (ctx.c.json) {
        Json j = ctx.header("periodic");
        j["lambda"] = ctx.c.lambda;
        j["bands"] = bands_json(*o.bands);
        Json rows = Json::array();
        for (const auto& e : entries) {
            rows.push_back(e.certificate ? certificate_json(*e.certificate)
                                         : Json{{"itinerary", e.seed.symbols}, {"failure", e.failure}});
        }
        j["certificates"] = rows;
        if (census) {
            j["census"] = {{"period", census->period},
                           {"distinct", census->distinct},
                           {"lower_bound", census->lower_bound()},
                           {"min_separation", census->min_separation},
                           {"max_residual", census->max_residual}};
        }
        ctx.emit(j);
    } else {
        ctx.out << "itinerary,point,period,residual,prime,bands\n";
        for (const auto& e : entries) {
            if (!e.certificate) {
                ctx.out << join(e.seed.symbols, " ") << ",FAILED: " << e.failure << '\n';
                continue;
            }
            const auto& c = *e.certificate;
            ctx.out << join(c.itinerary, " ") << ',' << num(c.point) << ',' << c.period << ',' << num(c.residual)
                    << ',' << (c.prime ? "yes" : "no") << ',' << join(c.visited_bands, " ") << '\n';
        }
        if (census) {
            ctx.out << fmt::format("# distinct {} of at least {}; min separation {}\n", census->distinct,
                                   census->lower_bound(), num(census->min_separation));
        }
    }
    return all_ok && bound_ok ? kExitOk : kExitCertification;
}

SymbolPattern parse_pattern(const std::string& pattern, const std::string& prefix) {
    SymbolPattern p = pattern == "alt" ? SymbolPattern::alternating() : SymbolPattern{{}, parse_symbols(pattern)};
    if (!prefix.empty()) p.prefix = parse_symbols(prefix);
    return p;
}

int cmd_witness(const Context& ctx, const std::string& pattern, const std::string& prefix, int depth) {
    const BandsOutcome o = obtain_bands(ctx);
    if (!o.bands) {
        ctx.err << "hypotheses fail: " << o.report.failure() << '\n';
        return kExitHypotheses;
    }
    if (!o.bands->certified) {
        ctx.err << "band covering not certified\n";
        return kExitCertification;
    }
    const auto bands = o.bands->bands();
    const Map g = make_map(ctx.F, MapKind::third_order(ctx.c.lambda));
    const DivergenceWitness w = divergence_witness(g, bands, depth, parse_pattern(pattern, prefix), ctx.c.cert_tol);

    if (ctx.c.json) {
        Json j = ctx.header("witness");
        j["lambda"] = ctx.c.lambda;
        j["point"] = real_json(w.point);
        j["requested_prefix"] = w.requested_prefix;
        j["verified_prefix"] = w.verified_prefix;
        j["symbols"] = w.symbols;
        Json orbit = Json::array();
        for (Real x : w.orbit) orbit.push_back(to_double(x));
        j["orbit"] = orbit;
        j["stage_residuals"] = w.chain.residuals;
        ctx.emit(j);
    } else {
        ctx.out << "point: " << format_real(w.point, 36) << '\n';
        ctx.out << "symbols: " << join(w.symbols, " ") << '\n';
        ctx.out << "verified prefix: " << w.verified_prefix << " of " << w.requested_prefix << '\n';
        ctx.out << "n,x_n,band\n";
        for (std::size_t n = 0; n < w.orbit.size(); ++n) {
            ctx.out << n << ',' << num(w.orbit[n]) << ','
                    << band_of(bands, w.orbit[n], ctx.c.cert_tol * (1 + abs(w.orbit[n]))) << '\n';
        }
    }
    return kExitOk;
}

int cmd_verify_scaling(const Context& ctx, const std::string& affine, int samples, double tol,
                       const std::string& range) {
    const auto ab = parse_list(affine, 2, "affine coefficient");
    const AffineMap T(ab[0], ab[1]);
    const Interval r = range.empty() ? ctx.F.window() : parse_window(range);
    const auto xs = scaling_samples(ctx.F, T, r, samples, ctx.c.seed);
    const MapKind kind = ctx.kind();
    const ScalingReport rep = verify_scaling(ctx.F, T, xs, kind.variant(), kind.lambda(), tol);

    if (ctx.c.json) {
        Json j = ctx.header("verify-scaling");
        j["map"] = ctx.c.map;
        j["lambda"] = ctx.c.lambda;
        j["affine"] = {T.a(), T.b()};
        j["seed"] = ctx.c.seed;
        j["checked"] = rep.checked;
        j["skipped"] = rep.skipped;
        j["max_rel_err"] = rep.max_rel_err;
        j["worst_x"] = rep.worst_x;
        j["tol"] = rep.tol;
        j["passed"] = rep.passed;
        ctx.emit(j);
    } else {
        ctx.out << (rep.passed ? "PASS" : "FAIL") << '\n';
        ctx.out << "checked,skipped,worst_x,max_rel_err,tol\n";
        ctx.out << rep.checked << ',' << rep.skipped.size() << ',' << num(rep.worst_x) << ',' << num(rep.max_rel_err)
                << ',' << num(rep.tol) << '\n';
    }
    return rep.passed ? kExitOk : kExitCertification;
}

int cmd_classify(const Context& ctx) {
    const BandsOutcome o = obtain_bands(ctx);
    const auto& r = o.report;
    const bool certified = o.bands && o.bands->certified;
    if (ctx.c.json) {
        Json j = ctx.header("classify");
        j["hypotheses"] = hypotheses_json(r);
        if (o.bands) j["bands"] = bands_json(*o.bands);
        j["verdict"] = !r.ok() ? "hypotheses fail" : certified ? "chaotic regime certified" : "not certified";
        ctx.emit(j);
    } else {
        ctx.out << "Newton class: " << (r.newton_class.ok() ? "yes" : "no") << '\n';
        for (const auto& w : r.newton_class.witnesses) {
            ctx.out << "  " << to_string(w.condition) << " violated at x = " << num(w.x) << " (f = " << num(w.f)
                    << ", f' = " << num(w.df) << ", f'' = " << num(w.ddf) << ")\n";
        }
        ctx.out << "roots: " << join(r.structure.roots) << '\n';
        ctx.out << "critical points: " << join(r.structure.critical_points) << '\n';
        if (!r.ok()) {
            ctx.out << "hypotheses fail: " << r.failure() << '\n';
        } else {
            ctx.out << "hypotheses hold\n";
            print_bands(ctx.out, *o.bands);
            ctx.out << (certified ? "chaotic regime certified" : "chaotic regime not certified") << '\n';
        }
    }
    if (!r.ok()) return kExitHypotheses;
    return certified ? kExitOk : kExitCertification;
}

struct SweepArgs {
    std::string vary = "lambda";
    std::string range = "0.1:2:20";
    std::string seeds = "2:2:1";
    int burn_in = 200;
    int tail = 100;
    double escape = kDefaultEscapeRadius;
    std::string out;
};

int cmd_sweep(const Context& ctx, const SweepArgs& a) {
    SweepSpec spec;
    spec.base = ctx.F;
    spec.variant = ctx.kind().variant();
    spec.lambda = ctx.c.lambda;
    if (a.vary == "lambda") {
        spec.slot = SweepSlot::Lambda;
    } else if (a.vary.size() > 1 && a.vary[0] == 'c') {
        spec.slot = SweepSlot::Coefficient;
        const double k = parse_literal(a.vary, 1, a.vary.size(), "coefficient index");
        if (k != std::floor(k) || k < 0 || k > 1e6) throw SpecParseError(2, "coefficient index must be an integer");
        spec.coeff_index = static_cast<int>(k);
    } else {
        throw SpecParseError(1, "--vary takes lambda or c<k>");
    }
    const auto rng = parse_list(a.range, 3, "range value");
    const auto sd = parse_list(a.seeds, 3, "seed grid value");
    if (rng[2] != std::floor(rng[2]) || sd[2] != std::floor(sd[2])) throw InvalidInput("step counts are integers");
    spec.lo = rng[0];
    spec.hi = rng[1];
    spec.steps = static_cast<int>(rng[2]);
    spec.seeds = linspace(sd[0], sd[1], static_cast<int>(sd[2]));
    spec.burn_in = a.burn_in;
    spec.tail = a.tail;
    spec.escape_radius = a.escape;
    spec.tol = ctx.c.root_tol;
    const SweepDataset data = run_sweep(spec);

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw std::runtime_error("cannot open " + a.out);
    }
    std::ostream& os = a.out.empty() ? ctx.out : file;
    if (ctx.c.json) {
        Json j = ctx.header("sweep");
        j["map"] = ctx.c.map;
        j["vary"] = a.vary;
        j["burn_in"] = spec.burn_in;
        j["tail"] = spec.tail;
        Json rows = Json::array();
        for (const auto& row : data.rows) {
            Json tail = Json::array();
            for (double v : row.tail) tail.push_back(std::isinf(v) ? Json(v > 0 ? "inf+" : "inf-") : Json(v));
            rows.push_back({{"param", row.param},
                            {"seed", row.seed},
                            {"class", orbit_class_json(row.classification)},
                            {"tail", tail}});
        }
        j["rows"] = rows;
        os << j.dump() << '\n';
    } else {
        write_csv(os, data);
    }
    if (!a.out.empty()) ctx.err << "wrote " << data.rows.size() << " rows to " << a.out << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Chaotic dynamics of the third-order Newton map", "newton_chaos"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value file; command-line flags take precedence");

    Common c;
    // A vector so an unquoted spec in a config file, which CLI11 splits at
    // commas, is glued back together.
    std::vector<std::string> f_parts;
    app.add_option("--f", f_parts, "function spec poly:c0,c1,...,cn");
    app.add_option("--window", c.window, "search window lo:hi (default -50:50)");
    app.add_option("--lambda", c.lambda, "damping parameter");
    app.add_option("--map", c.map, "iteration map")->check(CLI::IsMember({"newton", "m3"}));
    app.add_flag("--json", c.json, "machine-readable output");
    app.add_option("--threads", c.threads, "worker threads (default NEWTON_CHAOS_THREADS or all cores)");
    app.add_option("--seed", c.seed, "random seed");
    app.add_option("--root-tol", c.root_tol, "root residual tolerance")->check(CLI::PositiveNumber);
    app.add_option("--cert-tol", c.cert_tol, "periodic certificate tolerance")->check(CLI::PositiveNumber);
    app.add_option("--deriv-warn", c.deriv_warn, "warn when |f'| drops below this")->check(CLI::PositiveNumber);

    auto* orbit = app.add_subcommand("orbit", "iterate one orbit and print n,x_n,f(x_n)");
    double start = 0.0;
    int max_iter = kDefaultMaxIter;
    double escape = kDefaultEscapeRadius;
    orbit->add_option("--start", start, "initial point")->required();
    orbit->add_option("--max-iter", max_iter, "iteration cap")->check(CLI::PositiveNumber);
    orbit->add_option("--escape", escape, "escape radius")->check(CLI::PositiveNumber);

    auto* bands = app.add_subcommand("bands", "build and certify the two-band covering");

    auto* periodic = app.add_subcommand("periodic", "certify periodic points of a prime period");
    int period = 0;
    std::string itinerary;
    periodic->add_option("--period", period, "period n (all prime seeds)");
    periodic->add_option("--itinerary", itinerary, "single seed, e.g. 1,2,2");

    auto* witness = app.add_subcommand("witness", "orbit following a non-eventually-constant itinerary");
    std::string pattern = "alt";
    std::string prefix;
    int depth = 10;
    witness->add_option("--pattern", pattern, "alt or a repeating cycle such as 1,2,2");
    witness->add_option("--prefix", prefix, "symbols emitted before the cycle");
    witness->add_option("--depth", depth, "itinerary depth")->check(CLI::Range(2, 64));

    auto* scaling = app.add_subcommand("verify-scaling", "check the affine conjugacy identity on random samples");
    std::string affine;
    int samples = 200;
    double scaling_tol = 1e-9;
    std::string range;
    scaling->add_option("--affine", affine, "a,b for T(x) = a x + b")->required();
    scaling->add_option("--samples", samples, "number of samples")->check(CLI::NonNegativeNumber);
    scaling->add_option("--tol", scaling_tol, "relative tolerance")->check(CLI::PositiveNumber);
    scaling->add_option("--range", range, "sample range lo:hi (default: window)");

    auto* classify = app.add_subcommand("classify", "check the chaos hypotheses and certify bands");

    auto* sweep = app.add_subcommand("sweep", "bifurcation / basin data as CSV");
    SweepArgs sa;
    sweep->add_option("--vary", sa.vary, "lambda or c<k>");
    sweep->add_option("--range", sa.range, "lo:hi:steps");
    sweep->add_option("--seeds", sa.seeds, "lo:hi:n");
    sweep->add_option("--burn-in", sa.burn_in, "discarded iterates")->check(CLI::NonNegativeNumber);
    sweep->add_option("--tail", sa.tail, "recorded iterates")->check(CLI::PositiveNumber);
    sweep->add_option("--escape", sa.escape, "escape radius")->check(CLI::PositiveNumber);
    sweep->add_option("--out", sa.out, "CSV file (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        if (c.threads > 0) set_thread_limit(c.threads);
        for (std::size_t i = 0; i < f_parts.size(); ++i) c.f += (i ? "," : "") + f_parts[i];
        if (c.f.empty()) throw SpecParseError(1, "--f is required");
        const Interval window = c.window.empty() ? default_window() : parse_window(c.window);
        Context ctx{c, out, err, parse_function_spec(c.f, window)};
        (void)ctx.kind();

        if (orbit->parsed()) return cmd_orbit(ctx, start, max_iter, escape);
        if (bands->parsed()) return cmd_bands(ctx);
        if (periodic->parsed()) return cmd_periodic(ctx, period, itinerary);
        if (witness->parsed()) return cmd_witness(ctx, pattern, prefix, depth);
        if (scaling->parsed()) return cmd_verify_scaling(ctx, affine, samples, scaling_tol, range);
        if (classify->parsed()) return cmd_classify(ctx);
        if (sweep->parsed()) return cmd_sweep(ctx, sa);
        return kExitParse;
    } catch (const SpecParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const HypothesisFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitHypotheses;
    } catch (const BandFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitCertification;
    } catch (const RefinementFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitCertification;
    } catch (const CertificationFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitCertification;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace newton_chaos
