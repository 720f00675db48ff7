#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "newton_chaos/bands.hpp"
#include "newton_chaos/functions.hpp"
#include "newton_chaos/iteration.hpp"

namespace newton_chaos {

/// Map of the line evaluated in extended precision. NaN marks points where
/// it is undefined.
using Map = std::function<Real(Real)>;

/// The iteration map of F as a Map (NaN at the derivative floor).
Map make_map(const SmoothFunction& F, const MapKind& kind);

/// A double-precision function as a Map.
Map lift(RealFn g);

/// g applied n times, NaN once any step is undefined.
Real compose_power(const Map& g, Real x, int n);

// ------------------------------------------------------------------ pullback

class PullbackFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PullbackOptions {
    /// Endpoint residual allowed, relative to 1 + |target|.
    double tol = 1e-9;
    int grid = 4096;
    /// Grid doublings tried when no crossing is found.
    int max_doublings = 3;
    /// Treat an endpoint residual above tol as failure. Deep chains switch
    /// this off and judge the result by the orbit it produces instead.
    bool enforce_residual = true;
};

struct PullbackResult {
    ExtInterval L{0, 0};
    /// max |g(endpoint) - matching end of K|.
    double residual = 0.0;
    int grid_used = 0;
};

/// Compact L inside J with g(L) = K, for g continuous on J with g(J) covering
/// K. L = [c, d] where c is the greatest preimage of K.lo and d the least
/// preimage of K.hi to its right; when K.hi is only reached left of c, the
/// mirrored pair is used. Preimages are bracketed on a uniform grid and
/// bisected to full precision.
PullbackResult pullback(const Map& g, const ExtInterval& J, const ExtInterval& K, const PullbackOptions& opts = {});

// ---------------------------------------------------------------- itineraries

enum class ItineraryKind {
    /// Closes with j_{n+1} = j_1.
    PeriodicSeed,
    FinitePrefix,
};

struct Itinerary {
    /// 1-based band indices.
    std::vector<int> symbols;
    ItineraryKind kind = ItineraryKind::PeriodicSeed;

    std::size_t length() const noexcept { return symbols.size(); }
    /// j_1 differs from every later symbol, which forces prime period n.
    bool prime_seed() const noexcept;
};

/// All length-n sequences over {1..k} with j_1 != j_i for i >= 2, in
/// lexicographic order. There are k (k-1)^(n-1) of them.
std::vector<Itinerary> enumerate_prime_seeds(int k, int n);

/// A_1 ⊇ A_2 ⊇ ... inside I_{j_1} with g^i(A_i) = I_{j_{i+1}}.
struct RefinementChain {
    /// Symbols including the closing j_1 for periodic seeds.
    std::vector<int> symbols;
    ExtInterval base{0, 0};
    std::vector<ExtInterval> intervals;
    std::vector<ExtInterval> targets;
    std::vector<double> residuals;

    int stages() const noexcept { return static_cast<int>(intervals.size()); }
    const ExtInterval& deepest() const { return intervals.empty() ? base : intervals.back(); }
    /// Each interval sits inside its predecessor up to `slack`.
    bool nested(double slack = 1e-12) const;
};

class RefinementFailure : public std::runtime_error {
public:
    RefinementFailure(int stage, const std::string& what)
        : std::runtime_error("refinement stage " + std::to_string(stage) + ": " + what), stage_(stage) {}
    int stage() const noexcept { return stage_; }

private:
    int stage_;
};

/// Applies pullback to g^i stage by stage; never inverts g globally. A
/// periodic seed of length n yields n stages, a finite prefix of length m
/// yields m - 1.
RefinementChain refine_itinerary(const Map& g, std::span<const Interval> bands, const Itinerary& itin,
                                 const PullbackOptions& opts = {});

// ------------------------------------------------------------ periodic points

inline constexpr double kDefaultCertTol = 1e-9;

struct PeriodicCertificate {
    Real point = 0;
    int period = 0;
    std::vector<Real> orbit;
    double residual = 0.0;
    /// Allowed residual: cert_tol * (1 + |point|).
    double tolerance = 0.0;
    bool prime = false;
    /// 1-based band holding each orbit point, 0 for none.
    std::vector<int> visited_bands;
    std::vector<int> itinerary;
};

class CertificationFailure : public std::runtime_error {
public:
    CertificationFailure(const std::string& what, std::optional<RefinementChain> chain)
        : std::runtime_error(what), chain_(std::move(chain)) {}
    const std::optional<RefinementChain>& chain() const noexcept { return chain_; }

private:
    std::optional<RefinementChain> chain_;
};

struct PeriodicOptions {
    double cert_tol = kDefaultCertTol;
    bool require_prime = true;
    PullbackOptions pullback{};
};

/// Fixed point of g^n in the deepest interval of the seed's chain, by
/// sign-change bisection on g^n(x) - x, then certified for residual,
/// primeness and band itinerary.
PeriodicCertificate find_periodic(const Map& g, std::span<const Interval> bands, const Itinerary& seed,
                                  const PeriodicOptions& opts = {});

struct CensusEntry {
    Itinerary seed;
    std::optional<PeriodicCertificate> certificate;
    std::string failure;
};

struct PeriodicCensus {
    int period = 0;
    int band_count = 0;
    std::vector<CensusEntry> entries;
    /// Certified points pairwise separated by more than cert_tol.
    int distinct = 0;
    /// Smallest pairwise gap between certified points (inf if fewer than two).
    double min_separation = 0.0;
    /// Largest certificate residual.
    double max_residual = 0.0;

    /// k (k-1)^(n-1).
    long long lower_bound() const noexcept;
    bool meets_bound() const noexcept { return distinct >= lower_bound(); }
};

/// Runs find_periodic for every prime seed of length n.
PeriodicCensus periodic_census(const Map& g, std::span<const Interval> bands, int n, const PeriodicOptions& opts = {});

// --------------------------------------------------------- divergence witness

/// Symbol stream: a finite prefix followed by a repeating cycle.
struct SymbolPattern {
    std::vector<int> prefix;
    std::vector<int> cycle;

    static SymbolPattern alternating() { return {{}, {1, 2}}; }
    int at(std::size_t i) const;
    bool eventually_constant() const noexcept;
    std::vector<int> take(std::size_t n) const;
};

struct DivergenceWitness {
    Real point = 0;
    int requested_prefix = 0;
    /// Longest prefix with g^{i-1}(point) in I_{j_i} at cert_tol slack.
    int verified_prefix = 0;
    std::vector<int> symbols;
    std::vector<Real> orbit;
    RefinementChain chain;
};

/// Midpoint of A_{prefix_len} for the pattern's first prefix_len + 1
/// symbols, with the band memberships its computed orbit actually realizes.
DivergenceWitness divergence_witness(const Map& g, std::span<const Interval> bands, int prefix_len,
                                     const SymbolPattern& pattern, double cert_tol = kDefaultCertTol,
                                     const PullbackOptions& opts = {});

/// 1-based index of the band holding x within slack, 0 for none.
int band_of(std::span<const Interval> bands, Real x, Real slack);

}  // namespace newton_chaos
