#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "newton_chaos/bands.hpp"
#include "newton_chaos/functions.hpp"
#include "newton_chaos/iteration.hpp"
#include "newton_chaos/symbolic.hpp"

namespace newton_chaos {

/// n evenly spaced points from lo to hi inclusive; {lo} when n == 1.
std::vector<double> linspace(double lo, double hi, int n);

enum class SweepSlot { Lambda, Coefficient };

struct SweepSpec {
    SmoothFunction base = make_polynomial({-1.0, 0.0, 1.0});
    MapVariant variant = MapVariant::NewtonThirdOrder;
    /// Damping used when the slot is a coefficient.
    double lambda = 1.0;
    SweepSlot slot = SweepSlot::Lambda;
    /// Ascending-degree index of the swept coefficient.
    int coeff_index = 0;
    double lo = 0.1;
    double hi = 2.0;
    int steps = 1;
    std::vector<double> seeds{2.0};
    int burn_in = 200;
    int tail = 100;
    double escape_radius = kDefaultEscapeRadius;
    /// Convergence tolerance on |f|.
    double tol = kDefaultRootTol;

    /// Throws InvalidInput on a broken invariant, including a parameter value
    /// that zeroes the leading coefficient or the damping.
    void validate() const;
    std::vector<double> parameters() const { return linspace(lo, hi, steps); }
};

struct SweepRow {
    double param = 0.0;
    double seed = 0.0;
    /// Derivative blowups are reported as Escaped.
    OrbitClass classification;
    /// Iterates burn_in .. burn_in + tail - 1. Once an orbit leaves the
    /// escape radius or hits the derivative floor the remaining entries are
    /// +/-infinity.
    std::vector<double> tail;
};

struct SweepDataset {
    int tail = 0;
    /// Parameter-major, seed-minor.
    std::vector<SweepRow> rows;
};

SweepDataset run_sweep(const SweepSpec& spec);

/// Header `param,seed,class,tail_0,...`, one line per row, 17 significant
/// digits, infinities as inf+ / inf-.
void write_csv(std::ostream& os, const SweepDataset& data);

struct DampingRow {
    double lambda = 0.0;
    bool certified = false;
    /// Distinct certified prime-period points, one per requested period.
    std::vector<int> counts;
    /// Smallest entry of counts (0 when bands were not certified).
    int min_count = 0;
    long long lower_bound = 0;
    std::string failure;

    bool meets_bound() const noexcept { return certified && min_count >= lower_bound; }
};

/// For each lambda > 0, rebuilds the bands for the damped third-order map and
/// repeats the periodic-point census for every requested period. Throws
/// HypothesisFailure when F fails the hypotheses; band failures are recorded.
std::vector<DampingRow> damping_robustness(const SmoothFunction& F, const std::vector<double>& lambdas,
                                           const std::vector<int>& periods, const BandOptions& band_opts = {},
                                           const PeriodicOptions& periodic_opts = {});

}  // namespace newton_chaos
