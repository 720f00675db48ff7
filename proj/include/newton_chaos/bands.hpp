#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "newton_chaos/functions.hpp"
#include "newton_chaos/iteration.hpp"

namespace newton_chaos {

/// Outcome of checking the three chaos hypotheses: Newton class, opposite
/// infinite limits at +/- infinity, and at least four real roots.
struct HypothesisReport {
    NewtonClassReport newton_class;
    /// Exact for polynomials (odd degree); otherwise f has opposite nonzero
    /// signs at the two window endpoints.
    bool opposite_limits = false;
    /// Sign of f towards +infinity (0 when undetermined).
    int sign_at_plus_infinity = 0;
    bool limits_exact = false;
    CriticalStructure structure;
    bool enough_roots = false;

    bool ok() const noexcept { return newton_class.ok() && opposite_limits && enough_roots; }
    /// Failing hypotheses joined by "; ", or empty when all hold.
    std::string failure() const;
};

HypothesisReport check_hypotheses(const SmoothFunction& F, int grid_n = kDefaultGridPoints);

enum class LimitVerdict { OppositeInfinite, Inconclusive };

struct EdgeLimits {
    LimitVerdict verdict = LimitVerdict::Inconclusive;
    int sign_left = 0;
    int sign_right = 0;
    /// N at c_left + h_k and c_right - h_k for h_k = probe_h^k, k = 1, 2, 3.
    std::vector<double> probe_h;
    std::vector<double> left_values;
    std::vector<double> right_values;
    std::string reason;
};

/// Probes the damped Newton map N at both ends of (c_left, c_right). The open
/// interval must hold exactly one root of f and no critical point; otherwise,
/// or when the probes fail to grow monotonically, the verdict is inconclusive.
EdgeLimits limits_at_band_edges(const SmoothFunction& F, double c_left, double c_right, double probe_h = 1e-2,
                                double lambda = 1.0);

/// Sampled range of g over J, with golden-section refinement around the
/// extreme samples. Empty when a sample is not finite.
std::optional<Interval> sampled_range(const RealFn& g, const Interval& J, int grid);

struct EpsilonTrial {
    double epsilon = 0.0;
    bool valid = false;
    bool certified = false;
    std::optional<Interval> range1;
    std::optional<Interval> range2;
};

/// Two disjoint truncated bands whose images both cover [c1, c3].
struct BandSystem {
    std::array<double, 4> roots{};
    double c1 = 0.0, c2 = 0.0, c2_prime = 0.0, c3 = 0.0;
    double epsilon = 0.0;
    Interval I1{0.0, 0.0};
    Interval I2{0.0, 0.0};
    double lambda = 1.0;
    /// Covering numerically established by dense sampling, not interval
    /// arithmetic.
    bool certified = false;
    std::vector<EpsilonTrial> trials;

    Interval cover_target() const { return {c1, c3}; }
    std::vector<Interval> bands() const { return {I1, I2}; }
    /// Certification never lost once reached along the schedule.
    bool certification_monotone() const;
};

class HypothesisFailure : public std::runtime_error {
public:
    explicit HypothesisFailure(HypothesisReport report)
        : std::runtime_error("hypotheses fail: " + report.failure()), report_(std::move(report)) {}
    const HypothesisReport& report() const noexcept { return report_; }

private:
    HypothesisReport report_;
};

class BandFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BandOptions {
    std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    int cover_grid = 20001;
    double lambda = 1.0;
    int grid_n = kDefaultGridPoints;
};

/// Picks four consecutive roots nearest the window center, the flanking
/// critical points c1 < c2 <= c2' < c3, and the first epsilon in the schedule
/// for which M(I_j) covers [c1, c3] for both bands. Throws HypothesisFailure
/// when check_hypotheses fails and BandFailure when no epsilon gives two
/// valid bands; an uncertified best attempt is returned otherwise.
BandSystem build_bands(const SmoothFunction& F, const BandOptions& opts = {});

}  // namespace newton_chaos
