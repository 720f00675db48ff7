#include <doctest.h>

#include <cmath>
#include <random>

#include "newton_chaos/iteration.hpp"
#include "oracles.hpp"

using namespace newton_chaos;

TEST_CASE("MapKind rejects lambda = 0") {
    CHECK_THROWS_AS(MapKind::third_order(0.0), InvalidInput);
    CHECK_THROWS_AS(MapKind::newton(NAN), InvalidInput);
    CHECK_NOTHROW(MapKind::newton(-0.5));
}

TEST_CASE("Newton step on x^2 - 1") {
    const auto F = make_polynomial({-1, 0, 1});
    CHECK(newton_step(F, 1.0, 2.0) == 1.25);
    CHECK(newton_step(F, 1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(newton_step(F, 1.0, 0.0), DerivativeBlowup);
    try {
        newton_step(F, 1.0, 0.0);
    } catch (const DerivativeBlowup& e) {
        CHECK(e.at() == 0.0);
    }
}

TEST_CASE("third-order step on x^2 - 1") {
    const auto F = make_polynomial({-1, 0, 1});
    // N = 1.25, f(N) = 0.5625, M = 1.25 - 0.5625 / 4.
    CHECK(third_order_step(F, 1.0, 2.0) == 1.109375);
    CHECK(third_order_step(F, 1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(third_order_step(F, 1.0, 0.0), DerivativeBlowup);
    CHECK_FALSE(try_step(F, MapKind::third_order(), 0.0).has_value());
}

TEST_CASE("steps agree with the defining formulas") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pt(-3, 3);
    const std::vector<double> c{0.5, -2, 0.3, 1.7, -0.4, 1};
    const auto F = make_polynomial(c);
    const auto P = oracle::from(c);
    for (double lambda : {0.5, 1.0, 2.0, -1.5}) {
        for (int i = 0; i < 200; ++i) {
            const double x = pt(rng);
            if (std::fabs(F.df(x)) < 1e-2) continue;
            const double n = newton_step(F, lambda, x);
            const double m = third_order_step(F, lambda, x);
            const double on = static_cast<double>(oracle::newton(P, lambda, x));
            const double om = static_cast<double>(oracle::third(P, lambda, x));
            CHECK(std::fabs(n - on) <= 1e-9 * (1 + std::fabs(on)));
            CHECK(std::fabs(m - om) <= 1e-9 * (1 + std::fabs(om)));
            // M - N is exactly the second correction, which reuses f'(x).
            CHECK(std::fabs((m - n) - (-lambda * F.f(n) / F.df(x))) <= 1e-12 * (1 + std::fabs(m)));
        }
    }
}

TEST_CASE("lambda = 1 goes through the same code path as the undamped map") {
    const auto F = make_polynomial({0, 4, 0, -5, 0, 1});
    for (double x : {-1.3, 0.2, 0.77, 2.4}) {
        CHECK(step(F, MapKind::third_order(1.0), x) == step(F, MapKind::third_order(), x));
        CHECK(step(F, MapKind::newton(1.0), x) == newton_step(F, 1.0, x));
    }
}

TEST_CASE("simple roots are fixed points of every damped map") {
    for (const auto& c : std::vector<std::vector<double>>{{-1, 0, 1}, {0, -1, 0, 1}, {0, 4, 0, -5, 0, 1}}) {
        const auto F = make_polynomial(c);
        for (double r : find_roots(F)) {
            for (double lambda : {0.5, 1.0, 2.0, -0.7}) {
                CHECK(std::fabs(step(F, MapKind::newton(lambda), r) - r) <= 1e-12 * (1 + std::fabs(r)));
                CHECK(std::fabs(step(F, MapKind::third_order(lambda), r) - r) <= 1e-12 * (1 + std::fabs(r)));
            }
        }
    }
}

TEST_CASE("iterate classifications") {
    const auto F = make_polynomial({-1, 0, 1});

    const auto rec = iterate(F, MapKind::third_order(), 2.0);
    CHECK(rec.classification.kind == OrbitClass::ConvergedToRoot);
    CHECK(rec.classification.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rec.classification.step <= 6);
    CHECK(rec.iterates.front() == 2.0);
    CHECK(std::fabs(rec.iterates.back() - rec.classification.value) <= 1e-12);
    // Same orbit from the oracle recurrence.
    const auto P = oracle::from({-1, 0, 1});
    oracle::LD x = 2;
    for (std::size_t n = 1; n < rec.iterates.size(); ++n) {
        x = oracle::third(P, 1, x);
        CHECK(std::fabs(rec.iterates[n] - static_cast<double>(x)) <= 1e-12);
    }

    const auto at_root = iterate(F, MapKind::third_order(), 1.0);
    CHECK(at_root.classification.kind == OrbitClass::ConvergedToRoot);
    CHECK(at_root.classification.step == 0);
    CHECK(at_root.iterates.size() == 1);

    const auto blow = iterate(F, MapKind::newton(), 0.0);
    CHECK(blow.classification.kind == OrbitClass::DerivativeBlowup);
    CHECK(blow.classification.value == 0.0);

    IterateOptions small;
    small.escape_radius = 10;
    const auto esc = iterate(F, MapKind::newton(), 1e-3, small);
    CHECK(esc.classification.kind == OrbitClass::Escaped);
}

TEST_CASE("Newton on x^2 + 1 never converges") {
    const auto F = make_polynomial({1, 0, 1});
    IterateOptions opts;
    opts.max_iter = 300;
    for (double start : {0.3, 1.7, -2.2, 5.0, 0.5773502691896257}) {
        const auto rec = iterate(F, MapKind::newton(), start, opts);
        CHECK(rec.classification.kind != OrbitClass::ConvergedToRoot);
        CHECK(rec.iterates.size() <= static_cast<std::size_t>(opts.max_iter) + 1);
    }
    // 1/sqrt(3) is a 2-cycle of x -> (x - 1/x) / 2 in exact arithmetic.
    const auto two = iterate(F, MapKind::newton(), 1.0 / std::sqrt(3.0), opts);
    CHECK((two.classification.kind == OrbitClass::PeriodicSuspect ||
           two.classification.kind == OrbitClass::MaxIter));
}

TEST_CASE("iterate is deterministic") {
    const auto F = make_polynomial({0, 4, 0, -5, 0, 1});
    for (double s : {-0.6, 0.51, 1.3}) {
        const auto a = iterate(F, MapKind::third_order(), s);
        const auto b = iterate(F, MapKind::third_order(), s);
        CHECK(a.iterates == b.iterates);
        CHECK(a.classification == b.classification);
    }
}

TEST_CASE("iterate validates options") {
    const auto F = make_polynomial({-1, 0, 1});
    IterateOptions bad;
    bad.max_iter = 0;
    CHECK_THROWS_AS(iterate(F, MapKind::newton(), 2.0, bad), InvalidInput);
    bad = {};
    bad.escape_radius = -1;
    CHECK_THROWS_AS(iterate(F, MapKind::newton(), 2.0, bad), InvalidInput);
}

TEST_CASE("convergence order") {
    const auto F = make_polynomial({-1, 0, 1});
    const auto seeds = default_order_seeds(1.0);
    CHECK(estimate_order(F, MapKind::newton(), 1.0, seeds).order == doctest::Approx(2.0).epsilon(0.15));
    CHECK(estimate_order(F, MapKind::third_order(), 1.0, seeds).order == doctest::Approx(3.0).epsilon(0.1));

    const auto G = make_polynomial({0, -1, 0, 1});
    CHECK(estimate_order(G, MapKind::newton(), 1.0, default_order_seeds(1.0)).order ==
          doctest::Approx(2.0).epsilon(0.15));
    CHECK(estimate_order(G, MapKind::third_order(), 1.0, default_order_seeds(1.0)).order ==
          doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("order at the inflection root of x^3 - x is five") {
    // f''(0) = 0 kills the quadratic error term of N, so N is cubic there and
    // M gains two more orders: M(x) = 6 x^5 / (3 x^2 - 1)^2 + O(x^9).
    const auto G = make_polynomial({0, -1, 0, 1});
    const std::vector<double> seeds{0.009, -0.007, 0.005, -0.004, 0.003};
    const double order = estimate_order(G, MapKind::third_order(), 0.0, seeds).order;
    CHECK(std::fabs(order - 5.0) <= 0.3);

    const auto P = oracle::from({0, -1, 0, 1});
    for (oracle::LD x : {0.05L, 0.02L, -0.01L}) {
        const oracle::LD ratio = oracle::third(P, 1, x) / std::pow(x, 5.0L);
        CHECK(static_cast<double>(ratio) == doctest::Approx(6.0 / std::pow(3 * x * x - 1, 2)).epsilon(1e-3));
    }
}

TEST_CASE("estimate_order reports too few pairs") {
    const auto F = make_polynomial({-1, 0, 1});
    const std::vector<double> at_root{1.0};
    CHECK_THROWS_AS(estimate_order(F, MapKind::third_order(), 1.0, at_root), EstimationFailure);
}
