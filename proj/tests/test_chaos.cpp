#include <cmath>
#include <random>

#include "bubblepair/chaos.hpp"
#include "bubblepair/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bubblepair;
using support::params;

namespace {

PoincareSet cycle(int period, int count, double jitter = 0.0, unsigned seed = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, jitter);
    PoincareSet ps;
    for (int k = 0; k < count; ++k) {
        const double phase = double(k % period);
        ps.samples.push_back({1.0 + 0.1 * phase + g(rng), 0.05 * phase, 1.0 + 0.1 * phase, 0.05 * phase});
    }
    return ps;
}

AnalysisConfig quick(long transient, long measure) {
    AnalysisConfig a;
    a.run.transient_periods = transient;
    a.run.measure_periods = measure;
    a.poincare_collect = 100;
    a.max_extensions = 0;
    return a;
}

}  // namespace

TEST_CASE("make_spectrum drops the exponent closest to zero") {
    const LyapunovSpectrum s = make_spectrum({-0.1, 0.05, 2e-9, -0.3, 0.01});
    CHECK(s.exponents == std::array<double, 5>{0.05, 0.01, 2e-9, -0.1, -0.3});
    CHECK(s.referent_index == 2);
    CHECK(s.referent() == 2e-9);
    CHECK(s.effective.l1 == 0.05);
    CHECK(s.effective.l2 == 0.01);
    CHECK(s.sum() == doctest::Approx(-0.34));

    const LyapunovSpectrum t = make_spectrum({-0.2, 0.0, -0.1, -0.4, -0.3});
    CHECK(t.referent_index == 0);
    CHECK(t.effective.l1 == -0.1);
    CHECK(t.effective.l2 == -0.2);
}

TEST_CASE("threshold classification") {
    const double tr = 1e-3;
    CHECK(classify_effective({-0.05, -0.1}, tr) == Regime::Periodic);
    CHECK(classify_effective({-tr * 1.0001, -0.1}, tr) == Regime::Periodic);
    CHECK(classify_effective({-tr, -0.1}, tr) == Regime::Quasiperiodic);
    CHECK(classify_effective({0.0, -0.1}, tr) == Regime::Quasiperiodic);
    CHECK(classify_effective({tr, -0.1}, tr) == Regime::Quasiperiodic);
    CHECK(classify_effective({0.02, -0.01}, tr) == Regime::Chaotic);
    CHECK(classify_effective({0.02, tr}, tr) == Regime::Chaotic);
    CHECK(classify_effective({0.02, 0.0}, tr) == Regime::Chaotic);
    CHECK(classify_effective({0.02, tr * 1.0001}, tr) == Regime::Hyperchaotic);
    CHECK(classify_effective({0.04, 0.008}, tr) == Regime::Hyperchaotic);
    CHECK(classify_effective({0.005, -0.01}, 0.01) == Regime::Quasiperiodic);
}

TEST_CASE("classify refuses unconverged spectra") {
    LyapunovSpectrum s = make_spectrum({0.04, 0.008, 0.0, -0.1, -0.2});
    s.converged = false;
    CHECK_THROWS_AS(classify(s), ClassificationRefused);
    s.converged = true;
    CHECK(classify(s) == Regime::Hyperchaotic);
}

TEST_CASE("names round-trip") {
    for (Regime r : {Regime::Periodic, Regime::Quasiperiodic, Regime::Chaotic, Regime::Hyperchaotic})
        CHECK(parse_regime(to_string(r)) == r);
    CHECK(!parse_regime("strange"));
    CHECK(to_string(Synchrony::Synchronous) == "synchronous");
    CHECK(to_string(Synchrony::Asynchronous) == "asynchronous");
    CHECK(to_string(Synchrony::NotApplicable) == "n/a");
}

TEST_CASE("detect_period") {
    CHECK(detect_period(cycle(1, 40)) == 1);
    CHECK(detect_period(cycle(4, 40)) == 4);
    CHECK(detect_period(cycle(3, 40)) == 3);
    CHECK(!detect_period(cycle(11, 40)));  // longer than a quarter of the samples
    CHECK(!detect_period(cycle(4, 400, 1e-3)));
    CHECK(detect_period(cycle(4, 400, 1e-8)) == 4);
    CHECK(!detect_period(PoincareSet{}));
}

TEST_CASE("is_synchronous") {
    PoincareSet on = cycle(4, 20);
    CHECK(is_synchronous(on, 1.0) == Synchrony::Synchronous);
    CHECK(is_synchronous(on, 1.01) == Synchrony::NotApplicable);
    on.samples[7][2] += 1e-5;
    CHECK(is_synchronous(on, 1.0) == Synchrony::Asynchronous);
    CHECK(is_synchronous(on, 1.0, 1e-4) == Synchrony::Synchronous);
}

TEST_CASE("hausdorff_distance and swapped") {
    const std::vector<PoincarePoint> a{{0, 0, 0, 0}, {1, 0, 0, 0}};
    const std::vector<PoincarePoint> b{{0, 0, 0, 0}, {1, 0, 0, 0}, {3, 0, 0, 0}};
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK(hausdorff_distance(a, b) == doctest::Approx(2.0));
    CHECK(hausdorff_distance(b, a) == doctest::Approx(2.0));
    const std::vector<PoincarePoint> c{{1, 2, 3, 4}};
    CHECK(swapped(c)[0] == PoincarePoint{3, 4, 1, 2});
    CHECK(swapped(swapped(b)) == b);
}

TEST_CASE("poincare sampling") {
    const Model m(params(1.2e6, 13, 1.0));
    const IntegratorConfig cfg;
    State last;
    const PoincareSet ps = poincare({1.0, 0.0, 1.0, 0.0, 0.0}, m, cfg, 10, 25, &last);
    CHECK(ps.count() == 25);
    CHECK(ps.skip == 10);
    CHECK(ps.samples.back() == PoincarePoint{last.r1, last.u1, last.r2, last.u2});
    State direct = integrate_to(m, {1.0, 0.0, 1.0, 0.0, 0.0}, 0.0, 34 * m.scales().period(), cfg);
    CHECK(support::max_diff(direct, last) < 1e-8);
    CHECK(is_synchronous(ps, 1.0) == Synchrony::Synchronous);
}

TEST_CASE("spectrum of a damped equilibrium") {
    const Model m(params(0.0, 21, 1.0));
    LyapunovRun run;
    run.transient_periods = 10;
    run.measure_periods = 400;
    const LyapunovSpectrum s = lyapunov_spectrum({1.05, 0.0, 0.97, 0.0, 0.0}, m, IntegratorConfig{}, run);
    CHECK(s.referent() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.referent_index == 0);
    for (std::size_t i = 1; i < 5; ++i) CHECK(s.exponents[i] < 0.0);
    CHECK(s.converged);
    CHECK(classify(s) == Regime::Periodic);
    CHECK(s.sum() == doctest::Approx(s.trace_average).epsilon(1e-3));
}

TEST_CASE("analyze") {
    const IntegratorConfig cfg;

    SUBCASE("undriven pair relaxes to a period-1 synchronous point") {
        const Model m(params(0.0, 21, 1.0));
        const AttractorRecord rec = analyze({1.1, 0.0, 1.1, 0.0, 0.0}, m, cfg, quick(50, 400));
        CHECK(!rec.failed);
        CHECK(rec.classified());
        CHECK(rec.cls.regime == Regime::Periodic);
        CHECK(rec.cls.synchrony == Synchrony::Synchronous);
        CHECK(rec.period == 1);
        CHECK(rec.poincare.count() == 100);
        CHECK(rec.point.eps == 1.0);
        CHECK(rec.spectrum.transient_periods == 50);
        CHECK(rec.spectrum.measure_periods == 400);
    }

    SUBCASE("synchrony is not applicable for unequal bubbles") {
        const Model m(params(0.0, 21, 0.9));
        const AttractorRecord rec = analyze({1.0, 0.0, 0.9, 0.0, 0.0}, m, cfg, quick(10, 300));
        CHECK(rec.cls.synchrony == Synchrony::NotApplicable);
    }

    SUBCASE("breakdown becomes a failed record") {
        const Model m(params(1.2e6, 21, 1.0));
        const AttractorRecord rec = analyze({0.005, 0.0, 1.0, 0.0, 0.0}, m, cfg, quick(10, 10));
        CHECK(rec.failed);
        CHECK(!rec.classified());
        CHECK(rec.diagnostic.find("breakdown") != std::string::npos);
    }

    SUBCASE("results are bitwise reproducible") {
        const Model m(params(1.52e6, 17.5, 1.024));
        const State x0{1.09, -0.47, 0.77, 0.49, 0.0};
        const AttractorRecord a = analyze(x0, m, cfg, quick(20, 40));
        const AttractorRecord b = analyze(x0, m, cfg, quick(20, 40));
        CHECK(a.spectrum.exponents == b.spectrum.exponents);
        CHECK(a.final == b.final);
        CHECK(a.poincare.samples == b.poincare.samples);
    }

    SUBCASE("invalid analysis settings are rejected") {
        AnalysisConfig a;
        a.run.measure_periods = 0;
        CHECK_THROWS_AS(validate(a), InvalidParameters);
        a = AnalysisConfig{};
        a.lambda_tr = -1;
        CHECK_THROWS_AS(validate(a), InvalidParameters);
    }
}
