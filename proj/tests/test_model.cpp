#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "bubblepair/error.hpp"
#include "bubblepair/integrator.hpp"
#include "bubblepair/model.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace bubblepair;

namespace {

PhysicalParams params(double pac, double d_ratio, double eps) {
    PhysicalParams p;
    p.p_ac = pac;
    p.eps = eps;
    p.set_d_ratio(d_ratio);
    return p;
}

State random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> r(0.4, 2.2), u(-1.5, 1.5), th(0.0, kTwoPi);
    return {r(rng), u(rng), r(rng), u(rng), th(rng)};
}

double norm(const Deriv& f) {
    const auto a = f.to_array();
    double s = 0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("derive_scales matches the high-precision reference") {
    const PhysicalParams p;
    const DerivedScales s = derive_scales(p);
    // Reference values from tests/oracles/reference_values.py.
    CHECK(s.p0 == doctest::Approx(98995.0).epsilon(1e-15));
    CHECK(s.omega0 == doctest::Approx(19806006.189861977).epsilon(1e-14));
    CHECK(s.omega_nd == doctest::Approx(1.4490553887987048).epsilon(1e-14));
    CHECK(s.t_drive == doctest::Approx(2.0 * std::numbers::pi / 2.87e7).epsilon(1e-15));
    CHECK(s.d_ratio == doctest::Approx(21.0).epsilon(1e-15));
}

TEST_CASE("derive_scales without surface tension and shell keeps only the gas term") {
    PhysicalParams p;
    p.sigma = 1e-300;
    p.chi = 1e-300;
    const DerivedScales s = derive_scales(p);
    const double expected = std::sqrt(3.0 * p.gamma * s.p0 / (p.rho * p.r10 * p.r10));
    CHECK(s.omega0 == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
    PhysicalParams p;
    CHECK_NOTHROW(validate(p));
    p.eps = -0.5;
    CHECK_THROWS_AS(validate(p), InvalidParameters);
    p = PhysicalParams{};
    p.set_d_ratio(1.9);  // overlaps for eps = 1
    CHECK_THROWS_AS(validate(p), InvalidParameters);
    CHECK_THROWS_AS(Model{p}, InvalidParameters);
    p = PhysicalParams{};
    p.p_v = p.p_stat + 1.0;
    CHECK_THROWS_AS(validate(p), InvalidParameters);
}

TEST_CASE("shell_pressure") {
    SUBCASE("vanishes at each bubble's own equilibrium when undriven") {
        for (double eps : {0.9, 0.97, 1.0, 1.03, 1.2}) {
            const Model m(params(0.0, 21, eps));
            CHECK(std::abs(m.shell_pressure(1.0, 0.0, 1, 0.7)) < 1e-13);
            CHECK(std::abs(m.shell_pressure(eps, 0.0, 2, 0.7)) < 1e-13);
        }
    }
    SUBCASE("drive term is silent at theta = 0") {
        const Model driven(params(1.2e6, 21, 1.0));
        const Model quiet(params(0.0, 21, 1.0));
        CHECK(driven.shell_pressure(0.9, 0.1, 1, 0.0) == quiet.shell_pressure(0.9, 0.1, 1, 0.0));
    }
    SUBCASE("interior point matches the SI reference") {
        const Model m(params(1.2e6, 21, 1.0));
        CHECK(m.shell_pressure(0.9, 0.1, 1, 0.0) == doctest::Approx(0.10386639310375516).epsilon(1e-12));
        CHECK(m.shell_pressure(0.9, 0.1, 1, 1.0) == doctest::Approx(-0.76623462493049066).epsilon(1e-12));
    }
    SUBCASE("non-positive radius is a domain error") {
        const Model m(params(1.2e6, 21, 1.0));
        CHECK_THROWS_AS(m.shell_pressure(0.0, 0.0, 1, 0.0), DomainError);
        CHECK_THROWS_AS(m.shell_pressure(-0.1, 0.0, 2, 0.0), DomainError);
    }
}

TEST_CASE("acceleration") {
    SUBCASE("undriven equilibrium") {
        const Model m(params(0.0, 21, 1.0));
        const Accelerations a = m.acceleration({1, 0, 1, 0, 1.3});
        CHECK(a.a1 == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(std::abs(a.a1) < 1e-13);
        CHECK(std::abs(a.a2) < 1e-13);
    }
    SUBCASE("symmetric states give equal accelerations at eps = 1") {
        const Model m(params(1.2e6, 21, 1.0));
        std::mt19937_64 rng(3);
        for (int k = 0; k < 100; ++k) {
            State x = random_state(rng);
            x.r2 = x.r1;
            x.u2 = x.u1;
            const Accelerations a = m.acceleration(x);
            CHECK(a.a1 == a.a2);
        }
    }
    SUBCASE("asymmetric state matches the SI root-finding reference") {
        const State x{1.05, 0.2, 0.95, -0.1, std::numbers::pi / 3};
        const Accelerations a = Model(params(1.2e6, 21, 1.0)).acceleration(x);
        CHECK(a.a1 == doctest::Approx(-0.97512488908572259).epsilon(1e-11));
        CHECK(a.a2 == doctest::Approx(-0.83817962297957369).epsilon(1e-11));
        const Accelerations b = Model(params(1.2e6, 21, 1.03)).acceleration(x);
        CHECK(b.a1 == doctest::Approx(-0.97660116747478632).epsilon(1e-11));
        CHECK(b.a2 == doctest::Approx(-0.80214784273789794).epsilon(1e-11));
    }
    SUBCASE("back-substitution residual is tiny") {
        std::mt19937_64 rng(11);
        for (double eps : {0.95, 1.0, 1.05}) {
            const PhysicalParams p = params(1.5e6, 15, eps);
            const Model m(p);
            for (int k = 0; k < 200; ++k) {
                const State x = random_state(rng);
                const Accelerations a = m.acceleration(x);
                const oracle::Residual res = oracle::residual(p, x, a.a1, a.a2);
                CHECK(std::abs(res.value[0]) <= 1e-10 * res.scale[0]);
                CHECK(std::abs(res.value[1]) <= 1e-10 * res.scale[1]);
            }
        }
    }
    SUBCASE("near-sonic wall velocity makes the system singular") {
        const Model m(params(1.2e6, 21, 1.0));
        const double c = m.sound_speed();
        // With equal bubbles the diagonal entries equal the coupling r^2/d here.
        const WallCoefficients& w = m.wall(1);
        const double r = 1.0;
        const double k = (w.viscous / r + w.shell_visc / (r * r)) / c;
        const double u_sing = c * (r + k - r * r / m.scales().d_ratio) / r;
        State x{r, u_sing, r, u_sing, 0.0};
        CHECK_THROWS_AS(m.acceleration(x), ModelBreakdown);
        CHECK_THROWS_AS(m.acceleration({-1.0, 0, 1, 0, 0}), ModelBreakdown);
    }
}

TEST_CASE("vector_field") {
    SUBCASE("static balance for every eps") {
        for (double eps : {0.5, 0.97, 1.0, 1.03, 1.7}) {
            const Model m(params(0.0, 21, eps));
            const Deriv f = m.vector_field({1.0, 0.0, eps, 0.0, 2.0});
            CHECK(std::abs(f.dr1) <= 1e-12);
            CHECK(std::abs(f.du1) <= 1e-12);
            CHECK(std::abs(f.dr2) <= 1e-12);
            CHECK(std::abs(f.du2) <= 1e-12);
            CHECK(f.dtheta == m.scales().omega_nd);
        }
    }
    SUBCASE("swap equivariance at eps = 1") {
        const Model m(params(1.2e6, 21, 1.0));
        std::mt19937_64 rng(5);
        for (int k = 0; k < 1000; ++k) {
            const State x = random_state(rng);
            const Deriv a = m.vector_field(swap(x));
            const Deriv b = swap(m.vector_field(x));
            const Deriv diff{a.dr1 - b.dr1, a.du1 - b.du1, a.dr2 - b.dr2, a.du2 - b.du2, a.dtheta - b.dtheta};
            CHECK(norm(diff) <= 1e-12 * norm(m.vector_field(x)));
        }
    }
    SUBCASE("embeds the reference accelerations") {
        const State x{1.05, 0.2, 0.95, -0.1, std::numbers::pi / 3};
        const Model m(params(1.2e6, 21, 1.0));
        const Deriv f = m.vector_field(x);
        CHECK(f.dr1 == 0.2);
        CHECK(f.dr2 == -0.1);
        CHECK(f.du1 == doctest::Approx(-0.97512488908572259).epsilon(1e-11));
        CHECK(f.du2 == doctest::Approx(-0.83817962297957369).epsilon(1e-11));
    }
}

TEST_CASE("jacobian") {
    const Model m(params(1.2e6, 21, 1.03));
    std::mt19937_64 rng(9);

    SUBCASE("theta row is zero") {
        for (int k = 0; k < 20; ++k) {
            const Jacobian j = m.jacobian(random_state(rng));
            for (double v : j[4]) CHECK(v == 0.0);
        }
    }

    SUBCASE("theta column carries the drive derivative") {
        const State x{1.1, 0.3, 0.9, -0.2, 0.4};
        const Jacobian j = m.jacobian(x);
        CHECK(j[0][4] == 0.0);
        CHECK(j[2][4] == 0.0);
        CHECK(std::abs(j[1][4]) > 0.0);
        CHECK(std::abs(j[3][4]) > 0.0);
    }

    SUBCASE("directional derivatives converge at second order") {
        std::normal_distribution<double> g;
        for (int k = 0; k < 10; ++k) {
            const State x = random_state(rng);
            std::array<double, 5> v{g(rng), g(rng), g(rng), g(rng), g(rng)};
            double vn = 0;
            for (double e : v) vn += e * e;
            for (double& e : v) e /= std::sqrt(vn);
            const Jacobian jac = m.jacobian(x, 1e-7);
            std::array<double, 5> jv{};
            for (int r = 0; r < 5; ++r)
                for (int c = 0; c < 5; ++c) jv[r] += jac[r][c] * v[c];
            auto fd_error = [&](double h) {
                auto shifted = [&](double s) {
                    auto a = x.to_array();
                    for (int i = 0; i < 5; ++i) a[i] += s * v[i];
                    return m.vector_field(State::from_array(a)).to_array();
                };
                const auto fp = shifted(h), fm = shifted(-h);
                double e = 0;
                for (int i = 0; i < 5; ++i) e = std::max(e, std::abs((fp[i] - fm[i]) / (2 * h) - jv[i]));
                return e;
            };
            const double e1 = fd_error(4e-3), e2 = fd_error(2e-3);
            CHECK(e1 < 1e-2);
            const double order = std::log2(e1 / e2);
            CHECK(order == doctest::Approx(2.0).epsilon(0.15));
        }
    }

    SUBCASE("undriven equilibrium is a stable focus") {
        const Model quiet(params(0.0, 21, 1.0));
        const Jacobian jac = quiet.jacobian({1, 0, 1, 0, 0});
        Eigen::Matrix4d a;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) a(r, c) = jac[r][c];
        const Eigen::Vector4cd ev = a.eigenvalues();
        for (int i = 0; i < 4; ++i) CHECK(ev[i].real() < 0.0);
    }
}

TEST_CASE("swap and sync_deviation") {
    const State x{1.1, 0.2, 0.7, -0.3, 1.5};
    CHECK(swap(x) == State{0.7, -0.3, 1.1, 0.2, 1.5});
    CHECK(swap(swap(x)) == x);
    const State on{0.8, 0.4, 0.8, 0.4, 2.0};
    CHECK(swap(on) == on);
    CHECK(!(swap(x) == x));
    CHECK(sync_deviation(on) == 0.0);
    CHECK(sync_deviation({1.1, 0, 1.0, 0, 0.3}) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(sync_deviation(swap(x)) == sync_deviation(x));
}

TEST_CASE("wrap_phase") {
    CHECK(wrap_phase(0.0) == 0.0);
    CHECK(wrap_phase(kTwoPi) == 0.0);
    CHECK(wrap_phase(-0.5) == doctest::Approx(kTwoPi - 0.5));
    CHECK(wrap_phase(7.0) == doctest::Approx(7.0 - kTwoPi));
}

TEST_CASE("synchronization manifold is invariant for 100 periods") {
    const Model m(params(1.2e6, 21, 1.0));
    Trajectory traj(m, {1.2, 0.1, 1.2, 0.1, 0.0}, IntegratorConfig{});
    for (int k = 0; k < 100; ++k) {
        traj.advance_periods(1);
        CHECK(sync_deviation(traj.state()) <= 1e-12);
    }
}
