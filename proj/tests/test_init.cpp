#include "fixtures.hpp"

#include "rfcsim/errors.hpp"
#include "rfcsim/init.hpp"
#include "rfcsim/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rfcsim;

namespace {

double max_derivative(const Scenario& s, const SteadyState& ss)
{
    const SystemModel model(s, ss);
    const NetworkSolver net(model.network_matrix({}));
    const auto ev = model.derivative_stack(model.initial_state(), net);
    return fixtures::max_abs(ev.derivatives);
}

}  // namespace

TEST_CASE("load angle")
{
    CHECK(load_angle(0.5, 0.0, 0.0, 1.0) == 0.0);
    CHECK(load_angle(0.5, 0.4, 0.0, 1.0) == doctest::Approx(std::atan(0.2)));
    CHECK(load_angle(0.5, 0.4, 0.0, 1.0) == doctest::Approx(0.19740).epsilon(1e-4));
    for (double p : {0.1, 0.3, 0.8, 1.2})
        CHECK(load_angle(0.57, -p, 0.0, 1.0) == doctest::Approx(-load_angle(0.57, p, 0.0, 1.0)));
}

TEST_CASE("phase shift")
{
    CHECK(phase_shift({0.5, 0.0, 0.0, 1.0}, {0.5, 0.0, 0.0, 1.0}) == 0.0);

    const double xq_m = 0.569 * 10.0 / 10.7;
    const double xq_g = 0.572;
    const double oracle = std::atan(0.569 * 0.5 * (10.0 / 10.7)) / 3.0 + std::atan(0.572 * 0.5);
    CHECK(phase_shift({xq_m, -0.5, 0.0, 1.0}, {xq_g, 0.5, 0.0, 1.0}) == doctest::Approx(oracle));
}

TEST_CASE("no-load initialization of case1")
{
    const auto s = builtin_scenario("case1");
    const auto ss = initialize(s);
    REQUIRE(ss.rfcs.size() == 1);
    const auto& r = ss.rfcs[0];
    CHECK(r.state.omega_pu == 1.0);
    CHECK(std::abs(r.generator.p) < 1e-12);
    CHECK(std::abs(r.generator.q) < 1e-12);
    CHECK(std::abs(r.motor.p) < 1e-12);
    CHECK(std::abs(r.motor.q) < 1e-12);
    CHECK(ss.bus_voltages[0].abs() == doctest::Approx(s.rfcs[0].exciter.u0));

    for (const auto* e : {&r.state.motor, &r.state.generator}) {
        CHECK(e->ed_st == doctest::Approx(0.0).scale(1.0));
        CHECK(e->eq_t == doctest::Approx(1.0));
        CHECK(e->eq_st == doctest::Approx(1.0));
    }
    CHECK(r.state.exciter.e_f == doctest::Approx(1.0));
    CHECK(r.e_f_motor == doctest::Approx(1.0));
    CHECK(max_derivative(s, ss) < 1e-8);
}

TEST_CASE("loaded initial states are equilibria")
{
    for (const auto& s : {fixtures::single_fed_load(), fixtures::symmetric_double_feed(), fixtures::shared_station(),
                          builtin_scenario("case2")}) {
        CAPTURE(s.name);
        const auto ss = initialize(s);
        CHECK(ss.residual < 1e-10);
        CHECK(max_derivative(s, ss) < 1e-8);
        for (const auto& r : ss.rfcs) {
            CHECK(r.motor.p == doctest::Approx(-r.generator.p).epsilon(1e-12).scale(1.0));
            CHECK(std::abs(r.motor.q) < 1e-10);
        }
    }
}

TEST_CASE("loaded operating point quantities")
{
    const auto s = fixtures::single_fed_load();
    const auto ss = initialize(s);
    const auto& r = ss.rfcs[0];
    CHECK(r.generator.p > 0.0);
    CHECK(r.generator.q > 0.0);
    CHECK(r.motor.p < 0.0);

    // Droop law on the generator rating.
    const auto& ex = s.rfcs[0].exciter;
    const double q_rated = r.generator.q * s.s_base() / s.rfcs[0].generator.s_rated;
    CHECK(ss.bus_voltages[0].abs() == doctest::Approx(ex.u0 - ex.k_u * q_rated).epsilon(1e-10));

    // Collapsed d-axis relation with the merged, equalized reactances.
    const auto g = prepare_machine(s.rfcs[0].generator, s.s_base());
    CHECK(r.state.generator.ed_st ==
          doctest::Approx(-r.generator.current.q() * (g.xq - g.xq_st)).epsilon(1e-10).scale(1.0));

    // Field voltage holds both the field equation and the exciter equilibrium.
    CHECK(r.state.exciter.e_f == doctest::Approx(r.generator.e_f));
    CHECK(r.state.exciter.v_r == doctest::Approx(ex.k_e * r.state.exciter.e_f));
}

TEST_CASE("angle identity at the load-flow point")
{
    for (const auto& s : {fixtures::single_fed_load(), fixtures::symmetric_double_feed()}) {
        const auto ss = initialize(s);
        for (std::size_t k = 0; k < s.rfcs.size(); ++k) {
            const auto& r = ss.rfcs[k];
            const auto m = prepare_machine(s.rfcs[k].motor, s.s_base());
            const auto g = prepare_machine(s.rfcs[k].generator, s.s_base());
            const double psi = phase_shift({m.xq, r.motor.p, r.motor.q, 1.0},
                                           {g.xq, r.generator.p, r.generator.q,
                                            ss.bus_voltages[s.grid.index_of(s.rfcs[k].gen_bus)].abs()});
            const auto u = ss.bus_voltages[s.grid.index_of(s.rfcs[k].gen_bus)];
            const double measured = std::atan2(u.im(), u.re());
            const double theta_50 = 0.0;
            CHECK(std::abs(measured - (theta_50 / 3.0 - psi)) < 1e-6);
            CHECK(r.psi == doctest::Approx(psi).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("droop shares reactive power")
{
    const auto s = fixtures::symmetric_double_feed();
    const auto ss = initialize(s);
    CHECK(std::abs(ss.rfcs[0].generator.q - ss.rfcs[1].generator.q) < 1e-6);
    CHECK(ss.rfcs[0].generator.q > 0.0);

    const auto st = initialize(fixtures::shared_station());
    CHECK(std::abs(st.rfcs[0].generator.q - st.rfcs[1].generator.q) < 1e-6);
    CHECK(std::abs(st.rfcs[0].generator.p - st.rfcs[1].generator.p) < 1e-6);
}

TEST_CASE("raising U0 raises the settled voltage")
{
    auto s = builtin_scenario("case1");
    double previous = 0.0;
    for (double u0 : {0.96, 1.0, 1.03, 1.05}) {
        for (auto& u : s.rfcs)
            u.exciter.u0 = u0;
        const auto ss = initialize(s);
        CHECK(ss.bus_voltages[0].abs() > previous);
        previous = ss.bus_voltages[0].abs();
    }
}

TEST_CASE("overload makes initialization fail")
{
    auto s = fixtures::single_fed_load();
    s.grid.loads = {{"G1", {5.0, -5.0}}};
    CHECK_THROWS_AS(initialize(s), InitError);
}

TEST_CASE("init report names every converter")
{
    const auto s = builtin_scenario("case2");
    const auto text = format_init_report(s, initialize(s));
    CHECK(text.find("RFC1") != std::string::npos);
    CHECK(text.find("RFC2") != std::string::npos);
}
