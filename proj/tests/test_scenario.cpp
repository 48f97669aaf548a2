#include "rfcsim/errors.hpp"
#include "rfcsim/scenario_io.hpp"

#include <doctest.h>

#include <sstream>

using namespace rfcsim;

TEST_CASE("builtin case1")
{
    const auto s = builtin_scenario("case1");
    CHECK(s.rfcs.size() == 1);
    CHECK(s.rfcs[0].gen_bus == "G1");
    REQUIRE(s.events.size() == 2);
    CHECK(s.events[0].kind == EventKind::FaultOn);
    CHECK(s.events[0].time == 1.8);
    CHECK(s.events[0].bus == "F");
    CHECK(s.events[0].admittance == Complex(1e6, 0.0));
    CHECK(s.events[1].kind == EventKind::FaultOff);
    CHECK(s.events[1].time == 2.0);
    CHECK(s.grid.branches[0].length_km == 10.0);
    CHECK(s.grid.branches[0].from == "G1");
    CHECK(s.t_end == 20.0);
    CHECK(s.dt == 1e-3);
    CHECK(s.grid.loads.empty());
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("builtin case2")
{
    const auto s = builtin_scenario("case2");
    REQUIRE(s.rfcs.size() == 2);
    CHECK(s.rfcs[0].gen_bus == "G1");
    CHECK(s.rfcs[1].gen_bus == "G2");
    double total = 0.0;
    for (const auto& b : s.grid.branches)
        total += b.length_km;
    CHECK(total == 100.0);
    CHECK(s.events == builtin_scenario("case1").events);

    BuiltinOptions o;
    o.line_length_km = 50.0;
    CHECK(builtin_scenario("case2", o).grid.branches[1].length_km == 40.0);
    o.fault_distance_km = 60.0;
    CHECK_THROWS_AS(builtin_scenario("case2", o), ScenarioError);
    CHECK_THROWS_AS(builtin_scenario("case3"), ScenarioError);
}

TEST_CASE("serialize and parse round trip")
{
    for (const char* name : {"case1", "case2"}) {
        auto s = builtin_scenario(name);
        s.grid.loads = {{"F", {0.1, -0.05}}};
        s.events.insert(s.events.begin(), {0.5, EventKind::LoadOn, "G1", {0.2, -0.1}});
        s.events.push_back({3.0, EventKind::LoadOff, "G1", {0.2, -0.1}});
        s.rfcs[0].exciter.k_a = 250.0;
        s.rfcs[0].motor.tqo_st = 0.1 / 3.0;
        const auto text = serialize_scenario(s);
        std::istringstream in(text);
        const auto back = parse_scenario(in);
        CHECK(back == s);
        CHECK(serialize_scenario(back) == text);
    }
}

TEST_CASE("parser fills nameplate defaults")
{
    std::istringstream in(R"(# minimal file
[scenario]
name = mini
t_end = 2

[grid]
bus = A
bus = B
branch = A B 0.2 0.2 30

[rfc U1]
gen_bus = A
exciter.k_u = 0.05

[events]
fault_on = 1.0 B 1e6 0
fault_off = 1.2 B
)");
    const auto s = parse_scenario(in);
    CHECK(s.name == "mini");
    CHECK(s.t_end == 2.0);
    REQUIRE(s.rfcs.size() == 1);
    CHECK(s.rfcs[0].motor == q48_motor());
    CHECK(s.rfcs[0].exciter.k_u == 0.05);
    CHECK(s.rfcs[0].exciter.k_a == 100.0);
    CHECK(s.events.size() == 2);
}

TEST_CASE("schema errors carry the line number")
{
    auto line_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            parse_scenario(in);
        } catch (const ScenarioError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("[scenario]\nname = x\nbogus = 1\n") == 3);
    CHECK(line_of("[scenario]\ndt = fast\n") == 2);
    CHECK(line_of("[grid]\nbus = A\nbranch = A B 0.2\n") == 3);
    CHECK(line_of("[nonsense]\n") == 1);
    CHECK(line_of("dt = 1\n") == 1);
    CHECK(line_of("[rfc A]\nmotor.xz = 1\n") == 2);
    CHECK(line_of("[rfc A]\n[rfc A]\n") == 2);
    CHECK(line_of("[events]\nfault_on = 1.0 F\n") == 2);
    CHECK(line_of("[scenario\n") == 1);
}

TEST_CASE("validation errors from parsed files")
{
    std::istringstream in("[scenario]\ndt = 0\n[grid]\nbus = A\n");
    CHECK_THROWS_AS(parse_scenario(in), ScenarioError);

    auto s = builtin_scenario("case1");
    s.events[0].time = 1.8005;
    CHECK_THROWS_AS(s.validate(), ScenarioError);
    s = builtin_scenario("case1");
    std::swap(s.events[0], s.events[1]);
    CHECK_THROWS_AS(s.validate(), ScenarioError);
    s = builtin_scenario("case1");
    s.events[1].bus = "G1";
    CHECK_THROWS_AS(s.validate(), ScenarioError);
    s = builtin_scenario("case1");
    s.rfcs[0].gen_bus = "nowhere";
    CHECK_THROWS(s.validate());
}

TEST_CASE("overrides")
{
    auto s = builtin_scenario("case2");
    apply_override(s, "K_U", "0.08");
    apply_override(s, "U_0", "1.02");
    apply_override(s, "dt", "0.0005");
    apply_override(s, "exciter.t_e", "0.5");
    apply_override(s, "RFC2.h_motor", "2.0");
    apply_override(s, "RFC1.generator.tdo_t", "9.0");
    apply_override(s, "fault_admittance", "1e4");
    for (const auto& u : s.rfcs) {
        CHECK(u.exciter.k_u == 0.08);
        CHECK(u.exciter.u0 == 1.02);
        CHECK(u.exciter.t_e == 0.5);
    }
    CHECK(s.dt == 0.0005);
    CHECK(s.rfcs[1].h_motor == 2.0);
    CHECK(s.rfcs[0].h_motor == 1.06);
    CHECK(s.rfcs[0].generator.tdo_t == 9.0);
    CHECK(s.events[0].admittance == Complex(1e4, 0.0));

    CHECK_THROWS_AS(apply_override(s, "nope", "1"), ScenarioError);
    CHECK_THROWS_AS(apply_override(s, "dt", "abc"), ScenarioError);
    CHECK_THROWS_AS(apply_override(s, "RFC3.h_motor", "1"), ScenarioError);

    BuiltinOptions o;
    CHECK(apply_builtin_override(o, "line_length", "60"));
    CHECK(o.line_length_km == 60.0);
    CHECK_FALSE(apply_builtin_override(o, "K_U", "0.1"));
}

TEST_CASE("step grid")
{
    CHECK(steps_for(1.8, 1e-3) == 1800);
    CHECK(steps_for(20.0, 1e-3) == 20000);
    CHECK_THROWS_AS(steps_for(1.0005, 1e-3), ScenarioError);
}
