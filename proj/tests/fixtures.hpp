#pragma once

#include "rfcsim/scenario.hpp"
#include "rfcsim/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace fixtures {

/// One converter feeding a lumped load at the far end.
inline rfcsim::Scenario single_fed_load()
{
    auto s = rfcsim::builtin_scenario("case1");
    s.name = "single_load";
    s.grid.loads = {{"E", {0.45, -0.2}}};
    s.events.clear();
    return s;
}

/// Two identical converters feeding a load midway between them.
inline rfcsim::Scenario symmetric_double_feed()
{
    rfcsim::Scenario s;
    s.name = "double_feed";
    s.grid.buses = {"G1", "M", "G2"};
    s.grid.branches = {{"G1", "M", 0.2, 0.2, 50.0}, {"M", "G2", 0.2, 0.2, 50.0}};
    s.grid.loads = {{"M", {0.8, -0.4}}};
    s.rfcs = {rfcsim::q48_q49_unit("RFC1", "G1"), rfcsim::q48_q49_unit("RFC2", "G2")};
    return s;
}

/// Two converters in one station sharing a local load.
inline rfcsim::Scenario shared_station()
{
    rfcsim::Scenario s;
    s.name = "station";
    s.grid.buses = {"S", "L"};
    s.grid.branches = {{"S", "L", 0.2, 0.2, 20.0}};
    s.grid.loads = {{"L", {0.9, -0.3}}};
    s.rfcs = {rfcsim::q48_q49_unit("RFC1", "S"), rfcsim::q48_q49_unit("RFC2", "S")};
    return s;
}

inline double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

}  // namespace fixtures
