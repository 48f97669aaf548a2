#include "rfcsim/scenario.hpp"

#include "rfcsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rfcsim {

long long steps_for(double t, double dt)
{
    const double k = t / dt;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-6)
        throw ScenarioError("time " + std::to_string(t) + " s is not a multiple of dt = " +
                            std::to_string(dt) + " s");
    return static_cast<long long>(r);
}

void Scenario::validate() const
{
    if (!(dt > 0.0))
        throw ScenarioError("dt must be positive");
    if (!(t_end > 0.0))
        throw ScenarioError("t_end must be positive");
    if (output_stride < 1)
        throw ScenarioError("output_stride must be >= 1");
    steps_for(t_end, dt);
    grid.validate();
    if (rfcs.empty())
        throw ScenarioError("scenario has no RFC");

    std::set<std::string> names;
    for (const auto& u : rfcs) {
        u.validate();
        grid.index_of(u.gen_bus);
        if (!names.insert(u.name).second)
            throw ScenarioError("duplicate RFC name '" + u.name + "'");
    }

    double last = 0.0;
    std::multiset<std::pair<std::string, std::pair<double, double>>> loads;
    std::set<std::string> faults;
    for (const auto& e : events) {
        if (e.time < last)
            throw ScenarioError("events are not sorted by time");
        if (e.time < 0.0)
            throw ScenarioError("event at " + std::to_string(e.time) + " s lies before the start");
        steps_for(e.time, dt);
        grid.index_of(e.bus);
        last = e.time;
        const auto key = std::make_pair(e.bus, std::make_pair(e.admittance.real(), e.admittance.imag()));
        switch (e.kind) {
        case EventKind::FaultOn:
            if (!faults.insert(e.bus).second)
                throw ScenarioError("fault already active at bus '" + e.bus + "'");
            break;
        case EventKind::FaultOff:
            if (faults.erase(e.bus) == 0)
                throw ScenarioError("fault_off without an active fault at bus '" + e.bus + "'");
            break;
        case EventKind::LoadOn:
            loads.insert(key);
            break;
        case EventKind::LoadOff: {
            const auto it = loads.find(key);
            if (it == loads.end())
                throw ScenarioError("load_off does not match a switched-in load at bus '" + e.bus + "'");
            loads.erase(it);
            break;
        }
        }
    }
}

}  // namespace rfcsim
