#pragma once

#include "rfcsim/machine.hpp"
#include "rfcsim/network.hpp"

#include <string>
#include <vector>

namespace rfcsim {

enum class EventKind { FaultOn, FaultOff, LoadOn, LoadOff };

/// Timed topology change. FaultOff/LoadOff remove the matching active shunt.
struct Event {
    double time = 0.0;
    EventKind kind = EventKind::FaultOn;
    std::string bus;
    Complex admittance{0.0, 0.0};

    friend bool operator==(const Event&, const Event&) = default;
};

/// Full study description.
struct Scenario {
    std::string name = "scenario";
    double u_base_50_kv = 6.3;  ///< reported only; the 50 Hz side is an infinite bus
    RailGrid grid;
    std::vector<RfcUnit> rfcs;
    std::vector<Event> events;
    double t_end = 20.0;
    double dt = 1e-3;
    int output_stride = 1;

    double s_base() const { return grid.s_base_mva; }

    /// Throws ParameterError / ScenarioError on any violated precondition,
    /// including event times that are not integer multiples of dt.
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Number of dt steps to reach `t`; throws if `t` is off the integration grid.
long long steps_for(double t, double dt);

}  // namespace rfcsim
