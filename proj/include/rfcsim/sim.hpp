#pragma once

#include "rfcsim/init.hpp"
#include "rfcsim/machine.hpp"
#include "rfcsim/network.hpp"
#include "rfcsim/scenario.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rfcsim {

/// delta_m, omega_pu, 3 motor emfs, 3 generator emfs, 4 exciter states.
inline constexpr std::size_t kStatesPerRfc = 12;

void pack_state(const RfcState& s, std::span<double> out);
RfcState unpack_state(std::span<const double> in);

/// Per-unit model data of one converter as used during integration.
struct RfcModel {
    std::string name;
    MachineParams motor;      ///< system base, transformer merged, X''_q = X''_d
    MachineParams generator;  ///< same
    ShaftParams shaft;
    std::size_t bus = 0;
    ExciterParams exciter;
    double q_scale = 1.0;  ///< system-base Q to generator-rating Q
    double e_f_motor = 0.0;
    double v_ref_bias = 0.0;
};

/// Algebraic quantities of one converter at one instant.
struct RfcSignals {
    MachineTerminal generator;
    MachineTerminal motor;
    double p_g = 0.0;
    double q_g = 0.0;
    double p_m = 0.0;
    double q_m = 0.0;
    double u_g = 0.0;
    double v_ref = 0.0;
};

struct StackEval {
    std::vector<double> derivatives;
    std::vector<RailPhasor> injections;
    std::vector<RailPhasor> voltages;
    std::vector<RfcSignals> rfcs;
};

/// Shunts switched in on top of the base grid.
struct Topology {
    std::vector<IndexedShunt> loads;
    std::vector<IndexedShunt> faults;
};

/// Immutable per-scenario model: converter data plus the branch-only Ybus.
class SystemModel {
public:
    SystemModel(const Scenario& s, const SteadyState& init);

    /// Norton injections -> network solve -> machine currents and powers ->
    /// field/damper, swing and exciter derivatives. Pure in (x, solver).
    /// `limited` false disables the regulator limits (used up to a limit crossing).
    StackEval derivative_stack(std::span<const double> x, const NetworkSolver& net, bool limited = true) const;

    /// Base Ybus + generator shunts + active loads + active faults.
    AdmittanceMatrix network_matrix(const Topology& t) const;

    std::vector<double> initial_state() const { return x0_; }
    const std::vector<RfcModel>& rfcs() const { return rfcs_; }
    const RailGrid& grid() const { return grid_; }

private:
    RailGrid grid_;
    std::vector<RfcModel> rfcs_;
    AdmittanceMatrix ybus_;
    std::vector<double> x0_;
};

using StateVector = std::vector<double>;
using Rhs = std::function<StateVector(double, std::span<const double>)>;

/// Classical four-stage Runge-Kutta step. `k1` may be supplied if already known.
StateVector rk4_step(const Rhs& f, std::span<const double> x, double t, double dt,
                     const StateVector* k1 = nullptr);

/// Uniformly sampled named channels.
class TimeSeries {
public:
    TimeSeries() = default;
    explicit TimeSeries(std::vector<std::string> names);

    void append(double t, std::span<const double> row);

    const std::vector<double>& time() const { return time_; }
    const std::vector<double>& channel(std::string_view name) const;
    bool has(std::string_view name) const;
    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return time_.size(); }
    /// Spacing between samples; 0 for fewer than two samples.
    double interval() const;

    void write_csv(std::ostream& os) const;

private:
    std::vector<std::string> names_;
    std::vector<double> time_;
    std::vector<std::vector<double>> data_;
};

/// Channel name helpers so callers and tests agree on the CSV header.
std::string channel_name(std::string_view rfc, std::string_view quantity);
std::string relative_speed_channel(std::size_t i, std::size_t j);
std::string relative_power_channel(std::size_t i, std::size_t j);
std::string bus_voltage_channel(std::string_view bus);
std::string bus_angle_channel(std::string_view bus);

struct StepInfo {
    double t = 0.0;
    const StackEval& eval;
    const NetworkSolver& net;
    const Topology& topology;
};

struct RunOptions {
    /// Called for every integration step (not only logged samples).
    std::function<void(const StepInfo&)> observer;
    /// Use this initial operating point instead of computing one.
    std::optional<SteadyState> init;
};

struct RunResult {
    TimeSeries series;
    SteadyState init;
    std::optional<std::string> error;  ///< set when integration aborted
    std::vector<double> final_state;
};

/// Initialize, integrate to t_end with events applied at their exact step,
/// and log every output_stride steps. Init errors propagate as exceptions;
/// integration failures return the partial series with `error` set.
RunResult run(const Scenario& s, const RunOptions& opts = {});

}  // namespace rfcsim
