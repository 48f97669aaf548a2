#pragma once

#include "rfcsim/machine.hpp"
#include "rfcsim/network.hpp"
#include "rfcsim/scenario.hpp"

#include <string>
#include <vector>

namespace rfcsim {

/// Salient-pole load angle atan2(Xq P, U^2 + Xq Q) for generated P, Q.
/// Returns 0 when both numerator and denominator vanish.
double load_angle(double xq, double p, double q, double u_mag);

/// Generated powers, terminal voltage and merged Xq of one machine.
struct LoadAngleTerms {
    double xq = 0.0;
    double p = 0.0;
    double q = 0.0;
    double u_mag = 1.0;
};

/// Railway-frame voltage angle drop across one converter:
/// (1/3) atan2(-Xq_m P_m, U_m^2 - Xq_m Q_m) + atan2(Xq_g P_g, U_g^2 + Xq_g Q_g).
double phase_shift(const LoadAngleTerms& motor, const LoadAngleTerms& generator);

/// Operating point of one machine at the load-flow solution.
struct MachinePoint {
    double p = 0.0;
    double q = 0.0;
    double load_angle = 0.0;
    RotorPhasor voltage;
    RotorPhasor current;
    double e_f = 0.0;
};

struct RfcSteadyState {
    RfcState state;
    double e_f_motor = 0.0;
    /// Offset added to the droop reference so the proportional regulator holds
    /// the load-flow voltage exactly.
    double v_ref_bias = 0.0;
    MachinePoint motor;
    MachinePoint generator;
    double psi = 0.0;
    double terminal_angle = 0.0;
};

struct SteadyState {
    std::vector<RfcSteadyState> rfcs;
    std::vector<RailPhasor> bus_voltages;
    int iterations = 0;
    double residual = 0.0;
};

/// Load-flow limits.
inline constexpr int kLoadFlowMaxIterations = 50;
inline constexpr double kLoadFlowTolerance = 1e-10;

/// Pre-fault operating point: droop-controlled railway load flow, then
/// machine emfs, field voltages, rotor angles and exciter equilibria.
/// Throws InitError on non-convergence or regulator limit violations.
SteadyState initialize(const Scenario& s);

/// Human-readable per-machine summary of the initial operating point.
std::string format_init_report(const Scenario& s, const SteadyState& ss);

}  // namespace rfcsim
