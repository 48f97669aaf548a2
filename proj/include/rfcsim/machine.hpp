#pragma once

#include "rfcsim/exciter.hpp"

#include <string>

namespace rfcsim {

enum class MachineRole { Motor, Generator };

/// Per-unit nameplate data of one salient-pole synchronous machine.
///
/// Reactances are on the machine's own rating unless converted with
/// to_system_base(). The quadrature transient reactance equals xq for a
/// salient-pole machine and is therefore not stored.
struct MachineParams {
    MachineRole role = MachineRole::Generator;
    double xd = 0.0;
    double xq = 0.0;
    double xd_t = 0.0;
    double xd_st = 0.0;
    double xq_st = 0.0;
    double tdo_t = 0.0;
    double tdo_st = 0.0;
    double tqo_st = 0.0;
    double s_rated = 0.0;  ///< MVA
    double x_t = 0.0;      ///< transformer leakage reactance, p.u. on s_rated
    int poles = 2;

    void validate() const;

    friend bool operator==(const MachineParams&, const MachineParams&) = default;
};

/// Motor and generator sharing one stiff shaft.
struct RfcUnit {
    std::string name;
    MachineParams motor;
    MachineParams generator;
    double h_motor = 0.0;      ///< MW s/MVA on the motor rating
    double h_generator = 0.0;  ///< MW s/MVA on the generator rating
    std::string gen_bus;
    ExciterParams exciter;

    /// Combined inertia constant on the system base.
    double combined_inertia(double s_base) const;

    /// Mechanical synchronous speed in rad/s, fixed by the 50 Hz motor side.
    double omega_sm() const;

    void validate() const;

    friend bool operator==(const RfcUnit&, const RfcUnit&) = default;
};

/// Transient and sub-transient emfs of one machine (5th-order model, E'_d = 0).
struct MachineEmfs {
    double eq_t = 0.0;
    double eq_st = 0.0;
    double ed_st = 0.0;

    friend bool operator==(const MachineEmfs&, const MachineEmfs&) = default;
};

/// The eight electromechanical states of one RFC plus its exciter.
struct RfcState {
    double delta_m = 0.0;  ///< mechanical rotor angle w.r.t. the synchronous frame, rad
    double omega_pu = 1.0;
    MachineEmfs motor;
    MachineEmfs generator;
    ExciterState exciter;

    friend bool operator==(const RfcState&, const RfcState&) = default;
};

struct ShaftParams {
    double h_mg = 0.0;
    double omega_sm = 0.0;
};

struct SwingRates {
    double d_delta_m = 0.0;
    double d_omega_pu = 0.0;
};

/// Rescale all reactances from the machine rating to `s_base`.
MachineParams to_system_base(const MachineParams& p, double s_base);

/// Fold the transformer leakage reactance into every machine reactance, so the
/// machine terminal becomes the bus on the far side of the transformer.
MachineParams merge_transformer(const MachineParams& p);

/// Set X''_q := X''_d so a single shunt X''_d represents the machine in the network.
MachineParams equalize_subtransient(const MachineParams& p);

/// merge_transformer -> to_system_base -> equalize_subtransient.
MachineParams prepare_machine(const MachineParams& p, double s_base);

/// Shared swing equation. Powers are generated powers on the system base
/// (a motoring machine has p_motor < 0). Throws IntegrationError if omega_pu <= 0.
SwingRates swing_derivatives(const RfcState& s, double p_motor, double p_generator,
                             const ShaftParams& shaft);

/// Field-winding and damper dynamics of one machine; `i_d`, `i_q` are
/// dq currents out of the machine.
MachineEmfs electrical_derivatives(const MachineEmfs& e, double i_d, double i_q, double e_f,
                                   const MachineParams& p);

/// Air-gap power E''_d I_d + E''_q I_q + (X''_d - X''_q) I_d I_q.
double airgap_power(double ed_st, double eq_st, double i_d, double i_q, const MachineParams& p);

// Q48/Q49 converter nameplate data.
MachineParams q48_motor();
MachineParams q49_generator();
RfcUnit q48_q49_unit(std::string name, std::string gen_bus);

}  // namespace rfcsim
