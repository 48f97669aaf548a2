#include "rfcsim/machine.hpp"

#include "rfcsim/errors.hpp"

#include <numbers>

namespace rfcsim {

namespace {

constexpr double kPublicFrequencyHz = 50.0;

const char* role_name(MachineRole r) { return r == MachineRole::Motor ? "motor" : "generator"; }

}  // namespace

void MachineParams::validate() const
{
    const std::string who = role_name(role);
    if (!(xd_st > 0.0 && xd_t >= xd_st && xd >= xd_t))
        throw ParameterError(who + ": reactances must satisfy xd >= xd_t >= xd_st > 0");
    if (!(xq_st > 0.0 && xq >= xq_st))
        throw ParameterError(who + ": reactances must satisfy xq >= xq_st > 0");
    if (!(tdo_t > 0.0 && tdo_st > 0.0 && tqo_st > 0.0))
        throw ParameterError(who + ": open-circuit time constants must be positive");
    if (!(s_rated > 0.0))
        throw ParameterError(who + ": rated power must be positive");
    if (!(x_t >= 0.0))
        throw ParameterError(who + ": transformer reactance must be non-negative");
    if (poles <= 0 || poles % 2 != 0)
        throw ParameterError(who + ": pole count must be a positive even integer");
}

double RfcUnit::combined_inertia(double s_base) const
{
    if (!(s_base > 0.0))
        throw ParameterError("system base power must be positive");
    return (h_motor * motor.s_rated + h_generator * generator.s_rated) / s_base;
}

double RfcUnit::omega_sm() const
{
    return 2.0 * std::numbers::pi * kPublicFrequencyHz / (motor.poles / 2.0);
}

void RfcUnit::validate() const
{
    motor.validate();
    generator.validate();
    if (motor.role != MachineRole::Motor || generator.role != MachineRole::Generator)
        throw ParameterError(name + ": motor/generator roles are swapped");
    if (generator.poles * 3 != motor.poles)
        throw ParameterError(name + ": generator must have one third of the motor pole count");
    if (!(h_motor > 0.0 && h_generator > 0.0))
        throw ParameterError(name + ": inertia constants must be positive");
    if (gen_bus.empty())
        throw ParameterError(name + ": generator bus is not set");
    exciter.validate();
}

MachineParams to_system_base(const MachineParams& p, double s_base)
{
    if (!(s_base > 0.0))
        throw ParameterError("system base power must be positive");
    if (!(p.s_rated > 0.0))
        throw ParameterError("machine rated power must be positive");
    const double k = s_base / p.s_rated;
    MachineParams out = p;
    out.xd *= k;
    out.xq *= k;
    out.xd_t *= k;
    out.xd_st *= k;
    out.xq_st *= k;
    out.x_t *= k;
    return out;
}

MachineParams merge_transformer(const MachineParams& p)
{
    MachineParams out = p;
    out.xd += p.x_t;
    out.xq += p.x_t;
    out.xd_t += p.x_t;
    out.xd_st += p.x_t;
    out.xq_st += p.x_t;
    out.x_t = 0.0;
    return out;
}

MachineParams equalize_subtransient(const MachineParams& p)
{
    MachineParams out = p;
    out.xq_st = p.xd_st;
    return out;
}

MachineParams prepare_machine(const MachineParams& p, double s_base)
{
    p.validate();
    return equalize_subtransient(to_system_base(merge_transformer(p), s_base));
}

SwingRates swing_derivatives(const RfcState& s, double p_motor, double p_generator,
                             const ShaftParams& shaft)
{
    if (!(s.omega_pu > 0.0))
        throw IntegrationError("rotor speed reached " + std::to_string(s.omega_pu) + " p.u.");
    return {
        (s.omega_pu - 1.0) * shaft.omega_sm,
        (-p_motor - p_generator) / (2.0 * shaft.h_mg * s.omega_pu),
    };
}

MachineEmfs electrical_derivatives(const MachineEmfs& e, double i_d, double i_q, double e_f,
                                   const MachineParams& p)
{
    return {
        (e_f - e.eq_t + i_d * (p.xd - p.xd_t)) / p.tdo_t,
        (e.eq_t - e.eq_st + i_d * (p.xd_t - p.xd_st)) / p.tdo_st,
        (-e.ed_st - i_q * (p.xq - p.xq_st)) / p.tqo_st,
    };
}

double airgap_power(double ed_st, double eq_st, double i_d, double i_q, const MachineParams& p)
{
    return ed_st * i_d + eq_st * i_q + (p.xd_st - p.xq_st) * i_d * i_q;
}

MachineParams q48_motor()
{
    MachineParams m;
    m.role = MachineRole::Motor;
    m.xq = 0.49;
    m.xd = 1.02;
    m.xd_t = 0.3;
    m.xq_st = 0.3;
    m.xd_st = 0.21;
    m.tdo_t = 3.6;
    m.tdo_st = 0.04;
    m.tqo_st = 0.09;
    m.s_rated = 10.7;
    m.x_t = 0.079;
    m.poles = 12;
    return m;
}

MachineParams q49_generator()
{
    MachineParams g;
    g.role = MachineRole::Generator;
    g.xq = 0.53;
    g.xd = 1.39;
    g.xd_t = 0.16;
    g.xq_st = 0.10;
    g.xd_st = 0.12;
    g.tdo_t = 11.2;
    g.tdo_st = 0.07;
    g.tqo_st = 4.0;
    g.s_rated = 10.0;
    g.x_t = 0.042;
    g.poles = 4;
    return g;
}

RfcUnit q48_q49_unit(std::string name, std::string gen_bus)
{
    RfcUnit u;
    u.name = std::move(name);
    u.motor = q48_motor();
    u.generator = q49_generator();
    u.h_motor = 1.06;
    u.h_generator = 1.14;
    u.gen_bus = std::move(gen_bus);
    return u;
}

}  // namespace rfcsim
