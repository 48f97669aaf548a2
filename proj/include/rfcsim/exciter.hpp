#pragma once

namespace rfcsim {

/// Brushless AC5A-type excitation system with reactive-power droop on the
/// voltage reference. Time constants in seconds, everything else per unit.
struct ExciterParams {
    double k_a = 100.0;
    double t_a = 0.02;
    double k_e = 1.0;
    double t_e = 0.8;
    double k_f = 0.03;
    double t_f1 = 1.0;
    double t_f2 = 0.0;
    double t_f3 = 0.0;
    // Two points of the exciter saturation curve; S_E = 0 when both are zero.
    double e1 = 0.0;
    double s_e1 = 0.0;
    double e2 = 0.0;
    double s_e2 = 0.0;
    double v_rmax = 7.3;
    double v_rmin = -7.3;
    double u0 = 1.0;   ///< no-load voltage
    double k_u = 0.04; ///< droop, p.u. voltage per p.u. reactive power on generator rating

    void validate() const;

    /// Exciter saturation function S_E(E_fd), quadratic through the two curve points.
    double saturation(double e_fd) const;

    friend bool operator==(const ExciterParams&, const ExciterParams&) = default;
};

/// Regulator output, field voltage and the two rate-feedback filter states.
struct ExciterState {
    double v_r = 0.0;
    double e_f = 0.0;
    double v_f1 = 0.0;  ///< washout state of sK_F/(1+sT_F1)
    double v_f2 = 0.0;  ///< state of the (1+sT_F3)/(1+sT_F2) lead-lag, unused if T_F2 = 0

    friend bool operator==(const ExciterState&, const ExciterState&) = default;
};

/// Voltage reference from the reactive droop: U_0 - K_U Q_g.
double droop_reference(double u0, double k_u, double q_g);

/// Rate-feedback signal V_F for the given state.
double rate_feedback(const ExciterState& x, const ExciterParams& p);

/// Time derivative of the exciter state. Limits on V_R are non-windup: the
/// derivative is zeroed when the regulator sits on a limit and pushes outward.
/// With `limited` false the regulator is treated as linear.
ExciterState exciter_derivatives(const ExciterState& x, double v_meas, double v_ref,
                                 const ExciterParams& p, bool limited = true);

/// Clip V_R into [V_Rmin, V_Rmax].
void clamp_regulator(ExciterState& x, const ExciterParams& p);

/// State in which a field voltage `e_f` is held with all derivatives zero.
/// Throws InitError if the required V_R lies outside the regulator limits.
ExciterState exciter_equilibrium(double e_f, const ExciterParams& p);

/// Steady-state regulator error V_ref - V_meas needed to hold `x`.
double equilibrium_error(const ExciterState& x, const ExciterParams& p);

/// Field voltage source of a machine without excitation control.
class ConstantField {
public:
    explicit ConstantField(double e_f0) : e_f0_(e_f0) {}
    double operator()(double /*t*/) const { return e_f0_; }
    double value() const { return e_f0_; }

private:
    double e_f0_;
};

}  // namespace rfcsim
