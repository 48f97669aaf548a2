#include "rfcsim/exciter.hpp"

#include "rfcsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rfcsim {

void ExciterParams::validate() const
{
    if (!(t_a > 0.0 && t_e > 0.0 && t_f1 > 0.0))
        throw ParameterError("exciter: T_A, T_E and T_F1 must be positive");
    if (!(t_f2 >= 0.0 && t_f3 >= 0.0))
        throw ParameterError("exciter: T_F2 and T_F3 must be non-negative");
    if (t_f2 == 0.0 && t_f3 != 0.0)
        throw ParameterError("exciter: T_F3 requires a positive T_F2");
    if (!(k_a > 0.0))
        throw ParameterError("exciter: K_A must be positive");
    if (!(v_rmin < v_rmax))
        throw ParameterError("exciter: V_Rmin must be below V_Rmax");
    if (!(k_u >= 0.0))
        throw ParameterError("exciter: droop K_U must be non-negative");
    if (!(u0 > 0.0))
        throw ParameterError("exciter: no-load voltage U_0 must be positive");
    const bool sat = s_e1 != 0.0 || s_e2 != 0.0;
    if (sat && !(e1 > 0.0 && e2 > e1 && s_e1 > 0.0 && s_e2 >= s_e1))
        throw ParameterError("exciter: saturation needs 0 < E1 < E2 and 0 < S_E1 <= S_E2");
}

double ExciterParams::saturation(double e_fd) const
{
    if (s_e1 == 0.0 && s_e2 == 0.0)
        return 0.0;
    // S_E = B (E - A)^2 / E through both curve points.
    const double r = std::sqrt((s_e1 * e1) / (s_e2 * e2));
    const double a = (e1 - r * e2) / (1.0 - r);
    const double b = s_e2 * e2 / ((e2 - a) * (e2 - a));
    if (e_fd <= a || e_fd <= 0.0)
        return 0.0;
    return b * (e_fd - a) * (e_fd - a) / e_fd;
}

double droop_reference(double u0, double k_u, double q_g) { return u0 - k_u * q_g; }

double rate_feedback(const ExciterState& x, const ExciterParams& p)
{
    const double washout = p.k_f / p.t_f1 * (x.e_f - x.v_f1);
    if (p.t_f2 > 0.0)
        return x.v_f2 + p.t_f3 / p.t_f2 * (washout - x.v_f2);
    return washout;
}

ExciterState exciter_derivatives(const ExciterState& x, double v_meas, double v_ref,
                                 const ExciterParams& p, bool limited)
{
    const double error = v_ref - v_meas - rate_feedback(x, p);
    double d_vr = (p.k_a * error - x.v_r) / p.t_a;
    if (limited && ((x.v_r >= p.v_rmax && d_vr > 0.0) || (x.v_r <= p.v_rmin && d_vr < 0.0)))
        d_vr = 0.0;
    const double v_r = limited ? std::clamp(x.v_r, p.v_rmin, p.v_rmax) : x.v_r;

    ExciterState d;
    d.v_r = d_vr;
    d.e_f = (v_r - (p.k_e + p.saturation(x.e_f)) * x.e_f) / p.t_e;
    d.v_f1 = (x.e_f - x.v_f1) / p.t_f1;
    d.v_f2 = p.t_f2 > 0.0 ? (p.k_f / p.t_f1 * (x.e_f - x.v_f1) - x.v_f2) / p.t_f2 : 0.0;
    return d;
}

void clamp_regulator(ExciterState& x, const ExciterParams& p)
{
    x.v_r = std::clamp(x.v_r, p.v_rmin, p.v_rmax);
}

ExciterState exciter_equilibrium(double e_f, const ExciterParams& p)
{
    ExciterState x;
    x.e_f = e_f;
    x.v_r = (p.k_e + p.saturation(e_f)) * e_f;
    x.v_f1 = e_f;
    x.v_f2 = 0.0;
    if (x.v_r > p.v_rmax || x.v_r < p.v_rmin)
        throw InitError("exciter: holding E_f = " + std::to_string(e_f) +
                        " needs V_R = " + std::to_string(x.v_r) + " outside the regulator limits");
    return x;
}

double equilibrium_error(const ExciterState& x, const ExciterParams& p) { return x.v_r / p.k_a; }

}  // namespace rfcsim
