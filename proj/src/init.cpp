#include "rfcsim/init.hpp"

#include "rfcsim/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace rfcsim {

double load_angle(double xq, double p, double q, double u_mag)
{
    if (!(u_mag > 0.0))
        throw ParameterError("load angle needs a positive terminal voltage");
    const double num = xq * p;
    const double den = u_mag * u_mag + xq * q;
    if (num == 0.0 && den == 0.0)
        return 0.0;
    return std::atan2(num, den);
}

double phase_shift(const LoadAngleTerms& motor, const LoadAngleTerms& generator)
{
    const double motor_num = -motor.xq * motor.p;
    const double motor_den = motor.u_mag * motor.u_mag - motor.xq * motor.q;
    const double motor_term = (motor_num == 0.0 && motor_den == 0.0) ? 0.0 : std::atan2(motor_num, motor_den);
    return motor_term / 3.0 + load_angle(generator.xq, generator.p, generator.q, generator.u_mag);
}

namespace {

struct UnitData {
    MachineParams motor;
    MachineParams generator;
    std::size_t bus = 0;
    double q_scale = 1.0;  // system-base Q -> generator-rating Q
    const ExciterParams* exciter = nullptr;
};

struct LoadFlow {
    const Scenario& s;
    std::vector<UnitData> units;
    AdmittanceMatrix y;
    std::size_t n = 0;

    // Unknowns: Re/Im of every bus voltage, then P_g/Q_g of every unit.
    Eigen::VectorXd residual(const Eigen::VectorXd& z) const
    {
        const std::size_t m = units.size();
        std::vector<Complex> u(n);
        for (std::size_t i = 0; i < n; ++i)
            u[i] = {z(2 * i), z(2 * i + 1)};

        std::vector<Complex> injected(n, Complex{0.0, 0.0});
        for (std::size_t k = 0; k < m; ++k) {
            const Complex sk{z(2 * n + 2 * k), z(2 * n + 2 * k + 1)};
            injected[units[k].bus] += std::conj(sk / u[units[k].bus]);
        }

        Eigen::VectorXd r(2 * n + 2 * m);
        for (std::size_t i = 0; i < n; ++i) {
            Complex acc = -injected[i];
            for (std::size_t j = 0; j < n; ++j)
                acc += y(i, j) * u[j];
            r(2 * i) = acc.real();
            r(2 * i + 1) = acc.imag();
        }
        for (std::size_t k = 0; k < m; ++k) {
            const auto& ud = units[k];
            const double p = z(2 * n + 2 * k);
            const double q = z(2 * n + 2 * k + 1);
            const Complex ub = u[ud.bus];
            const double mag = std::abs(ub);
            r(2 * n + 2 * k) = mag - droop_reference(ud.exciter->u0, ud.exciter->k_u, q * ud.q_scale);
            const double psi = phase_shift({ud.motor.xq, -p, 0.0, 1.0}, {ud.generator.xq, p, q, mag});
            r(2 * n + 2 * k + 1) = std::arg(ub * std::polar(1.0, psi));
        }
        return r;
    }
};

MachinePoint machine_point(RotorPhasor u, RotorPhasor i, double p, double q, double lambda,
                           const MachineParams& mp, MachineEmfs& emfs)
{
    MachinePoint pt;
    pt.p = p;
    pt.q = q;
    pt.load_angle = lambda;
    pt.voltage = u;
    pt.current = i;
    // Zero right-hand sides of the stator and field/damper equations.
    emfs.eq_st = u.q() - mp.xd_st * i.d();
    emfs.ed_st = u.d() + mp.xd_st * i.q();
    emfs.eq_t = emfs.eq_st - i.d() * (mp.xd_t - mp.xd_st);
    pt.e_f = emfs.eq_t - i.d() * (mp.xd - mp.xd_t);
    return pt;
}

}  // namespace

SteadyState initialize(const Scenario& s)
{
    s.validate();
    LoadFlow lf{s, {}, {}, s.grid.buses.size()};
    std::vector<IndexedShunt> loads;
    for (const auto& l : s.grid.loads)
        loads.push_back({s.grid.index_of(l.bus), l.admittance});
    lf.y = augment(assemble_ybus(s.grid), {}, loads);
    for (const auto& u : s.rfcs) {
        UnitData d;
        d.motor = prepare_machine(u.motor, s.s_base());
        d.generator = prepare_machine(u.generator, s.s_base());
        d.bus = s.grid.index_of(u.gen_bus);
        d.q_scale = s.s_base() / u.generator.s_rated;
        d.exciter = &u.exciter;
        lf.units.push_back(d);
    }

    const std::size_t n = lf.n;
    const std::size_t m = lf.units.size();
    const std::size_t dim = 2 * n + 2 * m;
    double u_start = 0.0;
    for (const auto& u : s.rfcs)
        u_start += u.exciter.u0;
    u_start /= static_cast<double>(m);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < n; ++i)
        z(2 * i) = u_start;

    SteadyState ss;
    Eigen::VectorXd r = lf.residual(z);
    int it = 0;
    while (r.cwiseAbs().maxCoeff() >= kLoadFlowTolerance) {
        if (it == kLoadFlowMaxIterations)
            break;
        Eigen::MatrixXd jac(dim, dim);
        for (std::size_t c = 0; c < dim; ++c) {
            const double h = 1e-7 * std::max(1.0, std::abs(z(c)));
            Eigen::VectorXd zp = z;
            Eigen::VectorXd zm = z;
            zp(c) += h;
            zm(c) -= h;
            jac.col(c) = (lf.residual(zp) - lf.residual(zm)) / (2.0 * h);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible())
            throw InitError("load flow Jacobian is singular (no operating point, or parallel units with K_U = 0)");
        z -= lu.solve(r);
        r = lf.residual(z);
        ++it;
    }
    ss.iterations = it;
    ss.residual = r.cwiseAbs().maxCoeff();
    if (!(ss.residual < kLoadFlowTolerance)) {
        std::ostringstream msg;
        msg << "load flow did not converge after " << it << " iterations, residual " << ss.residual;
        throw InitError(msg.str());
    }

    ss.bus_voltages.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        ss.bus_voltages[i] = {z(2 * i), z(2 * i + 1)};

    for (std::size_t k = 0; k < m; ++k) {
        const auto& ud = lf.units[k];
        const auto& unit = s.rfcs[k];
        const double p_g = z(2 * n + 2 * k);
        const double q_g = z(2 * n + 2 * k + 1);
        RfcSteadyState rs;

        // Generator: rotor q-axis along E_Q = U + j Xq I.
        const RailPhasor u_g = ss.bus_voltages[ud.bus];
        const Complex i_g = std::conj(Complex(p_g, q_g) / u_g.complex());
        const Complex e_q = u_g.complex() + Complex(0.0, ud.generator.xq) * i_g;
        const double delta_m = std::arg(e_q) / (ud.generator.poles / 2.0);
        rs.state.delta_m = delta_m;
        rs.state.omega_pu = 1.0;
        rs.generator = machine_point(to_rotor(u_g, delta_m, ud.generator.poles),
                                     to_rotor(RailPhasor::from_complex(i_g), delta_m, ud.generator.poles),
                                     p_g, q_g, load_angle(ud.generator.xq, p_g, q_g, u_g.abs()),
                                     ud.generator, rs.state.generator);

        // Motor on its infinite bus, lossless and at zero reactive power.
        const PublicPhasor u_m{1.0, 0.0};
        const double p_m = -p_g;
        const PublicPhasor i_m{p_m, 0.0};
        rs.motor = machine_point(to_rotor(u_m, delta_m, ud.motor.poles),
                                 to_rotor(i_m, delta_m, ud.motor.poles), p_m, 0.0,
                                 load_angle(ud.motor.xq, p_m, 0.0, 1.0), ud.motor, rs.state.motor);
        rs.e_f_motor = rs.motor.e_f;

        rs.state.exciter = exciter_equilibrium(rs.generator.e_f, unit.exciter);
        const double v_ref = droop_reference(unit.exciter.u0, unit.exciter.k_u, q_g * ud.q_scale);
        rs.v_ref_bias = equilibrium_error(rs.state.exciter, unit.exciter) + u_g.abs() - v_ref;

        rs.psi = phase_shift({ud.motor.xq, p_m, 0.0, 1.0}, {ud.generator.xq, p_g, q_g, u_g.abs()});
        rs.terminal_angle = std::arg(u_g.complex());
        ss.rfcs.push_back(rs);
    }
    return ss;
}

std::string format_init_report(const Scenario& s, const SteadyState& ss)
{
    std::ostringstream os;
    char buf[256];
    os << "initial operating point: " << s.name << "\n";
    os << "load flow: " << ss.iterations << " iterations, residual " << ss.residual << "\n\n";
    os << "bus voltages (p.u., deg)\n";
    for (std::size_t i = 0; i < ss.bus_voltages.size(); ++i) {
        const auto c = ss.bus_voltages[i].complex();
        std::snprintf(buf, sizeof buf, "  %-10s |U| = %.6f  angle = %+.6f\n", s.grid.buses[i].c_str(),
                      std::abs(c), std::arg(c) * 180.0 / 3.14159265358979323846);
        os << buf;
    }
    for (std::size_t k = 0; k < ss.rfcs.size(); ++k) {
        const auto& r = ss.rfcs[k];
        os << "\n" << s.rfcs[k].name << " (bus " << s.rfcs[k].gen_bus << ")\n";
        std::snprintf(buf, sizeof buf,
                      "  generator: P = %+.6f  Q = %+.6f  load angle = %+.6f rad  E_f = %.6f\n",
                      r.generator.p, r.generator.q, r.generator.load_angle, r.generator.e_f);
        os << buf;
        std::snprintf(buf, sizeof buf,
                      "  motor:     P = %+.6f  Q = %+.6f  load angle = %+.6f rad  E_f = %.6f\n",
                      r.motor.p, r.motor.q, r.motor.load_angle, r.motor.e_f);
        os << buf;
        std::snprintf(buf, sizeof buf,
                      "  delta_m = %+.8f rad  psi = %+.8f rad  V_R = %.6f  V_ref bias = %+.6e\n",
                      r.state.delta_m, r.psi, r.state.exciter.v_r, r.v_ref_bias);
        os << buf;
    }
    return os.str();
}

}  // namespace rfcsim
