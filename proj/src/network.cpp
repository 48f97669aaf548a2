#include "rfcsim/network.hpp"

#include "rfcsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

namespace rfcsim {

Complex RailGrid::branch_admittance(const Branch& b) const
{
    const Complex z = Complex(b.r_ohm_per_km, b.x_ohm_per_km) * b.length_km / z_base();
    return 1.0 / z;
}

std::size_t RailGrid::index_of(std::string_view bus) const
{
    const auto it = std::find(buses.begin(), buses.end(), bus);
    if (it == buses.end())
        throw ParameterError("unknown bus '" + std::string(bus) + "'");
    return static_cast<std::size_t>(it - buses.begin());
}

void RailGrid::validate() const
{
    if (buses.empty())
        throw ParameterError("grid has no buses");
    if (!(u_base_kv > 0.0 && s_base_mva > 0.0))
        throw ParameterError("grid base voltage and power must be positive");
    std::set<std::string> unique(buses.begin(), buses.end());
    if (unique.size() != buses.size())
        throw ParameterError("duplicate bus id");

    // Union-find over branch endpoints.
    std::vector<std::size_t> parent(buses.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto root = [&](std::size_t i) {
        while (parent[i] != i)
            i = parent[i] = parent[parent[i]];
        return i;
    };
    for (const auto& b : branches) {
        const auto i = index_of(b.from);
        const auto j = index_of(b.to);
        if (i == j)
            throw ParameterError("branch " + b.from + "-" + b.to + " is a self loop");
        if (!(b.length_km > 0.0) || (b.r_ohm_per_km == 0.0 && b.x_ohm_per_km == 0.0))
            throw ParameterError("branch " + b.from + "-" + b.to + " has zero impedance");
        parent[root(i)] = root(j);
    }
    for (std::size_t i = 1; i < buses.size(); ++i)
        if (root(i) != root(0))
            throw ParameterError("grid is not connected: bus '" + buses[i] + "' is isolated");
    for (const auto& l : loads)
        index_of(l.bus);
}

AdmittanceMatrix assemble_ybus(const RailGrid& g)
{
    const auto n = static_cast<Eigen::Index>(g.buses.size());
    AdmittanceMatrix y = AdmittanceMatrix::Zero(n, n);
    for (const auto& b : g.branches) {
        const auto i = static_cast<Eigen::Index>(g.index_of(b.from));
        const auto j = static_cast<Eigen::Index>(g.index_of(b.to));
        const Complex yb = g.branch_admittance(b);
        y(i, i) += yb;
        y(j, j) += yb;
        y(i, j) -= yb;
        y(j, i) -= yb;
    }
    return y;
}

AdmittanceMatrix augment(const AdmittanceMatrix& y, std::span<const MachineShunt> machines,
                         std::span<const IndexedShunt> shunts)
{
    AdmittanceMatrix out = y;
    for (const auto& m : machines) {
        if (static_cast<Eigen::Index>(m.bus) >= y.rows())
            throw ParameterError("machine attached to a bus outside the grid");
        out(m.bus, m.bus) += 1.0 / Complex(0.0, m.xd_st);
    }
    for (const auto& s : shunts) {
        if (static_cast<Eigen::Index>(s.bus) >= y.rows())
            throw ParameterError("shunt attached to a bus outside the grid");
        out(s.bus, s.bus) += s.admittance;
    }
    return out;
}

AdmittanceMatrix apply_fault(const AdmittanceMatrix& y, std::size_t bus, Complex y_fault)
{
    if (static_cast<Eigen::Index>(bus) >= y.rows())
        throw ParameterError("fault bus outside the grid");
    AdmittanceMatrix out = y;
    out(bus, bus) += y_fault;
    return out;
}

NetworkSolver::NetworkSolver(AdmittanceMatrix y) : y_(std::move(y))
{
    if (y_.rows() == 0 || y_.rows() != y_.cols())
        throw SolveError("admittance matrix is empty or not square");
    lu_.compute(y_);
    if (!lu_.isInvertible())
        throw SolveError("admittance matrix is singular (no shunt path to ground?)");
}

std::vector<RailPhasor> NetworkSolver::solve(std::span<const RailPhasor> injections) const
{
    const auto n = y_.rows();
    if (static_cast<Eigen::Index>(injections.size()) != n)
        throw SolveError("injection vector does not match the matrix size");
    Eigen::VectorXcd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i)
        rhs(i) = injections[i].complex();
    const Eigen::VectorXcd u = lu_.solve(rhs);
    std::vector<RailPhasor> out(injections.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(u(i).real()) || !std::isfinite(u(i).imag()))
            throw SolveError("network solve produced a non-finite voltage");
        out[i] = RailPhasor::from_complex(u(i));
    }
    return out;
}

double NetworkSolver::residual(std::span<const RailPhasor> u,
                               std::span<const RailPhasor> injections) const
{
    const auto n = y_.rows();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        Complex acc = -injections[i].complex();
        for (Eigen::Index j = 0; j < n; ++j)
            acc += y_(i, j) * u[j].complex();
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

std::array<double, 2> rotor_transform(std::array<double, 2> v, double delta_m, int poles)
{
    const double angle = 0.5 * poles * delta_m;
    const double s = std::sin(angle);
    const double c = std::cos(angle);
    return {-s * v[0] + c * v[1], c * v[0] + s * v[1]};
}

RailPhasor norton_current(RotorPhasor e_st, double delta_m, int poles, double xd_st)
{
    const auto e = from_rotor<Frame::Rail>(e_st, delta_m, poles);
    // (a + jb) / (jX) = (b - ja) / X
    return {e.im() / xd_st, -e.re() / xd_st};
}

RotorPhasor machine_currents(RotorPhasor u, RotorPhasor e_st, double xd_st)
{
    return make_dq((u.q() - e_st.q()) / xd_st, (-u.d() + e_st.d()) / xd_st);
}

PowerPair terminal_power(RotorPhasor u, RotorPhasor i)
{
    return {u.d() * i.d() + u.q() * i.q(), u.d() * i.q() - u.q() * i.d()};
}

MachineTerminal motor_interface(RotorPhasor e_st_m, double delta_m, int poles_m, double xd_st_m,
                                PublicPhasor u_inf)
{
    const RotorPhasor u = to_rotor(u_inf, delta_m, poles_m);
    return {u, machine_currents(u, e_st_m, xd_st_m)};
}

MachineTerminal generator_terminal(RailPhasor u_bus, RotorPhasor e_st_g, double delta_m,
                                   int poles_g, double xd_st_g)
{
    const RotorPhasor u = to_rotor(u_bus, delta_m, poles_g);
    return {u, machine_currents(u, e_st_g, xd_st_g)};
}

Complex shunt_power(RailPhasor u, Complex y) { return std::norm(u.complex()) * std::conj(y); }

Complex branch_losses(const RailGrid& g, std::span<const RailPhasor> u)
{
    Complex total{0.0, 0.0};
    for (const auto& b : g.branches) {
        const Complex du = u[g.index_of(b.from)].complex() - u[g.index_of(b.to)].complex();
        total += std::norm(du) * std::conj(g.branch_admittance(b));
    }
    return total;
}

void write_admittance_csv(std::ostream& os, const AdmittanceMatrix& y,
                          std::span<const std::string> bus_names)
{
    os << "row,col,from,to,re,im\n";
    os.precision(17);
    for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index j = 0; j < y.cols(); ++j)
            os << i << ',' << j << ',' << bus_names[i] << ',' << bus_names[j] << ','
               << y(i, j).real() << ',' << y(i, j).imag() << '\n';
}

}  // namespace rfcsim
