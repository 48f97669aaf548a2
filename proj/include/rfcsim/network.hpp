#pragma once

#include "rfcsim/phasor.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rfcsim {

using Complex = std::complex<double>;

/// Catenary section between two buses, impedance given per km.
struct Branch {
    std::string from;
    std::string to;
    double r_ohm_per_km = 0.0;
    double x_ohm_per_km = 0.0;
    double length_km = 0.0;

    friend bool operator==(const Branch&, const Branch&) = default;
};

/// Constant-admittance shunt (load or fault) in p.u. on the system base.
struct BusShunt {
    std::string bus;
    Complex admittance;

    friend bool operator==(const BusShunt&, const BusShunt&) = default;
};

/// Single-phase railway grid in the 16 2/3 Hz frame.
struct RailGrid {
    std::vector<std::string> buses;
    std::vector<Branch> branches;
    std::vector<BusShunt> loads;
    double u_base_kv = 16.5;
    double s_base_mva = 10.0;

    double z_base() const { return u_base_kv * u_base_kv / s_base_mva; }
    /// Series admittance of a branch in p.u.
    Complex branch_admittance(const Branch& b) const;
    /// Throws ParameterError for unknown ids.
    std::size_t index_of(std::string_view bus) const;
    void validate() const;

    friend bool operator==(const RailGrid&, const RailGrid&) = default;
};

using AdmittanceMatrix = Eigen::MatrixXcd;

struct MachineShunt {
    std::size_t bus = 0;
    double xd_st = 0.0;
};

struct IndexedShunt {
    std::size_t bus = 0;
    Complex admittance;
};

/// Branch stamping: -y off the diagonal, sum of incident y on it.
AdmittanceMatrix assemble_ybus(const RailGrid& g);

/// Add 1/(j X''_d) for every generator and the given shunt admittances.
AdmittanceMatrix augment(const AdmittanceMatrix& y, std::span<const MachineShunt> machines,
                         std::span<const IndexedShunt> shunts);

AdmittanceMatrix apply_fault(const AdmittanceMatrix& y, std::size_t bus, Complex y_fault);

/// Factorized admittance matrix; immutable between topology events.
class NetworkSolver {
public:
    /// Throws SolveError for an empty or singular matrix.
    explicit NetworkSolver(AdmittanceMatrix y);

    std::vector<RailPhasor> solve(std::span<const RailPhasor> injections) const;
    /// max_i |(Y u - i)_i|
    double residual(std::span<const RailPhasor> u, std::span<const RailPhasor> injections) const;

    const AdmittanceMatrix& matrix() const { return y_; }
    std::size_t size() const { return static_cast<std::size_t>(y_.rows()); }

private:
    AdmittanceMatrix y_;
    Eigen::FullPivLU<AdmittanceMatrix> lu_;
};

/// Multiply by T = [[-sin k d, cos k d], [cos k d, sin k d]], k = poles/2.
/// T is symmetric and orthogonal, so the same call maps in both directions.
std::array<double, 2> rotor_transform(std::array<double, 2> v, double delta_m, int poles);

template <Frame G>
    requires(G != Frame::Rotor)
RotorPhasor to_rotor(Phasor2<G> v, double delta_m, int poles)
{
    const auto r = rotor_transform({v.x, v.y}, delta_m, poles);
    return {r[0], r[1]};
}

template <Frame G>
    requires(G != Frame::Rotor)
Phasor2<G> from_rotor(RotorPhasor v, double delta_m, int poles)
{
    const auto r = rotor_transform({v.x, v.y}, delta_m, poles);
    return {r[0], r[1]};
}

/// Norton current E''/(j X''_d) of a generator, in the railway frame.
RailPhasor norton_current(RotorPhasor e_st, double delta_m, int poles, double xd_st);

/// dq current out of a machine with emf `e_st` behind X''_d and terminal voltage `u`.
RotorPhasor machine_currents(RotorPhasor u, RotorPhasor e_st, double xd_st);

struct PowerPair {
    double p = 0.0;
    double q = 0.0;
};

/// Generated active/reactive power from rotor-frame terminal voltage and current.
PowerPair terminal_power(RotorPhasor u, RotorPhasor i);

/// U conj(I) in a grid frame.
template <Frame G>
    requires(G != Frame::Rotor)
Complex complex_power(Phasor2<G> u, Phasor2<G> i)
{
    return u.complex() * std::conj(i.complex());
}

struct MachineTerminal {
    RotorPhasor voltage;
    RotorPhasor current;
};

/// Motor connected straight to its infinite bus.
MachineTerminal motor_interface(RotorPhasor e_st_m, double delta_m, int poles_m, double xd_st_m,
                                PublicPhasor u_inf = {1.0, 0.0});

/// Generator terminal quantities for a solved railway bus voltage.
MachineTerminal generator_terminal(RailPhasor u_bus, RotorPhasor e_st_g, double delta_m,
                                   int poles_g, double xd_st_g);

/// |u|^2 conj(y): power absorbed by a shunt.
Complex shunt_power(RailPhasor u, Complex y);

/// Total series losses over all branches.
Complex branch_losses(const RailGrid& g, std::span<const RailPhasor> u);

/// Write every matrix entry as `row,col,from,to,re,im`.
void write_admittance_csv(std::ostream& os, const AdmittanceMatrix& y,
                          std::span<const std::string> bus_names);

}  // namespace rfcsim
