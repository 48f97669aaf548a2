#include "rfcsim/sim.hpp"

#include "rfcsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>

namespace rfcsim {

void pack_state(const RfcState& s, std::span<double> out)
{
    out[0] = s.delta_m;
    out[1] = s.omega_pu;
    out[2] = s.motor.eq_t;
    out[3] = s.motor.eq_st;
    out[4] = s.motor.ed_st;
    out[5] = s.generator.eq_t;
    out[6] = s.generator.eq_st;
    out[7] = s.generator.ed_st;
    out[8] = s.exciter.v_r;
    out[9] = s.exciter.e_f;
    out[10] = s.exciter.v_f1;
    out[11] = s.exciter.v_f2;
}

RfcState unpack_state(std::span<const double> in)
{
    RfcState s;
    s.delta_m = in[0];
    s.omega_pu = in[1];
    s.motor = {in[2], in[3], in[4]};
    s.generator = {in[5], in[6], in[7]};
    s.exciter = {in[8], in[9], in[10], in[11]};
    return s;
}

SystemModel::SystemModel(const Scenario& s, const SteadyState& init)
    : grid_(s.grid), ybus_(assemble_ybus(s.grid))
{
    if (init.rfcs.size() != s.rfcs.size())
        throw InitError("initial state does not match the number of converters");
    x0_.assign(s.rfcs.size() * kStatesPerRfc, 0.0);
    for (std::size_t k = 0; k < s.rfcs.size(); ++k) {
        const auto& u = s.rfcs[k];
        RfcModel m;
        m.name = u.name;
        m.motor = prepare_machine(u.motor, s.s_base());
        m.generator = prepare_machine(u.generator, s.s_base());
        m.shaft = {u.combined_inertia(s.s_base()), u.omega_sm()};
        m.bus = s.grid.index_of(u.gen_bus);
        m.exciter = u.exciter;
        m.q_scale = s.s_base() / u.generator.s_rated;
        m.e_f_motor = init.rfcs[k].e_f_motor;
        m.v_ref_bias = init.rfcs[k].v_ref_bias;
        rfcs_.push_back(m);
        pack_state(init.rfcs[k].state, std::span(x0_).subspan(k * kStatesPerRfc, kStatesPerRfc));
    }
}

AdmittanceMatrix SystemModel::network_matrix(const Topology& t) const
{
    std::vector<MachineShunt> machines;
    for (const auto& r : rfcs_)
        machines.push_back({r.bus, r.generator.xd_st});
    std::vector<IndexedShunt> shunts;
    for (const auto& l : grid_.loads)
        shunts.push_back({grid_.index_of(l.bus), l.admittance});
    shunts.insert(shunts.end(), t.loads.begin(), t.loads.end());
    AdmittanceMatrix y = augment(ybus_, machines, shunts);
    for (const auto& f : t.faults)
        y = apply_fault(y, f.bus, f.admittance);
    return y;
}

StackEval SystemModel::derivative_stack(std::span<const double> x, const NetworkSolver& net, bool limited) const
{
    StackEval ev;
    ev.derivatives.assign(x.size(), 0.0);
    ev.injections.assign(net.size(), RailPhasor{});
    std::vector<RfcState> states;
    states.reserve(rfcs_.size());
    for (std::size_t k = 0; k < rfcs_.size(); ++k) {
        states.push_back(unpack_state(x.subspan(k * kStatesPerRfc, kStatesPerRfc)));
        const auto& m = rfcs_[k];
        const auto& g = states.back().generator;
        ev.injections[m.bus] += norton_current(make_dq(g.ed_st, g.eq_st), states.back().delta_m,
                                               m.generator.poles, m.generator.xd_st);
    }
    ev.voltages = net.solve(ev.injections);

    for (std::size_t k = 0; k < rfcs_.size(); ++k) {
        const auto& m = rfcs_[k];
        const auto& s = states[k];
        RfcSignals sig;
        const RotorPhasor e_g = make_dq(s.generator.ed_st, s.generator.eq_st);
        const RotorPhasor e_m = make_dq(s.motor.ed_st, s.motor.eq_st);
        sig.generator = generator_terminal(ev.voltages[m.bus], e_g, s.delta_m, m.generator.poles,
                                           m.generator.xd_st);
        sig.motor = motor_interface(e_m, s.delta_m, m.motor.poles, m.motor.xd_st);
        const auto pq_g = terminal_power(sig.generator.voltage, sig.generator.current);
        const auto pq_m = terminal_power(sig.motor.voltage, sig.motor.current);
        sig.p_g = pq_g.p;
        sig.q_g = pq_g.q;
        sig.p_m = pq_m.p;
        sig.q_m = pq_m.q;
        sig.u_g = ev.voltages[m.bus].abs();
        sig.v_ref = droop_reference(m.exciter.u0, m.exciter.k_u, sig.q_g * m.q_scale) + m.v_ref_bias;

        const auto& ig = sig.generator.current;
        const auto& im = sig.motor.current;
        const double p_air_g = airgap_power(s.generator.ed_st, s.generator.eq_st, ig.d(), ig.q(), m.generator);
        const double p_air_m = airgap_power(s.motor.ed_st, s.motor.eq_st, im.d(), im.q(), m.motor);

        RfcState d;
        const auto swing = swing_derivatives(s, p_air_m, p_air_g, m.shaft);
        d.delta_m = swing.d_delta_m;
        d.omega_pu = swing.d_omega_pu;
        d.motor = electrical_derivatives(s.motor, im.d(), im.q(), m.e_f_motor, m.motor);
        d.generator = electrical_derivatives(s.generator, ig.d(), ig.q(), s.exciter.e_f, m.generator);
        d.exciter = exciter_derivatives(s.exciter, sig.u_g, sig.v_ref, m.exciter, limited);
        pack_state(d, std::span(ev.derivatives).subspan(k * kStatesPerRfc, kStatesPerRfc));
        ev.rfcs.push_back(sig);
    }
    return ev;
}

StateVector rk4_step(const Rhs& f, std::span<const double> x, double t, double dt, const StateVector* k1)
{
    const std::size_t n = x.size();
    auto shifted = [&](const StateVector& k, double h) {
        StateVector y(n);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = x[i] + h * k[i];
        return y;
    };
    const StateVector a = k1 ? *k1 : f(t, x);
    const StateVector b = f(t + 0.5 * dt, shifted(a, 0.5 * dt));
    const StateVector c = f(t + 0.5 * dt, shifted(b, 0.5 * dt));
    const StateVector d = f(t + dt, shifted(c, dt));
    StateVector out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
    return out;
}

TimeSeries::TimeSeries(std::vector<std::string> names) : names_(std::move(names)), data_(names_.size()) {}

void TimeSeries::append(double t, std::span<const double> row)
{
    if (row.size() != names_.size())
        throw Error("time series row has " + std::to_string(row.size()) + " values, expected " +
                    std::to_string(names_.size()));
    time_.push_back(t);
    for (std::size_t i = 0; i < row.size(); ++i)
        data_[i].push_back(row[i]);
}

const std::vector<double>& TimeSeries::channel(std::string_view name) const
{
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end())
        throw Error("no channel named '" + std::string(name) + "'");
    return data_[static_cast<std::size_t>(it - names_.begin())];
}

bool TimeSeries::has(std::string_view name) const
{
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

double TimeSeries::interval() const { return time_.size() < 2 ? 0.0 : time_[1] - time_[0]; }

void TimeSeries::write_csv(std::ostream& os) const
{
    os << "time";
    for (const auto& n : names_)
        os << ',' << n;
    os << '\n';
    const auto old = os.precision(12);
    for (std::size_t r = 0; r < time_.size(); ++r) {
        os << time_[r];
        for (const auto& col : data_)
            os << ',' << col[r];
        os << '\n';
    }
    os.precision(old);
}

std::string channel_name(std::string_view rfc, std::string_view quantity)
{
    return std::string(rfc) + "_" + std::string(quantity);
}

std::string relative_speed_channel(std::size_t i, std::size_t j)
{
    return "domega_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
}

std::string relative_power_channel(std::size_t i, std::size_t j)
{
    return "dP_g_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
}

std::string bus_voltage_channel(std::string_view bus) { return "U_" + std::string(bus); }
std::string bus_angle_channel(std::string_view bus) { return "theta_" + std::string(bus); }

namespace {

constexpr std::size_t kRegulatorOffset = 8;

const char* const kRfcQuantities[] = {
    "delta_m", "ddelta_m", "omega_pu", "domega_pu", "P_g", "Q_g", "P_m", "Q_m",
    "P_m_consumed", "U_g", "E_f_g", "E_f_m", "V_ref",
};

std::vector<std::string> channel_names(const Scenario& s)
{
    std::vector<std::string> names;
    for (const auto& u : s.rfcs)
        for (const char* q : kRfcQuantities)
            names.push_back(channel_name(u.name, q));
    for (std::size_t i = 0; i < s.rfcs.size(); ++i)
        for (std::size_t j = i + 1; j < s.rfcs.size(); ++j) {
            names.push_back(relative_speed_channel(i, j));
            names.push_back(relative_power_channel(i, j));
        }
    for (const auto& b : s.grid.buses) {
        names.push_back(bus_voltage_channel(b));
        names.push_back(bus_angle_channel(b));
    }
    return names;
}

void sample_row(const SystemModel& model, std::span<const double> x, std::span<const double> x0,
                const StackEval& ev, std::vector<double>& row)
{
    row.clear();
    const auto& rfcs = model.rfcs();
    for (std::size_t k = 0; k < rfcs.size(); ++k) {
        const auto s = unpack_state(x.subspan(k * kStatesPerRfc, kStatesPerRfc));
        const double delta0 = x0[k * kStatesPerRfc];
        const auto& sig = ev.rfcs[k];
        row.insert(row.end(), {s.delta_m, s.delta_m - delta0, s.omega_pu, s.omega_pu - 1.0, sig.p_g, sig.q_g,
                               sig.p_m, sig.q_m, -sig.p_m, sig.u_g, s.exciter.e_f, rfcs[k].e_f_motor,
                               sig.v_ref});
    }
    for (std::size_t i = 0; i < rfcs.size(); ++i)
        for (std::size_t j = i + 1; j < rfcs.size(); ++j) {
            row.push_back(x[i * kStatesPerRfc + 1] - x[j * kStatesPerRfc + 1]);
            row.push_back(ev.rfcs[i].p_g - ev.rfcs[j].p_g);
        }
    for (const auto& v : ev.voltages) {
        row.push_back(v.abs());
        row.push_back(std::atan2(v.im(), v.re()));
    }
}

void apply_event(const Event& e, const RailGrid& grid, Topology& topo)
{
    const IndexedShunt shunt{grid.index_of(e.bus), e.admittance};
    auto same_bus = [&](const IndexedShunt& s) { return s.bus == shunt.bus; };
    auto same_load = [&](const IndexedShunt& s) { return s.bus == shunt.bus && s.admittance == shunt.admittance; };
    switch (e.kind) {
    case EventKind::FaultOn:
        topo.faults.push_back(shunt);
        break;
    case EventKind::FaultOff:
        topo.faults.erase(std::remove_if(topo.faults.begin(), topo.faults.end(), same_bus), topo.faults.end());
        break;
    case EventKind::LoadOn:
        topo.loads.push_back(shunt);
        break;
    case EventKind::LoadOff: {
        const auto it = std::find_if(topo.loads.begin(), topo.loads.end(), same_load);
        if (it != topo.loads.end())
            topo.loads.erase(it);
        break;
    }
    }
}

/// Fraction of the step at which the first regulator enters a limit, or 1.
double limit_crossing(const SystemModel& model, std::span<const double> x0, std::span<const double> x1,
                      std::size_t& which, double& limit)
{
    double first = 1.0;
    for (std::size_t r = 0; r < model.rfcs().size(); ++r) {
        const auto& ex = model.rfcs()[r].exciter;
        const double a = x0[r * kStatesPerRfc + kRegulatorOffset];
        const double b = x1[r * kStatesPerRfc + kRegulatorOffset];
        for (const double lim : {ex.v_rmax, ex.v_rmin}) {
            const bool enters = (lim == ex.v_rmax) ? (a < lim && b > lim) : (a > lim && b < lim);
            if (!enters)
                continue;
            const double theta = (lim - a) / (b - a);
            if (theta < first) {
                first = theta;
                which = r;
                limit = lim;
            }
        }
    }
    return first;
}

void clamp_regulators(const SystemModel& model, StateVector& x)
{
    for (std::size_t r = 0; r < model.rfcs().size(); ++r) {
        const auto& ex = model.rfcs()[r].exciter;
        auto& v_r = x[r * kStatesPerRfc + kRegulatorOffset];
        v_r = std::clamp(v_r, ex.v_rmin, ex.v_rmax);
    }
}

/// RK4 step that splits at the instant a regulator output runs into its limit.
StateVector limited_step(const SystemModel& model, const NetworkSolver& net, const Rhs& rhs, const StateVector& x,
                         double t, double dt, const StateVector& k1)
{
    StateVector full = rk4_step(rhs, x, t, dt, &k1);
    std::size_t which = 0;
    double limit = 0.0;
    double theta = limit_crossing(model, x, full, which, limit);
    if (theta >= 1.0) {
        clamp_regulators(model, full);
        return full;
    }

    // Secant refinement of the crossing time on the regulator state.
    const std::size_t idx = which * kStatesPerRfc + kRegulatorOffset;
    double lo = 0.0, f_lo = x[idx] - limit;
    double hi = 1.0, f_hi = full[idx] - limit;
    // Up to the crossing the regulator is inside its limits.
    const Rhs linear = [&](double, std::span<const double> y) {
        return model.derivative_stack(y, net, false).derivatives;
    };
    StateVector part = rk4_step(linear, x, t, theta * dt, &k1);
    for (int it = 0; it < 8; ++it) {
        const double f = part[idx] - limit;
        if (std::abs(f) < 1e-13)
            break;
        if ((f > 0.0) == (f_hi > 0.0)) {
            hi = theta;
            f_hi = f;
        } else {
            lo = theta;
            f_lo = f;
        }
        theta = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        part = rk4_step(linear, x, t, theta * dt, &k1);
    }
    part[idx] = limit;
    clamp_regulators(model, part);
    StateVector rest = rk4_step(rhs, part, t + theta * dt, (1.0 - theta) * dt);
    clamp_regulators(model, rest);
    return rest;
}

}  // namespace

RunResult run(const Scenario& s, const RunOptions& opts)
{
    s.validate();
    RunResult result;
    result.init = opts.init ? *opts.init : initialize(s);
    const SystemModel model(s, result.init);
    result.series = TimeSeries(channel_names(s));

    const long long n_steps = steps_for(s.t_end, s.dt);
    std::vector<long long> event_steps;
    for (const auto& e : s.events)
        event_steps.push_back(steps_for(e.time, s.dt));

    Topology topo;
    auto solver = std::make_unique<NetworkSolver>(model.network_matrix(topo));
    const StateVector x0 = model.initial_state();
    StateVector x = x0;
    std::vector<double> row;
    std::size_t next_event = 0;

    const Rhs rhs = [&](double, std::span<const double> y) {
        return model.derivative_stack(y, *solver).derivatives;
    };

    try {
        for (long long k = 0; k <= n_steps; ++k) {
            const double t = static_cast<double>(k) * s.dt;
            bool changed = false;
            while (next_event < s.events.size() && event_steps[next_event] == k) {
                apply_event(s.events[next_event], s.grid, topo);
                ++next_event;
                changed = true;
            }
            if (changed)
                solver = std::make_unique<NetworkSolver>(model.network_matrix(topo));

            const StackEval ev = model.derivative_stack(x, *solver);
            if (opts.observer)
                opts.observer(StepInfo{t, ev, *solver, topo});
            if (k % s.output_stride == 0) {
                sample_row(model, x, x0, ev, row);
                result.series.append(t, row);
            }
            if (k == n_steps)
                break;

            x = limited_step(model, *solver, rhs, x, t, s.dt, ev.derivatives);
            if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); }))
                throw IntegrationError("non-finite state at t = " + std::to_string(t + s.dt) + " s");
        }
    } catch (const IntegrationError& e) {
        result.error = e.what();
    } catch (const SolveError& e) {
        result.error = e.what();
    }
    result.final_state = x;
    return result;
}

}  // namespace rfcsim
