#include "rfcsim/cli.hpp"

#include "rfcsim/analysis.hpp"
#include "rfcsim/errors.hpp"
#include "rfcsim/init.hpp"
#include "rfcsim/scenario_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace rfcsim {

namespace {

/// Post-clearing measurement offset.
constexpr double kWindowOffset = 0.2;

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct FaultWindow {
    double on = 0.0;
    double off = 0.0;
};

std::optional<FaultWindow> first_fault(const Scenario& s)
{
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        if (s.events[i].kind != EventKind::FaultOn)
            continue;
        for (std::size_t j = i + 1; j < s.events.size(); ++j)
            if (s.events[j].kind == EventKind::FaultOff && s.events[j].bus == s.events[i].bus)
                return FaultWindow{s.events[i].time, s.events[j].time};
        return FaultWindow{s.events[i].time, s.t_end};
    }
    return std::nullopt;
}

void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw Error("cannot write " + p.string());
    f << text;
    if (!f)
        throw Error("write failed for " + p.string());
}

}  // namespace

std::pair<std::string, std::string> split_override(const std::string& kv)
{
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ScenarioError("override '" + kv + "' is not of the form key=value");
    return {kv.substr(0, eq), kv.substr(eq + 1)};
}

Scenario resolve_scenario(const RunConfig& cfg)
{
    Scenario s;
    if (is_builtin(cfg.scenario)) {
        BuiltinOptions opts;
        std::vector<std::pair<std::string, std::string>> rest;
        for (const auto& [k, v] : cfg.overrides)
            if (!apply_builtin_override(opts, k, v))
                rest.emplace_back(k, v);
        s = builtin_scenario(cfg.scenario, opts);
        for (const auto& [k, v] : rest)
            apply_override(s, k, v);
    } else {
        s = load_scenario(cfg.scenario);
        for (const auto& [k, v] : cfg.overrides)
            apply_override(s, k, v);
    }
    if (cfg.dt)
        s.dt = *cfg.dt;
    if (cfg.t_end)
        s.t_end = *cfg.t_end;
    s.validate();
    return s;
}

std::vector<std::pair<std::string, std::string>> summarize(const Scenario& s, const RunResult& r)
{
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("scenario", s.name);
    rows.emplace_back("t_end", fmt(s.t_end));
    rows.emplace_back("dt", fmt(s.dt));
    rows.emplace_back("init_iterations", std::to_string(r.init.iterations));
    rows.emplace_back("init_residual", fmt(r.init.residual));
    rows.emplace_back("integration_error", r.error ? *r.error : "");

    const auto& ts = r.series;
    const auto fault = first_fault(s);
    // Without a fault the first switching event is the disturbance.
    double t_clear = 0.0;
    if (fault)
        t_clear = fault->off;
    else if (!s.events.empty())
        t_clear = std::min_element(s.events.begin(), s.events.end(), [](const Event& a, const Event& b) {
                      return a.time < b.time;
                  })->time;
    const double t_from = fault ? fault->off + kWindowOffset : t_clear;
    const double t_to = ts.size() ? ts.time().back() : 0.0;

    auto add_oscillation = [&](const std::string& channel) {
        const auto rep = analyze_channel(ts, channel, t_from, t_to, t_clear);
        rows.emplace_back(channel + "_freq_hz", rep.frequency_hz ? fmt(*rep.frequency_hz) : "");
        rows.emplace_back(channel + "_peaks", std::to_string(rep.peak_times.size()));
        rows.emplace_back(channel + "_min", fmt(rep.min_value));
        rows.emplace_back(channel + "_max", fmt(rep.max_value));
        return rep;
    };

    bool stable = true;
    for (const auto& u : s.rfcs) {
        const auto w = add_oscillation(channel_name(u.name, "omega_pu"));
        stable = stable && w.verdict.stable;
        rows.emplace_back(channel_name(u.name, "stable"), w.verdict.stable ? "1" : "0");
        rows.emplace_back(channel_name(u.name, "first_swing"), fmt(w.verdict.first_swing));
        rows.emplace_back(channel_name(u.name, "final_swing"), fmt(w.verdict.final_swing));
        add_oscillation(channel_name(u.name, "P_m"));
        add_oscillation(channel_name(u.name, "P_g"));
        add_oscillation(channel_name(u.name, "Q_g"));
        if (ts.size() > 1) {
            const auto lag = xcorr_peak_lag(ts.channel(channel_name(u.name, "P_g")),
                                            ts.channel(channel_name(u.name, "P_m_consumed")), ts.interval(), 0.25);
            rows.emplace_back(channel_name(u.name, "P_m_lag_s"), fmt(lag));
        }
        if (fault) {
            const auto d = dip(ts.channel(channel_name(u.name, "U_g")), ts.time(), fault->on, fault->off);
            rows.emplace_back(channel_name(u.name, "U_g_fault_min"), fmt(d.value));
            rows.emplace_back(channel_name(u.name, "U_g_fault_min_time"), fmt(d.time));
        }
    }
    for (std::size_t i = 0; i < s.rfcs.size(); ++i)
        for (std::size_t j = i + 1; j < s.rfcs.size(); ++j) {
            add_oscillation(relative_speed_channel(i, j));
            add_oscillation(relative_power_channel(i, j));
        }
    rows.emplace_back("stable", stable && !r.error ? "1" : "0");
    return rows;
}

std::string plot_script(const Scenario& s, const TimeSeries& ts)
{
    std::ostringstream g;
    std::vector<std::string> names = ts.names();
    auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name)
                return std::to_string(i + 2);
        throw Error("no channel " + name);
    };
    auto figure = [&](const std::string& title, const std::string& ylabel,
                      const std::vector<std::string>& channels) {
        g << "\nset title '" << title << "'\nset ylabel '" << ylabel << "'\nplot ";
        for (std::size_t i = 0; i < channels.size(); ++i)
            g << (i ? ", \\\n     " : "") << "'timeseries.csv' using 1:" << col(channels[i])
              << " with lines title '" << channels[i] << "'";
        g << "\n";
    };

    g << "set datafile separator ','\nset terminal pngcairo size 900,500\nset key autotitle columnhead\n";
    g << "set xlabel 'time [s]'\nset grid\n";
    int n = 0;
    auto output = [&](const std::string& stem) { g << "set output '" << stem << "_" << ++n << ".png'"; };

    std::vector<std::string> volts, speeds, pg_pm, q_g;
    for (const auto& u : s.rfcs) {
        volts.push_back(channel_name(u.name, "U_g"));
        speeds.push_back(channel_name(u.name, "omega_pu"));
        pg_pm.push_back(channel_name(u.name, "P_g"));
        pg_pm.push_back(channel_name(u.name, "P_m_consumed"));
        q_g.push_back(channel_name(u.name, "Q_g"));
    }
    output("voltage");
    figure("railway voltage", "|U| [p.u.]", volts);
    output("power");
    figure("single-phase and three-phase active power", "P [p.u.]", pg_pm);
    output("speed");
    figure("rotor speed", "omega [p.u.]", speeds);
    output("reactive");
    figure("single-phase reactive power", "Q [p.u.]", q_g);
    for (std::size_t i = 0; i < s.rfcs.size(); ++i)
        for (std::size_t j = i + 1; j < s.rfcs.size(); ++j) {
            output("relative");
            figure("relative rotor speed", "domega [p.u.]", {relative_speed_channel(i, j)});
            output("relative_power");
            figure("relative single-phase active power", "dP [p.u.]", {relative_power_channel(i, j)});
        }
    for (const auto& u : s.rfcs) {
        output("phase");
        g << "\nset title 'phase plot " << u.name << "'\nset xlabel 'ddelta_m [rad]'\nset ylabel 'domega [p.u.]'\n"
          << "set zlabel 'time [s]'\nsplot 'timeseries.csv' using " << col(channel_name(u.name, "ddelta_m")) << ":"
          << col(channel_name(u.name, "domega_pu")) << ":1 with lines title '" << u.name << "'\n"
          << "set xlabel 'time [s]'\n";
    }
    return g.str();
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    Scenario s;
    try {
        s = resolve_scenario(cfg);
    } catch (const Error& e) {
        err << "scenario error: " << e.what() << "\n";
        return kExitScenario;
    }

    SteadyState init;
    try {
        init = initialize(s);
    } catch (const Error& e) {
        err << "initialization failed: " << e.what() << "\n";
        return kExitInit;
    }

    std::vector<AdmittanceMatrix> topologies;
    RunOptions opts;
    opts.init = init;
    if (cfg.dump_ybus)
        opts.observer = [&](const StepInfo& info) {
            if (topologies.empty() || topologies.back() != info.net.matrix())
                topologies.push_back(info.net.matrix());
        };

    RunResult result;
    try {
        result = run(s, opts);
    } catch (const Error& e) {
        err << "run failed: " << e.what() << "\n";
        return kExitIntegration;
    }

    try {
        std::filesystem::create_directories(cfg.out_dir);
        {
            std::ostringstream csv;
            result.series.write_csv(csv);
            write_file(cfg.out_dir / "timeseries.csv", csv.str());
        }
        const auto rows = summarize(s, result);
        std::ostringstream sum;
        sum << "metric,value\n";
        for (const auto& [k, v] : rows)
            sum << k << ',' << v << "\n";
        write_file(cfg.out_dir / "summary.csv", sum.str());
        write_file(cfg.out_dir / "init_report.txt", format_init_report(s, init));
        if (cfg.emit_plots)
            write_file(cfg.out_dir / "plots.gp", plot_script(s, result.series));
        if (cfg.dump_ybus) {
            std::vector<std::string> buses = s.grid.buses;
            for (std::size_t i = 0; i < topologies.size(); ++i) {
                std::ostringstream y;
                write_admittance_csv(y, topologies[i], buses);
                write_file(cfg.out_dir / ("ybus_" + std::to_string(i) + ".csv"), y.str());
            }
        }
        for (const auto& [k, v] : rows)
            out << k << " = " << v << "\n";
        if (result.error) {
            err << "integration aborted: " << *result.error << "\n";
            return kExitIntegration;
        }
        for (const auto& [k, v] : rows)
            if (k == "stable" && v != "1") {
                err << "system did not settle\n";
                return kExitUnstable;
            }
    } catch (const std::exception& e) {
        err << "output failed: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace rfcsim
