// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "rfcsim/analysis.hpp"
#include "rfcsim/init.hpp"
#include "rfcsim/network.hpp"
#include "rfcsim/scenario_io.hpp"
#include "rfcsim/sim.hpp"

#include "fixtures.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <string>

using namespace rfcsim;

namespace {

// Targets and tolerances.
constexpr double kDipTarget = 0.40, kDipTol = 0.05;
constexpr double kRuntimeLimit = 5.0;
constexpr double kRotorTarget = 1.96, kRotorTol = 0.30;
constexpr double kRelativeTarget = 2.27, kRelativeTol = 0.40;
constexpr double kReactiveTarget = 2.45, kReactiveTol = 0.50;
constexpr double kSameFrequencyTol = 0.05;
constexpr double kHoldTol = 1e-6;
constexpr double kRk4Ratio = 15.0;
constexpr double kResidualTol = 1e-10;
constexpr double kBalanceTol = 1e-8;
constexpr double kLosslessTol = 1e-8;
constexpr double kTransformTol = 1e-12;
constexpr double kMaxLag = 0.25;

constexpr double kFaultOn = 1.8;
constexpr double kFaultOff = 2.0;
constexpr double kWindowStart = kFaultOff + 0.2;

int failures = 0;

void report(bool ok, const std::string& id, const std::string& text)
{
    std::printf("[%s] %s %s\n", ok ? "PASS" : "FAIL", id.c_str(), text.c_str());
    if (!ok)
        ++failures;
}

std::string num(double v, int digits = 4)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string sci(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::string gap(const std::optional<double>& a, const std::optional<double>& b)
{
    return a && b ? num(std::abs(*a - *b), 4) : std::string("n/a");
}

std::string num(const std::optional<double>& v, int digits = 4)
{
    return v ? num(*v, digits) : std::string("n/a");
}

bool within(const std::optional<double>& v, double target, double tol)
{
    return v && std::abs(*v - target) <= tol;
}

OscillationReport osc(const RunResult& r, const std::string& channel, double t_end)
{
    return analyze_channel(r.series, channel, kWindowStart, t_end, kFaultOff);
}

std::string peaks_note(const OscillationReport& rep)
{
    return std::to_string(rep.peak_times.size()) + " peaks";
}

std::vector<double> window(const RunResult& r, const std::string& channel, double from)
{
    const auto& t = r.series.time();
    const auto& v = r.series.channel(channel);
    std::vector<double> out;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] >= from - 1e-9)
            out.push_back(v[k]);
    return out;
}

struct StepChecks {
    double residual = 0.0;
    double balance = 0.0;
};

RunResult run_checked(const Scenario& s, StepChecks& checks)
{
    const auto init = initialize(s);
    const SystemModel model(s, init);
    RunOptions opts;
    opts.init = init;
    opts.observer = [&](const StepInfo& info) {
        const auto& u = info.eval.voltages;
        checks.residual = std::max(checks.residual, info.net.residual(u, info.eval.injections));
        Complex source(0.0, 0.0);
        for (std::size_t b = 0; b < u.size(); ++b)
            source += complex_power(u[b], info.eval.injections[b]);
        Complex absorbed = branch_losses(model.grid(), u);
        for (const auto& m : model.rfcs())
            absorbed += shunt_power(u[m.bus], 1.0 / Complex(0.0, m.generator.xd_st));
        for (const auto& l : model.grid().loads)
            absorbed += shunt_power(u[model.grid().index_of(l.bus)], l.admittance);
        for (const auto& l : info.topology.loads)
            absorbed += shunt_power(u[l.bus], l.admittance);
        for (const auto& f : info.topology.faults)
            absorbed += shunt_power(u[f.bus], f.admittance);
        checks.balance = std::max(checks.balance, std::abs(source - absorbed));
    };
    return run(s, opts);
}

double rk4_error_ratio()
{
    const double w = 2.0 * 3.141592653589793 * 2.0;
    const Rhs osc = [w](double, std::span<const double> x) { return StateVector{x[1], -w * w * x[0]}; };
    auto err = [&](double dt) {
        StateVector x{1.0, 0.0};
        const int n = static_cast<int>(std::lround(1.0 / dt));
        for (int k = 0; k < n; ++k)
            x = rk4_step(osc, x, k * dt, dt);
        return std::abs(x[0] - std::cos(w * n * dt));
    };
    return std::min(err(0.01) / err(0.005), err(0.005) / err(0.0025));
}

double transform_error()
{
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> val(-5.0, 5.0), ang(-20.0, 20.0);
    std::uniform_int_distribution<int> half(1, 12);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::array<double, 2> v{val(rng), val(rng)};
        const double d = ang(rng);
        const int poles = 2 * half(rng);
        const auto tv = rotor_transform(v, d, poles);
        const auto ttv = rotor_transform(tv, d, poles);
        const double n = std::hypot(v[0], v[1]);
        worst = std::max(worst, std::abs(std::hypot(tv[0], tv[1]) - n) / n);
        worst = std::max(worst, std::hypot(ttv[0] - v[0], ttv[1] - v[1]) / n);
    }
    return worst;
}

double hold_drift(Scenario s)
{
    s.events.clear();
    s.t_end = 10.0;
    const auto r = run(s);
    if (r.error)
        return INFINITY;
    double drift = 0.0;
    for (const auto& name : r.series.names()) {
        const auto& v = r.series.channel(name);
        for (double x : v)
            drift = std::max(drift, std::abs(x - v.front()));
    }
    return drift;
}

double lossless_error(const Scenario& s)
{
    const auto init = initialize(s);
    const SystemModel model(s, init);
    const NetworkSolver net(model.network_matrix({}));
    const auto ev = model.derivative_stack(model.initial_state(), net);
    double worst = 0.0;
    for (const auto& sig : ev.rfcs)
        worst = std::max(worst, std::abs(sig.p_m + sig.p_g));
    for (const auto& r : init.rfcs)
        worst = std::max(worst, std::abs(r.motor.p + r.generator.p));
    return worst;
}

}  // namespace

int main()
{
    const auto case1 = builtin_scenario("case1");
    const auto case2 = builtin_scenario("case2");

    StepChecks checks1, checks2;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r1 = run_checked(case1, checks1);
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto r2 = run_checked(case2, checks2);
    if (r1.error || r2.error) {
        std::printf("[FAIL] run aborted: %s\n", (r1.error ? *r1.error : *r2.error).c_str());
        return 1;
    }

    // 1. Fault dip and runtime. The runtime includes the per-step checks above.
    {
        const auto d = dip(r1.series.channel("RFC1_U_g"), r1.series.time(), kFaultOn, kFaultOff);
        const bool ok = std::abs(d.value - kDipTarget) <= kDipTol && runtime < kRuntimeLimit;
        report(ok, "C1",
               "case1 railway voltage min in [1.8, 2.0] s = " + num(d.value) + " p.u. at t = " + num(d.time, 3) +
                   " s (target " + num(kDipTarget, 2) + " +/- " + num(kDipTol, 2) + "); 20 s run took " +
                   num(runtime, 2) + " s (limit " + num(kRuntimeLimit, 1) + " s)");
    }

    // 2. Case1 rotor oscillation and motor power at the same frequency.
    {
        const auto w = osc(r1, "RFC1_omega_pu", case1.t_end);
        const auto pm = osc(r1, "RFC1_P_m", case1.t_end);
        const bool ok = within(w.frequency_hz, kRotorTarget, kRotorTol) && w.frequency_hz && pm.frequency_hz &&
                        std::abs(*pm.frequency_hz - *w.frequency_hz) <= kSameFrequencyTol;
        report(ok, "C2",
               "case1 rotor speed " + num(w.frequency_hz) + " Hz (" + peaks_note(w) + ", target " +
                   num(kRotorTarget, 2) + " +/- " + num(kRotorTol, 2) + "); motor power " +
                   num(pm.frequency_hz) + " Hz (" + peaks_note(pm) + ", off by " + gap(pm.frequency_hz, w.frequency_hz) +
                   " Hz, limit " + num(kSameFrequencyTol, 2) + " Hz)");
    }

    // 3. Case2 individual rotor oscillations and speed dips.
    {
        const auto w1 = osc(r2, "RFC1_omega_pu", case2.t_end);
        const auto w2 = osc(r2, "RFC2_omega_pu", case2.t_end);
        const auto d1 = dip(r2.series.channel("RFC1_omega_pu"), r2.series.time(), kFaultOn, case2.t_end);
        const auto d2 = dip(r2.series.channel("RFC2_omega_pu"), r2.series.time(), kFaultOn, case2.t_end);
        const bool ok = within(w1.frequency_hz, kRotorTarget, kRotorTol) &&
                        within(w2.frequency_hz, kRotorTarget, kRotorTol) && d1.value < d2.value;
        report(ok, "C3",
               "case2 rotor speeds RFC1 " + num(w1.frequency_hz) + " Hz (" + peaks_note(w1) + "), RFC2 " +
                   num(w2.frequency_hz) + " Hz (" + peaks_note(w2) + "), target " + num(kRotorTarget, 2) +
                   " +/- " + num(kRotorTol, 2) + "; min speed RFC1 " + num(d1.value, 5) + " < RFC2 " +
                   num(d2.value, 5));
    }

    // 4. Case2 relative mode, inter-converter active power and reactive power.
    {
        const auto dw = osc(r2, "domega_1_2", case2.t_end);
        const auto dp = osc(r2, "dP_g_1_2", case2.t_end);
        const auto q1 = osc(r2, "RFC1_Q_g", case2.t_end);
        const auto q2 = osc(r2, "RFC2_Q_g", case2.t_end);
        const bool rel = within(dw.frequency_hz, kRelativeTarget, kRelativeTol);
        const bool same = dw.frequency_hz && dp.frequency_hz &&
                          std::abs(*dp.frequency_hz - *dw.frequency_hz) <= kSameFrequencyTol;
        const bool q = within(q1.frequency_hz, kReactiveTarget, kReactiveTol) &&
                       within(q2.frequency_hz, kReactiveTarget, kReactiveTol);
        report(rel && same && q, "C4",
               "case2 relative speed " + num(dw.frequency_hz) + " Hz (" + peaks_note(dw) + ", target " +
                   num(kRelativeTarget, 2) + " +/- " + num(kRelativeTol, 2) + "); relative active power " +
                   num(dp.frequency_hz) + " Hz (" + peaks_note(dp) + ", off by " + gap(dp.frequency_hz, dw.frequency_hz) +
                   " Hz, limit " + num(kSameFrequencyTol, 2) + " Hz); reactive power RFC1 " + num(q1.frequency_hz) + " Hz (" + peaks_note(q1) + "), RFC2 " +
                   num(q2.frequency_hz) + " Hz (" + peaks_note(q2) + "), target " + num(kReactiveTarget, 2) +
                   " +/- " + num(kReactiveTol, 2));
    }

    // 5. Motor power lags generator power.
    {
        const double dt = r1.series.interval();
        std::string text;
        bool ok = true;
        auto lag_of = [&](const RunResult& r, const std::string& rfc, const std::string& label) {
            const double lag = xcorr_peak_lag(window(r, rfc + "_P_g", kFaultOn),
                                              window(r, rfc + "_P_m_consumed", kFaultOn), dt, kMaxLag);
            ok = ok && lag > 0.0;
            text += (text.empty() ? "" : ", ") + label + " " + num(lag, 3) + " s";
        };
        lag_of(r1, "RFC1", "case1 RFC1");
        lag_of(r2, "RFC1", "case2 RFC1");
        lag_of(r2, "RFC2", "case2 RFC2");
        report(ok, "C5", "three-phase power lag behind single-phase power (must be > 0): " + text);
    }

    // 6. Steady-state hold.
    {
        double worst = 0.0;
        for (const auto& s : {case1, case2, fixtures::single_fed_load(), fixtures::symmetric_double_feed()})
            worst = std::max(worst, hold_drift(s));
        report(worst < kHoldTol, "C6",
               "10 s event-free drift over all channels and four operating points = " + sci(worst) +
                   " (limit " + sci(kHoldTol) + ")");
    }

    // 7. Numerical correctness suite.
    {
        const double ratio = rk4_error_ratio();
        const double residual = std::max(checks1.residual, checks2.residual);
        const double balance = std::max(checks1.balance, checks2.balance);
        const double transform = transform_error();
        double lossless = 0.0;
        for (const auto& s : {case1, case2, fixtures::single_fed_load(), fixtures::symmetric_double_feed(),
                              fixtures::shared_station()})
            lossless = std::max(lossless, lossless_error(s));
        char buf[400];
        std::snprintf(buf, sizeof buf,
                      "RK4 error ratio %.2f (>= %.0f); max solve residual %.2e (< %.0e); max power balance error "
                      "%.2e (< %.0e); rotor transform error %.2e over 1000 samples; steady-state |P_m + P_g| %.2e "
                      "(< %.0e)",
                      ratio, kRk4Ratio, residual, kResidualTol, balance, kBalanceTol, transform, lossless,
                      kLosslessTol);
        const bool ok = ratio >= kRk4Ratio && residual < kResidualTol && balance < kBalanceTol &&
                        transform < kTransformTol && lossless < kLosslessTol;
        report(ok, "C7", buf);
    }

    // 8. Stability verdict.
    {
        std::string text;
        bool ok = true;
        auto verdict = [&](const RunResult& r, const std::string& channel, const std::string& label) {
            const auto v = stability_verdict(r.series, channel, kFaultOff);
            ok = ok && v.stable;
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s %s (last second %.2e vs first %.2e)", label.c_str(),
                          v.stable ? "settles" : "does not settle", v.final_swing, v.first_swing);
            text += (text.empty() ? "" : "; ") + std::string(buf);
        };
        verdict(r1, "RFC1_omega_pu", "case1");
        verdict(r2, "RFC1_omega_pu", "case2 RFC1");
        verdict(r2, "RFC2_omega_pu", "case2 RFC2");
        verdict(r2, "domega_1_2", "case2 relative");
        report(ok, "C8", text);
    }

    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
