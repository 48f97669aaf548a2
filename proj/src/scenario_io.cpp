#include "rfcsim/scenario_io.hpp"

#include "rfcsim/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace rfcsim {

namespace {

struct MachineField {
    const char* key;
    double MachineParams::*member;
};

constexpr std::array<MachineField, 10> kMachineFields{{
    {"xd", &MachineParams::xd},
    {"xq", &MachineParams::xq},
    {"xd_t", &MachineParams::xd_t},
    {"xd_st", &MachineParams::xd_st},
    {"xq_st", &MachineParams::xq_st},
    {"tdo_t", &MachineParams::tdo_t},
    {"tdo_st", &MachineParams::tdo_st},
    {"tqo_st", &MachineParams::tqo_st},
    {"s_rated", &MachineParams::s_rated},
    {"x_t", &MachineParams::x_t},
}};

struct ExciterField {
    const char* key;
    double ExciterParams::*member;
};

constexpr std::array<ExciterField, 16> kExciterFields{{
    {"k_a", &ExciterParams::k_a},   {"t_a", &ExciterParams::t_a},       {"k_e", &ExciterParams::k_e},
    {"t_e", &ExciterParams::t_e},   {"k_f", &ExciterParams::k_f},       {"t_f1", &ExciterParams::t_f1},
    {"t_f2", &ExciterParams::t_f2}, {"t_f3", &ExciterParams::t_f3},     {"e1", &ExciterParams::e1},
    {"s_e1", &ExciterParams::s_e1}, {"e2", &ExciterParams::e2},         {"s_e2", &ExciterParams::s_e2},
    {"v_rmax", &ExciterParams::v_rmax}, {"v_rmin", &ExciterParams::v_rmin},
    {"u0", &ExciterParams::u0},     {"k_u", &ExciterParams::k_u},
}};

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_double(std::string_view text, std::string_view key, int line)
{
    text = trim(text);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw ScenarioError("'" + std::string(key) + "': expected a number, got '" + std::string(text) + "'", line);
    return v;
}

int parse_int(std::string_view text, std::string_view key, int line)
{
    text = trim(text);
    int v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw ScenarioError("'" + std::string(key) + "': expected an integer, got '" + std::string(text) + "'", line);
    return v;
}

bool set_machine_field(MachineParams& m, std::string_view field, std::string_view value, int line)
{
    if (field == "poles") {
        m.poles = parse_int(value, field, line);
        return true;
    }
    for (const auto& f : kMachineFields)
        if (field == f.key) {
            m.*f.member = parse_double(value, field, line);
            return true;
        }
    return false;
}

bool set_exciter_field(ExciterParams& e, std::string_view field, std::string_view value, int line)
{
    for (const auto& f : kExciterFields)
        if (field == f.key) {
            e.*f.member = parse_double(value, field, line);
            return true;
        }
    return false;
}

// Keys inside an [rfc NAME] section, also reachable as `<name>.<key>` overrides.
bool set_rfc_field(RfcUnit& u, std::string_view key, std::string_view value, int line)
{
    if (key == "gen_bus") {
        u.gen_bus = std::string(trim(value));
        return true;
    }
    if (key == "h_motor") {
        u.h_motor = parse_double(value, key, line);
        return true;
    }
    if (key == "h_generator") {
        u.h_generator = parse_double(value, key, line);
        return true;
    }
    const auto dot = key.find('.');
    if (dot == std::string_view::npos)
        return false;
    const auto group = key.substr(0, dot);
    const auto field = key.substr(dot + 1);
    if (group == "motor")
        return set_machine_field(u.motor, field, value, line);
    if (group == "generator")
        return set_machine_field(u.generator, field, value, line);
    if (group == "exciter")
        return set_exciter_field(u.exciter, field, value, line);
    return false;
}

Complex parse_admittance(const std::vector<std::string_view>& parts, std::size_t at, std::string_view key, int line)
{
    return {parse_double(parts[at], key, line), parse_double(parts[at + 1], key, line)};
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* event_key(EventKind k)
{
    switch (k) {
    case EventKind::FaultOn:
        return "fault_on";
    case EventKind::FaultOff:
        return "fault_off";
    case EventKind::LoadOn:
        return "load_on";
    case EventKind::LoadOff:
        return "load_off";
    }
    return "";
}

}  // namespace

bool is_builtin(std::string_view name) { return name == "case1" || name == "case2"; }

Scenario builtin_scenario(std::string_view name, const BuiltinOptions& opts)
{
    if (!is_builtin(name))
        throw ScenarioError("unknown builtin scenario '" + std::string(name) + "'");
    if (!(opts.fault_distance_km > 0.0 && opts.line_length_km > opts.fault_distance_km))
        throw ScenarioError("fault must lie strictly inside the catenary section");

    const bool doubly_fed = name == "case2";
    Scenario s;
    s.name = std::string(name);
    s.grid.u_base_kv = 16.5;
    s.grid.s_base_mva = 10.0;
    s.u_base_50_kv = 6.3;
    const std::string far_end = doubly_fed ? "G2" : "E";
    s.grid.buses = {"G1", "F", far_end};
    s.grid.branches = {
        {"G1", "F", 0.2, 0.2, opts.fault_distance_km},
        {"F", far_end, 0.2, 0.2, opts.line_length_km - opts.fault_distance_km},
    };
    s.rfcs.push_back(q48_q49_unit("RFC1", "G1"));
    if (doubly_fed)
        s.rfcs.push_back(q48_q49_unit("RFC2", "G2"));
    s.events = {
        {opts.fault_on, EventKind::FaultOn, "F", Complex(opts.fault_admittance, 0.0)},
        {opts.fault_off, EventKind::FaultOff, "F", Complex(0.0, 0.0)},
    };
    s.t_end = 20.0;
    s.dt = 1e-3;
    s.output_stride = 1;
    return s;
}

Scenario parse_scenario(std::istream& in, const std::string& source)
{
    Scenario s;
    s.grid.buses.clear();
    enum class Section { None, Scenario, Grid, Rfc, Events } section = Section::None;
    RfcUnit* rfc = nullptr;

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = raw;
        if (const auto hash = text.find('#'); hash != std::string_view::npos)
            text = text.substr(0, hash);
        text = trim(text);
        if (text.empty())
            continue;

        if (text.front() == '[') {
            if (text.back() != ']')
                throw ScenarioError(source + ": unterminated section header", line);
            const auto parts = split_ws(text.substr(1, text.size() - 2));
            if (parts.empty())
                throw ScenarioError(source + ": empty section header", line);
            if (parts[0] == "scenario" && parts.size() == 1)
                section = Section::Scenario;
            else if (parts[0] == "grid" && parts.size() == 1)
                section = Section::Grid;
            else if (parts[0] == "events" && parts.size() == 1)
                section = Section::Events;
            else if (parts[0] == "rfc" && parts.size() == 2) {
                section = Section::Rfc;
                const std::string name(parts[1]);
                for (const auto& u : s.rfcs)
                    if (u.name == name)
                        throw ScenarioError(source + ": duplicate rfc section '" + name + "'", line);
                s.rfcs.push_back(q48_q49_unit(name, ""));
                rfc = &s.rfcs.back();
            } else
                throw ScenarioError(source + ": unknown section '" + std::string(text) + "'", line);
            continue;
        }

        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw ScenarioError(source + ": expected 'key = value'", line);
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));
        const auto parts = split_ws(value);
        auto need = [&](std::size_t n) {
            if (parts.size() != n)
                throw ScenarioError(source + ": '" + std::string(key) + "' expects " + std::to_string(n) +
                                        " fields, got " + std::to_string(parts.size()),
                                    line);
        };

        switch (section) {
        case Section::None:
            throw ScenarioError(source + ": key outside of any section", line);
        case Section::Scenario:
            if (key == "name")
                s.name = std::string(value);
            else if (key == "dt")
                s.dt = parse_double(value, key, line);
            else if (key == "t_end")
                s.t_end = parse_double(value, key, line);
            else if (key == "output_stride")
                s.output_stride = parse_int(value, key, line);
            else if (key == "base_power_mva")
                s.grid.s_base_mva = parse_double(value, key, line);
            else if (key == "base_voltage_kv")
                s.grid.u_base_kv = parse_double(value, key, line);
            else if (key == "base_voltage_50_kv")
                s.u_base_50_kv = parse_double(value, key, line);
            else
                throw ScenarioError(source + ": unknown key '" + std::string(key) + "' in [scenario]", line);
            break;
        case Section::Grid:
            if (key == "bus") {
                need(1);
                s.grid.buses.emplace_back(parts[0]);
            } else if (key == "branch") {
                need(5);
                s.grid.branches.push_back({std::string(parts[0]), std::string(parts[1]),
                                           parse_double(parts[2], key, line), parse_double(parts[3], key, line),
                                           parse_double(parts[4], key, line)});
            } else if (key == "load") {
                need(3);
                s.grid.loads.push_back({std::string(parts[0]), parse_admittance(parts, 1, key, line)});
            } else
                throw ScenarioError(source + ": unknown key '" + std::string(key) + "' in [grid]", line);
            break;
        case Section::Rfc:
            if (!set_rfc_field(*rfc, key, value, line))
                throw ScenarioError(source + ": unknown key '" + std::string(key) + "' in [rfc " + rfc->name + "]",
                                    line);
            break;
        case Section::Events: {
            Event e;
            if (key == "fault_on" || key == "load_on" || key == "load_off") {
                need(4);
                e.admittance = parse_admittance(parts, 2, key, line);
                e.kind = key == "fault_on" ? EventKind::FaultOn
                                           : (key == "load_on" ? EventKind::LoadOn : EventKind::LoadOff);
            } else if (key == "fault_off") {
                need(2);
                e.kind = EventKind::FaultOff;
            } else
                throw ScenarioError(source + ": unknown event '" + std::string(key) + "'", line);
            e.time = parse_double(parts[0], key, line);
            e.bus = std::string(parts[1]);
            s.events.push_back(e);
            break;
        }
        }
    }

    try {
        s.validate();
    } catch (const ScenarioError& e) {
        throw ScenarioError(source + ": " + e.what());
    } catch (const ParameterError& e) {
        throw ScenarioError(source + ": " + e.what());
    }
    return s;
}

Scenario load_scenario(const std::string& name_or_path, const BuiltinOptions& opts)
{
    if (is_builtin(name_or_path))
        return builtin_scenario(name_or_path, opts);
    std::ifstream in(name_or_path);
    if (!in)
        throw ScenarioError("cannot open scenario file '" + name_or_path + "'");
    return parse_scenario(in, name_or_path);
}

std::string serialize_scenario(const Scenario& s)
{
    std::ostringstream os;
    os << "[scenario]\n";
    os << "name = " << s.name << "\n";
    os << "dt = " << fmt(s.dt) << "\n";
    os << "t_end = " << fmt(s.t_end) << "\n";
    os << "output_stride = " << s.output_stride << "\n";
    os << "base_power_mva = " << fmt(s.grid.s_base_mva) << "\n";
    os << "base_voltage_kv = " << fmt(s.grid.u_base_kv) << "\n";
    os << "base_voltage_50_kv = " << fmt(s.u_base_50_kv) << "\n";

    os << "\n[grid]\n";
    for (const auto& b : s.grid.buses)
        os << "bus = " << b << "\n";
    for (const auto& b : s.grid.branches)
        os << "branch = " << b.from << ' ' << b.to << ' ' << fmt(b.r_ohm_per_km) << ' ' << fmt(b.x_ohm_per_km)
           << ' ' << fmt(b.length_km) << "\n";
    for (const auto& l : s.grid.loads)
        os << "load = " << l.bus << ' ' << fmt(l.admittance.real()) << ' ' << fmt(l.admittance.imag()) << "\n";

    for (const auto& u : s.rfcs) {
        os << "\n[rfc " << u.name << "]\n";
        os << "gen_bus = " << u.gen_bus << "\n";
        os << "h_motor = " << fmt(u.h_motor) << "\n";
        os << "h_generator = " << fmt(u.h_generator) << "\n";
        for (const auto* group : {"motor", "generator"}) {
            const MachineParams& m = std::string_view(group) == "motor" ? u.motor : u.generator;
            for (const auto& f : kMachineFields)
                os << group << '.' << f.key << " = " << fmt(m.*f.member) << "\n";
            os << group << ".poles = " << m.poles << "\n";
        }
        for (const auto& f : kExciterFields)
            os << "exciter." << f.key << " = " << fmt(u.exciter.*f.member) << "\n";
    }

    os << "\n[events]\n";
    for (const auto& e : s.events) {
        os << event_key(e.kind) << " = " << fmt(e.time) << ' ' << e.bus;
        if (e.kind != EventKind::FaultOff)
            os << ' ' << fmt(e.admittance.real()) << ' ' << fmt(e.admittance.imag());
        os << "\n";
    }
    return os.str();
}

void apply_override(Scenario& s, std::string_view key, std::string_view value)
{
    const std::string k(key);
    if (key == "dt") {
        s.dt = parse_double(value, key, 0);
    } else if (key == "t_end") {
        s.t_end = parse_double(value, key, 0);
    } else if (key == "output_stride") {
        s.output_stride = parse_int(value, key, 0);
    } else if (key == "K_U" || key == "k_u") {
        const double v = parse_double(value, key, 0);
        for (auto& u : s.rfcs)
            u.exciter.k_u = v;
    } else if (key == "U_0" || key == "u0") {
        const double v = parse_double(value, key, 0);
        for (auto& u : s.rfcs)
            u.exciter.u0 = v;
    } else if (key == "fault_admittance") {
        const double v = parse_double(value, key, 0);
        for (auto& e : s.events)
            if (e.kind == EventKind::FaultOn)
                e.admittance = Complex(v, 0.0);
    } else if (key.starts_with("exciter.")) {
        for (auto& u : s.rfcs)
            if (!set_exciter_field(u.exciter, key.substr(8), value, 0))
                throw ScenarioError("unknown exciter field in override '" + k + "'");
    } else {
        const auto dot = key.find('.');
        if (dot != std::string_view::npos) {
            const auto name = key.substr(0, dot);
            for (auto& u : s.rfcs)
                if (u.name == name) {
                    if (key.substr(dot + 1) == "gen_bus" || !set_rfc_field(u, key.substr(dot + 1), value, 0))
                        throw ScenarioError("unknown converter field in override '" + k + "'");
                    return;
                }
        }
        throw ScenarioError("unknown override '" + k + "'");
    }
}

bool apply_builtin_override(BuiltinOptions& opts, std::string_view key, std::string_view value)
{
    if (key == "line_length")
        opts.line_length_km = parse_double(value, key, 0);
    else if (key == "fault_distance")
        opts.fault_distance_km = parse_double(value, key, 0);
    else if (key == "fault_admittance")
        opts.fault_admittance = parse_double(value, key, 0);
    else
        return false;
    return true;
}

}  // namespace rfcsim
