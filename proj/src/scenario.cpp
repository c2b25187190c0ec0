#include "aclesim/scenario.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace aclesim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string t;
    while (is >> t)
        out.push_back(t);
    return out;
}

double num(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("invalid number '" + s + "' for " + what);
    }
}

int inum(const std::string& s, const std::string& what) {
    const double v = num(s, what);
    if (v != static_cast<long long>(v))
        throw DataError("expected integer for " + what + ", got '" + s + "'");
    return static_cast<int>(v);
}

bool bnum(const std::string& s, const std::string& what) {
    if (s == "1" || s == "true")
        return true;
    if (s == "0" || s == "false")
        return false;
    throw DataError("expected boolean (0/1) for " + what + ", got '" + s + "'");
}

void expect_tokens(const std::vector<std::string>& t, size_t n, const std::string& what) {
    if (t.size() != n)
        throw DataError(what + ": expected " + std::to_string(n) + " fields, got " +
                        std::to_string(t.size()));
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

} // namespace

std::vector<std::pair<std::string, std::string>>& SectionDoc::section(const std::string& name) {
    for (auto& [n, rows] : sections)
        if (n == name)
            return rows;
    sections.emplace_back(name, std::vector<std::pair<std::string, std::string>>{});
    return sections.back().second;
}

const std::vector<std::pair<std::string, std::string>>*
SectionDoc::find(const std::string& name) const {
    for (const auto& [n, rows] : sections)
        if (n == name)
            return &rows;
    return nullptr;
}

void SectionDoc::set_scalar(const std::string& section_name, const std::string& key,
                            const std::string& value) {
    auto& rows = section(section_name);
    for (auto& [k, v] : rows)
        if (k == key) {
            v = value;
            return;
        }
    rows.emplace_back(key, value);
}

SectionDoc parse_scenario_text(const std::string& text) {
    SectionDoc doc;
    std::istringstream is(text);
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';')
            continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw DataError("line " + std::to_string(lineno) + ": malformed section header");
            current = trim(s.substr(1, s.size() - 2));
            doc.section(current);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos || current.empty())
            throw DataError("line " + std::to_string(lineno) + ": expected 'key = value'");
        doc.section(current).emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    return doc;
}

namespace {

const std::vector<std::pair<std::string, std::string>>&
require_section(const SectionDoc& doc, const std::string& name) {
    const auto* rows = doc.find(name);
    if (!rows)
        throw DataError("missing scenario section [" + name + "]");
    return *rows;
}

struct KeyReader {
    const std::vector<std::pair<std::string, std::string>>& rows;
    std::string section;
    mutable std::vector<bool> used;

    KeyReader(const std::vector<std::pair<std::string, std::string>>& r, std::string sec)
        : rows(r), section(std::move(sec)), used(r.size(), false) {}

    std::vector<std::string> all(const std::string& key) const {
        std::vector<std::string> out;
        for (size_t i = 0; i < rows.size(); ++i)
            if (rows[i].first == key) {
                used[i] = true;
                out.push_back(rows[i].second);
            }
        return out;
    }
    std::string scalar(const std::string& key, const std::string& def = "",
                       bool required = false) const {
        const auto v = all(key);
        if (v.empty()) {
            if (required)
                throw DataError("[" + section + "] missing key '" + key + "'");
            return def;
        }
        if (v.size() > 1)
            throw DataError("[" + section + "] key '" + key + "' given more than once");
        return v.front();
    }
    void finish() const {
        for (size_t i = 0; i < rows.size(); ++i)
            if (!used[i])
                throw DataError("[" + section + "] unknown key '" + rows[i].first + "'");
    }
};

} // namespace

Scenario build_scenario(const SectionDoc& doc) {
    Scenario sc;
    for (const auto& [name, rows] : doc.sections) {
        static const std::vector<std::string> known = {"system", "buses",  "branches",
                                                       "loads",  "machines", "controls",
                                                       "hvdc",   "acle",   "events", "solver"};
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw DataError("unknown scenario section [" + name + "]");
    }

    {
        KeyReader r(require_section(doc, "system"), "system");
        sc.network.base_mva = num(r.scalar("base_mva", "100"), "base_mva");
        sc.network.base_kv = num(r.scalar("base_kv", "220"), "base_kv");
        sc.network.freq_hz = num(r.scalar("freq_hz", "50"), "freq_hz");
        r.finish();
    }
    {
        KeyReader r(require_section(doc, "buses"), "buses");
        for (const auto& row : r.all("bus")) {
            const auto t = tokens(row);
            expect_tokens(t, 6, "bus row");
            Bus b;
            b.id = inum(t[0], "bus id");
            if (t[1] == "slack")
                b.kind = BusKind::Slack;
            else if (t[1] == "PV")
                b.kind = BusKind::PV;
            else if (t[1] == "PQ")
                b.kind = BusKind::PQ;
            else
                throw DataError("unknown bus kind '" + t[1] + "'");
            b.base_kv = num(t[2], "bus base_kv");
            if (b.base_kv <= 0)
                throw DataError("bus base_kv must be positive");
            b.v_set = num(t[3], "bus v_set");
            b.shunt_g = num(t[4], "bus shunt_g");
            b.shunt_b = num(t[5], "bus shunt_b");
            sc.network.buses.push_back(b);
        }
        r.finish();
    }
    {
        KeyReader r(require_section(doc, "branches"), "branches");
        for (const auto& row : r.all("branch")) {
            const auto t = tokens(row);
            expect_tokens(t, 8, "branch row");
            Branch b;
            b.circuit_id = t[0];
            b.from = inum(t[1], "branch from");
            b.to = inum(t[2], "branch to");
            b.r = num(t[3], "branch r");
            b.x = num(t[4], "branch x");
            b.b_shunt = num(t[5], "branch b");
            b.tap = num(t[6], "branch tap");
            b.in_service = bnum(t[7], "branch in_service");
            if (b.x == 0.0)
                throw DataError("branch '" + b.circuit_id + "' has zero reactance");
            sc.network.branches.push_back(b);
        }
        r.finish();
    }
    {
        KeyReader r(require_section(doc, "loads"), "loads");
        for (const auto& row : r.all("load")) {
            const auto t = tokens(row);
            expect_tokens(t, 3, "load row");
            sc.network.loads.push_back(
                {inum(t[0], "load bus"), num(t[1], "load p_mw"), num(t[2], "load q_mvar")});
        }
        r.finish();
    }
    {
        KeyReader r(require_section(doc, "machines"), "machines");
        for (const auto& row : r.all("machine")) {
            const auto t = tokens(row);
            expect_tokens(t, 18, "machine row");
            GenUnit u;
            auto& p = u.machine.params;
            int k = 0;
            p.name = t[k++];
            p.bus = inum(t[k++], "machine bus");
            p.rated_mva = num(t[k++], "machine mva");
            p.h = num(t[k++], "machine H");
            p.d = num(t[k++], "machine D");
            p.xd = num(t[k++], "xd");
            p.xq = num(t[k++], "xq");
            p.xd_p = num(t[k++], "xd'");
            p.xq_p = num(t[k++], "xq'");
            p.xd_pp = num(t[k++], "xd''");
            p.xq_pp = num(t[k++], "xq''");
            p.xl = num(t[k++], "xl");
            p.td0_p = num(t[k++], "Td0'");
            p.tq0_p = num(t[k++], "Tq0'");
            p.td0_pp = num(t[k++], "Td0''");
            p.tq0_pp = num(t[k++], "Tq0''");
            p.ra = num(t[k++], "ra");
            u.p_mw = num(t[k++], "machine p_mw");
            if (!(p.xd >= p.xd_p && p.xd_p > p.xl && p.h > 0))
                throw DataError("machine " + p.name + ": implausible reactances or inertia");
            sc.generators.push_back(u);
        }
        r.finish();
    }
    {
        KeyReader r(require_section(doc, "controls"), "controls");
        auto find_gen = [&sc](const std::string& name) -> GenUnit& {
            for (auto& g : sc.generators)
                if (g.machine.params.name == name)
                    return g;
            throw DataError("controls reference unknown machine '" + name + "'");
        };
        for (const auto& row : r.all("exciter")) {
            const auto t = tokens(row);
            expect_tokens(t, 6, "exciter row");
            auto& e = find_gen(t[0]).machine.controls.exciter;
            e.enabled = bnum(t[1], "exciter enabled");
            e.ka = num(t[2], "Ka");
            e.ta = num(t[3], "Ta");
            e.efd_min = num(t[4], "Efd min");
            e.efd_max = num(t[5], "Efd max");
        }
        for (const auto& row : r.all("pss")) {
            const auto t = tokens(row);
            expect_tokens(t, 10, "pss row");
            auto& p = find_gen(t[0]).machine.controls.pss;
            p.enabled = bnum(t[1], "pss enabled");
            p.ks = num(t[2], "Ks");
            p.tw = num(t[3], "Tw");
            p.t1 = num(t[4], "T1");
            p.t2 = num(t[5], "T2");
            p.t3 = num(t[6], "T3");
            p.t4 = num(t[7], "T4");
            p.out_min = num(t[8], "pss min");
            p.out_max = num(t[9], "pss max");
        }
        for (const auto& row : r.all("governor")) {
            const auto t = tokens(row);
            expect_tokens(t, 6, "governor row");
            auto& g = find_gen(t[0]).machine.controls.governor;
            g.enabled = bnum(t[1], "governor enabled");
            g.droop = num(t[2], "droop");
            g.tg = num(t[3], "Tg");
            g.pm_min = num(t[4], "Pm min");
            g.pm_max = num(t[5], "Pm max");
        }
        r.finish();
    }
    {
        KeyReader r(require_section(doc, "hvdc"), "hvdc");
        const double kp = num(r.scalar("kp_udc", "10"), "kp_udc");
        const double ki = num(r.scalar("ki_udc", "20"), "ki_udc");
        VscLimits lim;
        lim.p_max = num(r.scalar("p_max_mw", "1000"), "p_max_mw");
        lim.q_max = num(r.scalar("q_max_mvar", "450"), "q_max_mvar");
        lim.i_max = num(r.scalar("i_max_pu", "1"), "i_max_pu");
        lim.m_max = num(r.scalar("m_max", "1.31"), "m_max");
        lim.u_dc_band = num(r.scalar("u_dc_band", "0.1"), "u_dc_band");
        ConverterLossModel loss;
        loss.a = num(r.scalar("loss_a", "0"), "loss_a");
        loss.b = num(r.scalar("loss_b", "0"), "loss_b");
        loss.c_rec = num(r.scalar("loss_c_rec", "0"), "loss_c_rec");
        loss.c_inv = num(r.scalar("loss_c_inv", "0"), "loss_c_inv");
        sc.dc.u_base_kv = num(r.scalar("u_dc_base_kv", "640"), "u_dc_base_kv");
        sc.dc.p_base_mw = num(r.scalar("p_dc_base_mw", "1000"), "p_dc_base_mw");

        for (const auto& row : r.all("converter")) {
            const auto t = tokens(row);
            expect_tokens(t, 12, "converter row");
            VscParams v;
            v.name = t[0];
            v.ac_bus = inum(t[1], "converter ac bus");
            v.dc_bus = inum(t[2], "converter dc bus");
            v.s_rated_mva = num(t[3], "converter mva");
            v.ac_kv = num(t[4], "converter ac_kv");
            v.r_s = num(t[5], "r_s");
            v.x_s = num(t[6], "x_s");
            v.tau = num(t[7], "tau");
            if (t[8] == "P")
                v.d_mode = ConverterControl::ActivePower;
            else if (t[8] == "UDC")
                v.d_mode = ConverterControl::DcVoltage;
            else
                throw DataError("unknown converter d-axis mode '" + t[8] + "'");
            // Converter 1's setpoint is owned by the ACLE module at run time;
            // p_set_mw covers any additional constant-P converters.
            v.p_set = num(t[9], "p_set_mw") / num(t[3], "converter mva");
            v.q_set = num(t[10], "q_set_mvar") / v.s_rated_mva;
            v.u_dc_set = num(t[11], "u_dc_set");
            if (v.tau <= 0)
                throw DataError("converter time constant must be positive");
            v.kp_udc = kp;
            v.ki_udc = ki;
            v.limits = lim;
            v.limits.p_max = lim.p_max / v.s_rated_mva;
            v.limits.q_max = lim.q_max / v.s_rated_mva;
            v.loss = loss;
            sc.vscs.push_back(v);
        }
        int n_udc = 0;
        for (const auto& v : sc.vscs)
            n_udc += v.d_mode == ConverterControl::DcVoltage ? 1 : 0;
        if (!sc.vscs.empty() && n_udc != 1)
            throw DataError("exactly one converter must control the DC voltage");

        std::vector<double> c_vsc;
        for (const auto& row : r.all("dc_bus")) {
            const auto t = tokens(row);
            expect_tokens(t, 2, "dc_bus row");
            sc.dc.bus_ids.push_back(inum(t[0], "dc bus id"));
            c_vsc.push_back(num(t[1], "dc bus C_vsc uF") * 1e-6);
        }
        sc.dc.c_farad = c_vsc;
        for (const auto& row : r.all("dc_line")) {
            const auto t = tokens(row);
            expect_tokens(t, 6, "dc_line row");
            DcLineSpec ln;
            ln.from = inum(t[0], "dc line from");
            ln.to = inum(t[1], "dc line to");
            const double r_per_km = num(t[2], "R ohm/km");
            const double l_per_km = num(t[3], "L mH/km");
            const double c_per_km = num(t[4], "C uF/km");
            const double len = num(t[5], "length km");
            ln.r_ohm = r_per_km * len;
            ln.l_henry = l_per_km * 1e-3 * len;
            // Half the cable capacitance lumps onto each terminal DC bus.
            const double c_half = c_per_km * 1e-6 * len / 2.0;
            sc.dc.c_farad[sc.dc.index_of(ln.from)] += c_half;
            sc.dc.c_farad[sc.dc.index_of(ln.to)] += c_half;
            sc.dc.lines.push_back(ln);
        }
        r.finish();
    }
    {
        KeyReader r(require_section(doc, "acle"), "acle");
        const std::string mode = r.scalar("mode", "constant_p");
        if (mode == "constant_p")
            sc.acle.mode = AcleMode::ConstantP;
        else if (mode == "ac_line_emulation")
            sc.acle.mode = AcleMode::AcLineEmulation;
        else
            throw DataError("unknown ACLE mode '" + mode + "'");
        const double s_conv = sc.vscs.empty() ? 1000.0 : sc.vscs.front().s_rated_mva;
        sc.acle.p_cons = num(r.scalar("p_cons_mw", "0"), "p_cons_mw") / s_conv;
        sc.acle.k = num(r.scalar("k_pu_per_rad", "0"), "k_pu_per_rad");
        sc.acle.t_filter = num(r.scalar("t_filter_s", "0.75"), "t_filter_s");
        sc.x_hvdc_info = num(r.scalar("x_hvdc", "0"), "x_hvdc");
        if (sc.acle.k < 0 || sc.acle.t_filter < 0)
            throw DataError("ACLE gain and filter time constant must be non-negative");
        const double lim_default = sc.vscs.empty() ? 1.0 : sc.vscs.front().limits.p_max;
        sc.acle.p_max = num(r.scalar("p_ref_max_mw", fmt(lim_default * s_conv)), "p_ref_max_mw") / s_conv;
        r.finish();
    }
    {
        KeyReader r(require_section(doc, "events"), "events");
        for (const auto& row : r.all("event")) {
            const auto t = tokens(row);
            if (t.size() < 3)
                throw DataError("event row: expected at least 3 fields");
            ScheduledEvent ev;
            ev.time = num(t[0], "event time");
            if (t[1] == "trip") {
                expect_tokens(t, 3, "trip event");
                ev.kind = ScheduledEvent::Kind::Trip;
                ev.circuit_id = t[2];
            } else if (t[1] == "fault") {
                expect_tokens(t, 4, "fault event");
                ev.kind = ScheduledEvent::Kind::FaultOn;
                ev.circuit_id = t[2];
                ev.fault_admittance = num(t[3], "fault admittance");
            } else if (t[1] == "clear") {
                expect_tokens(t, 3, "clear event");
                ev.kind = ScheduledEvent::Kind::FaultClear;
                ev.circuit_id = t[2];
            } else if (t[1] == "setpoint") {
                expect_tokens(t, 4, "setpoint event");
                ev.kind = ScheduledEvent::Kind::Setpoint;
                ev.target = t[2];
                ev.value = num(t[3], "setpoint value");
            } else {
                throw DataError("unknown event kind '" + t[1] + "'");
            }
            for (const auto& prev : sc.events)
                if (ev.time < prev.time)
                    throw DataError("event times must be non-decreasing");
            sc.events.push_back(ev);
        }
        for (const auto& ev : sc.events)
            if (!ev.circuit_id.empty() && !sc.network.has_branch(ev.circuit_id))
                throw DataError("event references unknown circuit '" + ev.circuit_id + "'");
        r.finish();
    }
    {
        KeyReader r(require_section(doc, "solver"), "solver");
        sc.solver.dt = num(r.scalar("dt", "0.001"), "dt");
        sc.solver.t_end = num(r.scalar("t_end", "20"), "t_end");
        const std::string integ = r.scalar("integrator", "rk4");
        if (integ == "rk4")
            sc.solver.integrator = Integrator::Rk4Partitioned;
        else if (integ == "trapezoidal")
            sc.solver.integrator = Integrator::TrapezoidalPartitioned;
        else
            throw DataError("unknown integrator '" + integ + "'");
        sc.solver.network_tol = num(r.scalar("network_tol", "1e-10"), "network_tol");
        sc.solver.trace_subsample = inum(r.scalar("trace_subsample", "1"), "trace_subsample");
        if (sc.solver.dt <= 0 || sc.solver.t_end <= sc.solver.dt)
            throw DataError("solver requires dt > 0 and t_end > dt");
        r.finish();
    }

    // Referential checks.
    for (const auto& g : sc.generators)
        sc.network.index_of(g.machine.params.bus);
    for (const auto& v : sc.vscs) {
        sc.network.index_of(v.ac_bus);
        sc.dc.index_of(v.dc_bus);
    }
    for (const auto& ld : sc.network.loads)
        sc.network.index_of(ld.bus);
    return sc;
}

Scenario parse_scenario(const std::string& text) { return build_scenario(parse_scenario_text(text)); }

void apply_override(SectionDoc& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    const auto dot = spec.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw DataError("override must be section.key=value, got '" + spec + "'");
    const std::string section = spec.substr(0, dot);
    std::string key = spec.substr(dot + 1, eq - dot - 1);
    const std::string value = spec.substr(eq + 1);
    // Short aliases accepted on the command line.
    static const std::map<std::string, std::string> alias = {
        {"acle.k", "k_pu_per_rad"}, {"acle.t", "t_filter_s"}, {"acle.p_cons", "p_cons_mw"}};
    const auto it = alias.find(section + "." + key);
    if (it != alias.end())
        key = it->second;
    doc.set_scalar(section, key, value);
}

Scenario load_scenario_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream f(path);
    if (!f)
        throw DataError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    SectionDoc doc = parse_scenario_text(buf.str());
    for (const auto& ov : overrides)
        apply_override(doc, ov);
    return build_scenario(doc);
}

std::string serialize_scenario(const Scenario& sc) {
    std::ostringstream os;
    os.precision(15);
    os << "[system]\n";
    os << "base_mva = " << sc.network.base_mva << "\n";
    os << "base_kv = " << sc.network.base_kv << "\n";
    os << "freq_hz = " << sc.network.freq_hz << "\n\n";

    os << "[buses]\n";
    for (const auto& b : sc.network.buses) {
        const char* kind = b.kind == BusKind::Slack ? "slack" : b.kind == BusKind::PV ? "PV" : "PQ";
        os << "bus = " << b.id << " " << kind << " " << fmt(b.base_kv) << " " << fmt(b.v_set)
           << " " << fmt(b.shunt_g) << " " << fmt(b.shunt_b) << "\n";
    }
    os << "\n[branches]\n";
    for (const auto& b : sc.network.branches)
        os << "branch = " << b.circuit_id << " " << b.from << " " << b.to << " " << fmt(b.r) << " "
           << fmt(b.x) << " " << fmt(b.b_shunt) << " " << fmt(b.tap) << " " << (b.in_service ? 1 : 0)
           << "\n";
    os << "\n[loads]\n";
    for (const auto& l : sc.network.loads)
        os << "load = " << l.bus << " " << fmt(l.p0_mw) << " " << fmt(l.q0_mvar) << "\n";

    os << "\n[machines]\n";
    for (const auto& g : sc.generators) {
        const auto& p = g.machine.params;
        os << "machine = " << p.name << " " << p.bus << " " << fmt(p.rated_mva) << " " << fmt(p.h)
           << " " << fmt(p.d) << " " << fmt(p.xd) << " " << fmt(p.xq) << " " << fmt(p.xd_p) << " "
           << fmt(p.xq_p) << " " << fmt(p.xd_pp) << " " << fmt(p.xq_pp) << " " << fmt(p.xl) << " "
           << fmt(p.td0_p) << " " << fmt(p.tq0_p) << " " << fmt(p.td0_pp) << " " << fmt(p.tq0_pp)
           << " " << fmt(p.ra) << " " << fmt(g.p_mw) << "\n";
    }
    os << "\n[controls]\n";
    for (const auto& g : sc.generators) {
        const auto& c = g.machine.controls;
        os << "exciter = " << g.machine.params.name << " " << (c.exciter.enabled ? 1 : 0) << " "
           << fmt(c.exciter.ka) << " " << fmt(c.exciter.ta) << " " << fmt(c.exciter.efd_min) << " "
           << fmt(c.exciter.efd_max) << "\n";
        os << "pss = " << g.machine.params.name << " " << (c.pss.enabled ? 1 : 0) << " "
           << fmt(c.pss.ks) << " " << fmt(c.pss.tw) << " " << fmt(c.pss.t1) << " " << fmt(c.pss.t2)
           << " " << fmt(c.pss.t3) << " " << fmt(c.pss.t4) << " " << fmt(c.pss.out_min) << " "
           << fmt(c.pss.out_max) << "\n";
        os << "governor = " << g.machine.params.name << " " << (c.governor.enabled ? 1 : 0) << " "
           << fmt(c.governor.droop) << " " << fmt(c.governor.tg) << " " << fmt(c.governor.pm_min)
           << " " << fmt(c.governor.pm_max) << "\n";
    }

    os << "\n[hvdc]\n";
    if (!sc.vscs.empty()) {
        const auto& v0 = sc.vscs.front();
        os << "kp_udc = " << fmt(v0.kp_udc) << "\n";
        os << "ki_udc = " << fmt(v0.ki_udc) << "\n";
        os << "p_max_mw = " << fmt(v0.limits.p_max * v0.s_rated_mva) << "\n";
        os << "q_max_mvar = " << fmt(v0.limits.q_max * v0.s_rated_mva) << "\n";
        os << "i_max_pu = " << fmt(v0.limits.i_max) << "\n";
        os << "m_max = " << fmt(v0.limits.m_max) << "\n";
        os << "u_dc_band = " << fmt(v0.limits.u_dc_band) << "\n";
        os << "loss_a = " << fmt(v0.loss.a) << "\n";
        os << "loss_b = " << fmt(v0.loss.b) << "\n";
        os << "loss_c_rec = " << fmt(v0.loss.c_rec) << "\n";
        os << "loss_c_inv = " << fmt(v0.loss.c_inv) << "\n";
    }
    os << "u_dc_base_kv = " << fmt(sc.dc.u_base_kv) << "\n";
    os << "p_dc_base_mw = " << fmt(sc.dc.p_base_mw) << "\n";
    for (const auto& v : sc.vscs)
        os << "converter = " << v.name << " " << v.ac_bus << " " << v.dc_bus << " "
           << fmt(v.s_rated_mva) << " " << fmt(v.ac_kv) << " " << fmt(v.r_s) << " " << fmt(v.x_s)
           << " " << fmt(v.tau) << " " << (v.d_mode == ConverterControl::ActivePower ? "P" : "UDC")
           << " " << fmt(v.p_set * v.s_rated_mva) << " " << fmt(v.q_set * v.s_rated_mva) << " "
           << fmt(v.u_dc_set) << "\n";
    // Emitted in lumped form: dc_bus carries the total equivalent capacitance
    // and dc_line rows use zero shunt over unit length, so re-parsing
    // reproduces the same totals.
    for (size_t i = 0; i < sc.dc.bus_ids.size(); ++i)
        os << "dc_bus = " << sc.dc.bus_ids[i] << " " << fmt(sc.dc.c_farad[i] * 1e6) << "\n";
    for (const auto& ln : sc.dc.lines)
        os << "dc_line = " << ln.from << " " << ln.to << " " << fmt(ln.r_ohm) << " "
           << fmt(ln.l_henry * 1e3) << " 0 1\n";

    os << "\n[acle]\n";
    const double s_conv = sc.vscs.empty() ? 1000.0 : sc.vscs.front().s_rated_mva;
    os << "mode = " << (sc.acle.mode == AcleMode::ConstantP ? "constant_p" : "ac_line_emulation")
       << "\n";
    os << "p_cons_mw = " << fmt(sc.acle.p_cons * s_conv) << "\n";
    os << "k_pu_per_rad = " << fmt(sc.acle.k) << "\n";
    os << "t_filter_s = " << fmt(sc.acle.t_filter) << "\n";
    os << "p_ref_max_mw = " << fmt(sc.acle.p_max * s_conv) << "\n";
    os << "x_hvdc = " << fmt(sc.x_hvdc_info) << "\n";

    os << "\n[events]\n";
    for (const auto& ev : sc.events) {
        os << "event = " << fmt(ev.time) << " ";
        switch (ev.kind) {
        case ScheduledEvent::Kind::Trip:
            os << "trip " << ev.circuit_id;
            break;
        case ScheduledEvent::Kind::FaultOn:
            os << "fault " << ev.circuit_id << " " << fmt(ev.fault_admittance);
            break;
        case ScheduledEvent::Kind::FaultClear:
            os << "clear " << ev.circuit_id;
            break;
        case ScheduledEvent::Kind::Setpoint:
            os << "setpoint " << ev.target << " " << fmt(ev.value);
            break;
        }
        os << "\n";
    }

    os << "\n[solver]\n";
    os << "dt = " << fmt(sc.solver.dt) << "\n";
    os << "t_end = " << fmt(sc.solver.t_end) << "\n";
    os << "integrator = "
       << (sc.solver.integrator == Integrator::Rk4Partitioned ? "rk4" : "trapezoidal") << "\n";
    os << "network_tol = " << fmt(sc.solver.network_tol) << "\n";
    os << "trace_subsample = " << sc.solver.trace_subsample << "\n";
    return os.str();
}

std::vector<GeneratorDispatch> Scenario::dispatch(bool with_participation) const {
    std::vector<GeneratorDispatch> out;
    for (const auto& g : generators) {
        GeneratorDispatch gd;
        gd.name = g.machine.params.name;
        gd.bus = g.machine.params.bus;
        gd.p_mw = g.p_mw;
        gd.v_set = network.bus(g.machine.params.bus).v_set;
        if (with_participation && g.machine.controls.governor.enabled)
            gd.participation = g.machine.params.rated_mva / g.machine.controls.governor.droop;
        out.push_back(gd);
    }
    return out;
}

HvdcLinkSpec Scenario::hvdc_spec(double p_set1) const {
    HvdcLinkSpec spec;
    spec.dc = dc;
    for (size_t i = 0; i < vscs.size(); ++i) {
        const auto& v = vscs[i];
        ConverterSpec cs;
        cs.name = v.name;
        cs.ac_bus = v.ac_bus;
        cs.dc_bus = v.dc_bus;
        cs.s_rated_mva = v.s_rated_mva;
        cs.r_s = v.r_s;
        cs.control = v.d_mode;
        cs.p_set = i == 0 ? p_set1 : 0.0;
        cs.q_set = v.q_set;
        cs.u_dc_set = v.u_dc_set;
        cs.loss = v.loss;
        spec.converters.push_back(cs);
    }
    return spec;
}

std::string content_hash(const std::string& text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace aclesim
