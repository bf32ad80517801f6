#include "npnslab/cli/config.hpp"

#include "npnslab/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace npnslab::cli {

namespace {

const std::map<std::string, Preset>& preset_table() {
    static const std::map<std::string, Preset> t{
        {"thm1_rate", Preset::thm1_rate},         {"thm2_h2_rate", Preset::thm2_h2_rate},
        {"thm51_rate", Preset::thm51_rate},       {"energy_identity", Preset::energy_identity},
        {"layer_profile", Preset::layer_profile}, {"initial_layer_decay", Preset::initial_layer_decay},
        {"custom", Preset::custom}};
    return t;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void bad(const std::string& key, int line, const std::string& expected, const std::string& got) {
    throw InputError("config line " + std::to_string(line) + ": key '" + key + "' expects " + expected + ", got '" +
                     got + "'");
}

double to_real(const std::string& key, int line, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        bad(key, line, "a real number", v);
    }
    if (pos != v.size() || !std::isfinite(x)) bad(key, line, "a real number", v);
    return x;
}

long long to_integer(const std::string& key, int line, const std::string& v) {
    std::size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::exception&) {
        bad(key, line, "an integer", v);
    }
    if (pos != v.size()) bad(key, line, "an integer", v);
    return x;
}

bool to_bool(const std::string& key, int line, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    bad(key, line, "true|false", v);
}

std::vector<double> to_list(const std::string& key, int line, const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_real(key, line, trim(item)));
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;

Setter real(double ExperimentConfig::*m, const std::string& key) {
    return [m, key](ExperimentConfig& c, const std::string& v, int l) { c.*m = to_real(key, l, v); };
}
Setter integer(int ExperimentConfig::*m, const std::string& key) {
    return [m, key](ExperimentConfig& c, const std::string& v, int l) {
        c.*m = static_cast<int>(to_integer(key, l, v));
    };
}
Setter boolean(bool ExperimentConfig::*m, const std::string& key) {
    return [m, key](ExperimentConfig& c, const std::string& v, int l) { c.*m = to_bool(key, l, v); };
}
Setter text(std::string ExperimentConfig::*m) {
    return [m](ExperimentConfig& c, const std::string& v, int) { c.*m = v; };
}
Setter list(std::vector<double> ExperimentConfig::*m, const std::string& key) {
    return [m, key](ExperimentConfig& c, const std::string& v, int l) { c.*m = to_list(key, l, v); };
}
Setter trace_real(TraceSpec ExperimentConfig::*t, double TraceSpec::*m, const std::string& key) {
    return [t, m, key](ExperimentConfig& c, const std::string& v, int l) { (c.*t).*m = to_real(key, l, v); };
}
Setter trace_int(TraceSpec ExperimentConfig::*t, int TraceSpec::*m, const std::string& key) {
    return [t, m, key](ExperimentConfig& c, const std::string& v, int l) {
        (c.*t).*m = static_cast<int>(to_integer(key, l, v));
    };
}

// Keys as "section.key"; top-level keys have an empty section.
const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> t = [] {
        std::map<std::string, Setter> m;
        m[".seed"] = [](ExperimentConfig& c, const std::string& v, int l) {
            const auto x = to_integer("seed", l, v);
            if (x < 0) bad("seed", l, "a non-negative integer", v);
            c.seed = static_cast<std::uint64_t>(x);
        };
        m[".strict"] = boolean(&ExperimentConfig::strict, "strict");
        m[".fixture"] = text(&ExperimentConfig::fixture);
        for (auto [k, mp] : std::initializer_list<std::pair<const char*, double ExperimentConfig::*>>{
                 {"z1", &ExperimentConfig::z1},
                 {"z2", &ExperimentConfig::z2},
                 {"D1", &ExperimentConfig::D1},
                 {"D2", &ExperimentConfig::D2},
                 {"nu", &ExperimentConfig::nu},
                 {"eps", &ExperimentConfig::eps},
                 {"lambda", &ExperimentConfig::lambda},
                 {"Lambda", &ExperimentConfig::Lambda}})
            m[std::string("params.") + k] = real(mp, k);
        m["params.K"] = [](ExperimentConfig&, const std::string& v, int l) {
            if (to_real("K", l, v) != 1.0) bad("K", l, "the fixed value 1", v);
        };
        for (auto [name, tp] : std::initializer_list<std::pair<const char*, TraceSpec ExperimentConfig::*>>{
                 {"gamma1", &ExperimentConfig::gamma1}, {"W", &ExperimentConfig::W}}) {
            const std::string n = name;
            m["boundary." + n + "_bottom"] = trace_real(tp, &TraceSpec::bottom, n + "_bottom");
            m["boundary." + n + "_top"] = trace_real(tp, &TraceSpec::top, n + "_top");
            m["boundary." + n + "_mode_amp"] = trace_real(tp, &TraceSpec::mode_amp, n + "_mode_amp");
            m["boundary." + n + "_mode"] = trace_int(tp, &TraceSpec::mode, n + "_mode");
        }
        m["grid.d"] = integer(&ExperimentConfig::d, "d");
        m["grid.nx"] = integer(&ExperimentConfig::nx, "nx");
        m["grid.ny"] = integer(&ExperimentConfig::ny, "ny");
        m["grid.ny_per_eps"] = real(&ExperimentConfig::ny_per_eps, "ny_per_eps");
        m["time.dt"] = real(&ExperimentConfig::dt, "dt");
        m["time.dt_eps2"] = real(&ExperimentConfig::dt_eps2, "dt_eps2");
        m["time.t_end"] = real(&ExperimentConfig::t_end, "t_end");
        m["time.save_every"] = integer(&ExperimentConfig::save_every, "save_every");
        m["time.stiff_mode"] = text(&ExperimentConfig::stiff_mode);
        m["sweep.eps_list"] = list(&ExperimentConfig::eps_list, "eps_list");
        m["sweep.dt_list"] = list(&ExperimentConfig::dt_list, "dt_list");
        m["initial.c1_shape"] = text(&ExperimentConfig::c1_shape);
        m["initial.c1_amp"] = real(&ExperimentConfig::c1_amp, "c1_amp");
        m["initial.c1_rate"] = real(&ExperimentConfig::c1_rate, "c1_rate");
        m["initial.pert_amp"] = real(&ExperimentConfig::pert_amp, "pert_amp");
        m["initial.pert_mode"] = integer(&ExperimentConfig::pert_mode, "pert_mode");
        m["initial.u_amp"] = real(&ExperimentConfig::u_amp, "u_amp");
        m["initial.tau_end"] = real(&ExperimentConfig::tau_end, "tau_end");
        m["initial.tau_steps"] = integer(&ExperimentConfig::tau_steps, "tau_steps");
        m["output.dir"] = text(&ExperimentConfig::output_dir);
        m["output.wall_clock"] = boolean(&ExperimentConfig::wall_clock, "wall_clock");
        return m;
    }();
    return t;
}

const std::vector<std::string> kSections{"params", "boundary", "grid", "time", "sweep", "initial", "output"};

std::vector<double> dyadic(int from, int to) {
    std::vector<double> v;
    for (int k = from; k <= to; ++k) v.push_back(std::ldexp(1.0, -k));
    return v;
}

} // namespace

Preset preset_from_string(const std::string& s) {
    const auto& t = preset_table();
    const auto it = t.find(s);
    if (it == t.end()) throw InputError("unknown preset '" + s + "'");
    return it->second;
}

std::string to_string(Preset p) {
    for (const auto& [k, v] : preset_table())
        if (v == p) return k;
    return "custom";
}

core::Params ExperimentConfig::params_for(double eps_value) const {
    core::Params p;
    p.z1 = z1;
    p.z2 = z2;
    p.D1 = D1;
    p.D2 = D2;
    p.nu = nu;
    p.eps = eps_value;
    p.lambda = lambda;
    p.Lambda = Lambda;
    return p;
}

int ExperimentConfig::ny_for(double eps_value) const {
    int n = ny;
    if (ny_per_eps > 0.0) n = std::max(n, static_cast<int>(std::ceil(ny_per_eps / eps_value - 1e-9)) + 1);
    return n;
}

double ExperimentConfig::dt_for(double eps_value) const {
    double h = dt;
    if (dt_eps2 > 0.0) h = std::min(h, dt_eps2 * eps_value * eps_value);
    return h;
}

ExperimentConfig preset_defaults(Preset p) {
    ExperimentConfig c;
    c.preset = p;
    switch (p) {
    case Preset::thm1_rate:
    case Preset::custom:
        c.dt_eps2 = 0.1;
        c.eps_list = dyadic(3, 7);
        break;
    case Preset::thm51_rate:
    case Preset::thm2_h2_rate:
        c.gamma1 = {1.5, 1.0 + 0.5 * std::exp(-1.0), 0.0, 1};
        c.W = {0.0, 0.2, 0.0, 1};
        c.c1_shape = "exp";
        c.c1_amp = 0.5;
        c.c1_rate = 0.0;
        c.pert_amp = 0.0;
        c.ny = 65;
        c.ny_per_eps = 64.0;
        c.dt = 1.0;
        c.dt_eps2 = 0.125;
        c.t_end = 0.05;
        c.eps_list = dyadic(3, 6);
        break;
    case Preset::energy_identity:
        c.eps = 0.5;
        c.ny = 1025;
        c.t_end = 0.2;
        c.dt = 4e-3;
        c.dt_list = {4e-3, 2e-3, 1e-3};
        c.save_every = 1;
        c.eps_list = {0.5};
        break;
    case Preset::layer_profile:
        c.gamma1 = {1.5, 1.0, 0.0, 1};
        c.W = {0.0, 1.0, 0.0, 1};
        c.c1_shape = "constant";
        c.c1_amp = 0.0;
        c.pert_amp = 0.0;
        c.ny = 65;
        c.ny_per_eps = 64.0;
        c.dt = 1e-3;
        c.t_end = 2.0;
        c.eps_list = dyadic(4, 6);
        break;
    case Preset::initial_layer_decay:
        c.ny = 257;
        c.tau_end = 1.0;
        c.tau_steps = 1000;
        c.eps_list = {0.125};
        break;
    }
    return c;
}

ExperimentConfig parse_config_string(const std::string& text) {
    std::vector<std::string> lines;
    {
        std::stringstream ss(text);
        std::string l;
        while (std::getline(ss, l)) lines.push_back(l);
    }
    auto strip = [](const std::string& raw) {
        auto s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        return trim(s);
    };

    // The preset selects the defaults, so locate it first.
    ExperimentConfig cfg = preset_defaults(Preset::custom);
    {
        std::string section;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const auto s = strip(lines[i]);
            if (s.empty()) continue;
            if (s.front() == '[') {
                section = "x";
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos || !section.empty()) continue;
            if (trim(s.substr(0, eq)) == "preset") {
                const auto v = trim(s.substr(eq + 1));
                if (!preset_table().count(v))
                    bad("preset", static_cast<int>(i + 1),
                        "one of thm1_rate|thm2_h2_rate|thm51_rate|energy_identity|layer_profile|initial_layer_decay|custom",
                        v);
                cfg = preset_defaults(preset_from_string(v));
            }
        }
    }

    std::string section;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int line = static_cast<int>(i + 1);
        const auto s = strip(lines[i]);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw InputError("config line " + std::to_string(line) + ": malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
                throw InputError("config line " + std::to_string(line) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(line) + ": expected key = value, got '" + s + "'");
        const auto key = trim(s.substr(0, eq));
        const auto value = trim(s.substr(eq + 1));
        if (section.empty() && key == "preset") continue;
        const auto it = setters().find(section + "." + key);
        if (it == setters().end())
            throw InputError("config line " + std::to_string(line) + ": unknown key '" + key + "'" +
                             (section.empty() ? std::string(" at top level") : " in [" + section + "]"));
        it->second(cfg, value, line);
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_string(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    auto lst = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
        return s;
    };
    os << "preset = " << to_string(c.preset) << "\n";
    os << "seed = " << c.seed << "\n";
    os << "strict = " << (c.strict ? "true" : "false") << "\n";
    os << "fixture = " << c.fixture << "\n";
    os << "\n[params]\n";
    os << "z1 = " << fmt(c.z1) << "\nz2 = " << fmt(c.z2) << "\nD1 = " << fmt(c.D1) << "\nD2 = " << fmt(c.D2)
       << "\nnu = " << fmt(c.nu) << "\neps = " << fmt(c.eps) << "\nK = 1\nlambda = " << fmt(c.lambda)
       << "\nLambda = " << fmt(c.Lambda) << "\n";
    os << "\n[boundary]\n";
    for (auto [n, t] : {std::pair<const char*, const TraceSpec*>{"gamma1", &c.gamma1}, {"W", &c.W}}) {
        os << n << "_bottom = " << fmt(t->bottom) << "\n" << n << "_top = " << fmt(t->top) << "\n";
        os << n << "_mode_amp = " << fmt(t->mode_amp) << "\n" << n << "_mode = " << t->mode << "\n";
    }
    os << "\n[grid]\nd = " << c.d << "\nnx = " << c.nx << "\nny = " << c.ny << "\nny_per_eps = " << fmt(c.ny_per_eps)
       << "\n";
    os << "\n[time]\ndt = " << fmt(c.dt) << "\ndt_eps2 = " << fmt(c.dt_eps2) << "\nt_end = " << fmt(c.t_end)
       << "\nsave_every = " << c.save_every << "\nstiff_mode = " << c.stiff_mode << "\n";
    os << "\n[sweep]\neps_list = " << lst(c.eps_list) << "\ndt_list = " << lst(c.dt_list) << "\n";
    os << "\n[initial]\nc1_shape = " << c.c1_shape << "\nc1_amp = " << fmt(c.c1_amp) << "\nc1_rate = "
       << fmt(c.c1_rate) << "\npert_amp = " << fmt(c.pert_amp) << "\npert_mode = " << c.pert_mode
       << "\nu_amp = " << fmt(c.u_amp) << "\ntau_end = " << fmt(c.tau_end) << "\ntau_steps = " << c.tau_steps
       << "\n";
    os << "\n[output]\ndir = " << c.output_dir << "\nwall_clock = " << (c.wall_clock ? "true" : "false") << "\n";
    return os.str();
}

void validate_config(const ExperimentConfig& c) {
    core::Params p = c.params_for(c.eps);
    p.lambda = p.Lambda = 1.0;  // data bounds are checked once the data exist
    p.validate();
    if (c.lambda < 0.0 || c.Lambda < 0.0 || (c.lambda > 0.0 && c.Lambda > 0.0 && c.lambda > c.Lambda))
        throw ParameterError("lambda/Lambda must satisfy 0 < lambda <= Lambda (0 = derived)");
    if (c.eps_list.empty()) throw InputError("eps_list must not be empty");
    for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
        if (!(c.eps_list[i] > 0.0)) throw InputError("eps_list entries must be positive");
        if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1])) throw InputError("eps_list must be strictly decreasing");
    }
    for (double h : c.dt_list)
        if (!(h > 0.0)) throw InputError("dt_list entries must be positive");
    if (!(c.dt > 0.0)) throw InputError("dt must be positive");
    if (c.dt_eps2 < 0.0 || c.ny_per_eps < 0.0) throw InputError("dt_eps2 and ny_per_eps must be non-negative");
    if (c.t_end < 0.0) throw InputError("t_end must be non-negative");
    if (c.save_every < 1) throw InputError("save_every must be at least 1");
    if (c.stiff_mode != "implicit_coupled" && c.stiff_mode != "implicit_diffusion_only")
        throw InputError("stiff_mode must be implicit_coupled or implicit_diffusion_only");
    if (c.c1_shape != "constant" && c.c1_shape != "sine" && c.c1_shape != "exp")
        throw InputError("c1_shape must be constant, sine or exp");
    if (c.fixture != "default" && c.fixture != "equilibrium") throw InputError("fixture must be default or equilibrium");
    if (!(c.gamma1.bottom > 0.0) || !(c.gamma1.top > 0.0)) throw ParameterError("gamma1 must be positive");
    if (std::abs(c.gamma1.mode_amp) >= std::min(c.gamma1.bottom, c.gamma1.top))
        throw ParameterError("gamma1 mode amplitude must keep gamma1 positive");
    if (c.tau_steps < 1 || !(c.tau_end > 0.0)) throw InputError("tau_end and tau_steps must be positive");
    if (c.d == 1 && c.nx != 1) throw InputError("d = 1 requires nx = 1");
    if (c.d != 1 && c.d != 2) throw InputError("d must be 1 or 2");
    if (c.preset == Preset::layer_profile || c.preset == Preset::thm51_rate || c.preset == Preset::thm2_h2_rate) {
        const double emin = c.eps_list.back();
        if (c.ny_for(emin) < 8.0 / emin) throw InputError("layer presets require ny >= 8/eps_min across y");
    }
}

std::string config_hash(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    c.output_dir.clear();  // artifacts do not depend on where they are written
    const std::string s = serialize_config(c);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace npnslab::cli
