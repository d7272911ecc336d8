#include "qhopcli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace qhopcli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double_strict(const std::string& text, const std::string& field) {
    std::string t = trim(text);
    if (!t.empty() && t.front() == '+') t.erase(0, 1);  // from_chars rejects a leading '+'
    double v = 0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || t.empty())
        throw ConfigError(field + ": not a number: '" + text + "'");
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(cdouble z) {
    return fmt(z.real()) + (z.imag() < 0 || std::signbit(z.imag()) ? "" : "+") + fmt(z.imag()) +
           "i";
}

}  // namespace

cdouble parse_complex(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError("empty complex literal");

    if (t.back() != 'i' && t.back() != 'I') {
        // plain real
        return {parse_double_strict(t, "complex literal"), 0.0};
    }

    const std::string body = t.substr(0, t.size() - 1);
    if (body.empty() || body == "+" || body == "-")
        throw ConfigError("malformed complex literal: '" + text + "'");

    // Find the sign splitting real and imaginary parts: a '+'/'-' that is
    // neither the leading sign nor part of an exponent.
    size_t split = std::string::npos;
    for (size_t k = 1; k < body.size(); ++k) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E')
            split = k;  // keep the last one: "1e+2-3i" splits at the '-'
    }
    if (split == std::string::npos) {
        // purely imaginary: "1i", "-0.5i"
        return {0.0, parse_double_strict(body, "complex literal")};
    }
    const double re = parse_double_strict(body.substr(0, split), "complex literal (real part)");
    const double im = parse_double_strict(body.substr(split), "complex literal (imaginary part)");
    return {re, im};
}

bool RawConfig::has(const std::string& section, const std::string& key) const {
    const auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

const std::string& RawConfig::get(const std::string& section, const std::string& key) const {
    return sections.at(section).at(key);
}

RawConfig parse_raw_config(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (raw.sections[section].count(key))
            throw ConfigError("duplicate key " + (section.empty() ? key : section + "." + key));
        raw.sections[section][key] = value;
    }
    return raw;
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"", {"experiment", "seed", "out"}},
        {"lattice", {"dim", "n", "a"}},
        {"model", {"epsilon", "eta", "kappa"}},
        {"packet", {"profile", "sigma", "exponent", "p0", "spin_axis", "helicity"}},
        {"time", {"dt", "steps", "stride", "t_max", "samples"}},
        {"gamma", {"source", "seed", "max_mode", "scale", "parity", "path"}},
        {"study", {"parameter", "levels"}},
    };
    return s;
}

// (section, key) pairs that must be present, per experiment.
const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& required() {
    using P = std::pair<std::string, std::string>;
    static const std::map<std::string, std::vector<P>> r{
        {"scalar-unitarity",
         {{"lattice", "dim"}, {"lattice", "n"}, {"model", "epsilon"}, {"model", "kappa"},
          {"time", "t_max"}, {"time", "samples"}}},
        {"scalar-blowup",
         {{"lattice", "dim"}, {"lattice", "n"}, {"model", "kappa"}, {"packet", "sigma"},
          {"time", "t_max"}, {"time", "samples"}}},
        {"scalar-dispersion", {{"lattice", "dim"}, {"lattice", "n"}, {"model", "kappa"}}},
        {"spinor-classify",
         {{"lattice", "dim"}, {"lattice", "n"}, {"model", "epsilon"}, {"model", "eta"},
          {"model", "kappa"}}},
        {"weyl-speed",
         {{"lattice", "dim"}, {"lattice", "n"}, {"lattice", "a"}, {"model", "kappa"},
          {"packet", "p0"}}},
        {"weyl-residual",
         {{"lattice", "dim"}, {"lattice", "n"}, {"lattice", "a"}, {"model", "kappa"},
          {"packet", "p0"}, {"time", "dt"}, {"time", "t_max"}}},
        {"symmetry-report", {}},
        {"connection-examples", {}},
        {"metricity-scan", {}},
        {"metric-conservation",
         {{"lattice", "dim"}, {"lattice", "n"}, {"lattice", "a"}, {"model", "kappa"},
          {"packet", "p0"}, {"time", "dt"}, {"time", "t_max"}, {"gamma", "source"}}},
        {"scalar-continuum",
         {{"lattice", "dim"}, {"lattice", "n"}, {"lattice", "a"}, {"model", "kappa"},
          {"packet", "p0"}, {"time", "t_max"}}},
        {"stencil-order",
         {{"lattice", "dim"}, {"lattice", "n"}, {"model", "kappa"}, {"time", "dt"},
          {"time", "steps"}}},
    };
    return r;
}

std::int64_t to_int(const RawConfig& raw, const std::string& sec, const std::string& key) {
    std::string v = raw.get(sec, key);
    if (!v.empty() && v.front() == '+') v.erase(0, 1);
    std::int64_t out = 0;
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), last, out);
    if (ec != std::errc{} || ptr != last || v.empty())
        throw ConfigError(sec + "." + key + ": not an integer: '" + raw.get(sec, key) + "'");
    return out;
}

std::uint64_t to_u64(const RawConfig& raw, const std::string& sec, const std::string& key) {
    const std::string& v = raw.get(sec, key);
    std::uint64_t out = 0;
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), last, out);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError(sec + "." + key + ": not a non-negative integer: '" + v + "'");
    return out;
}

double to_double(const RawConfig& raw, const std::string& sec, const std::string& key) {
    return parse_double_strict(raw.get(sec, key), sec + "." + key);
}

cdouble to_complex(const RawConfig& raw, const std::string& sec, const std::string& key) {
    try {
        return parse_complex(raw.get(sec, key));
    } catch (const ConfigError& e) {
        throw ConfigError(sec + "." + key + ": " + e.what());
    }
}

std::vector<double> split_doubles(const RawConfig& raw, const std::string& sec,
                                  const std::string& key) {
    std::istringstream in(raw.get(sec, key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double_strict(tok, sec + "." + key));
    return out;
}

}  // namespace

const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, keys] : required()) n.push_back(name);
        return n;
    }();
    return names;
}

ExperimentConfig parse_config(const std::string& text) {
    const RawConfig raw = parse_raw_config(text);

    for (const auto& [sec, kv] : raw.sections) {
        const auto s = schema().find(sec);
        if (s == schema().end()) throw ConfigError("unknown section [" + sec + "]");
        for (const auto& [key, value] : kv)
            if (!s->second.count(key))
                throw ConfigError("unknown key " + (sec.empty() ? key : sec + "." + key));
    }

    if (!raw.has("", "experiment")) throw ConfigError("missing required field: experiment");
    ExperimentConfig cfg;
    cfg.experiment = raw.get("", "experiment");
    if (!required().count(cfg.experiment)) {
        std::string names;
        for (const auto& n : known_experiments()) names += (names.empty() ? "" : ", ") + n;
        throw ConfigError("unknown experiment '" + cfg.experiment + "' (known: " + names + ")");
    }
    for (const auto& [sec, key] : required().at(cfg.experiment))
        if (!raw.has(sec, key))
            throw ConfigError(cfg.experiment + ": missing required field " + sec + "." + key);

    if (raw.has("", "seed")) cfg.seed = to_u64(raw, "", "seed");
    if (raw.has("", "out")) cfg.out = raw.get("", "out");

    if (raw.has("lattice", "dim")) {
        cfg.dim = int(to_int(raw, "lattice", "dim"));
        if (cfg.dim < 1 || cfg.dim > 3) throw ConfigError("lattice.dim: must be 1, 2 or 3");
    }
    if (raw.has("lattice", "n")) {
        std::istringstream in(raw.get("lattice", "n"));
        std::vector<std::int64_t> ns;
        std::string tok;
        while (in >> tok) {
            std::int64_t v = 0;
            const char* last = tok.data() + tok.size();
            auto [ptr, ec] = std::from_chars(tok.data(), last, v);
            if (ec != std::errc{} || ptr != last || v < 1)
                throw ConfigError("lattice.n: not a positive integer: '" + tok + "'");
            ns.push_back(v);
        }
        if (ns.size() != 1 && ns.size() != size_t(cfg.dim))
            throw ConfigError("lattice.n: give one extent or exactly lattice.dim of them");
        cfg.extent = {1, 1, 1};
        for (int j = 0; j < cfg.dim; ++j)
            cfg.extent[size_t(j)] = ns.size() == 1 ? ns[0] : ns[size_t(j)];
    }
    if (raw.has("lattice", "a")) {
        cfg.spacing = to_double(raw, "lattice", "a");
        if (!(cfg.spacing > 0)) throw ConfigError("lattice.a: must be positive");
    }

    if (raw.has("model", "epsilon")) cfg.epsilon = to_complex(raw, "model", "epsilon");
    if (raw.has("model", "eta")) cfg.eta = to_complex(raw, "model", "eta");
    if (raw.has("model", "kappa")) cfg.kappa = to_complex(raw, "model", "kappa");

    if (raw.has("packet", "profile")) {
        cfg.profile = raw.get("packet", "profile");
        if (cfg.profile != "gaussian" && cfg.profile != "power_law")
            throw ConfigError("packet.profile: must be gaussian or power_law");
    }
    if (raw.has("packet", "sigma")) cfg.sigma = to_double(raw, "packet", "sigma");
    if (raw.has("packet", "exponent")) cfg.exponent = to_double(raw, "packet", "exponent");
    if (raw.has("packet", "p0")) {
        const auto v = split_doubles(raw, "packet", "p0");
        if (v.size() != size_t(cfg.dim) && v.size() != 3)
            throw ConfigError("packet.p0: give lattice.dim components (or 3)");
        cfg.p0 = {0, 0, 0};
        for (size_t j = 0; j < v.size(); ++j) cfg.p0[j] = v[j];
    }
    if (raw.has("packet", "spin_axis")) {
        const auto v = split_doubles(raw, "packet", "spin_axis");
        if (v.size() != 3) throw ConfigError("packet.spin_axis: give 3 components");
        for (size_t j = 0; j < 3; ++j) cfg.spin_axis[j] = v[j];
    }
    if (raw.has("packet", "helicity")) {
        cfg.helicity = int(to_int(raw, "packet", "helicity"));
        if (cfg.helicity != 1 && cfg.helicity != -1)
            throw ConfigError("packet.helicity: must be +1 or -1");
    }

    if (raw.has("time", "dt")) {
        cfg.dt = to_double(raw, "time", "dt");
        if (!(cfg.dt > 0)) throw ConfigError("time.dt: must be positive");
    }
    if (raw.has("time", "steps")) {
        cfg.steps = int(to_int(raw, "time", "steps"));
        if (cfg.steps < 0) throw ConfigError("time.steps: must be >= 0");
    }
    if (raw.has("time", "stride")) {
        cfg.stride = int(to_int(raw, "time", "stride"));
        if (cfg.stride < 1) throw ConfigError("time.stride: must be >= 1");
    }
    if (raw.has("time", "t_max")) {
        cfg.t_max = to_double(raw, "time", "t_max");
        if (!(cfg.t_max > 0)) throw ConfigError("time.t_max: must be positive");
    }
    if (raw.has("time", "samples")) {
        cfg.samples = int(to_int(raw, "time", "samples"));
        if (cfg.samples < 1) throw ConfigError("time.samples: must be >= 1");
    }

    if (raw.has("gamma", "source")) {
        cfg.gamma_source = raw.get("gamma", "source");
        if (cfg.gamma_source != "none" && cfg.gamma_source != "fourier" &&
            cfg.gamma_source != "file")
            throw ConfigError("gamma.source: must be none, fourier or file");
    }
    cfg.gamma_seed = cfg.seed;
    if (raw.has("gamma", "seed")) {
        cfg.gamma_seed = to_u64(raw, "gamma", "seed");
        cfg.gamma_seed_explicit = true;
    }
    if (raw.has("gamma", "max_mode")) {
        cfg.max_mode = int(to_int(raw, "gamma", "max_mode"));
        if (cfg.max_mode < 0) throw ConfigError("gamma.max_mode: must be >= 0");
    }
    if (raw.has("gamma", "scale")) cfg.scale = to_double(raw, "gamma", "scale");
    if (raw.has("gamma", "parity")) {
        cfg.parity = raw.get("gamma", "parity");
        if (cfg.parity != "odd" && cfg.parity != "even")
            throw ConfigError("gamma.parity: must be odd or even");
    }
    if (raw.has("gamma", "path")) cfg.gamma_path = raw.get("gamma", "path");
    if (cfg.gamma_source == "file" && cfg.gamma_path.empty())
        throw ConfigError("gamma.path: required when gamma.source = file");

    if (raw.has("study", "parameter")) {
        cfg.parameter = raw.get("study", "parameter");
        if (cfg.parameter != "a" && cfg.parameter != "dt")
            throw ConfigError("study.parameter: must be a or dt");
    }
    if (raw.has("study", "levels")) {
        cfg.levels = int(to_int(raw, "study", "levels"));
        if (cfg.levels < 3) throw ConfigError("study.levels: must be >= 3");
    }

    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string ExperimentConfig::echo() const {
    std::ostringstream out;
    out << "experiment = " << experiment << "\n";
    out << "seed = " << seed << "\n";
    out << "\n[lattice]\n";
    out << "dim = " << dim << "\n";
    out << "n =";
    for (int j = 0; j < dim; ++j) out << " " << extent[size_t(j)];
    out << "\n";
    out << "a = " << fmt(spacing) << "\n";
    out << "\n[model]\n";
    out << "epsilon = " << fmt(epsilon) << "\n";
    out << "eta = " << fmt(eta) << "\n";
    out << "kappa = " << fmt(kappa) << "\n";
    out << "\n[packet]\n";
    out << "profile = " << profile << "\n";
    out << "sigma = " << fmt(sigma) << "\n";
    out << "exponent = " << fmt(exponent) << "\n";
    out << "p0 = " << fmt(p0[0]) << " " << fmt(p0[1]) << " " << fmt(p0[2]) << "\n";
    out << "spin_axis = " << fmt(spin_axis[0]) << " " << fmt(spin_axis[1]) << " "
        << fmt(spin_axis[2]) << "\n";
    out << "helicity = " << helicity << "\n";
    out << "\n[time]\n";
    out << "dt = " << fmt(dt) << "\n";
    out << "steps = " << steps << "\n";
    out << "stride = " << stride << "\n";
    out << "t_max = " << fmt(t_max) << "\n";
    out << "samples = " << samples << "\n";
    out << "\n[gamma]\n";
    out << "source = " << gamma_source << "\n";
    out << "seed = " << gamma_seed << "\n";
    out << "max_mode = " << max_mode << "\n";
    out << "scale = " << fmt(scale) << "\n";
    out << "parity = " << parity << "\n";
    if (!gamma_path.empty()) out << "path = " << gamma_path << "\n";
    if (!parameter.empty()) {
        out << "\n[study]\n";
        out << "parameter = " << parameter << "\n";
        out << "levels = " << levels << "\n";
    }
    return out.str();
}

}  // namespace qhopcli
