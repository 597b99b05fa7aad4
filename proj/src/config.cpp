#include "wdmqkd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wdmqkd/errors.hpp"
#include "wdmqkd/math_util.hpp"

namespace wdmqkd {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> tokens_of(const std::string& text) {
    std::string norm = text;
    std::replace(norm.begin(), norm.end(), '*', ' ');
    std::istringstream in(norm);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(lower(t));
    return toks;
}

double parse_number(const std::string& tok, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ConfigError(what + ": not a number: '" + tok + "'");
    }
    if (pos != tok.size()) throw ConfigError(what + ": trailing characters in '" + tok + "'");
    return v;
}

const std::map<std::string, double> kFreqUnits = {
    {"thz", 1e12}, {"ghz", 1e9}, {"mhz", 1e6}, {"khz", 1e3}, {"hz", 1.0}, {"rad/s", 1.0}};
const std::map<std::string, double> kTimeUnits = {{"s", 1.0},    {"ms", 1e-3}, {"us", 1e-6},
                                                  {"ns", 1e-9},  {"ps", 1e-12}, {"fs", 1e-15}};

double parse_with_units(const std::string& text, const std::map<std::string, double>& units,
                        const std::string& what) {
    auto toks = tokens_of(text);
    if (toks.empty()) throw ConfigError(what + ": empty value");
    double mult = 1.0;
    std::size_t i = 0;
    if (toks[i] == "2pi") {
        mult = 2.0 * detail::pi;
        ++i;
    }
    if (i >= toks.size()) throw ConfigError(what + ": missing magnitude in '" + text + "'");
    double value = parse_number(toks[i], what);
    ++i;
    if (i < toks.size()) {
        const auto it = units.find(toks[i]);
        if (it == units.end())
            throw ConfigError(what + ": unknown unit '" + toks[i] + "'");
        value *= it->second;
        ++i;
    }
    if (i != toks.size())
        throw ConfigError(what + ": unexpected token '" + toks[i] + "'");
    return mult * value;
}

}  // namespace

double parse_frequency(const std::string& text) {
    return parse_with_units(text, kFreqUnits, "frequency");
}

double parse_time(const std::string& text) {
    return parse_with_units(text, kTimeUnits, "time");
}

std::vector<double> SweepConfig::make_grid() const {
    if (points < 1) throw ConfigError("sweep.points must be >= 1");
    if (points == 1) return {from};
    if (!(to > from)) throw ConfigError("sweep.to must exceed sweep.from");
    return log_scale ? detail::logspace(from, to, static_cast<std::size_t>(points))
                     : detail::linspace(from, to, static_cast<std::size_t>(points));
}

void RunConfig::validate() const {
    source.validate();
    channels.validate();
    link.validate();
    if (!(mu_lo > 0.0 && mu_hi > mu_lo))
        throw ConfigError("source mu bounds must satisfy 0 < lo < hi");
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.source.sigma_cr = 1e13;                       // 10 THz
    cfg.source.tau_p = 333e-12;                       // 333 ps
    cfg.source.mu = 0.1;
    cfg.source.stats = StatsKind::Poisson;
    cfg.channels.n_pairs = 3;
    cfg.channels.sign = CorrelationSign::Negative;
    cfg.channels.omega_sep = 2.0 * detail::pi * 100e9;
    cfg.channels.profile = ProfileKind::Rect;
    cfg.channels.width = 2.0 * detail::pi * 50e9;
    cfg.link.t_a = cfg.link.t_b = 1e-3;
    return cfg;
}

namespace {

struct Entry {
    std::string value;
    int line;
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

Sections split_sections(const std::string& text) {
    Sections out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = lower(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                              "' outside any section");
        out[section][key] = Entry{value, lineno};
    }
    return out;
}

class SectionReader {
public:
    SectionReader(const Sections& all, std::string name) : name_(std::move(name)) {
        const auto it = all.find(name_);
        if (it != all.end()) entries_ = &it->second;
    }

    bool present() const { return entries_ != nullptr; }

    std::optional<std::string> get(const std::string& key) {
        if (!entries_) return std::nullopt;
        const auto it = entries_->find(key);
        if (it == entries_->end()) return std::nullopt;
        seen_.push_back(key);
        return it->second.value;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        int line = 0;
        if (entries_) {
            const auto it = entries_->find(key);
            if (it != entries_->end()) line = it->second.line;
        }
        throw ConfigError("line " + std::to_string(line) + ": " + name_ + "." + key + ": " + msg);
    }

    void check_unknown() const {
        if (!entries_) return;
        for (const auto& [key, entry] : *entries_)
            if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
                throw ConfigError("line " + std::to_string(entry.line) + ": unknown key " + name_ +
                                  "." + key);
    }

private:
    std::string name_;
    const std::map<std::string, Entry>* entries_ = nullptr;
    std::vector<std::string> seen_;
};

template <typename Fn>
auto parse_field(SectionReader& sec, const std::string& key, const Fn& fn)
    -> std::optional<decltype(fn(std::string{}))> {
    const auto raw = sec.get(key);
    if (!raw) return std::nullopt;
    try {
        return fn(*raw);
    } catch (const ConfigError& e) {
        sec.fail(key, e.what());
    }
}

double plain_number(const std::string& s) {
    return parse_number(lower(trim(s)), "value");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    const Sections sections = split_sections(text);
    for (const auto& [name, entries] : sections) {
        (void)entries;
        if (name != "source" && name != "channels" && name != "link" && name != "sweep" &&
            name != "mc" && name != "output")
            throw ConfigError("unknown section [" + name + "]");
    }

    RunConfig cfg = default_config();

    SectionReader source(sections, "source");
    if (auto v = parse_field(source, "sigma_cr", parse_frequency)) cfg.source.sigma_cr = *v;
    if (auto v = parse_field(source, "tau_p", parse_time)) cfg.source.tau_p = *v;
    if (auto raw = source.get("mu")) {
        if (lower(trim(*raw)) == "optimize") {
            cfg.optimize_mu = true;
        } else {
            try {
                cfg.source.mu = plain_number(*raw);
            } catch (const ConfigError& e) {
                source.fail("mu", e.what());
            }
        }
    }
    if (auto v = parse_field(source, "mu_lo", plain_number)) cfg.mu_lo = *v;
    if (auto v = parse_field(source, "mu_hi", plain_number)) cfg.mu_hi = *v;
    if (auto raw = source.get("stats")) {
        const auto toks = tokens_of(*raw);
        const std::string kind = toks.empty() ? "" : toks[0];
        if (kind == "thermal") {
            cfg.source.stats = StatsKind::Thermal;
        } else if (kind == "poisson") {
            cfg.source.stats = StatsKind::Poisson;
        } else if (kind == "multimode") {
            cfg.source.stats = StatsKind::Multimode;
            if (toks.size() > 1)
                cfg.source.modes = static_cast<int>(parse_number(toks[1], "modes"));
            else
                source.fail("stats", "multimode requires a mode count, e.g. 'multimode 200'");
        } else {
            source.fail("stats", "expected thermal | poisson | multimode <M>");
        }
    }
    source.check_unknown();

    SectionReader channels(sections, "channels");
    if (auto raw = channels.get("n_pairs"))
        cfg.channels.n_pairs = static_cast<int>(parse_number(trim(*raw), "n_pairs"));
    if (auto raw = channels.get("sign")) {
        const std::string s = lower(trim(*raw));
        if (s == "negative")
            cfg.channels.sign = CorrelationSign::Negative;
        else if (s == "positive")
            cfg.channels.sign = CorrelationSign::Positive;
        else
            channels.fail("sign", "expected negative | positive");
    }
    if (auto v = parse_field(channels, "omega_sep", parse_frequency)) cfg.channels.omega_sep = *v;
    if (auto raw = channels.get("profile")) {
        const std::string s = lower(trim(*raw));
        if (s == "rect")
            cfg.channels.profile = ProfileKind::Rect;
        else if (s == "gauss")
            cfg.channels.profile = ProfileKind::Gauss;
        else
            channels.fail("profile", "expected rect | gauss");
    }
    if (auto v = parse_field(channels, "width", parse_frequency)) cfg.channels.width = *v;
    channels.check_unknown();

    SectionReader link(sections, "link");
    if (auto v = parse_field(link, "t", plain_number)) cfg.link.t_a = cfg.link.t_b = *v;
    if (auto v = parse_field(link, "t_a", plain_number)) cfg.link.t_a = *v;
    if (auto v = parse_field(link, "t_b", plain_number)) cfg.link.t_b = *v;
    link.check_unknown();

    SectionReader sweep(sections, "sweep");
    if (sweep.present()) {
        SweepConfig sc;
        bool freq_axis = false;
        bool time_axis = true;
        if (auto raw = sweep.get("axis")) {
            const std::string s = lower(trim(*raw));
            if (s == "tau_p") {
                sc.axis = SweepAxis::TauP;
            } else if (s == "sigma_cr") {
                sc.axis = SweepAxis::SigmaCr;
                freq_axis = true;
            } else if (s == "transmittance" || s == "t") {
                sc.axis = SweepAxis::Transmittance;
            } else if (s == "n_pairs") {
                sc.axis = SweepAxis::NPairs;
            } else if (s == "delta_omega") {
                sc.axis = SweepAxis::DeltaOmega;
                freq_axis = true;
            } else if (s == "sigma_f") {
                sc.axis = SweepAxis::SigmaF;
                freq_axis = true;
            } else {
                sweep.fail("axis",
                           "expected tau_p | sigma_cr | transmittance | n_pairs | delta_omega | "
                           "sigma_f");
            }
            time_axis = sc.axis == SweepAxis::TauP;
        } else {
            sweep.fail("axis", "sweep section requires an axis");
        }
        const auto parse_axis_value = [&](const std::string& s) {
            if (freq_axis) return parse_frequency(s);
            if (time_axis) return parse_time(s);
            return plain_number(s);
        };
        if (auto v = parse_field(sweep, "from", parse_axis_value)) sc.from = *v;
        if (auto v = parse_field(sweep, "to", parse_axis_value)) sc.to = *v;
        if (auto v = parse_field(sweep, "points", plain_number)) sc.points = static_cast<int>(*v);
        if (auto raw = sweep.get("scale")) {
            const std::string s = lower(trim(*raw));
            if (s == "log")
                sc.log_scale = true;
            else if (s == "linear")
                sc.log_scale = false;
            else
                sweep.fail("scale", "expected log | linear");
        }
        if (auto raw = sweep.get("optimize_mu")) {
            const std::string s = lower(trim(*raw));
            if (s == "true" || s == "yes" || s == "1")
                sc.optimize_mu = true;
            else if (s == "false" || s == "no" || s == "0")
                sc.optimize_mu = false;
            else
                sweep.fail("optimize_mu", "expected true | false");
        }
        if (auto v = parse_field(sweep, "mu_lo", plain_number)) sc.mu_lo = *v;
        if (auto v = parse_field(sweep, "mu_hi", plain_number)) sc.mu_hi = *v;
        if (auto v = parse_field(sweep, "tau_rec", parse_time)) sc.tau_rec = *v;
        sweep.check_unknown();
        cfg.sweep = sc;
    }

    SectionReader mc(sections, "mc");
    if (auto v = parse_field(mc, "trials", plain_number))
        cfg.mc.trials = static_cast<std::uint64_t>(*v);
    if (auto v = parse_field(mc, "seed", plain_number)) cfg.mc.seed = static_cast<std::uint64_t>(*v);
    mc.check_unknown();

    SectionReader output(sections, "output");
    if (auto raw = output.get("path")) cfg.output.path = trim(*raw);
    if (auto raw = output.get("format")) {
        const std::string s = lower(trim(*raw));
        if (s == "table")
            cfg.output.format = OutputFormat::Table;
        else if (s == "structured")
            cfg.output.format = OutputFormat::Structured;
        else
            output.fail("format", "expected table | structured");
    }
    output.check_unknown();

    cfg.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

const char* axis_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::TauP: return "tau_p";
        case SweepAxis::SigmaCr: return "sigma_cr";
        case SweepAxis::Transmittance: return "transmittance";
        case SweepAxis::NPairs: return "n_pairs";
        case SweepAxis::DeltaOmega: return "delta_omega";
        case SweepAxis::SigmaF: return "sigma_f";
    }
    return "?";
}

}  // namespace

std::string render_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[source]\n";
    out << "sigma_cr = " << fmt(cfg.source.sigma_cr) << " rad/s\n";
    out << "tau_p = " << fmt(cfg.source.tau_p) << " s\n";
    if (cfg.optimize_mu)
        out << "mu = optimize\n";
    else
        out << "mu = " << fmt(cfg.source.mu) << "\n";
    out << "mu_lo = " << fmt(cfg.mu_lo) << "\n";
    out << "mu_hi = " << fmt(cfg.mu_hi) << "\n";
    out << "stats = ";
    switch (cfg.source.stats) {
        case StatsKind::Thermal: out << "thermal\n"; break;
        case StatsKind::Poisson: out << "poisson\n"; break;
        case StatsKind::Multimode: out << "multimode " << cfg.source.modes << "\n"; break;
    }
    out << "\n[channels]\n";
    out << "n_pairs = " << cfg.channels.n_pairs << "\n";
    out << "sign = " << (cfg.channels.sign == CorrelationSign::Negative ? "negative" : "positive")
        << "\n";
    out << "omega_sep = " << fmt(cfg.channels.omega_sep) << " rad/s\n";
    out << "profile = " << (cfg.channels.profile == ProfileKind::Rect ? "rect" : "gauss") << "\n";
    out << "width = " << fmt(cfg.channels.width) << " rad/s\n";
    out << "\n[link]\n";
    out << "t_a = " << fmt(cfg.link.t_a) << "\n";
    out << "t_b = " << fmt(cfg.link.t_b) << "\n";
    if (cfg.sweep) {
        out << "\n[sweep]\n";
        out << "axis = " << axis_name(cfg.sweep->axis) << "\n";
        out << "from = " << fmt(cfg.sweep->from) << "\n";
        out << "to = " << fmt(cfg.sweep->to) << "\n";
        out << "points = " << cfg.sweep->points << "\n";
        out << "scale = " << (cfg.sweep->log_scale ? "log" : "linear") << "\n";
        out << "optimize_mu = " << (cfg.sweep->optimize_mu ? "true" : "false") << "\n";
        out << "mu_lo = " << fmt(cfg.sweep->mu_lo) << "\n";
        out << "mu_hi = " << fmt(cfg.sweep->mu_hi) << "\n";
        if (cfg.sweep->tau_rec > 0.0) out << "tau_rec = " << fmt(cfg.sweep->tau_rec) << " s\n";
    }
    out << "\n[mc]\n";
    out << "trials = " << cfg.mc.trials << "\n";
    out << "seed = " << cfg.mc.seed << "\n";
    if (!cfg.output.path.empty() || cfg.output.format != OutputFormat::Table) {
        out << "\n[output]\n";
        if (!cfg.output.path.empty()) out << "path = " << cfg.output.path << "\n";
        out << "format = " << (cfg.output.format == OutputFormat::Table ? "table" : "structured")
            << "\n";
    }
    return out.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string text = render_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace wdmqkd
