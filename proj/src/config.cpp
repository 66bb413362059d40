#include "fracac/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "fracac/error.hpp"

namespace fracac {

SchemeConfig RunConfig::scheme_config() const {
    SchemeConfig c;
    c.alpha = alpha;
    c.epsilon2 = epsilon2;
    c.kind = scheme;
    c.S = S;
    c.picard_tol = picard_tol;
    c.picard_max_iter = picard_max_iter;
    c.soe_eps = soe_eps;
    return c;
}

Grid2D RunConfig::grid() const {
    return Grid2D(grid_M, grid_M, domain[0], domain[1], domain[2], domain[3]);
}

std::vector<double> RunConfig::gammas() const {
    return sweep_gammas.empty() ? std::vector<double>{mesh_gamma} : sweep_gammas;
}

double RunConfig::head_end(double gamma) const {
    if (mesh_kind == MeshKind::Graded) return T;
    return mesh_T0 ? *mesh_T0 : std::min(1.0 / gamma, T);
}

std::string to_string(SchemeKind kind) {
    return kind == SchemeKind::BackwardEuler ? "backward-euler" : "stabilized";
}

std::string to_string(MeshKind kind) {
    switch (kind) {
        case MeshKind::Graded: return "graded";
        case MeshKind::GradedRandom: return "graded+random";
        case MeshKind::GradedAdaptive: return "graded+adaptive";
    }
    return "graded";
}

// ---------------------------------------------------------------------------
// Value codecs
// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
    std::ostringstream os;
    os << "key '" << key << "': cannot parse '" << value << "' as " << what;
    fail(ErrorKind::Config, os.str());
}

// Accepts plain numbers and multiples of pi written as `pi`, `-pi`, `2pi`.
double parse_double(std::string_view key, std::string_view raw) {
    std::string_view v = trim(raw);
    double scale = 1.0;
    if (v.size() >= 2 && v.substr(v.size() - 2) == "pi") {
        scale = std::numbers::pi;
        v.remove_suffix(2);
        if (v.empty() || v == "+") return scale;
        if (v == "-") return -scale;
    }
    double out = 0.0;
    const char* first = v.data();
    if (!v.empty() && v.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
        bad_value(key, raw, "a number");
    }
    return out * scale;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view raw) {
    const std::string_view v = trim(raw);
    Int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
        bad_value(key, raw, "a non-negative integer");
    }
    return out;
}

std::vector<std::string_view> split_list(std::string_view v) {
    std::vector<std::string_view> parts;
    v = trim(v);
    if (v.empty()) return parts;
    std::size_t start = 0;
    while (true) {
        const auto comma = v.find(',', start);
        parts.push_back(trim(v.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return parts;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <typename T>
std::string fmt_list(const T& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        if constexpr (std::is_floating_point_v<typename T::value_type>) {
            s += fmt(xs[i]);
        } else {
            s += std::to_string(xs[i]);
        }
    }
    return s;
}

struct KeyDef {
    std::string_view name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeyDef>& registry() {
    static const std::vector<KeyDef> keys = [] {
        std::vector<KeyDef> k;
        auto num = [&k](std::string_view name, double RunConfig::*field) {
            k.push_back({name,
                         [name, field](RunConfig& c, std::string_view v) { c.*field = parse_double(name, v); },
                         [field](const RunConfig& c) { return fmt(c.*field); }});
        };
        auto count = [&k](std::string_view name, std::size_t RunConfig::*field) {
            k.push_back({name,
                         [name, field](RunConfig& c, std::string_view v) {
                             c.*field = parse_int<std::size_t>(name, v);
                         },
                         [field](const RunConfig& c) { return std::to_string(c.*field); }});
        };
        auto adapt = [&k](std::string_view name, double AdaptiveParams::*field) {
            k.push_back({name,
                         [name, field](RunConfig& c, std::string_view v) {
                             c.adapt.*field = parse_double(name, v);
                         },
                         [field](const RunConfig& c) { return fmt(c.adapt.*field); }});
        };

        k.push_back({"experiment",
                     [](RunConfig& c, std::string_view v) { c.experiment = std::string(trim(v)); },
                     [](const RunConfig& c) { return c.experiment; }});
        num("alpha", &RunConfig::alpha);
        num("sigma", &RunConfig::sigma);
        num("epsilon2", &RunConfig::epsilon2);
        k.push_back({"scheme",
                     [](RunConfig& c, std::string_view raw) {
                         const auto v = trim(raw);
                         if (v == "backward-euler") c.scheme = SchemeKind::BackwardEuler;
                         else if (v == "stabilized") c.scheme = SchemeKind::Stabilized;
                         else bad_value("scheme", raw, "backward-euler | stabilized");
                     },
                     [](const RunConfig& c) { return to_string(c.scheme); }});
        num("S", &RunConfig::S);
        num("picard_tol", &RunConfig::picard_tol);
        count("picard_max_iter", &RunConfig::picard_max_iter);
        num("soe_eps", &RunConfig::soe_eps);
        count("grid.M", &RunConfig::grid_M);
        k.push_back({"domain",
                     [](RunConfig& c, std::string_view v) {
                         const auto parts = split_list(v);
                         if (parts.size() != 4) bad_value("domain", v, "four numbers a, b, c, d");
                         for (std::size_t i = 0; i < 4; ++i) c.domain[i] = parse_double("domain", parts[i]);
                     },
                     [](const RunConfig& c) { return fmt_list(c.domain); }});
        num("T", &RunConfig::T);
        k.push_back({"mesh.kind",
                     [](RunConfig& c, std::string_view raw) {
                         const auto v = trim(raw);
                         if (v == "graded") c.mesh_kind = MeshKind::Graded;
                         else if (v == "graded+random") c.mesh_kind = MeshKind::GradedRandom;
                         else if (v == "graded+adaptive") c.mesh_kind = MeshKind::GradedAdaptive;
                         else bad_value("mesh.kind", raw, "graded | graded+random | graded+adaptive");
                     },
                     [](const RunConfig& c) { return to_string(c.mesh_kind); }});
        k.push_back({"mesh.T0",
                     [](RunConfig& c, std::string_view v) {
                         if (trim(v) == "auto") c.mesh_T0.reset();
                         else c.mesh_T0 = parse_double("mesh.T0", v);
                     },
                     [](const RunConfig& c) { return c.mesh_T0 ? fmt(*c.mesh_T0) : std::string("auto"); }});
        k.push_back({"mesh.N0",
                     [](RunConfig& c, std::string_view v) {
                         if (trim(v) == "auto") c.mesh_N0.reset();
                         else c.mesh_N0 = parse_int<std::size_t>("mesh.N0", v);
                     },
                     [](const RunConfig& c) {
                         return c.mesh_N0 ? std::to_string(*c.mesh_N0) : std::string("auto");
                     }});
        num("mesh.gamma", &RunConfig::mesh_gamma);
        count("mesh.N1", &RunConfig::mesh_N1);
        k.push_back({"mesh.seed",
                     [](RunConfig& c, std::string_view v) {
                         c.mesh_seed = parse_int<std::uint64_t>("mesh.seed", v);
                     },
                     [](const RunConfig& c) { return std::to_string(c.mesh_seed); }});
        adapt("adapt.tol", &AdaptiveParams::tol);
        adapt("adapt.beta", &AdaptiveParams::beta);
        adapt("adapt.tau_min", &AdaptiveParams::tau_min);
        adapt("adapt.tau_max", &AdaptiveParams::tau_max);
        k.push_back({"out_dir",
                     [](RunConfig& c, std::string_view v) { c.out_dir = std::string(trim(v)); },
                     [](const RunConfig& c) { return c.out_dir; }});
        k.push_back({"snapshot_times",
                     [](RunConfig& c, std::string_view v) {
                         c.snapshot_times.clear();
                         for (auto p : split_list(v)) c.snapshot_times.push_back(parse_double("snapshot_times", p));
                     },
                     [](const RunConfig& c) { return fmt_list(c.snapshot_times); }});
        k.push_back({"conv.N",
                     [](RunConfig& c, std::string_view v) {
                         c.conv_N.clear();
                         for (auto p : split_list(v)) c.conv_N.push_back(parse_int<std::size_t>("conv.N", p));
                     },
                     [](const RunConfig& c) { return fmt_list(c.conv_N); }});
        k.push_back({"sweep.gammas",
                     [](RunConfig& c, std::string_view v) {
                         c.sweep_gammas.clear();
                         for (auto p : split_list(v)) c.sweep_gammas.push_back(parse_double("sweep.gammas", p));
                     },
                     [](const RunConfig& c) { return fmt_list(c.sweep_gammas); }});
        k.push_back({"probe",
                     [](RunConfig& c, std::string_view v) {
                         const auto parts = split_list(v);
                         if (parts.size() != 2) bad_value("probe", v, "two coordinates x, y");
                         c.probe = {parse_double("probe", parts[0]), parse_double("probe", parts[1])};
                     },
                     [](const RunConfig& c) { return fmt_list(c.probe); }});
        count("fit.min_points", &RunConfig::fit_min_points);
        num("kernel.build_eps", &RunConfig::kernel_build_eps);
        return k;
    }();
    return keys;
}

const KeyDef* find_key(std::string_view name) {
    for (const auto& k : registry()) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

RunConfig table_base(std::string name, double sigma, SchemeKind scheme, std::vector<double> gammas) {
    RunConfig c;
    c.experiment = name;
    c.alpha = 0.8;
    c.sigma = sigma;
    c.epsilon2 = manufactured_epsilon2();
    c.scheme = scheme;
    c.S = scheme == SchemeKind::Stabilized ? 0.1 : 0.0;
    c.grid_M = 256;
    c.domain = {0.0, 1.0, 0.0, 1.0};
    c.T = 1.0;
    c.mesh_kind = MeshKind::GradedRandom;
    c.mesh_gamma = gammas[gammas.size() / 2];
    c.mesh_seed = 42;
    c.conv_N = {64, 128, 256, 512};
    c.sweep_gammas = std::move(gammas);
    c.out_dir = "out/" + name;
    return c;
}

RunConfig bubbles_base(std::string name) {
    constexpr double pi = std::numbers::pi;
    RunConfig c;
    c.experiment = name;
    c.alpha = 0.7;
    c.sigma = 0.7;
    c.epsilon2 = 0.01;
    c.scheme = SchemeKind::BackwardEuler;
    c.grid_M = 128;
    c.domain = {-pi, pi, -pi, pi};
    c.T = 100.0;
    c.mesh_kind = MeshKind::GradedAdaptive;
    c.mesh_T0 = 0.1;
    c.mesh_N0 = 300;
    c.mesh_gamma = 3.0;
    c.adapt = AdaptiveParams{0.15, 200.0, 1e-3, 0.1};
    c.snapshot_times = {1.0, 10.0, 30.0, 100.0};
    c.out_dir = "out/" + name;
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<ConfigEntry> parse_config_text(std::string_view text, std::string_view origin) {
    std::vector<ConfigEntry> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty()) {
                std::ostringstream os;
                os << origin << ":" << line_no << ": expected 'key = value'";
                fail(ErrorKind::Config, os.str());
            }
            entries.push_back({std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))),
                               line_no});
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return entries;
}

std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

std::vector<std::string> preset_names() {
    return {"table1", "table2", "table3", "table4", "bubbles", "bubbles-stabilized", "fig1"};
}

RunConfig preset(std::string_view name) {
    if (name == "table1") return table_base("table1", 0.8, SchemeKind::BackwardEuler, {1.25, 1.5, 2.0});
    if (name == "table2") return table_base("table2", 0.4, SchemeKind::BackwardEuler, {2.0, 3.0, 4.0});
    if (name == "table3") return table_base("table3", 0.8, SchemeKind::Stabilized, {1.0, 1.25, 2.0});
    if (name == "table4") return table_base("table4", 0.4, SchemeKind::Stabilized, {2.0, 2.5, 3.0});
    if (name == "bubbles") return bubbles_base("bubbles");
    if (name == "bubbles-stabilized") {
        RunConfig c = bubbles_base("bubbles-stabilized");
        c.scheme = SchemeKind::Stabilized;
        c.S = 0.1;
        c.adapt = AdaptiveParams{1.5, 200.0, 1e-3, 1.0};
        return c;
    }
    if (name == "fig1") {
        RunConfig c = bubbles_base("fig1");
        c.T = 1.0;
        c.mesh_kind = MeshKind::Graded;
        c.mesh_T0.reset();
        c.mesh_N0 = 1000;
        c.sweep_gammas = {1.0, 3.0};
        c.snapshot_times.clear();
        return c;
    }
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    fail(ErrorKind::Config, "unknown experiment preset '" + std::string(name) + "' (known: " + known + ")");
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
    const KeyDef* def = find_key(trim(key));
    if (!def) fail(ErrorKind::Config, "unknown config key '" + std::string(key) + "'");
    def->set(cfg, value);
}

std::vector<std::string> required_keys(const RunConfig& cfg) {
    std::vector<std::string> keys{"alpha", "epsilon2", "scheme", "grid.M", "domain",
                                  "T",     "mesh.kind", "mesh.gamma"};
    if (cfg.scheme == SchemeKind::Stabilized) keys.push_back("S");
    switch (cfg.mesh_kind) {
        case MeshKind::Graded: keys.push_back("mesh.N0"); break;
        case MeshKind::GradedRandom: keys.push_back("mesh.N1"); break;
        case MeshKind::GradedAdaptive:
            for (const char* k : {"mesh.N0", "adapt.tol", "adapt.beta", "adapt.tau_min", "adapt.tau_max"}) {
                keys.push_back(k);
            }
            break;
    }
    return keys;
}

RunConfig resolve_config(const std::vector<ConfigEntry>& entries, std::optional<std::string> preset_name) {
    if (!preset_name) {
        for (const auto& e : entries) {
            if (e.key == "experiment" && e.value != "custom") preset_name = e.value;
        }
    }
    RunConfig cfg = preset_name ? preset(*preset_name) : RunConfig{};

    std::set<std::string> seen;
    for (const auto& e : entries) {
        if (e.key == "experiment") continue;
        try {
            apply_setting(cfg, e.key, e.value);
        } catch (const Error& err) {
            if (e.line == 0) throw;
            std::ostringstream os;
            os << "line " << e.line << ": " << err.what();
            throw Error(err.kind(), os.str());
        }
        seen.insert(e.key);
    }

    if (!preset_name) {
        std::vector<std::string> missing;
        for (const auto& k : required_keys(cfg)) {
            if (!seen.count(k)) missing.push_back(k);
        }
        if (!missing.empty()) {
            std::string list;
            for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
            fail(ErrorKind::Config, "missing required config keys: " + list);
        }
    }
    return cfg;
}

std::vector<std::string> echo_config(const RunConfig& cfg) {
    std::vector<std::string> lines;
    for (const auto& k : registry()) lines.push_back(std::string(k.name) + " = " + k.get(cfg));
    return lines;
}

}  // namespace fracac
