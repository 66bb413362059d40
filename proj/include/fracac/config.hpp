#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fracac/mesh.hpp"
#include "fracac/schemes.hpp"

namespace fracac {

enum class MeshKind { Graded, GradedRandom, GradedAdaptive };

/// Every knob of a run. Presets fill all fields; config files and `--set`
/// overrides replace individual keys.
struct RunConfig {
    std::string experiment = "custom";

    double alpha = 0.8;
    double sigma = 0.8;
    double epsilon2 = 0.01;
    SchemeKind scheme = SchemeKind::BackwardEuler;
    double S = 0.0;
    double picard_tol = 1e-12;
    std::size_t picard_max_iter = 200;
    double soe_eps = 1e-12;

    std::size_t grid_M = 128;
    std::array<double, 4> domain{0.0, 1.0, 0.0, 1.0};
    double T = 1.0;

    MeshKind mesh_kind = MeshKind::Graded;
    std::optional<double> mesh_T0;      // empty: min{1/gamma, T}
    std::optional<std::size_t> mesh_N0;  // empty: proportional split of N
    double mesh_gamma = 1.0;
    std::size_t mesh_N1 = 0;
    std::uint64_t mesh_seed = 42;

    AdaptiveParams adapt;

    std::string out_dir = "out";
    std::vector<double> snapshot_times;

    std::vector<std::size_t> conv_N{64, 128, 256, 512};
    std::vector<double> sweep_gammas;  // empty: {mesh.gamma}

    std::array<double, 2> probe{-1.0, 0.0};
    std::size_t fit_min_points = 8;

    /// SOE tolerance used to build the kernel-check approximation; 0 means
    /// soe_eps. A looser value is a fault injection for the scan.
    double kernel_build_eps = 0.0;

    [[nodiscard]] SchemeConfig scheme_config() const;
    [[nodiscard]] Grid2D grid() const;
    [[nodiscard]] std::vector<double> gammas() const;
    /// T0 after applying the min{1/gamma, T} default for grading gamma.
    [[nodiscard]] double head_end(double gamma) const;
};

struct ConfigEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Parses `key = value` lines; `#` starts a comment. Throws Config on a
/// malformed line.
std::vector<ConfigEntry> parse_config_text(std::string_view text, std::string_view origin = "config");
std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// Throws Config for an unknown name.
RunConfig preset(std::string_view name);

/// Sets one key. Throws Config for unknown keys or unparsable values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Resolves a run config: the preset named by `preset_name`, else by an
/// `experiment` entry, else a custom base whose required keys must all be
/// given; then the entries in order. Missing keys are reported by name.
RunConfig resolve_config(const std::vector<ConfigEntry>& entries,
                         std::optional<std::string> preset_name = std::nullopt);

/// Required keys of a custom (preset-free) config for the given settings.
std::vector<std::string> required_keys(const RunConfig& cfg);

/// Resolved config as ordered `key = value` lines; feeding them back through
/// resolve_config reproduces the config.
std::vector<std::string> echo_config(const RunConfig& cfg);

std::string to_string(SchemeKind kind);
std::string to_string(MeshKind kind);

}  // namespace fracac
