#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracac/config.hpp"
#include "fracac/verify.hpp"

namespace fracac {

struct RunOptions {
    /// Output directory; nothing is written when empty.
    std::filesystem::path out_dir;
    unsigned threads = 1;
    /// Progress messages; silent when null.
    std::ostream* log = nullptr;
};

/// Time mesh for grading gamma. `total_N` fixes N = N0 + N1 for
/// graded+random meshes (convergence runs); adaptive kinds return the head.
TimeMesh build_mesh(const RunConfig& cfg, double gamma, std::optional<std::size_t> total_N = std::nullopt);

/// Number of graded levels for total N: N when T0 = T, else round(N T0 / T)
/// clamped to [1, N-1].
std::size_t head_levels(std::size_t N, double T0, double T);

/// u0 = 0.5 inside the unit disks centred at (+-1, 0), -0.5 elsewhere.
Field bubbles_initial(const Grid2D& grid);

/// Extent along the column nearest x = 0 where u > 0; 0 until the bubbles
/// connect through a positive neck.
double neck_width(const Field& u);

/// Flat index of the grid node nearest (x, y).
std::size_t nearest_node(const Grid2D& grid, double x, double y);

/// min{gamma sigma, 2 - alpha} (backward Euler) or min{gamma sigma, 1}.
double theoretical_rate(SchemeKind kind, double alpha, double sigma, double gamma);

/// Comment block echoing the resolved config, one `# ` line each.
std::vector<std::string> header_lines(const RunConfig& cfg, const std::string& command);

// ---------------------------------------------------------------------------

struct ConvergenceTable {
    double gamma = 1.0;
    double theory = 0.0;
    std::vector<ConvergenceRow> rows;
    std::vector<std::string> warnings;
};

/// Manufactured-solution error tables, one per grading in cfg.gammas().
/// Writes convergence_g<gamma>.csv per table.
std::vector<ConvergenceTable> run_convergence(const RunConfig& cfg, const RunOptions& opts);

struct BubblesOutcome {
    MarchResult run;
    MaxPrincipleReport max_principle;
    EnergyReport energy;
    std::vector<QuotientSample> quotients;
    std::optional<SlopeFit> slope;
    std::vector<std::pair<double, double>> neck;  // (t, width) per level
};

/// Two-bubble coalescence run. Writes records.csv, neck.csv, singularity.csv,
/// monitors.txt and snapshots.
BubblesOutcome run_bubbles(const RunConfig& cfg, const RunOptions& opts);

struct SingularityOutcome {
    double gamma = 1.0;
    std::vector<QuotientSample> samples;
    std::optional<SlopeFit> fit_inf;
    std::optional<SlopeFit> fit_probe;
};

/// Difference-quotient study from the bubbles data on a graded mesh for each
/// grading in cfg.gammas(). Writes singularity_g<gamma>.csv.
std::vector<SingularityOutcome> run_singularity(const RunConfig& cfg, const RunOptions& opts);

struct CheckLine {
    std::string name;
    bool asserting = true;
    bool passed = true;
    std::string detail;
};

struct KernelCheckOutcome {
    std::vector<CheckLine> lines;
    [[nodiscard]] bool passed() const;
};

/// SOE scan, L1 exactness, fast-vs-direct oracle, Gronwall identities and the
/// (observational) PSD probe. Writes kernel_check.txt and psd.csv.
KernelCheckOutcome run_kernel_check(const RunConfig& cfg, const RunOptions& opts);

/// SOE for (alpha, soe_eps) on [min step of the configured mesh, T]. Writes
/// soe_table.csv.
SoeApprox run_soe_table(const RunConfig& cfg, const RunOptions& opts);

}  // namespace fracac
