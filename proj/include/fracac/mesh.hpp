#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fracac {

/// Nonuniform time levels 0 = t_0 < t_1 < ... < t_N = T.
///
/// Steps and ratios use the 1-based level convention: step(k) = t_k - t_{k-1}
/// for 1 <= k <= N and ratio(k) = step(k) / step(k+1) for 1 <= k < N.
/// Immutable after construction.
class TimeMesh {
public:
    TimeMesh() : nodes_{0.0} {}

    /// Validates t_0 = 0 and strict monotonicity.
    static TimeMesh from_nodes(std::vector<double> nodes);

    [[nodiscard]] std::size_t num_steps() const noexcept { return nodes_.size() - 1; }
    [[nodiscard]] double node(std::size_t k) const { return nodes_[k]; }
    [[nodiscard]] double step(std::size_t k) const { return steps_[k - 1]; }
    [[nodiscard]] double ratio(std::size_t k) const { return steps_[k - 1] / steps_[k]; }
    [[nodiscard]] double final_time() const noexcept { return nodes_.back(); }

    [[nodiscard]] double max_step() const noexcept { return max_step_; }
    [[nodiscard]] double min_step() const noexcept { return min_step_; }
    /// max_k rho_k; 0 for meshes with fewer than two steps.
    [[nodiscard]] double max_ratio() const noexcept;

    [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::span<const double> steps() const noexcept { return steps_; }

private:
    std::vector<double> nodes_;
    std::vector<double> steps_;
    double max_step_ = 0.0;
    double min_step_ = 0.0;
};

/// t_k = T0 (k/N0)^gamma for k = 0..N0.
TimeMesh graded_mesh(double T0, std::size_t N0, double gamma);

/// N1 random steps covering [T0, T], normalized from uniform (0,1) draws of a
/// seeded mt19937_64. When appended to a mesh ending exactly at T0 by
/// left-to-right accumulation the last node lands on T bit-exactly.
std::vector<double> random_tail_steps(double T0, double T, std::size_t N1, std::uint64_t seed);

/// Appends steps to the head mesh by left-to-right accumulation.
TimeMesh concat_mesh(const TimeMesh& head, std::span<const double> tail_steps);

struct AdaptiveParams {
    double tol = 0.15;
    double beta = 200.0;
    double tau_min = 1e-3;
    double tau_max = 0.1;

    /// Throws InvalidParameter unless tol > 0, beta >= 0, 0 < tau_min <= tau_max.
    void validate() const;
};

/// min{max{tau_min, tol / (1 + beta * change_inf)}, tau_max}
double adaptive_next_step(double change_inf, const AdaptiveParams& p);

struct AssgReport {
    bool holds = true;
    /// First violating level, 0 when the mesh passes.
    std::size_t worst_k = 0;
};

/// Mesh-quality check: tau_k <= C tau min{1, t_k^{1-1/gamma}} for all k and
/// t_k <= C t_{k-1} for k >= 2.
AssgReport check_assg(const TimeMesh& mesh, double gamma, double c_gamma);

}  // namespace fracac
