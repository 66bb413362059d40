#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracac/frackernel.hpp"
#include "fracac/mesh.hpp"
#include "fracac/spatial.hpp"

namespace fracac {

enum class SchemeKind { BackwardEuler, Stabilized };

struct SchemeConfig {
    double alpha = 0.8;
    double epsilon2 = 0.01;
    SchemeKind kind = SchemeKind::BackwardEuler;
    double S = 0.0;
    double picard_tol = 1e-12;
    std::size_t picard_max_iter = 200;
    double soe_eps = 1e-12;
};

/// Largest step for which the backward Euler scheme provably keeps |u| <= 1:
/// Gamma(2-alpha)^{-1/alpha}.
double backward_euler_step_bound(double alpha);

/// Human-readable notes for hypotheses of the maximum-principle guarantees
/// that the configuration (and largest step) violates. Empty when all hold.
std::vector<std::string> guarantee_warnings(const SchemeConfig& cfg, double max_step);

// ---------------------------------------------------------------------------
// Causal Caputo L1 operators
// ---------------------------------------------------------------------------

/// L1 approximation of the Caputo derivative evaluated level by level.
/// At level n the value is a_0(tau_n) diff^n + history_term(tau_n).
class CaputoL1 {
public:
    explicit CaputoL1(double alpha, std::size_t dofs) : order_(alpha), dofs_(dofs) {}
    virtual ~CaputoL1() = default;

    [[nodiscard]] double leading(double tau) const { return order_.leading_kernel(tau); }
    [[nodiscard]] std::size_t level() const noexcept { return level_; }
    [[nodiscard]] std::size_t dofs() const noexcept { return dofs_; }
    [[nodiscard]] const FracOrder& order() const noexcept { return order_; }

    /// Contribution of the committed differences 1..n-1 at the next level.
    virtual void history_term(double tau_n, std::span<double> out) = 0;
    /// Records diff^n = v^n - v^{n-1} for the step tau_n.
    virtual void commit(std::span<const double> diff, double tau_n) = 0;

protected:
    FracOrder order_;
    std::size_t dofs_;
    std::size_t level_ = 0;
};

/// Fast L1: history through the exponential-sum recursion, O(N_q) per dof.
/// Commits are applied lazily and fused with the next history evaluation.
class FastCaputoL1 final : public CaputoL1 {
public:
    FastCaputoL1(std::shared_ptr<const SoeApprox> soe, std::size_t dofs);

    void history_term(double tau_n, std::span<double> out) override;
    void commit(std::span<const double> diff, double tau_n) override;

    [[nodiscard]] const SoeApprox& soe() const noexcept { return *soe_; }
    /// Flushes any pending commit and returns the history state.
    const HistoryState& state();

private:
    void flush();

    std::shared_ptr<const SoeApprox> soe_;
    HistoryState state_;
    std::vector<double> pending_;
    double pending_tau_ = 0.0;
    bool has_pending_ = false;
};

/// Direct L1: stores every difference and sums the full kernel row, O(n).
class DirectCaputoL1 final : public CaputoL1 {
public:
    DirectCaputoL1(double alpha, std::size_t dofs) : CaputoL1(alpha, dofs) {}

    void history_term(double tau_n, std::span<double> out) override;
    void commit(std::span<const double> diff, double tau_n) override;

private:
    std::vector<double> nodes_{0.0};
    std::vector<double> diffs_;  // level-major
};

// ---------------------------------------------------------------------------
// Single steps
// ---------------------------------------------------------------------------

/// Scratch buffers reused across steps.
struct StepWorkspace {
    std::vector<double> hist, rhs, base, next, diff;
    void resize(std::size_t n);
};

/// (d_f^alpha u)^n = eps2 D_h u^n - f(u^n) + g^n, solved by Picard iteration
/// (a_0 I - eps2 D_h) u^{s+1} = a_0 u^{n-1} - H + g - (u^s)^3 + u^s seeded
/// with u^{n-1}. Commits the difference to `op`. Returns the iteration count;
/// throws PicardDiverged after picard_max_iter iterations.
std::size_t backward_euler_step(const Field& u_prev, CaputoL1& op, double tau,
                                const SchemeConfig& cfg, HelmholtzSolver& solver,
                                const Field* source, Field& u_new, StepWorkspace& ws);

/// (a_0 + S) u^n - eps2 D_h u^n = (a_0 + S) u^{n-1} - f(u^{n-1}) - H + g^n:
/// one linear solve. Commits the difference to `op`.
void stabilized_step(const Field& u_prev, CaputoL1& op, double tau, const SchemeConfig& cfg,
                     HelmholtzSolver& solver, const Field* source, Field& u_new,
                     StepWorkspace& ws);

// ---------------------------------------------------------------------------
// Marching driver
// ---------------------------------------------------------------------------

struct RunRecord {
    double t = 0.0;
    double tau = 0.0;
    double unorm = 0.0;
    double energy = 0.0;
    std::size_t iters = 0;
    double wall_seconds = 0.0;
};

struct Snapshot {
    double requested = 0.0;
    double t = 0.0;
    Field u;
};

/// Fills g with the source at time t.
using SourceFn = std::function<void(double t, Field& g)>;
/// Called after level n is complete (n = 0 for the initial data).
using LevelObserver = std::function<void(std::size_t n, double t, const Field& u)>;

enum class L1Evaluation { Fast, Direct };

struct MarchPlan {
    /// Full mesh, or the graded head when `adapt` is set.
    TimeMesh mesh;
    std::optional<AdaptiveParams> adapt;
    /// End time of adaptive runs.
    double final_time = 0.0;
    std::vector<double> snapshot_times;
    SourceFn source;
    LevelObserver observer;
    L1Evaluation evaluation = L1Evaluation::Fast;
    HelmholtzMethod solver = HelmholtzMethod::Fourier;
    /// Prebuilt SOE; built from the mesh when absent.
    std::shared_ptr<const SoeApprox> soe;
    bool track_energy = true;
};

struct MarchResult {
    Field u;
    RunRecord initial;
    std::vector<RunRecord> records;
    std::vector<Snapshot> snapshots;
    TimeMesh mesh;
    std::shared_ptr<const SoeApprox> soe;
    std::vector<std::string> warnings;
};

/// SOE cutoff for a plan: the smallest step the run can take.
double soe_cutoff(const MarchPlan& plan);
double plan_final_time(const MarchPlan& plan);

MarchResult march(const SchemeConfig& cfg, const MarchPlan& plan, const Field& u0);

// ---------------------------------------------------------------------------
// Manufactured solution u = omega_{1+sigma}(t) sin(2 pi x) sin(2 pi y), eps2 = 1/(8 pi^2)
// ---------------------------------------------------------------------------

double manufactured_epsilon2();
double manufactured_solution(double sigma, double x, double y, double t);
/// g = omega_{1+sigma-alpha}(t) phi + omega_{1+sigma}(t)^3 phi^3, t > 0.
double manufactured_source(double alpha, double sigma, double x, double y, double t);
SourceFn manufactured_source_field(double alpha, double sigma);

}  // namespace fracac
