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
#include "fracac/schemes.hpp"
#include "fracac/spatial.hpp"

namespace fracac {

// ---------------------------------------------------------------------------
// Convergence tables
// ---------------------------------------------------------------------------

struct ConvergenceRow {
    std::size_t N = 0;
    double tau = 0.0;    // maximum step
    double error = 0.0;  // max over levels of the nodal infinity-norm error
    std::optional<double> order;
};

/// log(e1/e2) / log(tau1/tau2). Throws InvalidParameter when tau1 == tau2 or
/// an input is not positive.
double convergence_order(double e1, double tau1, double e2, double tau2);

/// Fills `order` of rows[1..] from consecutive pairs; rows[0].order stays empty.
void fill_orders(std::vector<ConvergenceRow>& rows);

using ExactFn = std::function<double(double x, double y, double t)>;

/// max_i |u_i - exact(x_i, y_i, t)|
double nodal_error(const Field& u, double t, const ExactFn& exact);

/// Accumulates max_{1<=n<=N} |U^n - u^n|_inf through a march observer.
/// The initial level is not counted, so a zero-step run reports 0.
class ErrorTracker {
public:
    explicit ErrorTracker(ExactFn exact) : exact_(std::move(exact)) {}
    /// Separable exact solution amplitude(t) * shape(x, y).
    ErrorTracker(Field shape, std::function<double(double)> amplitude)
        : shape_(std::make_shared<Field>(std::move(shape))), amplitude_(std::move(amplitude)) {}

    [[nodiscard]] LevelObserver observer();
    [[nodiscard]] double max_error() const noexcept { return *max_; }
    [[nodiscard]] std::size_t levels() const noexcept { return *levels_; }

private:
    ExactFn exact_;
    std::shared_ptr<const Field> shape_;
    std::function<double(double)> amplitude_;
    std::shared_ptr<double> max_ = std::make_shared<double>(0.0);
    std::shared_ptr<std::size_t> levels_ = std::make_shared<std::size_t>(0);
};

// ---------------------------------------------------------------------------
// Monitors over run records
// ---------------------------------------------------------------------------

struct MaxPrincipleReport {
    bool holds = true;
    double bound = 1.0 + 1e-12;
    double max_norm = 0.0;
    /// 1-based level of the first violation.
    std::optional<std::size_t> first_violation;
    double violation_time = 0.0;
};

/// Checks |u^n|_inf <= bound for every record; records[k] is level k+1.
MaxPrincipleReport max_principle_monitor(std::span<const RunRecord> records,
                                         double bound = 1.0 + 1e-12);

struct EnergyReport {
    double threshold = 1e-10;
    std::size_t increases = 0;
    double max_increase = 0.0;
    std::optional<std::size_t> first_increase;
};

/// Counts E^n > E^{n-1} + threshold. `initial` supplies E^0 when given.
EnergyReport energy_monitor(std::span<const RunRecord> records,
                            std::optional<RunRecord> initial = std::nullopt,
                            double threshold = 1e-10);

// ---------------------------------------------------------------------------
// Kernel diagnostics
// ---------------------------------------------------------------------------

struct PsdReport {
    std::size_t N = 0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
};

/// Smallest eigenvalue of (B + B^T)/2 with B_{kj} = a_{k-j}^{(k)}. Exploratory;
/// N <= 512.
PsdReport psd_probe(const TimeMesh& mesh, FracOrder order);

struct GronwallReport {
    std::size_t N = 0;
    /// max |sum_j p_{n-j}^{(n)} A_{j-k}^{(j)} - 1| over 1 <= k <= n <= N.
    double pa_max_deviation = 0.0;
    /// max_n sum_j p_{n-j}^{(n)} omega_{1+m alpha-alpha}(t_j) / omega_{1+m alpha}(t_n), m = 0, 1.
    double bound_ratio[2] = {0.0, 0.0};
    double pa_tolerance = 1e-12;
    double pi_a = 1.5;
    /// Kernels were positive and monotone, so p was well defined.
    bool kernels_admissible = true;
    std::string failure;

    [[nodiscard]] bool holds() const noexcept {
        return kernels_admissible && pa_max_deviation <= pa_tolerance && bound_ratio[0] <= pi_a &&
               bound_ratio[1] <= pi_a;
    }
};

GronwallReport gronwall_suite(const TimeMesh& mesh, const SoeApprox& soe);

/// max_n |L1 value of v(t) = t at t_n - omega_{2-alpha}(t_n)| / omega_{2-alpha}(t_n)
/// for the chosen evaluation.
double l1_linear_exactness(const TimeMesh& mesh, FracOrder order, L1Evaluation evaluation,
                           std::shared_ptr<const SoeApprox> soe = nullptr);

struct FastDirectReport {
    std::size_t N = 0;
    double max_difference = 0.0;  // max over levels of |u_fast - u_direct|_inf
    double bound = 0.0;
    [[nodiscard]] bool holds() const noexcept { return max_difference <= bound; }
};

/// Marches the same problem with the fast and the direct L1 operators.
FastDirectReport fast_vs_direct(const SchemeConfig& cfg, const TimeMesh& mesh, const Field& u0,
                                SourceFn source = {}, double bound_factor = 1e5);

// ---------------------------------------------------------------------------
// Initial singularity
// ---------------------------------------------------------------------------

struct QuotientSample {
    double t_mid = 0.0;
    double tau = 0.0;
    double inf_norm = 0.0;  // |(u^k - u^{k-1}) / tau_k|_inf
    double probe = 0.0;     // |(u^k - u^{k-1}) / tau_k| at the probe node
};

/// Collects difference quotients d_tau u^{k-1/2} through a march observer.
class QuotientTracker {
public:
    /// `probe_index` is a flat grid index.
    explicit QuotientTracker(std::size_t probe_index) : probe_(probe_index) {}

    [[nodiscard]] LevelObserver observer();
    [[nodiscard]] const std::vector<QuotientSample>& samples() const noexcept { return state_->samples; }

private:
    struct State {
        Field prev;
        double t_prev = 0.0;
        std::vector<QuotientSample> samples;
    };
    std::size_t probe_;
    std::shared_ptr<State> state_ = std::make_shared<State>();
};

enum class QuotientColumn { InfNorm, Probe };

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t points = 0;
};

/// Least-squares line through (log t_mid, log |q|) over the earliest decade
/// [10^p, 10^{p+1}) holding at least `min_points` samples. Throws
/// InvalidParameter when no decade qualifies.
SlopeFit fit_first_decade(std::span<const QuotientSample> samples, QuotientColumn column,
                          std::size_t min_points = 8);

}  // namespace fracac
