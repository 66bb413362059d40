#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracac/mesh.hpp"

namespace fracac {

/// Caputo order alpha in (0,1).
class FracOrder {
public:
    explicit FracOrder(double alpha);

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    /// a_0 for a step tau: tau^{-alpha} / Gamma(2 - alpha).
    [[nodiscard]] double leading_kernel(double tau) const;

private:
    double alpha_;
};

/// omega_mu(t) = t^{mu-1} / Gamma(mu), t > 0, mu > 0.
double omega(double mu, double t);
long double omega_ext(long double mu, long double t);

/// One row of L1-type convolution kernels at level n.
/// values[j] multiplies the difference at level n - j, i.e. j = n - k.
struct KernelRow {
    std::size_t level = 0;
    std::vector<double> values;

    [[nodiscard]] double operator[](std::size_t j) const { return values[j]; }
    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// a_{n-k}^{(n)} = [omega_{2-a}(t_n - t_{k-1}) - omega_{2-a}(t_n - t_k)] / tau_k,
/// evaluated in a cancellation-free form.
KernelRow direct_kernel_row(const TimeMesh& mesh, FracOrder order, std::size_t n);

/// Average of omega_{1-alpha}(t_n - s) over a cell of width tau whose right
/// end lies a distance d >= 0 before t_n.
double l1_cell_average(double alpha, double d, double tau);

/// sum_{k=1}^n a_{n-k}^{(n)} diffs[k-1]; diffs must hold at least n entries.
double direct_l1_apply(const TimeMesh& mesh, FracOrder order, std::span<const double> diffs,
                       std::size_t n);

// ---------------------------------------------------------------------------
// Sum-of-exponentials compression of omega_{1-alpha} on [dt, T]
// ---------------------------------------------------------------------------

struct SoeMode {
    double theta;
    double weight;
};

struct SoeOptions {
    std::size_t max_modes = 512;
    std::size_t certify_points = 10000;
};

/// Exponential-sum approximation sum_l w_l exp(-theta_l t) of omega_{1-alpha}.
///
/// Nodes and weights are generated and certified in extended precision; the
/// double-rounded `modes` feed the time-stepping path.
class SoeApprox {
public:
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double tolerance() const noexcept { return eps_; }
    [[nodiscard]] double cutoff() const noexcept { return dt_; }
    [[nodiscard]] double horizon() const noexcept { return T_; }
    [[nodiscard]] std::size_t size() const noexcept { return modes_.size(); }
    [[nodiscard]] std::span<const SoeMode> modes() const noexcept { return modes_; }

    /// Max |omega - sum| over the certification grid (extended precision).
    [[nodiscard]] double max_deviation() const noexcept { return max_dev_; }
    /// True when eps lies below the extended-precision floor near dt, in which
    /// case the certified bound is max(eps, floor * omega(t)).
    [[nodiscard]] bool precision_floor_active() const noexcept { return floor_active_; }

    [[nodiscard]] double evaluate(double t) const;
    [[nodiscard]] long double evaluate_ext(long double t) const;

    /// Max |omega - sum| on a log-spaced grid of `points` nodes in [dt, T].
    [[nodiscard]] long double scan_deviation(std::size_t points) const;
    /// Max of |omega - sum| / max(eps, floor * omega(t)) on the same grid;
    /// <= 1 certifies the approximation at tolerance eps.
    [[nodiscard]] long double scan_ratio(std::size_t points, double eps) const;

    /// Relative accuracy floor of the extended-precision construction.
    static long double relative_floor();

private:
    friend SoeApprox build_soe(FracOrder, double, double, double, const SoeOptions&);

    double alpha_ = 0.5;
    double eps_ = 0.0;
    double dt_ = 0.0;
    double T_ = 0.0;
    std::vector<SoeMode> modes_;
    std::vector<long double> theta_ext_;
    std::vector<long double> weight_ext_;
    double max_dev_ = 0.0;
    bool floor_active_ = false;
};

/// Throws ToleranceUnachievable when the mode count would exceed the cap.
SoeApprox build_soe(FracOrder order, double eps, double dt, double T, const SoeOptions& opts = {});

/// eps <= min{omega_{1-alpha}(T)/3, alpha omega_{2-alpha}(1)}: the smallness
/// condition under which fast kernels stay monotone and above (2/3) a.
bool soe_tolerance_admissible(FracOrder order, double eps, double T);

/// A_{n-k}^{(n)}: A_0 = a_0, older entries integrate the exponential sum over
/// each cell in closed form.
KernelRow fast_kernel_row(const TimeMesh& mesh, const SoeApprox& soe, std::size_t n);

/// (1 - e^{-x}) / x with a series branch near zero.
double phi1(double x);

/// Exponentially weighted history H^l at the last completed level, one scalar
/// per (mode, dof); mode-major storage.
class HistoryState {
public:
    HistoryState() = default;
    HistoryState(std::size_t modes, std::size_t dofs)
        : modes_(modes), dofs_(dofs), h_(modes * dofs, 0.0) {}

    [[nodiscard]] std::size_t level() const noexcept { return level_; }
    [[nodiscard]] std::size_t modes() const noexcept { return modes_; }
    [[nodiscard]] std::size_t dofs() const noexcept { return dofs_; }
    [[nodiscard]] double value(std::size_t mode, std::size_t dof) const {
        return h_[mode * dofs_ + dof];
    }

    /// out[i] = sum_l w_l exp(-theta_l tau_n) H^l_i, the history contribution
    /// to the fast L1 operator at the next level.
    void history_term(const SoeApprox& soe, double tau_n, std::span<double> out) const;

    /// H^l <- exp(-theta_l tau) H^l + b(theta_l tau) diff.
    void advance(const SoeApprox& soe, std::span<const double> diff, double tau);

    /// advance(soe, diff, tau) followed by history_term(soe, tau_n, out) in a
    /// single pass over H.
    void advance_then_history(const SoeApprox& soe, std::span<const double> diff, double tau,
                              double tau_n, std::span<double> out);

private:
    std::size_t level_ = 0;
    std::size_t modes_ = 0;
    std::size_t dofs_ = 0;
    std::vector<double> h_;
};

/// Scalar fast L1 value a_0 diff + sum_l w_l exp(-theta_l tau_n) H^l for a
/// single-dof state at level n-1.
double fast_l1_apply(const HistoryState& state, const SoeApprox& soe, double a0, double diff,
                     double tau_n);

/// Triangular table p_{n-j}^{(n)}, 1 <= j <= n <= N.
class ComplementaryKernels {
public:
    explicit ComplementaryKernels(std::size_t N) : N_(N), p_(N * (N + 1) / 2, 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return N_; }
    /// p_{n-j}^{(n)}
    [[nodiscard]] double operator()(std::size_t n, std::size_t j) const { return p_[index(n, j)]; }
    double& operator()(std::size_t n, std::size_t j) { return p_[index(n, j)]; }

private:
    [[nodiscard]] std::size_t index(std::size_t n, std::size_t j) const {
        return (n - 1) * n / 2 + (j - 1);
    }
    std::size_t N_;
    std::vector<double> p_;
};

/// rows[n-1] must be the level-n row. Throws AssumptionViolated when a row is
/// not positive and monotone.
ComplementaryKernels complementary_kernels(std::span<const KernelRow> rows);

/// E_alpha(z) by truncated series. Throws Overflow outside the guard.
double mittag_leffler(double alpha, double z);

}  // namespace fracac
