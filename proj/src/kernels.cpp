#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracac/error.hpp"
#include "fracac/frackernel.hpp"

namespace fracac {

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream os;
        os << "fractional order must lie in (0,1), got " << alpha;
        fail(ErrorKind::InvalidParameter, os.str());
    }
}

double omega(double mu, double t) { return std::pow(t, mu - 1.0) / std::tgamma(mu); }

long double omega_ext(long double mu, long double t) {
    return std::pow(t, mu - 1.0L) / std::tgamma(mu);
}

namespace {

// [F(d + tau) - F(d)] / tau with F(x) = x^{1-alpha} / Gamma(2-alpha).
long double cell_average(long double alpha, long double d, long double tau) {
    const long double g = std::tgamma(2.0L - alpha);
    if (d <= 0.0L) return std::pow(tau, -alpha) / g;
    const long double rise = std::expm1((1.0L - alpha) * std::log1p(tau / d));
    return std::pow(d, 1.0L - alpha) * rise / (tau * g);
}

}  // namespace

double FracOrder::leading_kernel(double tau) const {
    return static_cast<double>(cell_average(alpha_, 0.0L, tau));
}

double l1_cell_average(double alpha, double d, double tau) {
    return static_cast<double>(cell_average(alpha, d, tau));
}

KernelRow direct_kernel_row(const TimeMesh& mesh, FracOrder order, std::size_t n) {
    if (n < 1 || n > mesh.num_steps()) fail(ErrorKind::InvalidParameter, "kernel level out of range");
    KernelRow row{n, std::vector<double>(n)};
    const double tn = mesh.node(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const long double d = tn - mesh.node(k);
        row.values[n - k] = static_cast<double>(cell_average(order.alpha(), d, mesh.step(k)));
    }
    return row;
}

double direct_l1_apply(const TimeMesh& mesh, FracOrder order, std::span<const double> diffs,
                       std::size_t n) {
    if (diffs.size() < n) fail(ErrorKind::InvalidParameter, "difference history shorter than level");
    const KernelRow row = direct_kernel_row(mesh, order, n);
    long double sum = 0.0L;
    for (std::size_t k = 1; k <= n; ++k) sum += static_cast<long double>(row[n - k]) * diffs[k - 1];
    return static_cast<double>(sum);
}

double phi1(double x) {
    if (x < 1e-8) return 1.0 - x * (0.5 - x / 6.0);
    return -std::expm1(-x) / x;
}

KernelRow fast_kernel_row(const TimeMesh& mesh, const SoeApprox& soe, std::size_t n) {
    if (n < 1 || n > mesh.num_steps()) fail(ErrorKind::InvalidParameter, "kernel level out of range");
    const FracOrder order(soe.alpha());
    KernelRow row{n, std::vector<double>(n)};
    row.values[0] = order.leading_kernel(mesh.step(n));
    const double tn = mesh.node(n);
    for (std::size_t k = 1; k < n; ++k) {
        const double d = tn - mesh.node(k);
        const double tau = mesh.step(k);
        long double sum = 0.0L;
        for (const auto& m : soe.modes()) {
            const double x = m.theta * d;
            if (x > 745.0) break;
            sum += static_cast<long double>(m.weight) * std::exp(-static_cast<long double>(x)) *
                   phi1(m.theta * tau);
        }
        row.values[n - k] = static_cast<double>(sum);
    }
    return row;
}

void HistoryState::history_term(const SoeApprox& soe, double tau_n, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const auto modes = soe.modes();
    for (std::size_t l = 0; l < modes_; ++l) {
        const double c = modes[l].weight * std::exp(-modes[l].theta * tau_n);
        if (c == 0.0) continue;
        const double* h = h_.data() + l * dofs_;
        for (std::size_t i = 0; i < dofs_; ++i) out[i] += c * h[i];
    }
}

void HistoryState::advance(const SoeApprox& soe, std::span<const double> diff, double tau) {
    const auto modes = soe.modes();
    for (std::size_t l = 0; l < modes_; ++l) {
        const double x = modes[l].theta * tau;
        const double decay = std::exp(-x);
        const double b = phi1(x);
        double* h = h_.data() + l * dofs_;
        for (std::size_t i = 0; i < dofs_; ++i) h[i] = decay * h[i] + b * diff[i];
    }
    ++level_;
}

void HistoryState::advance_then_history(const SoeApprox& soe, std::span<const double> diff,
                                        double tau, double tau_n, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const auto modes = soe.modes();
    for (std::size_t l = 0; l < modes_; ++l) {
        const double x = modes[l].theta * tau;
        const double decay = std::exp(-x);
        const double b = phi1(x);
        const double c = modes[l].weight * std::exp(-modes[l].theta * tau_n);
        double* h = h_.data() + l * dofs_;
        for (std::size_t i = 0; i < dofs_; ++i) {
            h[i] = decay * h[i] + b * diff[i];
            out[i] += c * h[i];
        }
    }
    ++level_;
}

double fast_l1_apply(const HistoryState& state, const SoeApprox& soe, double a0, double diff,
                     double tau_n) {
    double hist = 0.0;
    state.history_term(soe, tau_n, std::span<double>(&hist, 1));
    return a0 * diff + hist;
}

ComplementaryKernels complementary_kernels(std::span<const KernelRow> rows) {
    const std::size_t N = rows.size();
    for (std::size_t n = 1; n <= N; ++n) {
        const auto& row = rows[n - 1];
        if (row.level != n || row.size() != n) {
            fail(ErrorKind::InvalidParameter, "kernel rows must be ordered by level");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!(row[j] > 0.0) || (j > 0 && row[j] > row[j - 1])) {
                std::ostringstream os;
                os << "kernel row " << n << " is not positive and monotone at index " << j;
                fail(ErrorKind::AssumptionViolated, os.str());
            }
        }
    }

    // p_0^{(n)} = 1 / A_0^{(n)};
    // p_{n-j}^{(n)} = p_0^{(j)} sum_{k=j+1}^{n} (A_{k-j-1}^{(k)} - A_{k-j}^{(k)}) p_{n-k}^{(n)}.
    ComplementaryKernels p(N);
    for (std::size_t n = 1; n <= N; ++n) {
        p(n, n) = 1.0 / rows[n - 1][0];
        for (std::size_t j = n - 1; j >= 1; --j) {
            long double sum = 0.0L;
            for (std::size_t k = j + 1; k <= n; ++k) {
                const auto& rk = rows[k - 1];
                sum += static_cast<long double>(rk[k - j - 1] - rk[k - j]) * p(n, k);
            }
            p(n, j) = static_cast<double>(sum / rows[j - 1][0]);
        }
    }
    return p;
}

double mittag_leffler(double alpha, double z) {
    if (!(alpha > 0.0)) fail(ErrorKind::InvalidParameter, "Mittag-Leffler order must be positive");
    if (z < -5.0 || z > 50.0) {
        std::ostringstream os;
        os << "Mittag-Leffler argument " << z << " outside the series guard [-5, 50]";
        fail(ErrorKind::Overflow, os.str());
    }
    if (z == 0.0) return 1.0;

    const long double a = alpha;
    const long double logz = std::log(std::fabs(static_cast<long double>(z)));
    long double sum = 1.0L;
    long double prev = 1.0L;
    for (int k = 1; k < 100000; ++k) {
        const long double mag = std::exp(k * logz - std::lgamma(1.0L + k * a));
        const long double term = (z < 0.0 && (k % 2 == 1)) ? -mag : mag;
        sum += term;
        if (!std::isfinite(sum)) break;
        if (mag < prev && mag <= 1e-16L * std::fabs(sum)) break;
        prev = mag;
    }
    const double result = static_cast<double>(sum);
    if (!std::isfinite(result)) fail(ErrorKind::Overflow, "Mittag-Leffler series overflowed");
    return result;
}

}  // namespace fracac
