// Sum-of-exponentials approximation of omega_{1-alpha}(t) on [dt, T].
//
// Starting from
//   t^{-alpha} / Gamma(1-alpha) = sin(pi alpha)/pi * int_0^inf e^{-s t} s^{alpha-1} ds,
// the substitution s = exp(u - e^{-u}) makes the integrand decay double
// exponentially as u -> -inf and exponentially fast once s t >> 1, so the
// trapezoidal rule in u converges geometrically in 1/h. Nodes are
// theta_j = exp(u_j - e^{-u_j}) and weights
// w_j = h sin(pi alpha)/pi (1 + e^{-u_j}) exp(alpha (u_j - e^{-u_j})), all
// positive. The step h is refined until a log-grid scan certifies the bound.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracac/error.hpp"
#include "fracac/frackernel.hpp"

namespace fracac {

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;

struct TrapezoidRule {
    std::vector<long double> theta;
    std::vector<long double> weight;
};

// Neumaier-compensated sum of w_j exp(-theta_j t); theta ascending.
long double soe_sum(std::span<const long double> theta, std::span<const long double> weight,
                    long double t) {
    long double sum = 0.0L;
    long double comp = 0.0L;
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const long double x = theta[j] * t;
        if (x > 11400.0L) break;
        const long double term = weight[j] * std::exp(-x);
        if (x > 1.0L && term < 1e-40L * sum) break;
        const long double s = sum + term;
        comp += (std::fabs(sum) >= std::fabs(term)) ? (sum - s) + term : (term - s) + sum;
        sum = s;
    }
    return sum + comp;
}

long double target_at(long double eps, long double floor_rel, long double alpha, long double t) {
    return std::max(eps, floor_rel * omega_ext(1.0L - alpha, t));
}

TrapezoidRule trapezoid(long double alpha, long double h, long double dt, long double eps_lo,
                        long double eps_hi) {
    const long double scale = std::sin(kPi * alpha) / kPi;
    auto node = [](long double u) { return std::exp(u - std::exp(-u)); };
    auto weight = [&](long double u) {
        return h * scale * (1.0L + std::exp(-u)) * std::exp(alpha * (u - std::exp(-u)));
    };

    // Lower tail: weights fall off double exponentially; the dropped mass acts
    // as a constant offset for every t.
    long int j_lo = 0;
    while (weight(static_cast<long double>(j_lo - 1) * h) > 1e-4L * eps_lo) --j_lo;

    // Upper tail: contributions w exp(-theta dt) vanish past the peak.
    long int j_hi = 0;
    for (;;) {
        const long double u = static_cast<long double>(j_hi + 1) * h;
        const long double th = node(u);
        if (th * dt > 1.0L && weight(u) * std::exp(-th * dt) < 1e-4L * eps_hi) break;
        ++j_hi;
    }

    TrapezoidRule rule;
    for (long int j = j_lo; j <= j_hi; ++j) {
        const long double u = static_cast<long double>(j) * h;
        rule.theta.push_back(node(u));
        rule.weight.push_back(weight(u));
    }
    return rule;
}

long double scan(std::span<const long double> theta, std::span<const long double> weight,
                 long double alpha, long double dt, long double T, std::size_t points,
                 long double eps, long double floor_rel, long double* worst_ratio) {
    const long double lo = std::log(dt);
    const long double hi = std::log(T);
    long double max_dev = 0.0L;
    long double ratio = 0.0L;
    for (std::size_t i = 0; i < points; ++i) {
        const long double frac =
            points > 1 ? static_cast<long double>(i) / static_cast<long double>(points - 1) : 0.0L;
        const long double t = (i + 1 == points) ? T : std::exp(lo + (hi - lo) * frac);
        const long double dev = std::fabs(omega_ext(1.0L - alpha, t) - soe_sum(theta, weight, t));
        max_dev = std::max(max_dev, dev);
        ratio = std::max(ratio, dev / target_at(eps, floor_rel, alpha, t));
    }
    if (worst_ratio) *worst_ratio = ratio;
    return max_dev;
}

}  // namespace

long double SoeApprox::relative_floor() { return 16.0L * LDBL_EPSILON; }

double SoeApprox::evaluate(double t) const {
    double sum = 0.0;
    for (const auto& m : modes_) sum += m.weight * std::exp(-m.theta * t);
    return sum;
}

long double SoeApprox::evaluate_ext(long double t) const {
    return soe_sum(theta_ext_, weight_ext_, t);
}

long double SoeApprox::scan_deviation(std::size_t points) const {
    return scan(theta_ext_, weight_ext_, alpha_, dt_, T_, points, eps_, relative_floor(), nullptr);
}

long double SoeApprox::scan_ratio(std::size_t points, double eps) const {
    long double ratio = 0.0L;
    scan(theta_ext_, weight_ext_, alpha_, dt_, T_, points, eps, relative_floor(), &ratio);
    return ratio;
}

SoeApprox build_soe(FracOrder order, double eps, double dt, double T, const SoeOptions& opts) {
    if (!(eps > 0.0)) fail(ErrorKind::InvalidParameter, "SOE tolerance must be positive");
    if (!(dt > 0.0) || !(dt < T)) fail(ErrorKind::InvalidParameter, "SOE needs 0 < dt < T");

    const long double alpha = order.alpha();
    const long double floor_rel = SoeApprox::relative_floor();
    const long double eps_ld = eps;
    const long double eps_hi = target_at(eps_ld, floor_rel, alpha, dt);

    constexpr std::size_t kSearchPoints = 2001;
    long double h = 0.6L;
    for (int attempt = 0; attempt < 60; ++attempt, h *= 0.9L) {
        TrapezoidRule rule = trapezoid(alpha, h, dt, eps_ld, eps_hi);
        if (rule.theta.size() > opts.max_modes) break;

        long double ratio = 0.0L;
        scan(rule.theta, rule.weight, alpha, dt, T, kSearchPoints, eps_ld, floor_rel, &ratio);
        // Leave headroom for the denser certification grid.
        if (ratio > 0.5L) continue;

        long double cert_ratio = 0.0L;
        const long double dev = scan(rule.theta, rule.weight, alpha, dt, T, opts.certify_points,
                                     eps_ld, floor_rel, &cert_ratio);
        if (cert_ratio > 1.0L) continue;

        SoeApprox soe;
        soe.alpha_ = order.alpha();
        soe.eps_ = eps;
        soe.dt_ = dt;
        soe.T_ = T;
        soe.max_dev_ = static_cast<double>(dev);
        soe.floor_active_ = eps_hi > eps_ld;
        soe.modes_.reserve(rule.theta.size());
        for (std::size_t j = 0; j < rule.theta.size(); ++j) {
            soe.modes_.push_back({static_cast<double>(rule.theta[j]),
                                  static_cast<double>(rule.weight[j])});
        }
        soe.theta_ext_ = std::move(rule.theta);
        soe.weight_ext_ = std::move(rule.weight);
        return soe;
    }

    std::ostringstream os;
    os << "SOE tolerance " << eps << " on [" << dt << ", " << T << "] for alpha=" << order.alpha()
       << " not reachable within " << opts.max_modes << " modes";
    fail(ErrorKind::ToleranceUnachievable, os.str());
}

bool soe_tolerance_admissible(FracOrder order, double eps, double T) {
    const double a = order.alpha();
    return eps <= std::min(omega(1.0 - a, T) / 3.0, a * omega(2.0 - a, 1.0));
}

}  // namespace fracac
