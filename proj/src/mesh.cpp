#include "fracac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fracac/error.hpp"

namespace fracac {

TimeMesh TimeMesh::from_nodes(std::vector<double> nodes) {
    if (nodes.empty() || nodes.front() != 0.0) {
        fail(ErrorKind::InvalidParameter, "time mesh must start at t_0 = 0");
    }
    TimeMesh mesh;
    mesh.steps_.reserve(nodes.size() - 1);
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        const double tau = nodes[k] - nodes[k - 1];
        if (!(tau > 0.0) || !std::isfinite(nodes[k])) {
            std::ostringstream os;
            os << "time mesh nodes must be finite and strictly increasing (level " << k << ")";
            fail(ErrorKind::InvalidParameter, os.str());
        }
        mesh.steps_.push_back(tau);
    }
    mesh.nodes_ = std::move(nodes);
    if (!mesh.steps_.empty()) {
        const auto [lo, hi] = std::minmax_element(mesh.steps_.begin(), mesh.steps_.end());
        mesh.min_step_ = *lo;
        mesh.max_step_ = *hi;
    }
    return mesh;
}

double TimeMesh::max_ratio() const noexcept {
    double rho = 0.0;
    for (std::size_t k = 1; k < steps_.size(); ++k) {
        rho = std::max(rho, steps_[k - 1] / steps_[k]);
    }
    return rho;
}

TimeMesh graded_mesh(double T0, std::size_t N0, double gamma) {
    if (N0 == 0) fail(ErrorKind::InvalidParameter, "graded mesh needs N0 >= 1");
    if (!(gamma >= 1.0)) fail(ErrorKind::InvalidParameter, "graded mesh needs gamma >= 1");
    if (!(T0 > 0.0)) fail(ErrorKind::InvalidParameter, "graded mesh needs T0 > 0");

    std::vector<double> nodes(N0 + 1);
    const double n = static_cast<double>(N0);
    for (std::size_t k = 0; k < N0; ++k) {
        nodes[k] = T0 * std::pow(static_cast<double>(k) / n, gamma);
    }
    nodes[N0] = T0;
    return TimeMesh::from_nodes(std::move(nodes));
}

namespace {

// Uniform draw in the open interval (0,1) from the top 53 bits.
double open_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

}  // namespace

std::vector<double> random_tail_steps(double T0, double T, std::size_t N1, std::uint64_t seed) {
    if (!(T > T0)) fail(ErrorKind::InvalidParameter, "random tail needs T > T0");
    if (N1 == 0) fail(ErrorKind::InvalidParameter, "random tail needs N1 >= 1");

    std::mt19937_64 rng(seed);
    std::vector<double> eps(N1);
    double total = 0.0;
    for (auto& e : eps) {
        e = open_unit(rng);
        total += e;
    }

    const double span = T - T0;
    std::vector<double> steps(N1);
    double t = T0;
    for (std::size_t k = 0; k + 1 < N1; ++k) {
        steps[k] = span * eps[k] / total;
        t += steps[k];
    }
    // Close the interval; nudge by ulps until t + last == T under the same
    // accumulation concat_mesh performs.
    double last = T - t;
    for (int guard = 0; guard < 8 && t + last != T; ++guard) {
        last = (t + last < T) ? std::nextafter(last, 2.0 * last) : std::nextafter(last, 0.0);
    }
    if (!(last > 0.0)) fail(ErrorKind::InvalidParameter, "random tail produced a non-positive closing step");
    steps[N1 - 1] = last;
    return steps;
}

TimeMesh concat_mesh(const TimeMesh& head, std::span<const double> tail_steps) {
    std::vector<double> nodes(head.nodes().begin(), head.nodes().end());
    nodes.reserve(nodes.size() + tail_steps.size());
    double t = nodes.back();
    for (double tau : tail_steps) {
        if (!(tau > 0.0)) fail(ErrorKind::InvalidParameter, "tail steps must be positive");
        t += tau;
        nodes.push_back(t);
    }
    return TimeMesh::from_nodes(std::move(nodes));
}

void AdaptiveParams::validate() const {
    if (!(tol > 0.0)) fail(ErrorKind::InvalidParameter, "adapt.tol must be positive");
    if (!(beta >= 0.0)) fail(ErrorKind::InvalidParameter, "adapt.beta must be non-negative");
    if (!(tau_min > 0.0) || !(tau_min <= tau_max)) {
        fail(ErrorKind::InvalidParameter, "adapt bounds need 0 < tau_min <= tau_max");
    }
}

double adaptive_next_step(double change_inf, const AdaptiveParams& p) {
    const double raw = p.tol / (1.0 + p.beta * change_inf);
    return std::min(std::max(p.tau_min, raw), p.tau_max);
}

AssgReport check_assg(const TimeMesh& mesh, double gamma, double c_gamma) {
    if (!(c_gamma > 0.0)) fail(ErrorKind::InvalidParameter, "AssG constant must be positive");
    const double tau = mesh.max_step();
    const double expo = 1.0 - 1.0 / gamma;
    for (std::size_t k = 1; k <= mesh.num_steps(); ++k) {
        const double tk = mesh.node(k);
        const double bound = c_gamma * tau * std::min(1.0, std::pow(tk, expo));
        if (mesh.step(k) > bound) return {false, k};
        if (k >= 2 && tk > c_gamma * mesh.node(k - 1)) return {false, k};
    }
    return {};
}

}  // namespace fracac
