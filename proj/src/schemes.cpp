#include "fracac/schemes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracac/error.hpp"

namespace fracac {

double backward_euler_step_bound(double alpha) {
    return std::pow(std::tgamma(2.0 - alpha), -1.0 / alpha);
}

std::vector<std::string> guarantee_warnings(const SchemeConfig& cfg, double max_step) {
    std::vector<std::string> notes;
    std::ostringstream os;
    if (cfg.kind == SchemeKind::Stabilized && cfg.S < 2.0) {
        os << "stabilization S=" << cfg.S << " < 2: maximum principle not guaranteed";
        notes.push_back(os.str());
    }
    if (cfg.kind == SchemeKind::BackwardEuler) {
        const double bound = backward_euler_step_bound(cfg.alpha);
        if (max_step > bound) {
            os << "max step " << max_step << " exceeds " << bound
               << ": maximum principle not guaranteed";
            notes.push_back(os.str());
        }
    }
    return notes;
}

// ---------------------------------------------------------------------------

FastCaputoL1::FastCaputoL1(std::shared_ptr<const SoeApprox> soe, std::size_t dofs)
    : CaputoL1(soe->alpha(), dofs), soe_(std::move(soe)), state_(soe_->size(), dofs) {}

void FastCaputoL1::flush() {
    if (!has_pending_) return;
    state_.advance(*soe_, pending_, pending_tau_);
    has_pending_ = false;
}

const HistoryState& FastCaputoL1::state() {
    flush();
    return state_;
}

void FastCaputoL1::history_term(double tau_n, std::span<double> out) {
    if (!has_pending_) {
        state_.history_term(*soe_, tau_n, out);
        return;
    }
    state_.advance_then_history(*soe_, pending_, pending_tau_, tau_n, out);
    has_pending_ = false;
}

void FastCaputoL1::commit(std::span<const double> diff, double tau_n) {
    flush();
    pending_.assign(diff.begin(), diff.end());
    pending_tau_ = tau_n;
    has_pending_ = true;
    ++level_;
}

void DirectCaputoL1::history_term(double tau_n, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t n = level_ + 1;
    const double t_prev = nodes_.back();
    for (std::size_t k = 1; k < n; ++k) {
        const double d = tau_n + (t_prev - nodes_[k]);
        const double tau_k = nodes_[k] - nodes_[k - 1];
        const double a = l1_cell_average(order_.alpha(), d, tau_k);
        const double* dk = diffs_.data() + (k - 1) * dofs_;
        for (std::size_t i = 0; i < dofs_; ++i) out[i] += a * dk[i];
    }
}

void DirectCaputoL1::commit(std::span<const double> diff, double tau_n) {
    nodes_.push_back(nodes_.back() + tau_n);
    diffs_.insert(diffs_.end(), diff.begin(), diff.end());
    ++level_;
}

// ---------------------------------------------------------------------------

void StepWorkspace::resize(std::size_t n) {
    hist.resize(n);
    rhs.resize(n);
    base.resize(n);
    next.resize(n);
    diff.resize(n);
}

std::size_t backward_euler_step(const Field& u_prev, CaputoL1& op, double tau,
                                const SchemeConfig& cfg, HelmholtzSolver& solver,
                                const Field* source, Field& u_new, StepWorkspace& ws) {
    const std::size_t n = u_prev.values.size();
    ws.resize(n);
    const double a0 = op.leading(tau);
    op.history_term(tau, ws.hist);

    for (std::size_t i = 0; i < n; ++i) {
        ws.base[i] = a0 * u_prev.values[i] - ws.hist[i] + (source ? source->values[i] : 0.0);
    }

    u_new = u_prev;
    std::size_t iters = 0;
    for (;;) {
        if (iters == cfg.picard_max_iter) {
            std::ostringstream os;
            os << "Picard iteration did not reach " << cfg.picard_tol << " in "
               << cfg.picard_max_iter << " iterations (tau=" << tau << ")";
            fail(ErrorKind::PicardDiverged, os.str());
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double u = u_new.values[i];
            ws.rhs[i] = ws.base[i] - u * u * u + u;
        }
        solver.solve(a0, cfg.epsilon2, ws.rhs, ws.next);
        ++iters;
        double incr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            incr = std::max(incr, std::fabs(ws.next[i] - u_new.values[i]));
        }
        std::copy(ws.next.begin(), ws.next.end(), u_new.values.begin());
        if (!std::isfinite(incr)) fail(ErrorKind::PicardDiverged, "Picard iterate became non-finite");
        if (incr <= cfg.picard_tol) break;
    }

    for (std::size_t i = 0; i < n; ++i) ws.diff[i] = u_new.values[i] - u_prev.values[i];
    op.commit(ws.diff, tau);
    return iters;
}

void stabilized_step(const Field& u_prev, CaputoL1& op, double tau, const SchemeConfig& cfg,
                     HelmholtzSolver& solver, const Field* source, Field& u_new,
                     StepWorkspace& ws) {
    const std::size_t n = u_prev.values.size();
    ws.resize(n);
    const double shift = op.leading(tau) + cfg.S;
    op.history_term(tau, ws.hist);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = u_prev.values[i];
        ws.rhs[i] = shift * u - (u * u * u - u) - ws.hist[i] + (source ? source->values[i] : 0.0);
    }
    if (u_new.values.size() != n) u_new = Field(u_prev.grid);
    solver.solve(shift, cfg.epsilon2, ws.rhs, u_new.values);
    for (std::size_t i = 0; i < n; ++i) ws.diff[i] = u_new.values[i] - u_prev.values[i];
    op.commit(ws.diff, tau);
}

// ---------------------------------------------------------------------------

double soe_cutoff(const MarchPlan& plan) {
    double dt = plan.mesh.num_steps() > 0 ? plan.mesh.min_step() : plan_final_time(plan);
    if (plan.adapt) dt = std::min(dt, plan.adapt->tau_min);
    return std::min(dt, 0.5 * plan_final_time(plan));
}

double plan_final_time(const MarchPlan& plan) {
    return plan.adapt ? plan.final_time : plan.mesh.final_time();
}

namespace {

// Next adaptive step, never leaving a remainder shorter than tau_min.
double clamp_to_end(double tau, double t, double T, double tau_min) {
    const double rem = T - t;
    if (rem <= tau) return rem;
    if (rem - tau < tau_min) return (rem >= 2.0 * tau_min) ? 0.5 * rem : rem;
    return tau;
}

}  // namespace

MarchResult march(const SchemeConfig& cfg, const MarchPlan& plan, const Field& u0) {
    FracOrder order(cfg.alpha);
    const double T = plan_final_time(plan);
    if (plan.adapt) {
        plan.adapt->validate();
        if (!(plan.final_time > plan.mesh.final_time())) {
            fail(ErrorKind::InvalidParameter, "adaptive final time must exceed the head mesh end");
        }
    }
    if (cfg.kind == SchemeKind::Stabilized && cfg.S < 0.0) {
        fail(ErrorKind::InvalidParameter, "stabilization S must be non-negative");
    }
    for (double v : u0.values) {
        if (!std::isfinite(v)) fail(ErrorKind::InvalidParameter, "initial data must be finite");
    }

    MarchResult result;
    result.u = u0;
    result.initial = {0.0, 0.0, inf_norm(u0), plan.track_energy ? discrete_energy(u0, cfg.epsilon2) : 0.0, 0, 0.0};

    std::unique_ptr<CaputoL1> op;
    const bool has_steps = plan.mesh.num_steps() > 0 || plan.adapt.has_value();
    if (plan.evaluation == L1Evaluation::Fast && has_steps) {
        result.soe = plan.soe ? plan.soe
                              : std::make_shared<const SoeApprox>(
                                    build_soe(order, cfg.soe_eps, soe_cutoff(plan), T));
        op = std::make_unique<FastCaputoL1>(result.soe, u0.values.size());
    } else {
        op = std::make_unique<DirectCaputoL1>(cfg.alpha, u0.values.size());
    }

    HelmholtzSolver solver(u0.grid, plan.solver);
    StepWorkspace ws;
    Field g(u0.grid);
    Field u_next(u0.grid);

    std::vector<double> snaps(plan.snapshot_times);
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    auto take_snapshots = [&](double t, const Field& u) {
        const double slack = 1e-12 * std::max(1.0, T);
        while (next_snap < snaps.size() && snaps[next_snap] <= t + slack) {
            result.snapshots.push_back({snaps[next_snap], t, u});
            ++next_snap;
        }
    };

    if (plan.observer) plan.observer(0, 0.0, result.u);
    take_snapshots(0.0, result.u);

    std::vector<double> nodes(plan.mesh.nodes().begin(), plan.mesh.nodes().end());
    double t = 0.0;
    double last_change = 0.0;
    double max_tau = 0.0;
    for (std::size_t n = 1;; ++n) {
        double tau;
        if (n <= plan.mesh.num_steps()) {
            tau = plan.mesh.step(n);
        } else if (plan.adapt && t < T) {
            tau = adaptive_next_step(last_change, *plan.adapt);
            tau = clamp_to_end(tau, t, T, plan.adapt->tau_min);
        } else {
            break;
        }
        const double t_next = (n <= plan.mesh.num_steps()) ? plan.mesh.node(n) : t + tau;
        const auto start = std::chrono::steady_clock::now();

        std::size_t iters = 1;
        try {
            if (plan.source) plan.source(t_next, g);
            const Field* src = plan.source ? &g : nullptr;
            if (cfg.kind == SchemeKind::BackwardEuler) {
                iters = backward_euler_step(result.u, *op, tau, cfg, solver, src, u_next, ws);
            } else {
                stabilized_step(result.u, *op, tau, cfg, solver, src, u_next, ws);
            }
        } catch (const Error& e) {
            std::ostringstream os;
            os << e.what() << " [level " << n << ", t=" << t_next << "]";
            throw Error(e.kind(), os.str());
        }

        last_change = inf_norm(ws.diff);
        std::swap(result.u, u_next);
        t = t_next;
        max_tau = std::max(max_tau, tau);
        if (n > plan.mesh.num_steps()) nodes.push_back(t);

        RunRecord rec;
        rec.t = t;
        rec.tau = tau;
        rec.unorm = inf_norm(result.u);
        rec.energy = plan.track_energy ? discrete_energy(result.u, cfg.epsilon2) : 0.0;
        rec.iters = iters;
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.records.push_back(rec);

        if (plan.observer) plan.observer(n, t, result.u);
        take_snapshots(t, result.u);
    }

    result.mesh = TimeMesh::from_nodes(std::move(nodes));
    result.warnings = guarantee_warnings(cfg, max_tau);
    return result;
}

// ---------------------------------------------------------------------------

double manufactured_epsilon2() {
    return 1.0 / (8.0 * std::numbers::pi * std::numbers::pi);
}

namespace {
double shape(double x, double y) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return std::sin(two_pi * x) * std::sin(two_pi * y);
}
}  // namespace

double manufactured_solution(double sigma, double x, double y, double t) {
    if (t <= 0.0) return 0.0;
    return omega(1.0 + sigma, t) * shape(x, y);
}

double manufactured_source(double alpha, double sigma, double x, double y, double t) {
    const double phi = shape(x, y);
    const double w = omega(1.0 + sigma, t);
    return omega(1.0 + sigma - alpha, t) * phi + w * w * w * phi * phi * phi;
}

SourceFn manufactured_source_field(double alpha, double sigma) {
    return [alpha, sigma](double t, Field& g) {
        const auto& grid = g.grid;
        const double temporal = omega(1.0 + sigma - alpha, t);
        const double w = omega(1.0 + sigma, t);
        constexpr double two_pi = 2.0 * std::numbers::pi;
        std::vector<double> sx(grid.M1), sy(grid.M2);
        for (std::size_t i = 0; i < grid.M1; ++i) sx[i] = std::sin(two_pi * grid.x(i));
        for (std::size_t j = 0; j < grid.M2; ++j) sy[j] = std::sin(two_pi * grid.y(j));
        for (std::size_t j = 0; j < grid.M2; ++j) {
            for (std::size_t i = 0; i < grid.M1; ++i) {
                const double phi = sx[i] * sy[j];
                g(i, j) = temporal * phi + w * w * w * phi * phi * phi;
            }
        }
    };
}

}  // namespace fracac
