#include "fracac/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fracac/error.hpp"

namespace fracac {

double convergence_order(double e1, double tau1, double e2, double tau2) {
    if (!(e1 > 0.0 && e2 > 0.0 && tau1 > 0.0 && tau2 > 0.0)) {
        fail(ErrorKind::InvalidParameter, "convergence order needs positive errors and steps");
    }
    if (tau1 == tau2) fail(ErrorKind::InvalidParameter, "convergence order is degenerate for equal steps");
    return std::log(e1 / e2) / std::log(tau1 / tau2);
}

void fill_orders(std::vector<ConvergenceRow>& rows) {
    if (!rows.empty()) rows.front().order.reset();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        rows[r].order = convergence_order(rows[r - 1].error, rows[r - 1].tau, rows[r].error, rows[r].tau);
    }
}

double nodal_error(const Field& u, double t, const ExactFn& exact) {
    const auto& g = u.grid;
    double worst = 0.0;
    for (std::size_t j = 0; j < g.M2; ++j) {
        const double y = g.y(j);
        for (std::size_t i = 0; i < g.M1; ++i) {
            worst = std::max(worst, std::fabs(u(i, j) - exact(g.x(i), y, t)));
        }
    }
    return worst;
}

LevelObserver ErrorTracker::observer() {
    if (shape_) {
        return [shape = shape_, amp = amplitude_, max = max_, levels = levels_](
                   std::size_t n, double t, const Field& u) {
            if (n == 0) return;
            const double a = amp(t);
            double worst = 0.0;
            for (std::size_t i = 0; i < u.values.size(); ++i) {
                worst = std::max(worst, std::fabs(u.values[i] - a * shape->values[i]));
            }
            *max = std::max(*max, worst);
            ++*levels;
        };
    }
    return [exact = exact_, max = max_, levels = levels_](std::size_t n, double t, const Field& u) {
        if (n == 0) return;
        *max = std::max(*max, nodal_error(u, t, exact));
        ++*levels;
    };
}

// ---------------------------------------------------------------------------

MaxPrincipleReport max_principle_monitor(std::span<const RunRecord> records, double bound) {
    MaxPrincipleReport rep;
    rep.bound = bound;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const double v = records[k].unorm;
        rep.max_norm = std::max(rep.max_norm, v);
        if (!(v <= bound) && !rep.first_violation) {
            rep.holds = false;
            rep.first_violation = k + 1;
            rep.violation_time = records[k].t;
        }
    }
    return rep;
}

EnergyReport energy_monitor(std::span<const RunRecord> records, std::optional<RunRecord> initial,
                            double threshold) {
    EnergyReport rep;
    rep.threshold = threshold;
    std::optional<double> prev;
    if (initial) prev = initial->energy;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const double e = records[k].energy;
        if (prev) {
            const double rise = e - *prev;
            if (rise > threshold) {
                ++rep.increases;
                rep.max_increase = std::max(rep.max_increase, rise);
                if (!rep.first_increase) rep.first_increase = k + 1;
            }
        }
        prev = e;
    }
    return rep;
}

// ---------------------------------------------------------------------------

PsdReport psd_probe(const TimeMesh& mesh, FracOrder order) {
    const std::size_t N = mesh.num_steps();
    if (N == 0 || N > 512) fail(ErrorKind::InvalidParameter, "psd probe needs 1 <= N <= 512");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    for (std::size_t k = 1; k <= N; ++k) {
        const KernelRow row = direct_kernel_row(mesh, order, k);
        for (std::size_t j = 1; j <= k; ++j) {
            B(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(j - 1)) = row[k - j];
        }
    }
    const Eigen::MatrixXd sym = 0.5 * (B + B.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    PsdReport rep;
    rep.N = N;
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.max_eigenvalue = es.eigenvalues().maxCoeff();
    return rep;
}

GronwallReport gronwall_suite(const TimeMesh& mesh, const SoeApprox& soe) {
    const std::size_t N = mesh.num_steps();
    const double alpha = soe.alpha();
    GronwallReport rep;
    rep.N = N;

    std::vector<KernelRow> rows;
    rows.reserve(N);
    for (std::size_t n = 1; n <= N; ++n) rows.push_back(fast_kernel_row(mesh, soe, n));

    std::optional<ComplementaryKernels> p;
    try {
        p.emplace(complementary_kernels(rows));
    } catch (const Error& e) {
        rep.kernels_admissible = false;
        rep.failure = e.what();
        return rep;
    }

    for (std::size_t n = 1; n <= N; ++n) {
        for (std::size_t k = 1; k <= n; ++k) {
            long double sum = 0.0L;
            for (std::size_t j = k; j <= n; ++j) {
                sum += static_cast<long double>((*p)(n, j)) * rows[j - 1][j - k];
            }
            const double dev = static_cast<double>(std::fabs(sum - 1.0L));
            if (dev > rep.pa_max_deviation) rep.pa_max_deviation = dev;
        }
        for (int m = 0; m < 2; ++m) {
            long double sum = 0.0L;
            for (std::size_t j = 1; j <= n; ++j) {
                sum += static_cast<long double>((*p)(n, j)) *
                       omega_ext(1.0L + m * alpha - alpha, mesh.node(j));
            }
            const double ratio = static_cast<double>(sum / omega_ext(1.0L + m * alpha, mesh.node(n)));
            rep.bound_ratio[m] = std::max(rep.bound_ratio[m], ratio);
        }
    }

    std::ostringstream os;
    if (rep.pa_max_deviation > rep.pa_tolerance) {
        os << "(P A) deviation " << rep.pa_max_deviation << " exceeds " << rep.pa_tolerance << "; ";
    }
    for (int m = 0; m < 2; ++m) {
        if (rep.bound_ratio[m] > rep.pi_a) {
            os << "(P bound) m=" << m << " ratio " << rep.bound_ratio[m] << " exceeds " << rep.pi_a << "; ";
        }
    }
    rep.failure = os.str();
    return rep;
}

double l1_linear_exactness(const TimeMesh& mesh, FracOrder order, L1Evaluation evaluation,
                           std::shared_ptr<const SoeApprox> soe) {
    std::unique_ptr<CaputoL1> op;
    if (evaluation == L1Evaluation::Fast) {
        if (!soe) {
            soe = std::make_shared<const SoeApprox>(
                build_soe(order, 1e-12, mesh.min_step(), mesh.final_time()));
        }
        op = std::make_unique<FastCaputoL1>(soe, 1);
    } else {
        op = std::make_unique<DirectCaputoL1>(order.alpha(), 1);
    }
    double worst = 0.0;
    for (std::size_t n = 1; n <= mesh.num_steps(); ++n) {
        const double tau = mesh.step(n);
        double hist = 0.0;
        op->history_term(tau, std::span<double>(&hist, 1));
        const double value = op->leading(tau) * tau + hist;
        const long double exact = omega_ext(2.0L - order.alpha(), mesh.node(n));
        worst = std::max(worst, static_cast<double>(std::fabs((value - exact) / exact)));
        op->commit(std::span<const double>(&tau, 1), tau);
    }
    return worst;
}

FastDirectReport fast_vs_direct(const SchemeConfig& cfg, const TimeMesh& mesh, const Field& u0,
                                SourceFn source, double bound_factor) {
    std::vector<Field> direct_levels;
    direct_levels.reserve(mesh.num_steps());
    MarchPlan plan;
    plan.mesh = mesh;
    plan.source = source;
    plan.track_energy = false;
    plan.evaluation = L1Evaluation::Direct;
    plan.observer = [&](std::size_t n, double, const Field& u) {
        if (n > 0) direct_levels.push_back(u);
    };
    march(cfg, plan, u0);

    FastDirectReport rep;
    rep.N = mesh.num_steps();
    rep.bound = bound_factor * cfg.soe_eps;
    plan.evaluation = L1Evaluation::Fast;
    plan.observer = [&](std::size_t n, double, const Field& u) {
        if (n == 0) return;
        const auto& ref = direct_levels[n - 1].values;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            rep.max_difference = std::max(rep.max_difference, std::fabs(u.values[i] - ref[i]));
        }
    };
    march(cfg, plan, u0);
    return rep;
}

// ---------------------------------------------------------------------------

LevelObserver QuotientTracker::observer() {
    return [state = state_, probe = probe_](std::size_t n, double t, const Field& u) {
        if (n > 0) {
            const double tau = t - state->t_prev;
            QuotientSample s;
            s.t_mid = 0.5 * (t + state->t_prev);
            s.tau = tau;
            double worst = 0.0;
            for (std::size_t i = 0; i < u.values.size(); ++i) {
                worst = std::max(worst, std::fabs(u.values[i] - state->prev.values[i]));
            }
            s.inf_norm = worst / tau;
            s.probe = std::fabs(u.values[probe] - state->prev.values[probe]) / tau;
            state->samples.push_back(s);
        }
        state->prev = u;
        state->t_prev = t;
    };
}

SlopeFit fit_first_decade(std::span<const QuotientSample> samples, QuotientColumn column,
                          std::size_t min_points) {
    if (min_points < 2) fail(ErrorKind::InvalidParameter, "slope fit needs at least two points");
    auto value = [column](const QuotientSample& s) {
        return column == QuotientColumn::InfNorm ? s.inf_norm : s.probe;
    };
    std::map<int, std::vector<const QuotientSample*>> decades;
    for (const auto& s : samples) {
        if (!(s.t_mid > 0.0) || !(value(s) > 0.0)) continue;
        decades[static_cast<int>(std::floor(std::log10(s.t_mid)))].push_back(&s);
    }
    for (const auto& [p, pts] : decades) {
        if (pts.size() < min_points) continue;
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (const auto* s : pts) {
            const double x = std::log(s->t_mid), y = std::log(value(*s));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double m = static_cast<double>(pts.size());
        SlopeFit fit;
        fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        fit.intercept = (sy - fit.slope * sx) / m;
        fit.t_lo = std::pow(10.0, p);
        fit.t_hi = std::pow(10.0, p + 1);
        fit.points = pts.size();
        return fit;
    }
    std::ostringstream os;
    os << "no decade of t holds " << min_points << " difference quotients";
    fail(ErrorKind::InvalidParameter, os.str());
}

}  // namespace fracac
