#include "fracac/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "fracac/error.hpp"

namespace fracac {

namespace {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

std::string gamma_tag(double gamma) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", gamma);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name);
    if (!os) fail(ErrorKind::Io, "cannot open output file " + (dir / name).string());
    return os;
}

void write_header(std::ostream& os, const std::vector<std::string>& lines) {
    for (const auto& l : lines) os << l << '\n';
}

void say(const RunOptions& opts, const std::string& msg) {
    if (opts.log) *opts.log << msg << std::endl;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers; rethrows the
// first failure after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!first) first = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

MarchPlan plan_for(const RunConfig& cfg, double gamma, std::optional<std::size_t> total_N = std::nullopt) {
    MarchPlan plan;
    plan.mesh = build_mesh(cfg, gamma, total_N);
    if (cfg.mesh_kind == MeshKind::GradedAdaptive) {
        plan.adapt = cfg.adapt;
        plan.final_time = cfg.T;
    }
    return plan;
}

// Convergence configs leave N0 = auto; single-mesh commands then use the
// finest table level count.
std::optional<std::size_t> default_total(const RunConfig& cfg) {
    if (cfg.mesh_kind == MeshKind::GradedRandom && !cfg.mesh_N0 && !cfg.conv_N.empty()) {
        return *std::max_element(cfg.conv_N.begin(), cfg.conv_N.end());
    }
    return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------

std::size_t head_levels(std::size_t N, double T0, double T) {
    if (N == 0) fail(ErrorKind::InvalidParameter, "mesh needs N >= 1");
    if (T0 >= T) return N;
    if (N < 2) fail(ErrorKind::InvalidParameter, "a split mesh needs N >= 2");
    const auto n0 = static_cast<std::size_t>(std::lround(static_cast<double>(N) * T0 / T));
    return std::clamp<std::size_t>(n0, 1, N - 1);
}

TimeMesh build_mesh(const RunConfig& cfg, double gamma, std::optional<std::size_t> total_N) {
    const double T0 = cfg.head_end(gamma);
    if (!(T0 > 0.0) || T0 > cfg.T) fail(ErrorKind::InvalidParameter, "mesh.T0 must lie in (0, T]");

    switch (cfg.mesh_kind) {
        case MeshKind::Graded: {
            const std::size_t N = total_N ? *total_N : cfg.mesh_N0.value_or(0);
            if (N == 0) fail(ErrorKind::Config, "graded mesh needs mesh.N0");
            return graded_mesh(cfg.T, N, gamma);
        }
        case MeshKind::GradedRandom: {
            std::size_t N0 = 0, N1 = 0;
            if (total_N) {
                N0 = cfg.mesh_N0 ? *cfg.mesh_N0 : head_levels(*total_N, T0, cfg.T);
                if (N0 > *total_N || (N0 == *total_N && T0 < cfg.T)) {
                    fail(ErrorKind::InvalidParameter, "mesh.N0 leaves no levels for the random tail");
                }
                N1 = *total_N - N0;
            } else {
                if (!cfg.mesh_N0) fail(ErrorKind::Config, "mesh.N0 = auto needs a total level count");
                N0 = *cfg.mesh_N0;
                N1 = cfg.mesh_N1;
            }
            const TimeMesh head = graded_mesh(T0, N0, gamma);
            if (T0 >= cfg.T) return head;
            return concat_mesh(head, random_tail_steps(T0, cfg.T, N1, cfg.mesh_seed));
        }
        case MeshKind::GradedAdaptive: {
            if (!cfg.mesh_N0) fail(ErrorKind::Config, "adaptive runs need mesh.N0 for the graded head");
            if (!(T0 < cfg.T)) fail(ErrorKind::InvalidParameter, "adaptive runs need mesh.T0 < T");
            return graded_mesh(T0, *cfg.mesh_N0, gamma);
        }
    }
    fail(ErrorKind::InvalidParameter, "unknown mesh kind");
}

Field bubbles_initial(const Grid2D& grid) {
    return Field::sample(grid, [](double x, double y) {
        const bool inside = (x + 1.0) * (x + 1.0) + y * y <= 1.0 || (x - 1.0) * (x - 1.0) + y * y <= 1.0;
        return inside ? 0.5 : -0.5;
    });
}

std::size_t nearest_node(const Grid2D& grid, double x, double y) {
    auto nearest = [](double v, double lo, double h, std::size_t M) {
        const double k = std::round((v - lo) / h);
        const auto m = static_cast<long long>(M);
        return static_cast<std::size_t>(((static_cast<long long>(k) % m) + m) % m);
    };
    return grid.index(nearest(x, grid.a, grid.h1(), grid.M1), nearest(y, grid.c, grid.h2(), grid.M2));
}

double neck_width(const Field& u) {
    const auto& g = u.grid;
    const std::size_t col = nearest_node(g, 0.0, g.c) % g.M1;
    std::size_t positive = 0;
    for (std::size_t j = 0; j < g.M2; ++j) {
        if (u(col, j) > 0.0) ++positive;
    }
    return static_cast<double>(positive) * g.h2();
}

double theoretical_rate(SchemeKind kind, double alpha, double sigma, double gamma) {
    const double cap = kind == SchemeKind::BackwardEuler ? 2.0 - alpha : 1.0;
    return std::min(gamma * sigma, cap);
}

std::vector<std::string> header_lines(const RunConfig& cfg, const std::string& command) {
    std::vector<std::string> lines{"# fracac " + command};
    for (const auto& l : echo_config(cfg)) lines.push_back("# " + l);
    return lines;
}

// ---------------------------------------------------------------------------

std::vector<ConvergenceTable> run_convergence(const RunConfig& cfg, const RunOptions& opts) {
    if (cfg.mesh_kind == MeshKind::GradedAdaptive) {
        fail(ErrorKind::Config, "convergence runs need mesh.kind = graded or graded+random");
    }
    if (cfg.conv_N.empty()) fail(ErrorKind::Config, "conv.N is empty");
    const auto gammas = cfg.gammas();
    const SchemeConfig scfg = cfg.scheme_config();
    const Grid2D grid = cfg.grid();
    const double sigma = cfg.sigma;
    const Field shape = Field::sample(grid, [](double x, double y) {
        return std::sin(2.0 * std::numbers::pi * x) * std::sin(2.0 * std::numbers::pi * y);
    });

    std::vector<ConvergenceTable> tables(gammas.size());
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        tables[g].gamma = gammas[g];
        tables[g].theory = theoretical_rate(cfg.scheme, cfg.alpha, sigma, gammas[g]);
        tables[g].rows.resize(cfg.conv_N.size());
    }
    std::vector<std::vector<std::string>> cell_warnings(gammas.size() * cfg.conv_N.size());
    std::mutex log_mu;

    parallel_for(cell_warnings.size(), opts.threads, [&](std::size_t cell) {
        const std::size_t g = cell / cfg.conv_N.size(), r = cell % cfg.conv_N.size();
        const std::size_t N = cfg.conv_N[r];
        MarchPlan plan = plan_for(cfg, gammas[g], N);
        plan.source = manufactured_source_field(cfg.alpha, sigma);
        plan.track_energy = false;
        ErrorTracker tracker(shape, [sigma](double t) { return omega(1.0 + sigma, t); });
        plan.observer = tracker.observer();
        const MarchResult res = march(scfg, plan, Field(grid));

        tables[g].rows[r] = {N, plan.mesh.max_step(), tracker.max_error(), std::nullopt};
        cell_warnings[cell] = res.warnings;
        std::lock_guard lock(log_mu);
        say(opts, "convergence gamma=" + gamma_tag(gammas[g]) + " N=" + std::to_string(N) +
                      " error=" + sci(tracker.max_error()));
    });

    for (std::size_t g = 0; g < gammas.size(); ++g) {
        auto& tab = tables[g];
        fill_orders(tab.rows);
        for (std::size_t r = 0; r < cfg.conv_N.size(); ++r) {
            for (const auto& w : cell_warnings[g * cfg.conv_N.size() + r]) {
                tab.warnings.push_back("N=" + std::to_string(cfg.conv_N[r]) + ": " + w);
            }
        }
        if (opts.out_dir.empty()) continue;

        auto os = open_output(opts.out_dir, "convergence_g" + gamma_tag(tab.gamma) + ".csv");
        write_header(os, header_lines(cfg, "convergence"));
        os << "# table gamma = " << g17(tab.gamma) << '\n';
        for (const auto& w : tab.warnings) os << "# warning: " << w << '\n';
        os << "N,tau,error,order\n";
        for (const auto& row : tab.rows) {
            os << row.N << ',' << sci(row.tau) << ',' << sci(row.error) << ',';
            if (row.order) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.4f", *row.order);
                os << buf;
            }
            os << '\n';
        }
        os << "# theoretical rate "
           << (cfg.scheme == SchemeKind::BackwardEuler ? "min{gamma*sigma, 2-alpha}" : "min{gamma*sigma, 1}")
           << " = " << g17(tab.theory) << '\n';
    }
    return tables;
}

// ---------------------------------------------------------------------------

BubblesOutcome run_bubbles(const RunConfig& cfg, const RunOptions& opts) {
    const Grid2D grid = cfg.grid();
    const Field u0 = bubbles_initial(grid);
    MarchPlan plan = plan_for(cfg, cfg.mesh_gamma);
    plan.snapshot_times = cfg.snapshot_times;

    QuotientTracker quotients(nearest_node(grid, cfg.probe[0], cfg.probe[1]));
    BubblesOutcome out;
    auto track = quotients.observer();
    std::size_t last_report = 0;
    plan.observer = [&](std::size_t n, double t, const Field& u) {
        track(n, t, u);
        out.neck.emplace_back(t, neck_width(u));
        if (opts.log && (t >= static_cast<double>(last_report + 1) * 10.0)) {
            last_report = static_cast<std::size_t>(t / 10.0);
            say(opts, "bubbles t=" + g17(t) + " level " + std::to_string(n));
        }
    };

    out.run = march(cfg.scheme_config(), plan, u0);
    out.max_principle = max_principle_monitor(out.run.records);
    out.energy = energy_monitor(out.run.records, out.run.initial);
    out.quotients = quotients.samples();
    try {
        out.slope = fit_first_decade(out.quotients, QuotientColumn::InfNorm, cfg.fit_min_points);
    } catch (const Error&) {
        out.slope.reset();
    }

    if (opts.out_dir.empty()) return out;
    const auto header = header_lines(cfg, "bubbles");
    {
        auto os = open_output(opts.out_dir, "records.csv");
        write_header(os, header);
        os << "t,tau,unorm,energy,iters\n";
        const auto& r0 = out.run.initial;
        os << g17(r0.t) << ',' << g17(r0.tau) << ',' << g17(r0.unorm) << ',' << g17(r0.energy) << ",0\n";
        for (const auto& r : out.run.records) {
            os << g17(r.t) << ',' << g17(r.tau) << ',' << g17(r.unorm) << ',' << g17(r.energy) << ','
               << r.iters << '\n';
        }
    }
    {
        auto os = open_output(opts.out_dir, "neck.csv");
        write_header(os, header);
        os << "t,neck_width\n";
        for (const auto& [t, w] : out.neck) os << g17(t) << ',' << g17(w) << '\n';
    }
    {
        auto os = open_output(opts.out_dir, "singularity.csv");
        write_header(os, header);
        if (out.slope) {
            os << "# fit column=dq_inf window=[" << g17(out.slope->t_lo) << ", " << g17(out.slope->t_hi)
               << ") points=" << out.slope->points << " slope=" << g17(out.slope->slope) << '\n';
        }
        os << "t_mid,tau,dq_inf,dq_probe\n";
        for (const auto& s : out.quotients) {
            os << g17(s.t_mid) << ',' << g17(s.tau) << ',' << g17(s.inf_norm) << ',' << g17(s.probe) << '\n';
        }
    }
    for (const auto& snap : out.run.snapshots) {
        write_snapshot(opts.out_dir / snapshot_filename(snap.requested), snap.u, snap.t, header);
    }
    {
        auto os = open_output(opts.out_dir, "monitors.txt");
        write_header(os, header);
        const auto& mp = out.max_principle;
        os << "max_principle holds=" << (mp.holds ? "yes" : "no") << " bound=" << g17(mp.bound)
           << " max_norm=" << g17(mp.max_norm);
        if (mp.first_violation) os << " first_violation_level=" << *mp.first_violation << " t=" << g17(mp.violation_time);
        os << '\n';
        os << "energy increases=" << out.energy.increases << " threshold=" << g17(out.energy.threshold)
           << " max_increase=" << g17(out.energy.max_increase) << '\n';
        if (out.run.soe) {
            os << "soe modes=" << out.run.soe->size() << " dt=" << g17(out.run.soe->cutoff())
               << " T=" << g17(out.run.soe->horizon()) << " max_deviation=" << g17(out.run.soe->max_deviation())
               << " relative_floor=" << (out.run.soe->precision_floor_active() ? "active" : "inactive") << '\n';
        }
        os << "levels=" << out.run.records.size() << '\n';
        for (const auto& w : out.run.warnings) os << "warning: " << w << '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<SingularityOutcome> run_singularity(const RunConfig& cfg, const RunOptions& opts) {
    const Grid2D grid = cfg.grid();
    const Field u0 = bubbles_initial(grid);
    const std::size_t probe = nearest_node(grid, cfg.probe[0], cfg.probe[1]);
    std::vector<SingularityOutcome> outs;
    for (double gamma : cfg.gammas()) {
        MarchPlan plan = plan_for(cfg, gamma);
        plan.track_energy = false;
        QuotientTracker tracker(probe);
        plan.observer = tracker.observer();
        march(cfg.scheme_config(), plan, u0);

        SingularityOutcome out;
        out.gamma = gamma;
        out.samples = tracker.samples();
        try {
            out.fit_inf = fit_first_decade(out.samples, QuotientColumn::InfNorm, cfg.fit_min_points);
            out.fit_probe = fit_first_decade(out.samples, QuotientColumn::Probe, cfg.fit_min_points);
        } catch (const Error& e) {
            say(opts, std::string("singularity fit skipped: ") + e.what());
        }
        say(opts, "singularity gamma=" + gamma_tag(gamma) +
                      (out.fit_inf ? " slope=" + g17(out.fit_inf->slope) : std::string(" no fit")));

        if (!opts.out_dir.empty()) {
            auto os = open_output(opts.out_dir, "singularity_g" + gamma_tag(gamma) + ".csv");
            write_header(os, header_lines(cfg, "singularity"));
            os << "# gamma = " << g17(gamma) << " probe node = (" << g17(grid.x(probe % grid.M1)) << ", "
               << g17(grid.y(probe / grid.M1)) << ")\n";
            for (const auto& [name, fit] : {std::pair{"dq_inf", out.fit_inf}, std::pair{"dq_probe", out.fit_probe}}) {
                if (!fit) continue;
                os << "# fit column=" << name << " window=[" << g17(fit->t_lo) << ", " << g17(fit->t_hi)
                   << ") points=" << fit->points << " slope=" << g17(fit->slope)
                   << " alpha-1=" << g17(cfg.alpha - 1.0) << '\n';
            }
            os << "t_mid,tau,dq_inf,dq_probe\n";
            for (const auto& s : out.samples) {
                os << g17(s.t_mid) << ',' << g17(s.tau) << ',' << g17(s.inf_norm) << ',' << g17(s.probe) << '\n';
            }
        }
        outs.push_back(std::move(out));
    }
    return outs;
}

// ---------------------------------------------------------------------------

bool KernelCheckOutcome::passed() const {
    return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return !l.asserting || l.passed; });
}

namespace {

struct MeshFamily {
    std::string name;
    TimeMesh mesh;
};

std::vector<MeshFamily> kernel_families(std::size_t N, std::uint64_t seed) {
    return {
        {"uniform", graded_mesh(1.0, N, 1.0)},
        {"graded2", graded_mesh(1.0, N, 2.0)},
        {"graded3", graded_mesh(1.0, N, 3.0)},
        {"random", concat_mesh(TimeMesh(), random_tail_steps(0.0, 1.0, N, seed))},
    };
}

// Steps whose ratios stay within [1/rho, rho].
TimeMesh bounded_ratio_mesh(std::size_t N, double rho, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> steps(N);
    double total = 0.0;
    for (auto& s : steps) {
        s = std::exp(std::log(rho) * u(rng));
        total += s;
    }
    for (auto& s : steps) s /= total;
    return concat_mesh(TimeMesh(), steps);
}

}  // namespace

KernelCheckOutcome run_kernel_check(const RunConfig& cfg, const RunOptions& opts) {
    KernelCheckOutcome out;
    auto add = [&](std::string name, bool asserting, bool ok, std::string detail) {
        say(opts, std::string(asserting ? (ok ? "PASS " : "FAIL ") : "INFO ") + name + "  " + detail);
        out.lines.push_back({std::move(name), asserting, ok, std::move(detail)});
    };
    const double eps = cfg.soe_eps;
    const double build_eps = cfg.kernel_build_eps > 0.0 ? cfg.kernel_build_eps : eps;

    // SOE certification on the configured run and on two reference tuples.
    struct Tuple {
        double alpha, dt, T;
        std::string label;
    };
    std::vector<Tuple> tuples{{0.5, 1e-6, 1.0, "reference"}, {0.8, 1e-7, 100.0, "reference"}};
    {
        const MarchPlan plan = plan_for(cfg, cfg.mesh_gamma, default_total(cfg));
        tuples.push_back({cfg.alpha, soe_cutoff(plan), plan_final_time(plan), "configured"});
    }
    for (const auto& tp : tuples) {
        std::ostringstream name, detail;
        name << "soe-scan " << tp.label << " alpha=" << tp.alpha << " dt=" << tp.dt << " T=" << tp.T;
        const SoeApprox soe = build_soe(FracOrder(tp.alpha), build_eps, tp.dt, tp.T);
        const long double ratio = soe.scan_ratio(10000, eps);
        detail << "Nq=" << soe.size() << " max_dev=" << static_cast<double>(soe.scan_deviation(10000))
               << " eps=" << eps << " ratio=" << static_cast<double>(ratio)
               << (soe.precision_floor_active() ? " (relative floor active)" : "");
        add(name.str(), true, ratio <= 1.0L, detail.str());
    }

    constexpr std::size_t N = 128;
    const auto families = kernel_families(N, cfg.mesh_seed);
    const FracOrder order(cfg.alpha);

    for (const auto& fam : families) {
        auto soe = std::make_shared<const SoeApprox>(
            build_soe(order, build_eps, fam.mesh.min_step(), fam.mesh.final_time()));
        const double fast = l1_linear_exactness(fam.mesh, order, L1Evaluation::Fast, soe);
        const double direct = l1_linear_exactness(fam.mesh, order, L1Evaluation::Direct);
        std::ostringstream detail;
        detail << "fast=" << fast << " direct=" << direct << " tol=1e-12";
        add("l1-exactness " + fam.name, true, fast <= 1e-12 && direct <= 1e-12, detail.str());
    }

    {
        const Grid2D grid(32, 32, 0.0, 1.0, 0.0, 1.0);
        SchemeConfig scfg = cfg.scheme_config();
        scfg.epsilon2 = manufactured_epsilon2();
        for (const auto& fam : families) {
            if (fam.name == "graded2") continue;
            const auto rep = fast_vs_direct(scfg, fam.mesh, Field(grid),
                                            manufactured_source_field(cfg.alpha, cfg.sigma));
            std::ostringstream detail;
            detail << "max_diff=" << rep.max_difference << " bound=" << rep.bound;
            add("fast-vs-direct " + fam.name, true, rep.holds(), detail.str());
        }
    }

    for (double a : {0.3, 0.5, 0.8}) {
        for (const auto& fam : families) {
            const SoeApprox soe = build_soe(FracOrder(a), build_eps, fam.mesh.min_step(), fam.mesh.final_time());
            const auto rep = gronwall_suite(fam.mesh, soe);
            std::ostringstream name, detail;
            name << "gronwall " << fam.name << " alpha=" << a;
            detail << "PA_dev=" << rep.pa_max_deviation << " bound_m0=" << rep.bound_ratio[0]
                   << " bound_m1=" << rep.bound_ratio[1] << " pi_a=" << rep.pi_a;
            if (!rep.failure.empty()) detail << " [" << rep.failure << "]";
            add(name.str(), true, rep.holds(), detail.str());
        }
    }

    std::vector<std::pair<std::string, PsdReport>> psd;
    psd.emplace_back("uniform", psd_probe(graded_mesh(1.0, 256, 1.0), order));
    psd.emplace_back("graded3", psd_probe(graded_mesh(1.0, 256, 3.0), order));
    psd.emplace_back("ratio50", psd_probe(bounded_ratio_mesh(256, 50.0, cfg.mesh_seed), order));
    for (const auto& [name, rep] : psd) {
        std::ostringstream detail;
        detail << "N=" << rep.N << " min_eig=" << rep.min_eigenvalue << " max_eig=" << rep.max_eigenvalue;
        add("psd-probe " + name, false, true, detail.str());
    }

    if (!opts.out_dir.empty()) {
        const auto header = header_lines(cfg, "kernel-check");
        auto os = open_output(opts.out_dir, "kernel_check.txt");
        write_header(os, header);
        for (const auto& l : out.lines) {
            os << (l.asserting ? (l.passed ? "PASS " : "FAIL ") : "INFO ") << l.name << "  " << l.detail << '\n';
        }
        os << (out.passed() ? "RESULT PASS" : "RESULT FAIL") << '\n';
        auto ps = open_output(opts.out_dir, "psd.csv");
        write_header(ps, header);
        ps << "mesh,N,min_eigenvalue,max_eigenvalue\n";
        for (const auto& [name, rep] : psd) {
            ps << name << ',' << rep.N << ',' << g17(rep.min_eigenvalue) << ',' << g17(rep.max_eigenvalue) << '\n';
        }
    }
    return out;
}

SoeApprox run_soe_table(const RunConfig& cfg, const RunOptions& opts) {
    const MarchPlan plan = plan_for(cfg, cfg.mesh_gamma, default_total(cfg));
    const SoeApprox soe = build_soe(FracOrder(cfg.alpha), cfg.soe_eps, soe_cutoff(plan), plan_final_time(plan));
    say(opts, "soe-table Nq=" + std::to_string(soe.size()) + " max_dev=" + sci(soe.max_deviation()));
    if (!opts.out_dir.empty()) {
        auto os = open_output(opts.out_dir, "soe_table.csv");
        write_header(os, header_lines(cfg, "soe-table"));
        os << "# alpha=" << g17(cfg.alpha) << ", eps=" << g17(cfg.soe_eps) << ", dt=" << g17(soe.cutoff())
           << ", T=" << g17(soe.horizon()) << ", Nq=" << soe.size() << ", maxdev=" << g17(soe.max_deviation())
           << '\n';
        os << "theta,weight\n";
        for (const auto& m : soe.modes()) os << g17(m.theta) << ',' << g17(m.weight) << '\n';
    }
    return soe;
}

}  // namespace fracac
