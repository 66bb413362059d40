#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "fracac/error.hpp"
#include "fracac/schemes.hpp"

using namespace fracac;

namespace {

constexpr double kPi = std::numbers::pi;

Field random_unit_field(const Grid2D& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g);
    for (auto& v : f.values) v = dist(rng);
    return f;
}

TimeMesh random_mesh(double T, std::size_t N, std::uint64_t seed) {
    return concat_mesh(TimeMesh{}, random_tail_steps(0.0, T, N, seed));
}

MarchResult run(const SchemeConfig& cfg, const TimeMesh& mesh, const Field& u0, SourceFn source = {}) {
    MarchPlan plan;
    plan.mesh = mesh;
    plan.source = std::move(source);
    return march(cfg, plan, u0);
}

// Caputo derivative of omega_{1+sigma} at t by quadrature of
// int_0^t omega_{1-alpha}(t - s) omega_sigma(s) ds, split at t/2 with
// substitutions that remove both endpoint singularities.
long double caputo_quadrature(long double alpha, long double sigma, long double t) {
    const int Q = 4000;
    const long double h = t / 2.0L;
    const long double ga = std::tgamma(1.0L - alpha), gs = std::tgamma(sigma);
    auto midpoint = [&](auto&& f) {
        long double s = 0.0L;
        for (int q = 0; q < Q; ++q) s += f((q + 0.5L) / Q);
        return s / Q;
    };
    // s = h w^{1/sigma}
    const long double ps = 1.0L / sigma;
    const long double left = midpoint([&](long double w) {
        const long double s = h * std::pow(w, ps);
        return std::pow(t - s, -alpha) / ga * std::pow(h, sigma) * ps / gs;
    });
    // t - s = h w^{1/(1-alpha)}
    const long double pa = 1.0L / (1.0L - alpha);
    const long double right = midpoint([&](long double w) {
        const long double r = h * std::pow(w, pa);
        return std::pow(t - r, sigma - 1.0L) / gs * std::pow(h, 1.0L - alpha) * pa / ga;
    });
    return left + right;
}

}  // namespace

TEST(StepBound, BackwardEulerValue) {
    const double gamma_1_2 = 0.918168742399760610640951655185;
    EXPECT_NEAR(backward_euler_step_bound(0.8), std::pow(gamma_1_2, -1.25), 1e-13);
    EXPECT_NEAR(backward_euler_step_bound(0.8), 1.11, 0.01);
}

TEST(StepBound, WarningsFollowHypotheses) {
    SchemeConfig be;
    be.alpha = 0.8;
    EXPECT_TRUE(guarantee_warnings(be, 0.5).empty());
    EXPECT_FALSE(guarantee_warnings(be, 2.0).empty());
    SchemeConfig st;
    st.kind = SchemeKind::Stabilized;
    st.S = 2.0;
    EXPECT_TRUE(guarantee_warnings(st, 10.0).empty());
    st.S = 0.1;
    EXPECT_FALSE(guarantee_warnings(st, 0.1).empty());
}

TEST(Stabilized, ScalarInequalityOnGrid) {
    for (double S : {2.0, 2.5, 4.0, 10.0}) {
        for (int i = -2000; i <= 2000; ++i) {
            const double z = i / 2000.0;
            EXPECT_LE(std::fabs((1.0 + S) * z - z * z * z), S + 1e-14) << S << ' ' << z;
        }
    }
}

TEST(MaximumPrinciple, BackwardEulerWithinStepBound) {
    const Grid2D g(32, 32, 0.0, 1.0, 0.0, 1.0);
    for (double alpha : {0.3, 0.7}) {
        SchemeConfig cfg;
        cfg.alpha = alpha;
        cfg.epsilon2 = 0.01;
        const double bound = backward_euler_step_bound(alpha);
        // Picard contracts only when a_0 > 2, well inside the step bound.
        const auto mesh = random_mesh(3.0, 120, 3);
        ASSERT_LE(mesh.max_step(), bound);
        ASSERT_GT(FracOrder(alpha).leading_kernel(mesh.max_step()), 2.0);
        const auto res = run(cfg, mesh, random_unit_field(g, 5));
        for (const auto& r : res.records) EXPECT_LE(r.unorm, 1.0 + 1e-12);
        EXPECT_TRUE(res.warnings.empty());
    }
}

TEST(MaximumPrinciple, StabilizedAnySteps) {
    const Grid2D g(32, 32, 0.0, 1.0, 0.0, 1.0);
    SchemeConfig cfg;
    cfg.alpha = 0.5;
    cfg.epsilon2 = 0.001;
    cfg.kind = SchemeKind::Stabilized;
    cfg.S = 2.0;
    const auto mesh = concat_mesh(graded_mesh(0.1, 20, 3.0), random_tail_steps(0.1, 100.0, 30, 7));
    const auto res = run(cfg, mesh, random_unit_field(g, 6));
    for (const auto& r : res.records) EXPECT_LE(r.unorm, 1.0 + 1e-12);
}

TEST(BackwardEuler, PicardResidualSmall) {
    const Grid2D g(24, 24, 0.0, 1.0, 0.0, 1.0);
    SchemeConfig cfg;
    cfg.alpha = 0.6;
    cfg.epsilon2 = 0.02;
    cfg.picard_tol = 1e-12;
    const auto u0 = random_unit_field(g, 8);
    const double tau = 0.05;
    DirectCaputoL1 op(cfg.alpha, u0.values.size());
    HelmholtzSolver solver(g);
    StepWorkspace ws;
    Field u1(g);
    const auto iters = backward_euler_step(u0, op, tau, cfg, solver, nullptr, u1, ws);
    EXPECT_GE(iters, 1u);

    const double a0 = FracOrder(cfg.alpha).leading_kernel(tau);
    const auto lap = laplacian_apply(u1);
    double worst = 0.0;
    for (std::size_t i = 0; i < u1.values.size(); ++i) {
        const double u = u1.values[i];
        const double r = a0 * (u - u0.values[i]) - cfg.epsilon2 * lap.values[i] + u * u * u - u;
        worst = std::max(worst, std::fabs(r));
    }
    EXPECT_LE(worst, 10.0 * cfg.picard_tol);
}

TEST(BackwardEuler, PicardDivergesWhenCapped) {
    const Grid2D g(16, 16, 0.0, 1.0, 0.0, 1.0);
    SchemeConfig cfg;
    cfg.alpha = 0.5;
    cfg.picard_max_iter = 1;
    try {
        (void)run(cfg, graded_mesh(1.0, 2, 1.0), random_unit_field(g, 1));
        FAIL() << "expected PicardDiverged";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PicardDiverged);
    }
}

TEST(March, ZeroStepsReturnsInitialData) {
    const Grid2D g(16, 16, 0.0, 1.0, 0.0, 1.0);
    const auto u0 = random_unit_field(g, 2);
    SchemeConfig cfg;
    const auto res = run(cfg, TimeMesh{}, u0);
    EXPECT_EQ(res.u.values, u0.values);
    EXPECT_TRUE(res.records.empty());
}

TEST(March, ConstantPureStateStaysPut) {
    const Grid2D g(16, 16, 0.0, 1.0, 0.0, 1.0);
    for (auto kind : {SchemeKind::BackwardEuler, SchemeKind::Stabilized}) {
        SchemeConfig cfg;
        cfg.kind = kind;
        cfg.S = 0.5;
        const auto res = run(cfg, graded_mesh(1.0, 10, 2.0), Field(g, 1.0));
        for (double v : res.u.values) EXPECT_NEAR(v, 1.0, 1e-14);
        for (const auto& r : res.records) EXPECT_NEAR(r.energy, 0.0, 1e-14);
    }
}

TEST(March, FastAndDirectAgree) {
    const Grid2D g(16, 16, 0.0, 1.0, 0.0, 1.0);
    SchemeConfig cfg;
    cfg.alpha = 0.4;
    cfg.epsilon2 = 0.01;
    const auto mesh = concat_mesh(graded_mesh(0.1, 20, 3.0), random_tail_steps(0.1, 1.0, 30, 2));
    MarchPlan plan;
    plan.mesh = mesh;
    const auto u0 = random_unit_field(g, 3);
    const auto fast = march(cfg, plan, u0);
    plan.evaluation = L1Evaluation::Direct;
    const auto direct = march(cfg, plan, u0);
    for (std::size_t i = 0; i < u0.values.size(); ++i) EXPECT_NEAR(fast.u.values[i], direct.u.values[i], 1e-10);
}

TEST(March, AdaptiveTailReachesFinalTimeWithinBounds) {
    const Grid2D g(16, 16, -kPi, kPi, -kPi, kPi);
    SchemeConfig cfg;
    cfg.alpha = 0.7;
    cfg.epsilon2 = 0.01;
    MarchPlan plan;
    plan.mesh = graded_mesh(0.1, 30, 3.0);
    plan.adapt = AdaptiveParams{0.15, 200.0, 1e-3, 0.1};
    plan.final_time = 2.0;
    plan.snapshot_times = {0.5, 2.0};
    const auto res = march(cfg, plan, random_unit_field(g, 4));
    EXPECT_EQ(res.mesh.final_time(), 2.0);
    for (std::size_t k = 31; k <= res.mesh.num_steps(); ++k) {
        EXPECT_GE(res.mesh.step(k), 1e-3 * (1.0 - 1e-12));
        EXPECT_LE(res.mesh.step(k), 0.1 * (1.0 + 1e-12));
    }
    ASSERT_EQ(res.snapshots.size(), 2u);
    EXPECT_GE(res.snapshots[0].t, 0.5 - 1e-12);
    EXPECT_EQ(res.snapshots[1].t, 2.0);
}

TEST(March, ObserverSeesEveryLevel) {
    const Grid2D g(8, 8, 0.0, 1.0, 0.0, 1.0);
    SchemeConfig cfg;
    MarchPlan plan;
    plan.mesh = graded_mesh(1.0, 7, 1.5);
    std::vector<std::size_t> seen;
    plan.observer = [&](std::size_t n, double, const Field&) { seen.push_back(n); };
    (void)march(cfg, plan, Field(g, 0.2));
    ASSERT_EQ(seen.size(), 8u);
    for (std::size_t n = 0; n < 8; ++n) EXPECT_EQ(seen[n], n);
}

TEST(March, RejectsNegativeStabilization) {
    const Grid2D g(8, 8, 0.0, 1.0, 0.0, 1.0);
    SchemeConfig cfg;
    cfg.kind = SchemeKind::Stabilized;
    cfg.S = -1.0;
    EXPECT_THROW((void)run(cfg, graded_mesh(1.0, 2, 1.0), Field(g, 0.0)), Error);
}

TEST(Manufactured, SigmaEqualAlphaGivesConstantFirstTerm) {
    const double alpha = 0.6, sigma = 0.6;
    for (double t : {0.01, 0.3, 0.9}) {
        const double x = 0.13, y = 0.71;
        const double phi = std::sin(2 * kPi * x) * std::sin(2 * kPi * y);
        const double w = std::pow(t, sigma) / std::tgamma(1.0 + sigma);
        EXPECT_NEAR(manufactured_source(alpha, sigma, x, y, t), phi + w * w * w * phi * phi * phi, 1e-14);
    }
}

TEST(Manufactured, SourceSatisfiesEquation) {
    const double alpha = 0.8, eps2 = manufactured_epsilon2();
    EXPECT_NEAR(eps2, 1.0 / (8.0 * kPi * kPi), 1e-17);
    for (double sigma : {0.4, 0.8}) {
        for (int i = 0; i < 10; ++i) {
            const double t = 0.05 + 0.1 * i;
            const double x = 0.07 + 0.09 * i, y = 0.93 - 0.08 * i;
            const double phi = std::sin(2 * kPi * x) * std::sin(2 * kPi * y);
            const double u = manufactured_solution(sigma, x, y, t);
            const double lap_u = -8.0 * kPi * kPi * u;
            const double dt_alpha = static_cast<double>(caputo_quadrature(alpha, sigma, t)) * phi;
            const double g = dt_alpha - eps2 * lap_u + (u * u * u - u);
            EXPECT_NEAR(manufactured_source(alpha, sigma, x, y, t), g, 1e-6 * (1.0 + std::fabs(g))) << sigma << ' ' << t;
        }
    }
}

TEST(Manufactured, FieldSourceMatchesPointwise) {
    const Grid2D g(8, 8, 0.0, 1.0, 0.0, 1.0);
    const auto src = manufactured_source_field(0.8, 0.4);
    Field f(g);
    src(0.37, f);
    for (std::size_t j = 0; j < 8; ++j)
        for (std::size_t i = 0; i < 8; ++i)
            EXPECT_NEAR(f(i, j), manufactured_source(0.8, 0.4, g.x(i), g.y(j), 0.37), 1e-14);
}
