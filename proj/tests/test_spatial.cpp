#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "fracac/error.hpp"
#include "fracac/experiments.hpp"
#include "fracac/spatial.hpp"

using namespace fracac;

namespace {

constexpr double kPi = std::numbers::pi;

Field random_field(const Grid2D& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g);
    for (auto& v : f.values) v = dist(rng);
    return f;
}

double symbol_oracle(const Grid2D& g, double k1, double k2) {
    const double s1 = std::sin(kPi * k1 / static_cast<double>(g.M1));
    const double s2 = std::sin(kPi * k2 / static_cast<double>(g.M2));
    return 4.0 / (g.h1() * g.h1()) * s1 * s1 + 4.0 / (g.h2() * g.h2()) * s2 * s2;
}

}  // namespace

TEST(Laplacian, ConstantFieldMapsToZero) {
    const Grid2D g(16, 12, 0.0, 1.0, -1.0, 2.0);
    const auto out = laplacian_apply(Field(g, 3.5));
    EXPECT_LE(inf_norm(out), 1e-12);
}

TEST(Laplacian, SineIsEigenfield) {
    for (std::size_t M : {8u, 32u, 64u}) {
        const Grid2D g(M, M, 0.0, 1.0, 0.0, 1.0);
        const auto f = Field::sample(g, [](double x, double y) { return std::sin(2 * kPi * x) * std::sin(2 * kPi * y); });
        const auto lf = laplacian_apply(f);
        const double lambda = symbol_oracle(g, 1, 1);
        EXPECT_NEAR(laplacian_symbol(g, 1, 1), lambda, 1e-10 * lambda);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            EXPECT_NEAR(lf.values[i], -lambda * f.values[i], 1e-9 * lambda);
        }
    }
}

TEST(Laplacian, NegativeSemiDefinite) {
    const Grid2D g(20, 14, 0.0, 2.0, 0.0, 1.0);
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const auto f = random_field(g, seed);
        const auto lf = laplacian_apply(f);
        double dot = 0.0;
        for (std::size_t i = 0; i < f.values.size(); ++i) dot += f.values[i] * lf.values[i];
        EXPECT_LE(dot, 1e-12);
    }
}

TEST(Laplacian, SymbolNonNegative) {
    const Grid2D g(10, 6, -kPi, kPi, -kPi, kPi);
    for (std::size_t k1 = 0; k1 < 10; ++k1)
        for (std::size_t k2 = 0; k2 < 6; ++k2) EXPECT_GE(laplacian_symbol(g, k1, k2), 0.0);
    EXPECT_EQ(laplacian_symbol(g, 0, 0), 0.0);
}

TEST(Helmholtz, RoundTripRecoversField) {
    const Grid2D g(32, 24, 0.0, 1.0, 0.0, 1.5);
    const double c = 2.5, eps2 = 0.03;
    const auto w = random_field(g, 9);
    auto b = laplacian_apply(w);
    for (std::size_t i = 0; i < b.values.size(); ++i) b.values[i] = c * w.values[i] - eps2 * b.values[i];
    for (auto method : {HelmholtzMethod::Fourier, HelmholtzMethod::ConjugateGradient}) {
        const auto u = helmholtz_solve(c, eps2, b, method);
        for (std::size_t i = 0; i < u.values.size(); ++i) EXPECT_NEAR(u.values[i], w.values[i], 1e-12);
        EXPECT_LE(helmholtz_residual(c, eps2, u, b), 1e-12);
    }
}

TEST(Helmholtz, ConstantRightHandSide) {
    const Grid2D g(16, 16, 0.0, 1.0, 0.0, 1.0);
    const auto u = helmholtz_solve(4.0, 0.1, Field(g, 2.0));
    for (double v : u.values) EXPECT_NEAR(v, 0.5, 1e-14);
}

TEST(Helmholtz, EigenfieldDividesBySymbol) {
    const Grid2D g(64, 64, 0.0, 1.0, 0.0, 1.0);
    const double c = 1.3, eps2 = 1.0 / (8.0 * kPi * kPi);
    const auto b = Field::sample(g, [](double x, double y) { return std::sin(2 * kPi * x) * std::sin(2 * kPi * y); });
    const auto u = helmholtz_solve(c, eps2, b);
    const double factor = 1.0 / (c + eps2 * symbol_oracle(g, 1, 1));
    for (std::size_t i = 0; i < u.values.size(); ++i) EXPECT_NEAR(u.values[i], factor * b.values[i], 1e-14);
}

TEST(Helmholtz, FourierAndCgAgree) {
    const Grid2D g(48, 40, -kPi, kPi, -kPi, kPi);
    const auto b = random_field(g, 4);
    const auto uf = helmholtz_solve(0.7, 0.01, b, HelmholtzMethod::Fourier);
    const auto uc = helmholtz_solve(0.7, 0.01, b, HelmholtzMethod::ConjugateGradient);
    for (std::size_t i = 0; i < uf.values.size(); ++i) EXPECT_NEAR(uf.values[i], uc.values[i], 1e-11);
}

TEST(Helmholtz, InPlaceSolve) {
    const Grid2D g(16, 16, 0.0, 1.0, 0.0, 1.0);
    const auto b = random_field(g, 2);
    HelmholtzSolver solver(g);
    auto u = b.values;
    solver.solve(1.5, 0.02, u, u);
    const auto ref = helmholtz_solve(1.5, 0.02, b);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(u[i], ref.values[i], 1e-15);
}

TEST(Helmholtz, NonPositiveShiftRejected) {
    const Grid2D g(8, 8, 0.0, 1.0, 0.0, 1.0);
    HelmholtzSolver solver(g);
    std::vector<double> b(64, 1.0), u(64);
    for (double c : {0.0, -1.0}) {
        try {
            solver.solve(c, 0.1, b, u);
            FAIL() << "expected NonPositiveShift";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::NonPositiveShift);
        }
    }
}

TEST(Norms, InfinityNorm) {
    const Grid2D g(4, 4, 0.0, 1.0, 0.0, 1.0);
    Field f(g);
    EXPECT_EQ(inf_norm(f), 0.0);
    f(2, 3) = -2.0;
    EXPECT_EQ(inf_norm(f), 2.0);
    const Grid2D bg(128, 128, -kPi, kPi, -kPi, kPi);
    EXPECT_EQ(inf_norm(bubbles_initial(bg)), 0.5);
}

TEST(Energy, PureStatesAndZero) {
    const Grid2D g(16, 16, 0.0, 2.0, 0.0, 3.0);
    EXPECT_NEAR(discrete_energy(Field(g, 1.0), 0.01), 0.0, 1e-15);
    EXPECT_NEAR(discrete_energy(Field(g, -1.0), 0.01), 0.0, 1e-15);
    EXPECT_NEAR(discrete_energy(Field(g, 0.0), 0.01), 6.0 / 4.0, 1e-14);
}

TEST(Energy, PotentialOfSineMatchesQuadrature) {
    // int_0^1 int_0^1 (1 - sin^2(2 pi x))^2 / 4 dx dy by fine midpoint quadrature.
    long double ref = 0.0L;
    const int Q = 200000;
    for (int q = 0; q < Q; ++q) {
        const long double s = std::sin(2.0L * std::numbers::pi_v<long double> * (q + 0.5L) / Q);
        ref += (1.0L - s * s) * (1.0L - s * s) / 4.0L;
    }
    ref /= Q;
    const Grid2D g(64, 64, 0.0, 1.0, 0.0, 1.0);
    const auto f = Field::sample(g, [](double x, double) { return std::sin(2 * kPi * x); });
    EXPECT_NEAR(discrete_energy(f, 0.0), static_cast<double>(ref), 1e-12);
}

TEST(Energy, GradientTermUsesForwardDifferences) {
    const Grid2D g(8, 8, 0.0, 1.0, 0.0, 1.0);
    Field f(g, 1.0);
    f(3, 4) = -1.0;
    // Four neighbouring differences of size 2, potential zero everywhere.
    const double h2 = g.h1() * g.h2();
    EXPECT_NEAR(discrete_energy(f, 0.5), h2 * 0.25 * 4.0 * 4.0 / (g.h1() * g.h1()), 1e-12);
}

TEST(Snapshot, WritesHeaderAndRows) {
    const auto dir = std::filesystem::temp_directory_path() / "fracac_snapshot_test";
    std::filesystem::create_directories(dir);
    const Grid2D g(3, 2, 0.0, 1.0, 0.0, 1.0);
    Field f(g);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = 0.1 * static_cast<double>(i);
    const auto path = dir / snapshot_filename(10.0);
    const std::vector<std::string> comments{"alpha = 0.7"};
    write_snapshot(path, f, 10.0, comments);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# t=", 0), 0u);
    EXPECT_NE(line.find("M1=3"), std::string::npos);
    std::getline(in, line);
    EXPECT_EQ(line, "# alpha = 0.7");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2);
    std::filesystem::remove_all(dir);
}
