#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fracac {

/// Periodic cell-centred grid on (a,b) x (c,d) with x_i = a + i h1, y_j = c + j h2.
struct Grid2D {
    std::size_t M1 = 2;
    std::size_t M2 = 2;
    double a = 0.0, b = 1.0, c = 0.0, d = 1.0;

    Grid2D() = default;
    Grid2D(std::size_t m1, std::size_t m2, double xa, double xb, double yc, double yd);

    [[nodiscard]] double h1() const noexcept { return (b - a) / static_cast<double>(M1); }
    [[nodiscard]] double h2() const noexcept { return (d - c) / static_cast<double>(M2); }
    [[nodiscard]] double x(std::size_t i) const noexcept { return a + static_cast<double>(i) * h1(); }
    [[nodiscard]] double y(std::size_t j) const noexcept { return c + static_cast<double>(j) * h2(); }
    [[nodiscard]] std::size_t size() const noexcept { return M1 * M2; }
    [[nodiscard]] double area() const noexcept { return (b - a) * (d - c); }
    /// Row-major, j outer and i inner.
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * M1 + i; }
};

/// Grid function on a Grid2D.
struct Field {
    Grid2D grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid2D& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

    double& operator()(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
    double operator()(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
    [[nodiscard]] std::span<double> span() noexcept { return values; }
    [[nodiscard]] std::span<const double> span() const noexcept { return values; }

    template <typename Fn>
    static Field sample(const Grid2D& g, Fn&& fn) {
        Field f(g);
        for (std::size_t j = 0; j < g.M2; ++j)
            for (std::size_t i = 0; i < g.M1; ++i) f(i, j) = fn(g.x(i), g.y(j));
        return f;
    }
};

/// Five-point periodic Laplacian D_h, matrix free.
void laplacian_apply(const Grid2D& grid, std::span<const double> f, std::span<double> out);
Field laplacian_apply(const Field& f);

/// Eigenvalue of -D_h for wave numbers (k1, k2); always >= 0.
double laplacian_symbol(const Grid2D& grid, std::size_t k1, std::size_t k2);

double inf_norm(std::span<const double> f);
inline double inf_norm(const Field& f) { return inf_norm(f.span()); }

/// h1 h2 sum [ eps2/2 ((D+x f)^2 + (D+y f)^2) + (1 - f^2)^2 / 4 ] with periodic
/// forward differences.
double discrete_energy(const Field& f, double eps2);

enum class HelmholtzMethod { Fourier, ConjugateGradient };

/// Solves (c I - eps2 D_h) u = b on a fixed grid. Fourier diagonalization by
/// default; conjugate gradients as a transform-free fallback.
class HelmholtzSolver {
public:
    explicit HelmholtzSolver(const Grid2D& grid, HelmholtzMethod method = HelmholtzMethod::Fourier,
                             double cg_tol = 1e-14);
    ~HelmholtzSolver();
    HelmholtzSolver(HelmholtzSolver&&) noexcept;
    HelmholtzSolver& operator=(HelmholtzSolver&&) noexcept;
    HelmholtzSolver(const HelmholtzSolver&) = delete;
    HelmholtzSolver& operator=(const HelmholtzSolver&) = delete;

    [[nodiscard]] const Grid2D& grid() const noexcept;
    [[nodiscard]] HelmholtzMethod method() const noexcept;

    /// Throws NonPositiveShift unless c > 0. `u` may alias `b`.
    void solve(double c, double eps2, std::span<const double> b, std::span<double> u);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Field helmholtz_solve(double c, double eps2, const Field& b,
                      HelmholtzMethod method = HelmholtzMethod::Fourier);

/// max |(c I - eps2 D_h) u - b| / max(|b|_inf, tiny).
double helmholtz_residual(double c, double eps2, const Field& u, const Field& b);

/// CSV snapshot: `# t=<time> M1=<..> M2=<..>`, then `comments` as `# ` lines,
/// then one row per j with 17 significant digits.
void write_snapshot(const std::filesystem::path& path, const Field& f, double t,
                    std::span<const std::string> comments = {});
std::string snapshot_filename(double t);

}  // namespace fracac
