#include "fracac/spatial.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "fracac/error.hpp"

namespace fracac {

Grid2D::Grid2D(std::size_t m1, std::size_t m2, double xa, double xb, double yc, double yd)
    : M1(m1), M2(m2), a(xa), b(xb), c(yc), d(yd) {
    if (M1 < 2 || M2 < 2) fail(ErrorKind::InvalidParameter, "grid needs M1, M2 >= 2");
    if (!(b > a) || !(d > c)) fail(ErrorKind::InvalidParameter, "grid box must have positive extent");
}

void laplacian_apply(const Grid2D& g, std::span<const double> f, std::span<double> out) {
    const std::size_t M1 = g.M1, M2 = g.M2;
    const double r1 = 1.0 / (g.h1() * g.h1());
    const double r2 = 1.0 / (g.h2() * g.h2());
    for (std::size_t j = 0; j < M2; ++j) {
        const std::size_t jm = (j + M2 - 1) % M2, jp = (j + 1) % M2;
        const double* row = f.data() + j * M1;
        const double* down = f.data() + jm * M1;
        const double* up = f.data() + jp * M1;
        double* o = out.data() + j * M1;
        for (std::size_t i = 0; i < M1; ++i) {
            const std::size_t im = (i == 0) ? M1 - 1 : i - 1;
            const std::size_t ip = (i + 1 == M1) ? 0 : i + 1;
            const double centre = row[i];
            o[i] = (row[im] - 2.0 * centre + row[ip]) * r1 + (down[i] - 2.0 * centre + up[i]) * r2;
        }
    }
}

Field laplacian_apply(const Field& f) {
    Field out(f.grid);
    laplacian_apply(f.grid, f.span(), out.span());
    return out;
}

double laplacian_symbol(const Grid2D& g, std::size_t k1, std::size_t k2) {
    constexpr double pi = std::numbers::pi;
    const double s1 = std::sin(pi * static_cast<double>(k1) / static_cast<double>(g.M1));
    const double s2 = std::sin(pi * static_cast<double>(k2) / static_cast<double>(g.M2));
    return 4.0 * s1 * s1 / (g.h1() * g.h1()) + 4.0 * s2 * s2 / (g.h2() * g.h2());
}

double inf_norm(std::span<const double> f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::fabs(v));
    return m;
}

double discrete_energy(const Field& f, double eps2) {
    const auto& g = f.grid;
    const double r1 = 1.0 / (g.h1() * g.h1());
    const double r2 = 1.0 / (g.h2() * g.h2());
    double sum = 0.0;
    for (std::size_t j = 0; j < g.M2; ++j) {
        const std::size_t jp = (j + 1) % g.M2;
        for (std::size_t i = 0; i < g.M1; ++i) {
            const std::size_t ip = (i + 1) % g.M1;
            const double u = f(i, j);
            const double dx = f(ip, j) - u;
            const double dy = f(i, jp) - u;
            const double w = 1.0 - u * u;
            sum += 0.5 * eps2 * (dx * dx * r1 + dy * dy * r2) + 0.25 * w * w;
        }
    }
    return sum * g.h1() * g.h2();
}

// ---------------------------------------------------------------------------

namespace {

// FFTW planning is not thread safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct HelmholtzSolver::Impl {
    Grid2D grid;
    HelmholtzMethod method;
    double cg_tol;

    // Fourier path
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<double> symbol;  // eigenvalues of -D_h on the half spectrum
    std::vector<double> inv;     // cached 1 / (c + eps2 symbol) / (M1 M2)
    double cached_c = -1.0, cached_eps2 = -1.0;

    // CG path
    std::vector<double> r, p, ap, lap;

    Impl(const Grid2D& g, HelmholtzMethod m, double tol) : grid(g), method(m), cg_tol(tol) {
        if (method == HelmholtzMethod::Fourier) {
            const int n0 = static_cast<int>(g.M2), n1 = static_cast<int>(g.M1);
            const std::size_t half = g.M1 / 2 + 1;
            real = fftw_alloc_real(g.size());
            spec = fftw_alloc_complex(g.M2 * half);
            {
                std::lock_guard lock(planner_mutex());
                forward = fftw_plan_dft_r2c_2d(n0, n1, real, spec, FFTW_ESTIMATE);
                backward = fftw_plan_dft_c2r_2d(n0, n1, spec, real, FFTW_ESTIMATE);
            }
            symbol.resize(g.M2 * half);
            for (std::size_t k2 = 0; k2 < g.M2; ++k2)
                for (std::size_t k1 = 0; k1 < half; ++k1)
                    symbol[k2 * half + k1] = laplacian_symbol(g, k1, k2);
        } else {
            r.resize(g.size());
            p.resize(g.size());
            ap.resize(g.size());
            lap.resize(g.size());
        }
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (real) fftw_free(real);
        if (spec) fftw_free(spec);
    }

    void solve_fourier(double c, double eps2, std::span<const double> b, std::span<double> u) {
        if (c != cached_c || eps2 != cached_eps2) {
            inv.resize(symbol.size());
            const double norm = 1.0 / static_cast<double>(grid.size());
            for (std::size_t k = 0; k < symbol.size(); ++k) inv[k] = norm / (c + eps2 * symbol[k]);
            cached_c = c;
            cached_eps2 = eps2;
        }
        std::copy(b.begin(), b.end(), real);
        fftw_execute(forward);
        for (std::size_t k = 0; k < inv.size(); ++k) {
            spec[k][0] *= inv[k];
            spec[k][1] *= inv[k];
        }
        fftw_execute(backward);
        std::copy(real, real + grid.size(), u.begin());
    }

    void apply(double c, double eps2, std::span<const double> v, std::span<double> out) {
        laplacian_apply(grid, v, lap);
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = c * v[i] - eps2 * lap[i];
    }

    void solve_cg(double c, double eps2, std::span<const double> b, std::span<double> u) {
        const std::size_t n = grid.size();
        std::vector<double> rhs(b.begin(), b.end());
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / c;
        apply(c, eps2, x, ap);
        double bnorm = 0.0, rr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = rhs[i] - ap[i];
            p[i] = r[i];
            rr += r[i] * r[i];
            bnorm += rhs[i] * rhs[i];
        }
        const double stop = cg_tol * cg_tol * std::max(bnorm, 1e-300);
        for (std::size_t it = 0; it < 10 * n && rr > stop; ++it) {
            apply(c, eps2, p, ap);
            double pap = 0.0;
            for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
            const double step = rr / pap;
            double rr_new = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += step * p[i];
                r[i] -= step * ap[i];
                rr_new += r[i] * r[i];
            }
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        }
        std::copy(x.begin(), x.end(), u.begin());
    }
};

HelmholtzSolver::HelmholtzSolver(const Grid2D& grid, HelmholtzMethod method, double cg_tol)
    : impl_(std::make_unique<Impl>(grid, method, cg_tol)) {}
HelmholtzSolver::~HelmholtzSolver() = default;
HelmholtzSolver::HelmholtzSolver(HelmholtzSolver&&) noexcept = default;
HelmholtzSolver& HelmholtzSolver::operator=(HelmholtzSolver&&) noexcept = default;

const Grid2D& HelmholtzSolver::grid() const noexcept { return impl_->grid; }
HelmholtzMethod HelmholtzSolver::method() const noexcept { return impl_->method; }

void HelmholtzSolver::solve(double c, double eps2, std::span<const double> b, std::span<double> u) {
    if (!(c > 0.0)) {
        std::ostringstream os;
        os << "Helmholtz shift must be positive, got " << c;
        fail(ErrorKind::NonPositiveShift, os.str());
    }
    if (b.size() != impl_->grid.size() || u.size() != impl_->grid.size()) {
        fail(ErrorKind::InvalidParameter, "Helmholtz operand size does not match the grid");
    }
    if (impl_->method == HelmholtzMethod::Fourier) {
        impl_->solve_fourier(c, eps2, b, u);
    } else {
        impl_->solve_cg(c, eps2, b, u);
    }
}

Field helmholtz_solve(double c, double eps2, const Field& b, HelmholtzMethod method) {
    HelmholtzSolver solver(b.grid, method);
    Field u(b.grid);
    solver.solve(c, eps2, b.span(), u.span());
    return u;
}

double helmholtz_residual(double c, double eps2, const Field& u, const Field& b) {
    const Field lap = laplacian_apply(u);
    double worst = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        worst = std::max(worst, std::fabs(c * u.values[i] - eps2 * lap.values[i] - b.values[i]));
    }
    return worst / std::max(inf_norm(b), 1e-300);
}

std::string snapshot_filename(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snap_t%g.csv", t);
    return buf;
}

void write_snapshot(const std::filesystem::path& path, const Field& f, double t,
                    std::span<const std::string> comments) {
    std::ofstream os(path);
    if (!os) fail(ErrorKind::Io, "cannot open snapshot file " + path.string());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", t);
    os << "# t=" << buf << " M1=" << f.grid.M1 << " M2=" << f.grid.M2 << '\n';
    for (const auto& c : comments) os << "# " << c << '\n';
    for (std::size_t j = 0; j < f.grid.M2; ++j) {
        for (std::size_t i = 0; i < f.grid.M1; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", f(i, j));
            os << (i ? "," : "") << buf;
        }
        os << '\n';
    }
}

}  // namespace fracac
