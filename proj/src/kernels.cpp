#include "spiral/kernels.hpp"

#include "spiral/errors.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace spiral {

void KernelParams::validate() const
{
    if (!(eta > 0.0)) throw precondition_error("kernel params: eta must be positive");
    if (!(dcoef > 0.0)) throw precondition_error("kernel params: D must be positive");
    if (!(epsilon >= 0.0))
        throw precondition_error("kernel params: epsilon must be nonnegative");
}

void KernelParams::require_wavenumber_law() const
{
    validate();
    if (!wavenumber_law_admissible())
        throw precondition_error(
            "kernel params: eta - eps^2 D = " + std::to_string(eta - dtilde()) +
            " must be positive for the wavenumber selection law");
}

double symbol_K(double xi, const KernelParams& p)
{
    const double x2 = xi * xi;
    return -p.eta * x2 / (1.0 + p.dtilde() * x2);
}

double symbol_J(double xi, const KernelParams& p)
{
    const double x2 = xi * xi;
    return p.eta * p.dcoef * x2 * x2 / (1.0 + p.dtilde() * x2);
}

SymbolTable build_symbol_table(const std::vector<double>& xi_grid,
                               const KernelParams& p)
{
    p.validate();
    if (xi_grid.empty()) throw precondition_error("symbol table: empty wavenumber grid");
    SymbolTable t;
    t.xi_grid = xi_grid;
    t.k_hat.reserve(xi_grid.size());
    t.j_hat.reserve(xi_grid.size());
    double prev_xi = -1.0, prev_k = 1.0;
    for (double xi : xi_grid) {
        if (!(xi >= 0.0) || xi <= prev_xi)
            throw precondition_error(
                "symbol table: wavenumbers must be nonnegative and strictly increasing");
        const double k = symbol_K(xi, p);
        t.k_hat.push_back(k);
        t.j_hat.push_back(symbol_J(xi, p));
        // The symbol is zero at rest, nonpositive, and nonincreasing; a
        // violation here means a broken evaluation, not bad input.
        if (xi == 0.0 && k != 0.0)
            throw numerical_error("symbol table: K(0) != 0");
        if (k > 0.0 || (prev_xi >= 0.0 && k > prev_k))
            throw numerical_error("symbol table: K not nonpositive/nonincreasing at xi = " +
                                  std::to_string(xi));
        prev_xi = xi;
        prev_k = k;
    }
    return t;
}

namespace {

// Lagrange derivative weights on three nodes {xa, xb, xc}, evaluated at x:
// the quadratic through the nodes has constant second derivative, so the
// second-derivative weights do not depend on x.
struct ThreePoint {
    double w1[3];
    double w2[3];
};

ThreePoint lagrange3(double xa, double xb, double xc, double x)
{
    const double xs[3] = {xa, xb, xc};
    ThreePoint w{};
    for (int j = 0; j < 3; ++j) {
        const double o1 = xs[(j + 1) % 3], o2 = xs[(j + 2) % 3];
        const double den = (xs[j] - o1) * (xs[j] - o2);
        w.w1[j] = (2.0 * x - o1 - o2) / den;
        w.w2[j] = 2.0 / den;
    }
    return w;
}

} // namespace

RadialProfile apply_nonlocal_radial(const RadialProfile& u, const KernelParams& p)
{
    p.validate();
    validate_profile(u);
    const bool has_zero = u.grid.starts_at_zero();
    const std::size_t off = has_zero ? 1 : 0;
    const std::size_t N = u.grid.size() - off;
    if (N < 4)
        throw precondition_error("apply_nonlocal_radial: need at least 4 nonzero-radius nodes");
    if (has_zero && std::abs(u.values[0]) > 1e-12 * (1.0 + u.max_abs()))
        throw precondition_error(
            "apply_nonlocal_radial: mode-1 sector requires u(0) = 0");

    const auto& rn = u.grid.nodes;
    const double r_max = u.grid.r_max();

    // Banded second-order rows of the mode-1 radial operator, with the odd
    // ghost u(0) = 0 on the axis side and the Robin closure u' + u/r_max = 0
    // eliminated into the last row.
    std::vector<double> lower(N - 1, 0.0), diag(N, 0.0), upper(N - 1, 0.0);
    auto fill_row = [&](std::size_t i, double& cl, double& cd, double& cu) {
        const double r = rn[off + i];
        if (i == 0) {
            const auto w = lagrange3(0.0, rn[off], rn[off + 1], r);
            // ghost column at r = 0 carries value 0 and drops out
            cl = 0.0;
            cd = w.w2[1] + w.w1[1] / r - 1.0 / (r * r);
            cu = w.w2[2] + w.w1[2] / r;
        } else if (i == N - 1) {
            const double rg = r + (r - rn[off + i - 1]); // ghost past the edge
            const auto w = lagrange3(rn[off + i - 1], r, rg, r);
            const double a = w.w2[0] + w.w1[0] / r;
            const double b = w.w2[1] + w.w1[1] / r - 1.0 / (r * r);
            const double cg = w.w2[2] + w.w1[2] / r;
            // first-derivative weights on the same nodes give the Robin
            // elimination of the ghost value
            const double da = w.w1[0], db = w.w1[1], dg = w.w1[2];
            cl = a - cg * da / dg;
            cd = b - cg * (db + 1.0 / r_max) / dg;
            cu = 0.0;
        } else {
            const auto w = lagrange3(rn[off + i - 1], r, rn[off + i + 1], r);
            cl = w.w2[0] + w.w1[0] / r;
            cd = w.w2[1] + w.w1[1] / r - 1.0 / (r * r);
            cu = w.w2[2] + w.w1[2] / r;
        }
    };

    // Right-hand side: the same discrete operator applied to u.
    std::vector<cplx> rhs(N);
    const double dt = p.dtilde();
    for (std::size_t i = 0; i < N; ++i) {
        double cl, cd, cu;
        fill_row(i, cl, cd, cu);
        cplx s = cd * u.values[off + i];
        if (i > 0) s += cl * u.values[off + i - 1];
        if (i + 1 < N) s += cu * u.values[off + i + 1];
        rhs[i] = s;
        // Resolvent matrix 1 - dtilde * (operator).
        if (i > 0) lower[i - 1] = -dt * cl;
        diag[i] = 1.0 - dt * cd;
        if (i + 1 < N) upper[i] = -dt * cu;
    }

    try {
        solve_tridiagonal(lower, diag, upper, rhs);
    } catch (const numerical_error& e) {
        throw numerical_error(
            "apply_nonlocal_radial: resolvent solve failed (n = " + std::to_string(N) +
            ", dtilde = " + std::to_string(p.dtilde()) + "): " + e.what());
    }

    RadialProfile out = RadialProfile::zeros(u.grid);
    for (std::size_t i = 0; i < N; ++i) out.values[off + i] = p.eta * rhs[i];
    return out;
}

Field2D apply_symbol_2d(const Field2D& f, SymbolChoice which, const KernelParams& p)
{
    p.validate();
    f.sync_spectral();
    Field2D out = f;
    const double add = which == SymbolChoice::K_plus_identity ? 1.0 : 0.0;
    for (int ki = 0; ki < f.n; ++ki) {
        for (int kj = 0; kj < f.n; ++kj) {
            const double s = symbol_K(f.mode_xi(ki, kj), p) + add;
            const std::size_t id = f.idx(std::size_t(ki), std::size_t(kj));
            for (std::size_t q = 0; q < out.hat.size(); ++q) out.hat[q][id] *= s;
        }
    }
    out.hat_valid = true;
    out.sync_physical();
    return out;
}

} // namespace spiral
