#include "spiral/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "spiral/errors.hpp"
#include "spiral/specfun.hpp"

namespace spiral {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

RadialProfile make_real_profile(const RadialGrid& g, const std::vector<double>& v)
{
    RadialProfile p;
    p.grid = g;
    p.values.assign(v.begin(), v.end());
    return p;
}

// Piecewise-cubic Lagrange interpolation on a strictly increasing node set,
// clamped to the end values outside the covered range (callers only ever
// overshoot by boundary-closure amounts, where the profiles are flat).
class CubicTable {
public:
    CubicTable(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y))
    {
        if (x_.size() < 4 || x_.size() != y_.size())
            throw precondition_error("interpolation table needs >= 4 matching nodes");
    }

    double operator()(double xv) const
    {
        if (xv <= x_.front()) return y_.front();
        if (xv >= x_.back()) return y_.back();
        std::size_t k = static_cast<std::size_t>(
            std::upper_bound(x_.begin(), x_.end(), xv) - x_.begin() - 1);
        std::size_t j = (k == 0) ? 0 : k - 1;
        j = std::min(j, x_.size() - 4);
        double out = 0.0;
        for (std::size_t m = 0; m < 4; ++m) {
            double lm = 1.0;
            for (std::size_t l = 0; l < 4; ++l) {
                if (l == m) continue;
                lm *= (xv - x_[j + l]) / (x_[j + m] - x_[j + l]);
            }
            out += lm * y_[j + m];
        }
        return out;
    }

private:
    std::vector<double> x_, y_;
};

// 3-point first/second derivative weights at the middle node of (xa, xb, xc).
struct Stencil3 {
    double d1[3];
    double d2[3];
};

Stencil3 stencil3(double xa, double xb, double xc)
{
    const double ha = xb - xa, hb = xc - xb;
    Stencil3 s;
    s.d1[0] = -hb / (ha * (ha + hb));
    s.d1[1] = (hb - ha) / (ha * hb);
    s.d1[2] = ha / (hb * (ha + hb));
    s.d2[0] = 2.0 / (ha * (ha + hb));
    s.d2[1] = -2.0 / (ha * hb);
    s.d2[2] = 2.0 / (hb * (ha + hb));
    return s;
}

double sup_abs_interior(const std::vector<double>& v)
{
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

} // namespace

// ---------------------------------------------------------------- solve_rho0

Rho0Solution solve_rho0(const RadialGrid& grid)
{
    if (!grid.starts_at_zero())
        throw precondition_error("amplitude solve: grid must start at r = 0");
    const std::size_t N = grid.size();
    if (N < 2001)
        throw precondition_error("amplitude solve: need at least 2000 intervals");
    if (grid.r_max() < 50.0)
        throw precondition_error(
            "amplitude solve: r_max must reach 50 so the tail closure sits in "
            "the algebraic regime");

    const auto& r = grid.nodes;
    const double rmax = grid.r_max();

    std::vector<Stencil3> st(N);
    for (std::size_t i = 1; i + 1 < N; ++i) st[i] = stencil3(r[i - 1], r[i], r[i + 1]);

    std::vector<double> rho(N);
    for (std::size_t i = 0; i < N; ++i) rho[i] = std::tanh(0.58 * r[i]);
    rho[0] = 0.0;
    rho[N - 1] = 1.0 - 1.0 / (rmax * rmax);

    auto eval_residual = [&](const std::vector<double>& u, std::vector<double>& F) {
        for (std::size_t i = 1; i + 1 < N; ++i) {
            const Stencil3& s = st[i];
            const double lap =
                s.d2[0] * u[i - 1] + s.d2[1] * u[i] + s.d2[2] * u[i + 1] +
                (s.d1[0] * u[i - 1] + s.d1[1] * u[i] + s.d1[2] * u[i + 1]) / r[i] -
                u[i] / (r[i] * r[i]);
            F[i] = lap + (1.0 - u[i] * u[i]) * u[i];
        }
    };

    std::vector<double> F(N, 0.0), Fc(N, 0.0);
    eval_residual(rho, F);
    double fnorm = sup_abs_interior(F);

    const int max_iter = 40;
    for (int iter = 0; fnorm > 1e-10; ++iter) {
        if (iter >= max_iter)
            throw solver_error("amplitude solve: Newton iteration did not converge in " +
                               std::to_string(max_iter) + " steps; last residual = " +
                               std::to_string(fnorm));
        std::vector<double> lower(N - 3), diag(N - 2), upper(N - 3), rhs(N - 2);
        for (std::size_t i = 1; i + 1 < N; ++i) {
            const Stencil3& s = st[i];
            const double c_lo = s.d2[0] + s.d1[0] / r[i];
            const double c_di = s.d2[1] + s.d1[1] / r[i] - 1.0 / (r[i] * r[i]) +
                                (1.0 - 3.0 * rho[i] * rho[i]);
            const double c_up = s.d2[2] + s.d1[2] / r[i];
            if (i > 1) lower[i - 2] = c_lo;
            diag[i - 1] = c_di;
            if (i + 2 < N) upper[i - 1] = c_up;
            rhs[i - 1] = -F[i];
        }
        solve_tridiagonal(lower, diag, upper, rhs);

        bool accepted = false;
        double step = 1.0;
        for (int ls = 0; ls < 12 && !accepted; ++ls, step *= 0.5) {
            std::vector<double> cand = rho;
            for (std::size_t i = 1; i + 1 < N; ++i) cand[i] += step * rhs[i - 1];
            eval_residual(cand, Fc);
            const double fc = sup_abs_interior(Fc);
            if (fc < fnorm || fc < 1e-12) {
                rho.swap(cand);
                F.swap(Fc);
                fnorm = fc;
                accepted = true;
            }
        }
        if (!accepted) {
            if (fnorm <= 1e-8) break; // stalled on the round-off floor, good enough
            throw solver_error("amplitude solve: line search stalled at residual " +
                               std::to_string(fnorm) + " after " + std::to_string(iter) +
                               " Newton steps");
        }
    }

    // The imposed far closure sits a little below the free algebraic tail, so
    // the profile heals backward from the boundary over a few units of radius
    // (at the 1e-6 level); strict monotonicity is a property of the free
    // interior and is checked there.
    const double mono_end = rmax - 8.0;
    for (std::size_t i = 1; i < N; ++i) {
        if (!(rho[i] > 0.0) || !(rho[i] < 1.0))
            throw invariant_error("amplitude profile left (0,1) at r = " +
                                  std::to_string(r[i]));
        if (r[i] <= mono_end && !(rho[i] > rho[i - 1]))
            throw invariant_error("amplitude profile is not strictly increasing at r = " +
                                  std::to_string(r[i]));
    }

    // One-sided 3-point derivative at the origin (rho(0) = 0 drops out).
    const double x1 = r[1], x2 = r[2];
    const double w1 = x2 / (x1 * (x2 - x1));
    const double w2 = -x1 / (x2 * (x2 - x1));
    const double slope = w1 * rho[1] + w2 * rho[2];

    Rho0Solution out;
    out.profile = make_real_profile(grid, rho);
    out.profile.origin_power = 1.0;
    out.profile.infinity_limit = 1.0;
    out.residual_norm = fnorm;
    out.slope_at_origin = slope;
    return out;
}

// ------------------------------------------------- compute_g / split / mass

RadialProfile compute_g(const Rho0Solution& rho0, double delta)
{
    if (!(delta > 0.0))
        throw precondition_error("effective well: delta must be positive");
    const auto rv = rho0.profile.real_values();
    std::size_t core_nodes = 0;
    for (double v : rv)
        if (v < 0.9) ++core_nodes;
    if (core_nodes < 50)
        throw resolution_error("effective well: only " + std::to_string(core_nodes) +
                               " nodes resolve the amplitude core; refine the grid");

    RadialGrid sg;
    sg.spacing = rho0.profile.grid.spacing;
    sg.nodes.reserve(rho0.profile.grid.size());
    for (double r : rho0.profile.grid.nodes) sg.nodes.push_back(delta * r);

    std::vector<double> gv(rv.size());
    for (std::size_t i = 0; i < rv.size(); ++i)
        gv[i] = (1.0 - rv[i] * rv[i]) / (delta * delta);

    RadialProfile g = make_real_profile(sg, gv);
    g.infinity_limit = 0.0;
    return g;
}

double default_d_cut(const Rho0Solution& rho0, double delta)
{
    if (!(delta > 0.0))
        throw precondition_error("core cutoff: delta must be positive");
    const auto rv = rho0.profile.real_values();
    const auto& r = rho0.profile.grid.nodes;
    for (std::size_t i = 1; i < rv.size(); ++i) {
        if (rv[i] > 0.9) {
            // linear interpolation of the 0.9 crossing for grid stability
            const double t = (0.9 - rv[i - 1]) / (rv[i] - rv[i - 1]);
            return 5.0 * delta * (r[i - 1] + t * (r[i] - r[i - 1]));
        }
    }
    throw precondition_error("core cutoff: amplitude never exceeds 0.9 on the grid");
}

GSplit split_g(const RadialProfile& g, double d_cut)
{
    if (!(d_cut > 0.0))
        throw precondition_error("core/far split: cutoff must be positive");
    if (!(d_cut < g.grid.r_max()))
        throw precondition_error("core/far split: cutoff " + std::to_string(d_cut) +
                                 " lies outside the grid (S_max = " +
                                 std::to_string(g.grid.r_max()) + ")");
    GSplit out;
    out.core.grid = g.grid;
    out.far.grid = g.grid;
    out.core.values.reserve(g.size());
    out.far.values.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double chi = cutoff_chi(g.grid.nodes[i] / d_cut);
        out.core.values.push_back(g.values[i] * (1.0 - chi));
        out.far.values.push_back(g.values[i] * chi);
    }
    out.core.infinity_limit = 0.0;
    out.far.infinity_limit = 0.0;
    return out;
}

double core_mass_a(const RadialProfile& g_core, double beta)
{
    if (!(beta < 0.0))
        throw precondition_error("core mass: dispersion coefficient beta must be negative");
    const auto v = g_core.real_values();
    const double scale = std::max(1.0, g_core.max_abs());
    if (std::abs(v.back()) > 1e-12 * scale)
        throw precondition_error("core mass: core part must be compactly supported "
                                 "(nonzero at the outer boundary)");
    std::vector<double> integrand(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        integrand[i] = v[i] * g_core.grid.nodes[i];
    const double mass =
        integrate(g_core.grid, integrand, !g_core.grid.starts_at_zero());
    return -beta * beta * mass;
}

// -------------------------------------------------------------- solve_eikonal
//
// Two-sided shooting for the ground state of
//   Delta_0 y + (beta^2 g - b Omega) y = 0,   b = -beta,
// the log-derivative linearization of the phase equation. The regular
// solution is integrated outward from a series start at the origin; the
// decaying branch is swept inward as a log-derivative from the Bessel
// closure at S_max. Their mismatch at a matching point just outside the
// classically allowed span changes sign exactly once, at the nodeless
// ground state (an outward node forces the mismatch negative, masking the
// spurious zeros at excited levels), so bisection in log Omega is safe.

EikonalResult solve_eikonal(const RadialProfile& g, double beta, double d_cut)
{
    if (!(beta < 0.0))
        throw precondition_error("eikonal: dispersion coefficient beta must be negative");
    const double b = -beta;

    if (g.max_abs() == 0.0) {
        // No well: the phase stays flat and nothing rotates.
        EikonalResult out;
        out.beta = beta;
        out.d_cut = d_cut;
        out.phi0 = RadialProfile::zeros(g.grid);
        out.dphi0 = RadialProfile::zeros(g.grid);
        return out;
    }

    const auto gv = g.real_values();
    for (std::size_t i = 0; i < gv.size(); ++i)
        if (!(gv[i] > 0.0) || !std::isfinite(gv[i]))
            throw precondition_error("eikonal: the potential must be strictly positive "
                                     "(violated at S = " +
                                     std::to_string(g.grid.nodes[i]) + ")");
    const double smax = g.grid.r_max();
    if (smax < 2.0)
        throw precondition_error("eikonal: domain too short (S_max < 2)");

    {
        RadialProfile gc = g;
        gc.infinity_limit = 0.0;
        const DecayEstimate est = decay_exponent(gc, ProfileRegion::farfield);
        if (est.exponent < -2.6 || est.exponent > -1.4)
            throw precondition_error("eikonal: potential tail must decay ~ S^-2 "
                                     "(fitted exponent " +
                                     std::to_string(est.exponent) + ")");
    }

    const double a_core = core_mass_a(split_g(g, d_cut).core, beta);

    // Fine uniform working tabulation (nodes and half-steps).
    const std::size_t nf = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(smax / 1.25e-3)), 20000, 200000);
    const double h = smax / static_cast<double>(nf);
    CubicTable gi(g.grid.nodes, gv);
    std::vector<double> gtab(2 * nf + 1);
    for (std::size_t j = 0; j < gtab.size(); ++j)
        gtab[j] = std::max(0.0, gi(0.5 * static_cast<double>(j) * h));

    const double gmax = *std::max_element(gtab.begin(), gtab.end());
    const double omega_cap = b * gmax * (1.0 - 1e-12);
    const double bb = beta * beta;

    // Matching point: just outside the classically allowed span of the trial.
    // It must sit a fraction of a decay length past the turning point — the
    // outward shot loses the decaying branch to the growing one deeper into
    // the barrier, while the inward sweep is stable everywhere outside the
    // well — so the offset shrinks with the trial decay rate sqrt(b Omega).
    auto match_index = [&](double omega) -> std::size_t {
        const double e = b * omega;
        double s_turn = 0.0;
        for (std::size_t k = nf + 1; k-- > 0;) {
            if (bb * gtab[2 * k] > e) {
                s_turn = static_cast<double>(k) * h;
                break;
            }
        }
        const double offset = 0.5 / std::max(std::sqrt(e), 1.0);
        double sf = std::max(s_turn + offset, 20.0 * h);
        sf = std::min(sf, 0.5 * smax);
        const auto k = static_cast<std::size_t>(std::llround(sf / h));
        return std::clamp<std::size_t>(k, 4, nf - 4);
    };

    // Outward log-derivative of the regular solution; nullopt on a node.
    auto shoot_out = [&](double omega, std::size_t kf,
                         std::vector<double>* rec) -> std::optional<double> {
        const double c0 = bb * gtab[0] - b * omega;
        const double g2 = (gtab[2] - gtab[0]) / (h * h);
        const double a4 = (c0 * c0 / 4.0 - bb * g2) / 16.0;
        const std::size_t k0 = 4;
        auto series_y = [&](double S) {
            return 1.0 - 0.25 * c0 * S * S + a4 * S * S * S * S;
        };
        auto series_yp = [&](double S) { return -0.5 * c0 * S + 4.0 * a4 * S * S * S; };
        double y = series_y(k0 * h), yp = series_yp(k0 * h);
        if (rec) {
            (*rec)[0] = 0.0;
            for (std::size_t k = 1; k <= k0; ++k)
                (*rec)[k] = series_yp(k * h) / series_y(k * h);
        }
        double ysign = 1.0;
        auto acc = [&](double S, double c, double yv, double yd) {
            return -yd / S - c * yv;
        };
        for (std::size_t k = k0; k < kf; ++k) {
            const double S0 = static_cast<double>(k) * h;
            const double ca = bb * gtab[2 * k] - b * omega;
            const double cm = bb * gtab[2 * k + 1] - b * omega;
            const double cb = bb * gtab[2 * k + 2] - b * omega;
            const double k1y = yp, k1p = acc(S0, ca, y, yp);
            const double k2y = yp + 0.5 * h * k1p,
                         k2p = acc(S0 + 0.5 * h, cm, y + 0.5 * h * k1y, yp + 0.5 * h * k1p);
            const double k3y = yp + 0.5 * h * k2p,
                         k3p = acc(S0 + 0.5 * h, cm, y + 0.5 * h * k2y, yp + 0.5 * h * k2p);
            const double k4y = yp + h * k3p,
                         k4p = acc(S0 + h, cb, y + h * k3y, yp + h * k3p);
            y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            yp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            if (!std::isfinite(y) || !std::isfinite(yp))
                throw numerical_error("eikonal: outward integration lost finiteness");
            if (y == 0.0 || (y > 0.0 ? 1.0 : -1.0) != ysign) return std::nullopt;
            const double m = std::max(std::abs(y), std::abs(yp));
            if (m > 1e250 || (m > 0.0 && m < 1e-250)) {
                y /= m;
                yp /= m;
            }
            if (rec) (*rec)[k + 1] = yp / y;
        }
        return yp / y;
    };

    // Inward Riccati sweep of the decaying branch; +-1e300 sentinels on a
    // pole before the matching point (the sign keeps the bisection oriented).
    auto sweep_in = [&](double omega, std::size_t kf, std::vector<double>* rec) -> double {
        const double lam = std::sqrt(b * omega);
        double u = -lam * bessel_ratio_K1_K0(lam * smax);
        if (rec) (*rec)[nf] = u;
        auto du = [&](std::size_t half, double S, double uv) {
            return -uv * uv - uv / S - (bb * gtab[half] - b * omega);
        };
        for (std::size_t k = nf; k > kf; --k) {
            const double S1 = static_cast<double>(k) * h;
            const double k1 = du(2 * k, S1, u);
            const double k2 = du(2 * k - 1, S1 - 0.5 * h, u - 0.5 * h * k1);
            const double k3 = du(2 * k - 1, S1 - 0.5 * h, u - 0.5 * h * k2);
            const double k4 = du(2 * k - 2, S1 - h, u - h * k3);
            u -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!std::isfinite(u) || std::abs(u) > 1e8)
                return (u > 0.0 || !std::isfinite(u)) ? 1e300 : -1e300;
            if (rec) (*rec)[k - 1] = u;
        }
        return u;
    };

    auto mismatch = [&](double omega) -> double {
        const std::size_t kf = match_index(omega);
        const auto uo = shoot_out(omega, kf, nullptr);
        if (!uo) return -1e300;
        return *uo - sweep_in(omega, kf, nullptr);
    };

    // Bracket seeded by the exponential core-mass law (prefactor C = 1).
    double omega_guess = 4.0 * std::exp(-2.0 * kEulerGamma) * std::exp(2.0 / a_core);
    if (!(omega_guess >= 1e-280))
        throw underflow_error(
            "eikonal: seeded rotation frequency 4 e^{-2 gamma} exp(2/a) underflows "
            "(a = " + std::to_string(a_core) +
            "); rescale beta to bring the core mass toward O(1)");
    omega_guess = std::min(omega_guess, 0.5 * omega_cap);

    double lo = std::max(omega_guess / 50.0, 1e-300);
    double hi = std::min(omega_guess * 50.0, omega_cap);
    if (!(lo < hi)) lo = hi / 1e6;
    const double lo_init = lo, hi_init = hi;
    double flo = mismatch(lo), fhi = mismatch(hi);
    for (int guard = 0; fhi <= 0.0 && hi < omega_cap && guard < 40; ++guard) {
        hi = std::min(hi * 50.0, omega_cap);
        fhi = mismatch(hi);
    }
    for (int guard = 0; flo >= 0.0; ++guard) {
        lo /= 50.0;
        if (lo < 1e-300 || guard >= 200)
            throw underflow_error(
                "eikonal: matching stayed one-sided down to the underflow floor; "
                "the rotation frequency is exponentially small — rescale beta");
        flo = mismatch(lo);
    }
    if (!(flo < 0.0 && fhi > 0.0))
        throw bracket_error("eikonal: matching function has no sign change over the "
                            "bracket [" + std::to_string(lo_init) + ", " +
                            std::to_string(hi_init) + "] (expanded to [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "])");

    for (int it = 0; it < 240 && (hi - lo) > 1e-14 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (mismatch(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    const double omega = std::sqrt(lo * hi);

    // Reconstruct the stitched log-derivative and integrate the phase.
    const std::size_t kf = match_index(omega);
    std::vector<double> u(nf + 1, 0.0), uin(nf + 1, 0.0);
    const auto uo = shoot_out(omega, kf, &u);
    if (!uo)
        throw numerical_error("eikonal: converged eigenvalue still produced a nodal "
                              "outward solution");
    const double ui = sweep_in(omega, kf, &uin);
    if (!(std::abs(ui) < 1e6))
        throw numerical_error("eikonal: inward sweep broke down at the converged "
                              "eigenvalue");
    u[kf] = 0.5 * (u[kf] + uin[kf]);
    for (std::size_t k = kf + 1; k <= nf; ++k) u[k] = uin[k];

    RadialGrid fg = RadialGrid::make_uniform_from_zero(smax, nf);
    std::vector<double> dphi(nf + 1);
    for (std::size_t k = 0; k <= nf; ++k) dphi[k] = -u[k] / b;
    for (std::size_t k = 1; k <= nf; ++k)
        if (!(dphi[k] > 0.0))
            throw invariant_error("eikonal: phase gradient must be positive away from "
                                  "the center (violated at S = " +
                                  std::to_string(fg.nodes[k]) + ")");
    const std::vector<double> phi = cumulative_integral(fg, dphi, false);

    const double lam = std::sqrt(b * omega);
    const double kappa = lam / b;
    const double closure = kappa * bessel_ratio_K1_K0(lam * smax);
    if (std::abs(dphi[nf] / closure - 1.0) > 0.02)
        throw invariant_error("eikonal: far-field phase slope drifted off the Bessel "
                              "closure by more than 2%");

    EikonalResult out;
    out.beta = beta;
    out.d_cut = d_cut;
    out.omega = omega;
    out.lam = lam;
    out.kappa = kappa;
    out.a_core = a_core;
    out.phi0 = make_real_profile(fg, phi);
    out.phi0.origin_power = 2.0;
    out.dphi0 = make_real_profile(fg, dphi);
    out.dphi0.origin_power = 1.0;
    out.dphi0.infinity_limit = kappa;
    return out;
}

// ----------------------------------------------------------------- compute_R0

RadialProfile compute_R0(const Rho0Solution& rho0, const EikonalResult& eik, double delta)
{
    if (!(delta > 0.0))
        throw precondition_error("amplitude correction: delta must be positive");
    CubicTable rt(rho0.profile.grid.nodes, rho0.profile.real_values());
    const auto dp = eik.dphi0.real_values();
    const auto& sg = eik.dphi0.grid;
    std::vector<double> v(sg.size());
    for (std::size_t k = 0; k < sg.size(); ++k)
        v[k] = -0.5 * rt(sg.nodes[k] / delta) * dp[k] * dp[k];
    RadialProfile out = make_real_profile(sg, v);
    if (eik.omega > 0.0) out.origin_power = 3.0;
    out.infinity_limit = -0.5 * eik.kappa * eik.kappa;
    return out;
}

// ----------------------------------------------------------------- solve_zeta

ZetaSolution solve_zeta(double delta, const RadialGrid& grid)
{
    if (!(delta > 0.0))
        throw precondition_error("layer solve: delta must be positive");
    if (!grid.starts_at_zero())
        throw precondition_error("layer solve: grid must start at r = 0");
    const std::size_t N = grid.size();
    if (N < 16) throw precondition_error("layer solve: need at least 16 nodes");
    const auto& r = grid.nodes;
    if (r[1] - r[0] > delta / 4.0)
        throw resolution_error("layer solve: first interval " + std::to_string(r[1]) +
                               " cannot resolve the origin layer of width ~" +
                               std::to_string(delta / std::sqrt(2.0)));

    const double rmax = grid.r_max();
    const double zeta_end = 0.5 - delta * delta / (4.0 * rmax * rmax);

    std::vector<double> lower(N - 3), diag(N - 2), upper(N - 3), rhs(N - 2, -1.0);
    const double d2 = delta * delta;
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const Stencil3 s = stencil3(r[i - 1], r[i], r[i + 1]);
        const double c_lo = d2 * (s.d2[0] + s.d1[0] / r[i]);
        const double c_di = d2 * (s.d2[1] + s.d1[1] / r[i] - 1.0 / (r[i] * r[i])) - 2.0;
        const double c_up = d2 * (s.d2[2] + s.d1[2] / r[i]);
        if (i > 1) lower[i - 2] = c_lo;
        diag[i - 1] = c_di;
        if (i + 2 < N)
            upper[i - 1] = c_up;
        else
            rhs[i - 1] -= c_up * zeta_end;
    }
    solve_tridiagonal(lower, diag, upper, rhs);

    std::vector<double> z(N);
    z[0] = 0.0;
    for (std::size_t i = 1; i + 1 < N; ++i) z[i] = rhs[i - 1];
    z[N - 1] = zeta_end;

    ZetaSolution out;
    out.zeta = make_real_profile(grid, z);
    out.zeta.infinity_limit = 0.5;
    std::vector<double> z1(N);
    for (std::size_t i = 0; i < N; ++i) z1[i] = z[i] - 0.5;
    out.zeta1 = make_real_profile(grid, z1);
    out.zeta1.infinity_limit = 0.0;
    return out;
}

// -------------------------------------------------- solve_riccati_hopf_cole

RadialProfile solve_riccati_hopf_cole(double a, const std::function<double(double)>& b_of_x,
                                      double c, double d, const RadialGrid& grid)
{
    if (!(c > 0.0))
        throw precondition_error("riccati: quadratic coefficient c must be positive");
    if (!(d >= 0.0))
        throw precondition_error("riccati: singular forcing coefficient d must be >= 0");
    if (!(a >= 0.0))
        throw precondition_error("riccati: damping exponent a must be >= 0");
    if (grid.size() < 8)
        throw precondition_error("riccati: need at least 8 nodes");
    if (!(grid.nodes.front() > 0.0))
        throw precondition_error("riccati: grid must start at x > 0 (the equation is "
                                 "singular at the origin)");
    if (!b_of_x) throw precondition_error("riccati: coefficient callable is empty");

    if (d == 0.0) return RadialProfile::zeros(grid);

    const std::size_t N = grid.size();
    const double am1 = a - 1.0;
    const double sigma = 0.5 * (-am1 + std::sqrt(am1 * am1 + 4.0 * c * d));
    const double x0 = grid.nodes.front();
    const double b0 = b_of_x(x0);
    const double c1 = -b0 * sigma / (2.0 * sigma + a);

    // Frobenius start y = x^sigma (1 + c1 x) at the first node.
    double y = std::pow(x0, sigma) * (1.0 + c1 * x0);
    double yp = std::pow(x0, sigma - 1.0) * (sigma + (sigma + 1.0) * c1 * x0);

    std::vector<double> q(N);
    q[0] = -(yp / y) / c;

    auto acc = [&](double x, double yv, double yd) {
        return -(a / x + b_of_x(x)) * yd + (c * d / (x * x)) * yv;
    };

    for (std::size_t k = 0; k + 1 < N; ++k) {
        const double xa = grid.nodes[k], xb = grid.nodes[k + 1];
        const double dx = xb - xa;
        const double target = std::min(1.5e-3, 0.05 * xa);
        const auto ns = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(dx / target)));
        const double hs = dx / static_cast<double>(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            const double xs = xa + static_cast<double>(s) * hs;
            const double yold = y;
            const double k1y = yp, k1p = acc(xs, y, yp);
            const double k2y = yp + 0.5 * hs * k1p,
                         k2p = acc(xs + 0.5 * hs, y + 0.5 * hs * k1y, yp + 0.5 * hs * k1p);
            const double k3y = yp + 0.5 * hs * k2p,
                         k3p = acc(xs + 0.5 * hs, y + 0.5 * hs * k2y, yp + 0.5 * hs * k2p);
            const double k4y = yp + hs * k3p,
                         k4p = acc(xs + hs, y + hs * k3y, yp + hs * k3p);
            y += hs / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            yp += hs / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            if (!std::isfinite(y) || !std::isfinite(yp))
                throw numerical_error("riccati: integration lost finiteness near x = " +
                                      std::to_string(xs));
            if (y == 0.0 || (y > 0.0) != (yold > 0.0)) {
                const double xc = xs + hs * yold / (yold - y);
                throw pole_error("riccati: solution has a pole", xc);
            }
            const double m = std::max(std::abs(y), std::abs(yp));
            if (m > 1e250 || (m > 0.0 && m < 1e-250)) {
                y /= m;
                yp /= m;
            }
        }
        q[k + 1] = -(yp / y) / c;
    }

    RadialProfile out = make_real_profile(grid, q);
    out.origin_power = -1.0;
    out.infinity_limit = b_of_x(grid.r_max()) / c;
    return out;
}

// ------------------------------------------------------------- selection laws

double predict_kappa(const EikonalResult& eik, double beta, double delta,
                     const KernelParams& params)
{
    params.validate();
    if (!(beta < 0.0))
        throw precondition_error("wavenumber law: beta must be negative");
    if (!(delta >= 0.0))
        throw precondition_error("wavenumber law: delta must be nonnegative");
    if (!params.wavenumber_law_admissible())
        throw breakdown_error("wavenumber law breaks down: eta - eps^2 D = " +
                              std::to_string(params.eta - params.dtilde()) +
                              " must be positive");
    return (eik.lam / (-beta)) * delta / std::sqrt(params.eta - params.dtilde());
}

double predict_lambda(double beta, double delta, double omega)
{
    return beta + delta * delta * omega;
}

// -------------------------------------------------------------- compose_spiral

SpiralAnsatz compose_spiral(const Rho0Solution& rho0, const EikonalResult& eik,
                            double delta, double beta, const KernelParams& params,
                            double r_max, std::size_t n)
{
    params.validate();
    if (!(beta < 0.0))
        throw precondition_error("ansatz: beta must be negative");
    if (!(delta >= 0.0))
        throw precondition_error("ansatz: delta must be nonnegative");
    if (eik.beta != beta)
        throw precondition_error("ansatz: the phase profile was solved at beta = " +
                                 std::to_string(eik.beta) + ", not " +
                                 std::to_string(beta));

    const double kappa_pred = predict_kappa(eik, beta, delta, params);
    const double sf = std::sqrt(params.eta - params.dtilde());
    const double lambda_rot = predict_lambda(beta, delta, eik.omega);

    double reach = rho0.profile.grid.r_max();
    if (delta > 0.0) reach = std::min(reach, eik.phi0.grid.r_max() / delta);
    if (r_max <= 0.0) r_max = sf * reach;
    if (n == 0) n = 20000;
    if (n < 512) throw precondition_error("ansatz: grid too coarse (need n >= 512)");
    if (r_max > sf * reach * (1.0 + 1e-9))
        throw precondition_error("ansatz: requested radius " + std::to_string(r_max) +
                                 " exceeds the profiles' reach " +
                                 std::to_string(sf * reach));

    const RadialGrid ag = RadialGrid::make_uniform_from_zero(r_max, n);
    CubicTable rt(rho0.profile.grid.nodes, rho0.profile.real_values());
    CubicTable pt(eik.phi0.grid.nodes, eik.phi0.real_values());
    CubicTable dt(eik.dphi0.grid.nodes, eik.dphi0.real_values());

    std::vector<double> rho(ag.size()), phi(ag.size());
    for (std::size_t k = 0; k < ag.size(); ++k) {
        const double rt_slow = ag.nodes[k] / sf;
        const double S = delta * rt_slow;
        const double amp = rt(rt_slow);
        const double dp = (delta > 0.0) ? dt(S) : 0.0;
        rho[k] = amp * (1.0 - 0.5 * delta * delta * dp * dp);
        phi[k] = (delta > 0.0) ? pt(S) : 0.0;
    }
    rho[0] = 0.0;
    phi[0] = 0.0;

    SpiralAnsatz out;
    out.delta = delta;
    out.beta = beta;
    out.params = params;
    out.lambda_rot = lambda_rot;
    out.kappa_pred = kappa_pred;
    out.rho = make_real_profile(ag, rho);
    out.rho.origin_power = 1.0;
    out.rho.infinity_limit = 1.0 - 0.5 * delta * delta * eik.kappa * eik.kappa;
    out.phi = make_real_profile(ag, phi);
    if (delta > 0.0 && eik.omega > 0.0) out.phi.origin_power = 2.0;
    return out;
}

// -------------------------------------------------------------- residual_polar
//
// The rotating-frame equation, preconditioned by (1 - eps^2 D Lap) so the
// nonlocal coupling collapses to a local Laplacian, reads
//   0 = (1 + i lambda) w + [(eta - eps^2 D) - i lambda eps^2 D] Lap w
//       - (1 - eps^2 D Lap) N(w),
// with N(w) = (1 + i beta)|w|^2 w + eps c_quintic |w|^4 w. Factoring out the
// one-armed phase and dividing by d_R = eta - eps^2 D gives the two real
// components assembled below; alpha = -eps^2 D lambda / d_R is the effective
// diffusion phase angle.

PolarResidual residual_polar(const SpiralAnsatz& ansatz, double c_quintic)
{
    const RadialGrid& ag = ansatz.rho.grid;
    if (!ag.starts_at_zero() || ag.spacing != GridSpacing::uniform)
        throw precondition_error("residual: ansatz must live on a uniform grid from "
                                 "the origin");
    const std::size_t N = ag.size();
    if (N < 4001)
        throw precondition_error("residual: need at least 4000 intervals");
    if (ansatz.phi.grid.size() != N)
        throw precondition_error("residual: amplitude and phase grids differ");
    ansatz.params.validate();
    const double dR = ansatz.params.eta - ansatz.params.dtilde();
    if (!(dR > 0.0))
        throw breakdown_error("residual: eta - eps^2 D = " + std::to_string(dR) +
                              " must be positive");
    const double epsD = ansatz.params.dtilde();
    const double eps = ansatz.params.epsilon;
    const double lam = ansatz.lambda_rot;
    const double beta = ansatz.beta;
    const double alpha = -epsD * lam / dR;

    std::vector<double> rho = ansatz.rho.real_values();
    const std::vector<double> phi = ansatz.phi.real_values();
    if (std::abs(rho[0]) > 1e-12)
        throw precondition_error("residual: amplitude must vanish at the origin");
    rho[0] = 0.0;

    auto lap = [&](const std::vector<double>& v, int order) {
        return apply_delta_n(make_real_profile(ag, v), order).real_values();
    };

    const std::vector<double> rhop = derivative_uniform_4(ag, rho);
    const std::vector<double> phip = derivative_uniform_4(ag, phi);
    const std::vector<double> d1rho = lap(rho, 1);
    const std::vector<double> d0phi = lap(phi, 0);

    std::vector<double> rho3(N);
    for (std::size_t k = 0; k < N; ++k) rho3[k] = rho[k] * rho[k] * rho[k];
    const std::vector<double> d1rho3 = lap(rho3, 1);

    const bool quintic = (c_quintic != 0.0 && eps != 0.0);
    std::vector<double> rho5, d1rho5;
    if (quintic) {
        rho5.resize(N);
        for (std::size_t k = 0; k < N; ++k) rho5[k] = rho3[k] * rho[k] * rho[k];
        d1rho5 = lap(rho5, 1);
    }

    std::vector<double> rr(N), ri(N);
    for (std::size_t k = 0; k < N; ++k) {
        const double pp = phip[k];
        const double X = d1rho[k] - rho[k] * pp * pp;
        const double Y = 2.0 * rhop[k] * pp + rho[k] * d0phi[k];
        const double MR = rho3[k] - epsD * (d1rho3[k] - rho3[k] * pp * pp);
        const double MI =
            -epsD * (2.0 * (3.0 * rho[k] * rho[k] * rhop[k]) * pp + rho3[k] * d0phi[k]);
        double QR = 0.0, QI = 0.0;
        if (quintic) {
            QR = rho5[k] - epsD * (d1rho5[k] - rho5[k] * pp * pp);
            QI = -epsD *
                 (2.0 * (5.0 * rho3[k] * rho[k] * rhop[k]) * pp + rho5[k] * d0phi[k]);
        }
        rr[k] = rho[k] / dR + X - alpha * Y - (MR - beta * MI) / dR -
                eps * c_quintic * QR / dR;
        ri[k] = lam * rho[k] / dR + alpha * X + Y - (beta * MR + MI) / dR -
                eps * c_quintic * QI / dR;
    }

    PolarResidual out;
    out.res_real = make_real_profile(ag, rr);
    out.res_imag = make_real_profile(ag, ri);

    // Radial L^2(r dr) norms over the window [1, S_max/2] expressed in the
    // slow variable S = delta r / sqrt(eta - eps^2 D): the region where the
    // construction is asserted order by order (outside the core, inside the
    // domain). Edges snap to grid nodes; a flat (delta = 0) ansatz has no
    // slow scale and reports zero norms.
    const double sscale = (ansatz.delta > 0.0) ? ansatz.delta / std::sqrt(dR) : 0.0;
    if (sscale > 0.0) {
        const double s_reach = sscale * ag.r_max();
        const double s_lo = 1.0, s_hi = 0.5 * s_reach;
        if (s_hi > s_lo) {
            const double h = ag.nodes[1] - ag.nodes[0];
            auto klo = static_cast<std::size_t>(std::ceil(s_lo / sscale / h - 1e-9));
            auto khi = static_cast<std::size_t>(std::floor(s_hi / sscale / h + 1e-9));
            klo = std::max<std::size_t>(klo, 2);
            khi = std::min<std::size_t>(khi, N - 3);
            if (khi > klo + 8) {
                std::vector<double> wr(N, 0.0), wi(N, 0.0);
                for (std::size_t k = klo; k <= khi; ++k) {
                    wr[k] = rr[k] * rr[k] * ag.nodes[k];
                    wi[k] = ri[k] * ri[k] * ag.nodes[k];
                }
                out.norm_real = std::sqrt(integrate(ag, wr, false));
                out.norm_imag = std::sqrt(integrate(ag, wi, false));
                out.window_lo = sscale * ag.nodes[klo];
                out.window_hi = sscale * ag.nodes[khi];
            }
        }
    }
    return out;
}

// ------------------------------------------------------------- JSON summaries

namespace {

void write_json_file(const nlohmann::json& j, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw config_error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw config_error("write failed for " + path);
}

} // namespace

void write_eikonal_summary(const EikonalResult& eik, const std::string& dir,
                           const std::string& stem)
{
    const std::string phi_csv = stem + "_phi0.csv";
    const std::string dphi_csv = stem + "_dphi0.csv";
    write_profile_csv(eik.phi0, dir + "/" + phi_csv);
    write_profile_csv(eik.dphi0, dir + "/" + dphi_csv);
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = "eikonal";
    j["beta"] = eik.beta;
    j["d_cut"] = eik.d_cut;
    j["omega"] = eik.omega;
    j["lam"] = eik.lam;
    j["kappa"] = eik.kappa;
    j["a_core"] = eik.a_core;
    j["files"]["phi0"] = phi_csv;
    j["files"]["dphi0"] = dphi_csv;
    write_json_file(j, dir + "/" + stem + ".json");
}

void write_ansatz_summary(const SpiralAnsatz& ansatz, const std::string& dir,
                          const std::string& stem)
{
    const std::string rho_csv = stem + "_rho.csv";
    const std::string phi_csv = stem + "_phi.csv";
    write_profile_csv(ansatz.rho, dir + "/" + rho_csv);
    write_profile_csv(ansatz.phi, dir + "/" + phi_csv);
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = "spiral_ansatz";
    j["delta"] = ansatz.delta;
    j["beta"] = ansatz.beta;
    j["eta"] = ansatz.params.eta;
    j["epsilon"] = ansatz.params.epsilon;
    j["dcoef"] = ansatz.params.dcoef;
    j["lambda_rot"] = ansatz.lambda_rot;
    j["kappa_pred"] = ansatz.kappa_pred;
    j["files"]["rho"] = rho_csv;
    j["files"]["phi"] = phi_csv;
    write_json_file(j, dir + "/" + stem + ".json");
}

} // namespace spiral
