#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "spiral/kernels.hpp"
#include "spiral/radial.hpp"

// Slow/fast construction of rigidly rotating one-armed spiral solutions for
// the nonlocally coupled oscillatory medium. The pieces assemble in order:
//
//   solve_rho0      ->  core amplitude profile rho0(r)
//   compute_g       ->  effective well g(S) = (1 - rho0(S/delta)^2)/delta^2
//   split_g         ->  smooth core/far decomposition of g at a cutoff
//   core_mass_a     ->  signed first moment of the core part
//   solve_eikonal   ->  rotation eigenvalue Omega and phase profile phi0(S)
//   compute_R0      ->  leading amplitude correction on the slow scale
//   compose_spiral  ->  full ansatz rho(r) e^{i(phi(r) + theta)}
//   residual_polar  ->  defect of the ansatz in the preconditioned equation
//
// predict_kappa / predict_lambda expose the closed-form selection laws for
// the far-field wavenumber and rotation frequency. solve_zeta and
// solve_riccati_hopf_cole are the two scalar model problems used to validate
// the boundary-layer and log-derivative machinery independently.

namespace spiral {

// Amplitude equation solution: Delta_1 rho + (1 - rho^2) rho = 0 with
// rho(0) = 0 and the algebraic far-field closure at r_max. The profile rises
// monotonically from 0 to ~1 over a core of O(1) width.
struct Rho0Solution {
    RadialProfile profile;       // real-valued amplitude on the solve grid
    double residual_norm = 0.0;  // sup norm of the discrete residual
    double slope_at_origin = 0.0;// b in rho0 ~ b r near the core
};

// Damped-Newton finite-difference solve on the given grid. The grid must
// start at r = 0, reach r_max >= 50, and carry at least 2000 nodes so the
// far-field closure sits in the algebraic tail regime.
Rho0Solution solve_rho0(const RadialGrid& grid);

// Effective well seen on the slow scale S = delta * r:
// g(S) = (1 - rho0(S/delta)^2) / delta^2, sampled on the rescaled grid.
// Positive, ~1/delta^2 at the origin, decaying like 1/S^2 far out.
RadialProfile compute_g(const Rho0Solution& rho0, double delta);

// Core/far decomposition g = core + far with a C^1 ramp: the far factor
// vanishes below d_cut and equals one above 2 d_cut, so the core part is
// compactly supported and the sum recovers g to round-off.
struct GSplit {
    RadialProfile core;
    RadialProfile far;
};
GSplit split_g(const RadialProfile& g, double d_cut);

// Default cutoff: five core radii on the slow scale, where the core radius
// is the first r at which rho0 exceeds 0.9.
double default_d_cut(const Rho0Solution& rho0, double delta);

// Signed core mass a = -beta^2 * int_0^inf g_core(S) S dS (negative for
// beta != 0). Requires beta < 0 and a compactly supported g_core.
double core_mass_a(const RadialProfile& g_core, double beta);

// Rotation eigenvalue problem for the phase on the slow scale. The output
// bundles the eigenvalue with the phase profile and its radial derivative.
struct EikonalResult {
    double beta = 0.0;   // dispersion coefficient the solve was run at
    double d_cut = 0.0;  // cutoff used for the reported core mass
    double omega = 0.0;  // rotation eigenvalue Omega > 0 (0 for g == 0)
    double lam = 0.0;    // far-field decay rate Lambda = sqrt(-beta * Omega)
    double kappa = 0.0;  // slow-scale wavenumber Lambda / (-beta)
    double a_core = 0.0; // core mass at d_cut (diagnostic; negative)
    RadialProfile phi0;  // phase, normalized phi0(0) = 0
    RadialProfile dphi0; // radial phase gradient, > 0 for S > 0
};

// Solves Delta_0 phi - b (phi')^2 + Omega - b g = 0 (b = -beta > 0) via the
// log-derivative linearization Delta_0 y + (beta^2 g - b Omega) y = 0,
// closing at S_max against the decaying modified-Bessel log-derivative
// y'/y = -Lambda K1(Lambda S_max)/K0(Lambda S_max). The eigenvalue is
// bisected inside a bracket seeded by the exponential core-mass law
// Omega ~ 4 e^{-2 gamma_E} exp(2/a). g must be positive with an algebraic
// ~S^-2 tail; g == 0 returns the flat phase exactly.
EikonalResult solve_eikonal(const RadialProfile& g, double beta, double d_cut);

// Leading slow-scale amplitude correction R0(S) = -rho0(S/delta)
// (d phi0/dS)^2 / 2, evaluated on the phase grid. Nonpositive, tending to
// -kappa^2/2 far out.
RadialProfile compute_R0(const Rho0Solution& rho0, const EikonalResult& eik, double delta);

// Boundary-layer model problem (delta^2 Delta_1 - 2) zeta = -1 on a grid
// from the origin: zeta rises from 0 through a layer of width ~delta/sqrt(2)
// to the outer plateau 1/2. zeta1 = zeta - 1/2 is the decaying part.
struct ZetaSolution {
    RadialProfile zeta;
    RadialProfile zeta1;
};
ZetaSolution solve_zeta(double delta, const RadialGrid& grid);

// Singular Riccati model problem
//   q' + (a/x) q + b(x) q - c q^2 + d/x^2 = 0
// solved through the log-derivative substitution q = -(1/c) y'/y, which
// linearizes it to y'' + (a/x + b(x)) y' - (c d / x^2) y = 0. Integration
// starts from the Frobenius branch with positive index at the left edge of
// the grid (first node > 0 required) and runs outward; a zero of y raises
// pole_error with the crossing location. d = 0 returns q == 0. Requires
// c > 0, d >= 0, a >= 0.
RadialProfile solve_riccati_hopf_cole(double a, const std::function<double(double)>& b_of_x,
                                      double c, double d, const RadialGrid& grid);

// Far-field wavenumber selection law kappa = -(Lambda/beta) * delta /
// sqrt(eta - eps^2 D). Throws breakdown_error when eta - eps^2 D <= 0.
double predict_kappa(const EikonalResult& eik, double beta, double delta,
                     const KernelParams& params);

// Rotation frequency law lambda = beta + delta^2 Omega.
double predict_lambda(double beta, double delta, double omega);

// Composed spiral ansatz w(r, theta) = rho(r) e^{i (phi(r) + theta)} in the
// frame rotating at lambda_rot. First-order composition: the amplitude is
// rho0 on the stretched radius plus the slow correction delta^2 R0, the
// phase is phi0 on the slow radius; no higher-order terms are included.
struct SpiralAnsatz {
    double delta = 0.0;
    double beta = 0.0;
    KernelParams params;
    double lambda_rot = 0.0; // beta + delta^2 Omega
    double kappa_pred = 0.0; // predicted far-field wavenumber in r
    RadialProfile rho;       // real amplitude, rho(0) = 0
    RadialProfile phi;       // real phase, phi(0) = 0
};

// Assembles the ansatz on a uniform grid from the origin. r_max/n = 0 pick
// defaults sized to the input profiles (radius scaled by
// sqrt(eta - eps^2 D), at least 4000 nodes). delta = 0 degenerates to the
// bare amplitude profile with a flat phase.
SpiralAnsatz compose_spiral(const Rho0Solution& rho0, const EikonalResult& eik,
                            double delta, double beta, const KernelParams& params,
                            double r_max = 0.0, std::size_t n = 0);

// Defect of the ansatz in the rotating-frame equation preconditioned by
// (1 - eps^2 D Laplacian), split into the real (amplitude) and imaginary
// (phase) components after factoring out the spiral phase. Norms are radial
// L^2(r dr) over the window [1, S_max/2] expressed in the slow variable
// S = delta * r / sqrt(eta - eps^2 D) — the region where the slow
// construction is asserted order by order. An optional quintic saturation
// eps * c_quintic |w|^4 w can be included in the local nonlinearity.
struct PolarResidual {
    RadialProfile res_real;
    RadialProfile res_imag;
    double norm_real = 0.0;
    double norm_imag = 0.0;
    double window_lo = 0.0; // slow-variable bounds actually used
    double window_hi = 0.0;
};
PolarResidual residual_polar(const SpiralAnsatz& ansatz, double c_quintic = 0.0);

// JSON summaries for the two composite results: scalars inline, profiles as
// CSV files referenced by name. `stem` names the files (stem.json,
// stem_<field>.csv) inside `dir`, which must exist.
void write_eikonal_summary(const EikonalResult& eik, const std::string& dir,
                           const std::string& stem);
void write_ansatz_summary(const SpiralAnsatz& ansatz, const std::string& dir,
                          const std::string& stem);

} // namespace spiral
