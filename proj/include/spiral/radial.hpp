#pragma once

// Radial grids, the operators Delta_n = d_rr + (1/r)d_r - n^2/r^2, explicit
// inverse formulas for (Delta_1 - Id) and for the first-order radial operator
// d_r + 1/r - lambda, and weighted-norm / decay diagnostics for profiles on
// [0, r_max].

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace spiral {

using cplx = std::complex<double>;

enum class GridSpacing { uniform, geometric_stretch };

struct RadialGrid {
    std::vector<double> nodes; // strictly increasing, last node = r_max
    GridSpacing spacing = GridSpacing::uniform;

    // Uniform grid r_i = (i+1) h, i = 0..n-1, h = r_max/n: the first node sits
    // at h, not 0, so profiles with 1/r behavior stay finite on the grid.
    static RadialGrid make_uniform(double r_max, std::size_t n);
    // Uniform grid that includes r = 0 as its first node (n+1 nodes).
    static RadialGrid make_uniform_from_zero(double r_max, std::size_t n);
    // Geometrically stretched grid: spacing grows by `ratio` per step.
    static RadialGrid make_stretched(double r_max, std::size_t n, double ratio);

    std::size_t size() const { return nodes.size(); }
    double r_max() const { return nodes.back(); }
    bool starts_at_zero() const { return !nodes.empty() && nodes.front() == 0.0; }
};

struct RadialProfile {
    RadialGrid grid;
    std::vector<cplx> values;
    std::optional<double> origin_power;   // u ~ r^alpha0 near 0, if known
    std::optional<cplx> infinity_limit;   // u -> limit as r -> inf, if known

    static RadialProfile zeros(const RadialGrid& g);
    // Sample a real- or complex-valued callable on the grid.
    template <class F>
    static RadialProfile sample(const RadialGrid& g, F&& f)
    {
        RadialProfile p;
        p.grid = g;
        p.values.reserve(g.size());
        for (double r : g.nodes) p.values.push_back(cplx(f(r)));
        return p;
    }

    std::size_t size() const { return values.size(); }
    std::vector<double> real_values() const;
    double max_abs() const;
};

// Throws precondition_error unless the profile's values are all finite and, if
// origin_power is declared, the log-log slope of |u| over the first decade of
// nodes matches it within 0.1.
void validate_profile(const RadialProfile& u);

// Second-order finite-difference Delta_n u (3-point stencils, one-sided at the
// endpoints). Precondition: >= 4 nodes; for n >= 1 a grid containing r = 0
// must carry u(0) = 0 (odd sector), else precondition_error. At an r = 0 node
// the singular terms are closed by the odd-symmetry limit (value 0).
RadialProfile apply_delta_n(const RadialProfile& u, int n);

// u solving (Delta_1 - Id) u = f, by quadrature against the explicit kernel
// built from I1 and K1:
//   u(r) = -[ I1(r) int_r^inf K1(s) f(s) s ds + K1(r) int_0^r I1(s) f(s) s ds ],
// with the tail beyond r_max closed analytically using the exponential decay
// of K1. Raises numerical_error when the grid under-resolves f (quadrature
// refinement estimate exceeds tolerance).
RadialProfile greens_inverse_delta1(const RadialProfile& f);

enum class FirstOrderBranch { from_infinity, from_origin };

// u solving d_r u + u/r - lambda u = f via the integrating factor r e^{-lambda r}:
//   from_infinity: u(r) = -(e^{lambda r}/r) int_r^inf e^{-lambda s} f(s) s ds
//   from_origin:   u(r) = +(e^{lambda r}/r) int_0^r  e^{-lambda s} f(s) s ds
// The from_origin branch exists as a decaying solution only when the pairing
// of f against the cokernel element e^{-lambda r} vanishes; it raises
// numerical_error when |solvability_integral| > 1e-6 * ||f||_max.
RadialProfile inverse_first_order(const RadialProfile& f, double lambda,
                                  FirstOrderBranch branch);

// int_0^inf Re f(r) e^{-lambda r} r dr by parabolic-segment quadrature on the
// grid, closed with the analytic exponential tail beyond r_max and a quadratic
// extrapolation below the first node.
double solvability_integral(const RadialProfile& f, double lambda);

struct WeightedNorm {
    double gamma = 0.0;  // far-field weight exponent
    double sigma = 0.0;  // origin weight exponent
    int s = 0;           // highest derivative order included
    double value = 0.0;
    // True when the last half of the domain carries most of the norm, i.e. the
    // value is r_max-dependent and the profile is not a member of the space.
    bool tail_dominated = false;
};

// Discrete version of the doubly weighted Sobolev-type norm
//   sum_{k<=s} || w_k(r) d^k u <r>^gamma ||_{L^2(r dr)},
// with origin weight m(r) = r (1 - chi(r)) for a quintic cutoff bridge chi
// (0 below r=1, 1 above r=2). Weight convention: the order-zero term uses
// w_0 = (1-chi) r^sigma + chi, so the far field is governed by <r>^gamma
// alone; derivative terms use w_k = (1-chi) r^{sigma+k}, vanishing with m
// beyond the bridge.
WeightedNorm weighted_norm(const RadialProfile& u, double gamma, double sigma, int s);

enum class ProfileRegion { origin, farfield };

struct DecayEstimate {
    double exponent = 0.0;      // alpha in |u| ~ r^alpha over the fit window
    double weight_bound = 0.0;  // admissible weight: gamma < -alpha-1 (far),
                                // sigma > -alpha-1 (origin), d = 2
    ProfileRegion region = ProfileRegion::farfield;
    bool sign_change_warning = false; // u changed sign in the window
    double fit_r2 = 0.0;
};

// Least-squares slope of log|u| against log r over the first decade of nodes
// (origin) or the last decade (farfield, after subtracting infinity_limit if
// set). Requires >= 10 usable nodes in the window; an all-zero window raises
// undefined_error.
DecayEstimate decay_exponent(const RadialProfile& u, ProfileRegion region);

// CSV serialization, columns r, re, im.
void write_profile_csv(const RadialProfile& u, const std::string& path);
RadialProfile read_profile_csv(const std::string& path);

// ---- shared numerical helpers (used across modules) ----

// Quintic bridge: 0 for r <= 1, 1 for r >= 2, C^2 transition in between.
double cutoff_chi(double r);

// Fourth-order (5-point) first derivative on a uniform grid; one-sided
// stencils of the same order at the boundary. Throws precondition_error on
// non-uniform grids or fewer than 6 nodes.
std::vector<double> derivative_uniform_4(const RadialGrid& g,
                                         const std::vector<double>& v);

// Cumulative integral C(i) = int_{origin or first node}^{r_i} g, by
// per-segment integration of the parabola through the three nearest nodes
// (O(h^4) composite on smooth integrands). When the grid starts at h > 0 the
// piece below the first node is closed by integrating the quadratic
// extrapolation through the first three nodes over [0, r_0].
std::vector<double> cumulative_integral(const RadialGrid& g,
                                        const std::vector<double>& integrand,
                                        bool close_origin_gap);

// Total integral over the grid (last entry of cumulative_integral).
double integrate(const RadialGrid& g, const std::vector<double>& integrand,
                 bool close_origin_gap);

// Thomas solve of a tridiagonal system (lower/diag/upper), real matrix with
// real or complex right-hand side. Throws numerical_error on a vanishing
// pivot. d is overwritten with the solution.
void solve_tridiagonal(const std::vector<double>& lower,
                       std::vector<double> diag,
                       const std::vector<double>& upper,
                       std::vector<double>& d);
void solve_tridiagonal(const std::vector<double>& lower,
                       std::vector<double> diag,
                       const std::vector<double>& upper,
                       std::vector<cplx>& d);

// Least-squares line fit y ~ slope x + intercept with coefficient of
// determination; the library's own copy (the test suite carries an
// independent one).
struct LineFitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LineFitResult fit_line_ls(const std::vector<double>& x, const std::vector<double>& y);

} // namespace spiral
