#pragma once

// The nonlocal diffusive coupling: Fourier symbols of the convolution
// operator and its fourth-order companion, tabulation on wavenumber grids,
// application to mode-1 radial profiles through the banded resolvent
// factorization, and diagonal application to 2-D spectral fields.

#include "spiral/field2d.hpp"
#include "spiral/radial.hpp"

#include <vector>

namespace spiral {

struct KernelParams {
    double eta = 1.0;    // coupling strength, > 0
    double epsilon = 0.0; // bifurcation parameter, >= 0
    double dcoef = 1.0;  // spread of the coupling kernel, > 0

    double dtilde() const { return epsilon * epsilon * dcoef; }

    // Throws precondition_error unless eta > 0, dcoef > 0, epsilon >= 0.
    void validate() const;

    // The far-field wavenumber selection law needs eta - dtilde > 0; callers
    // that evaluate it must check this first.
    bool wavenumber_law_admissible() const { return eta - dtilde() > 0.0; }
    // Throws precondition_error when the selection law is inadmissible.
    void require_wavenumber_law() const;
};

// K-symbol: -eta xi^2 / (1 + dtilde xi^2). Zero at xi = 0, negative
// elsewhere, bounded below by -eta/dtilde when dtilde > 0.
double symbol_K(double xi, const KernelParams& p);

// Companion symbol: eta D xi^4 / (1 + dtilde xi^2), the higher-order part
// split off when the coupling is written as local diffusion plus remainder.
double symbol_J(double xi, const KernelParams& p);

struct SymbolTable {
    std::vector<double> xi_grid; // nonnegative, strictly increasing
    std::vector<double> k_hat;
    std::vector<double> j_hat;
};

// Tabulates both symbols; checks the table invariants (K zero at xi = 0,
// nonpositive and nonincreasing everywhere).
SymbolTable build_symbol_table(const std::vector<double>& xi_grid,
                               const KernelParams& p);

// Applies the coupling to a mode-1 radial profile u (odd sector, u(0) = 0):
// returns eta * v where (1 - dtilde * Delta_1) v = Delta_1 u, discretized by
// the second-order banded form of Delta_1 with an odd-symmetry ghost at the
// origin and the Robin closure v' + v/r_max = 0 at the outer edge.
RadialProfile apply_nonlocal_radial(const RadialProfile& u, const KernelParams& p);

enum class SymbolChoice { K, K_plus_identity };

// Multiplies the spectral coefficients of f by K(|xi|) (plus 1 when
// requested), |xi| built from the integer mode indices and the domain
// length. Returns a field with both representations in sync.
Field2D apply_symbol_2d(const Field2D& f, SymbolChoice which, const KernelParams& p);

} // namespace spiral
