#pragma once

// Modified Bessel functions I0, I1, K0, K1 restricted to real positive
// arguments, plus the ratio K1/K0. These are the building blocks for the
// radial Green's functions, the far field of the eikonal phase, and the
// composed spiral ansatz.
//
// Accuracy: ~1e-15 relative across the working range, from Chebyshev fits of
// the classical public-domain FNLIB tables (~31 significant digits carried in
// the coefficients), evaluated by Clenshaw recurrence.

namespace spiral {

// Which representation produced a value: the small/mid-argument one ("series",
// power series with logarithmic part, then a mid-range Chebyshev fit) or the
// large-argument scaled expansion ("asymptotic"). Exactly at the switch point
// both branches are valid and the evaluation is tagged "crossover".
enum class BesselRegime { series, asymptotic, crossover };

struct BesselEval {
    double z;            // argument the function was evaluated at
    double value;        // function value
    BesselRegime regime; // which branch produced it
};

// Branch switch point between the series-type and asymptotic-type
// representations, common to all four functions.
inline constexpr double bessel_regime_switch = 8.0;

// I1(z) overflows double range near z ~ 713; refuse beyond this documented cap
// (use bessel_I1_scaled for larger arguments).
inline constexpr double bessel_overflow_cap = 700.0;

// K0(z), K1(z): z <= 0 raises domain_error; z > bessel_overflow_cap raises
// range_error (the result would underflow to zero; use the scaled variants).
double bessel_K0(double z);
double bessel_K1(double z);

// I0(z), I1(z): z < 0 raises domain_error (z = 0 allowed);
// z > bessel_overflow_cap raises range_error.
double bessel_I0(double z);
double bessel_I1(double z);

// Exponentially scaled variants, finite for all z > 0:
//   K*_n(z) = e^{+z} K_n(z),  I*_n(z) = e^{-z} I_n(z).
double bessel_K0_scaled(double z);
double bessel_K1_scaled(double z);
double bessel_I0_scaled(double z);
double bessel_I1_scaled(double z);

// K1(z)/K0(z), computed as the quotient of the scaled functions so it is free
// of cancellation and underflow at arbitrarily large z. Diverges ~ 1/(z|log z|)
// as z -> 0+.
double bessel_ratio_K1_K0(double z);

// Evaluations with the regime tag recorded, for reproducibility of branch
// selection.
BesselEval bessel_K0_eval(double z);
BesselEval bessel_K1_eval(double z);
BesselEval bessel_I1_eval(double z);

namespace specfun_detail {
// Individual branch evaluators of the scaled functions, exposed so tests can
// check continuity across the switch point. "inner" is valid on (0, switch],
// "outer" on [switch, inf).
double k0_scaled_inner(double z);
double k0_scaled_outer(double z);
double k1_scaled_inner(double z);
double k1_scaled_outer(double z);
double i0_scaled_inner(double z);
double i0_scaled_outer(double z);
double i1_scaled_inner(double z);
double i1_scaled_outer(double z);
} // namespace specfun_detail

} // namespace spiral
