#pragma once

// Square 2-D fields with a lazily maintained spectral cache. A field is one
// or two real planes over an n x n grid on [0, L]^2:
//   - a complex field (oscillator amplitude) stores re/im as planes 0/1,
//   - a two-species field stores the species as planes 0/1.
// The spectral side is either a cosine (Neumann) expansion, sampled at cell
// centers x_j = (j + 1/2) L/n, or a periodic Fourier expansion. Transforms
// run through FFTW with per-thread cached plans.

#include <complex>
#include <cstddef>
#include <vector>

namespace spiral {

enum class SpectralBasis { cosine, periodic };

struct Field2D {
    int n = 0;
    double length = 0.0;
    SpectralBasis basis = SpectralBasis::cosine;
    bool complex_pair = true; // planes are re/im of one complex field

    // Physical samples, row-major, planes.size() in {1, 2}.
    std::vector<std::vector<double>> planes;

    // Spectral coefficients per plane. Cosine basis: real coefficients in
    // .real() (imag 0); periodic basis: the full complex DFT of the plane.
    mutable std::vector<std::vector<std::complex<double>>> hat;
    mutable bool hat_valid = false;

    static Field2D make(int n, double length, SpectralBasis basis,
                        std::size_t n_planes, bool complex_pair = true);

    std::size_t idx(std::size_t i, std::size_t j) const
    {
        return i * std::size_t(n) + j;
    }
    double cell() const { return length / n; }
    // Cell-center coordinate of index i (cosine sampling); also used for the
    // periodic basis so both bases sample the same physical locations.
    double coord(std::size_t i) const { return (double(i) + 0.5) * cell(); }

    // Physical values changed: drop the spectral cache.
    void invalidate_spectral() { hat_valid = false; }
    // Compute the cache from the planes if it is stale.
    void sync_spectral() const;
    // Overwrite the planes from the cache (cache stays valid).
    void sync_physical();

    // Radial wavenumber |xi| of the integer mode pair (ki, kj).
    double mode_xi(int ki, int kj) const;

    std::complex<double> value_at(std::size_t i, std::size_t j) const
    {
        return {planes[0][idx(i, j)],
                planes.size() > 1 ? planes[1][idx(i, j)] : 0.0};
    }
};

} // namespace spiral
