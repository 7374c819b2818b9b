#include "spiral/field2d.hpp"

#include "spiral/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace spiral {

namespace {

// FFTW's planner mutates global state; serialize plan creation/destruction.
std::mutex planner_mutex;

// Per-thread cached r2r workspace for the cosine basis (REDFT10/REDFT01 in
// both dimensions). Executing a cached plan on its own buffers is safe
// without locks.
struct CosineWorkspace {
    int n = 0;
    double* buf_in = nullptr;
    double* buf_out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    void release()
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf_in) fftw_free(buf_in);
        if (buf_out) fftw_free(buf_out);
        fwd = bwd = nullptr;
        buf_in = buf_out = nullptr;
        n = 0;
    }
    void ensure(int n_req)
    {
        if (n == n_req) return;
        release();
        std::lock_guard<std::mutex> lock(planner_mutex);
        const std::size_t m = std::size_t(n_req) * std::size_t(n_req);
        buf_in = fftw_alloc_real(m);
        buf_out = fftw_alloc_real(m);
        fwd = fftw_plan_r2r_2d(n_req, n_req, buf_in, buf_out, FFTW_REDFT10,
                               FFTW_REDFT10, FFTW_ESTIMATE);
        bwd = fftw_plan_r2r_2d(n_req, n_req, buf_in, buf_out, FFTW_REDFT01,
                               FFTW_REDFT01, FFTW_ESTIMATE);
        if (!buf_in || !buf_out || !fwd || !bwd)
            throw numerical_error("field2d: cosine transform plan creation failed");
        n = n_req;
    }
    ~CosineWorkspace() { release(); }
};

// Per-thread cached complex workspace for the periodic basis.
struct PeriodicWorkspace {
    int n = 0;
    fftw_complex* buf_in = nullptr;
    fftw_complex* buf_out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    void release()
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf_in) fftw_free(buf_in);
        if (buf_out) fftw_free(buf_out);
        fwd = bwd = nullptr;
        buf_in = buf_out = nullptr;
        n = 0;
    }
    void ensure(int n_req)
    {
        if (n == n_req) return;
        release();
        std::lock_guard<std::mutex> lock(planner_mutex);
        const std::size_t m = std::size_t(n_req) * std::size_t(n_req);
        buf_in = fftw_alloc_complex(m);
        buf_out = fftw_alloc_complex(m);
        fwd = fftw_plan_dft_2d(n_req, n_req, buf_in, buf_out, FFTW_FORWARD,
                               FFTW_ESTIMATE);
        bwd = fftw_plan_dft_2d(n_req, n_req, buf_in, buf_out, FFTW_BACKWARD,
                               FFTW_ESTIMATE);
        if (!buf_in || !buf_out || !fwd || !bwd)
            throw numerical_error("field2d: periodic transform plan creation failed");
        n = n_req;
    }
    ~PeriodicWorkspace() { release(); }
};

thread_local CosineWorkspace tl_cosine;
thread_local PeriodicWorkspace tl_periodic;

} // namespace

Field2D Field2D::make(int n, double length, SpectralBasis basis,
                      std::size_t n_planes, bool complex_pair)
{
    if (n < 2) throw precondition_error("field2d: need n >= 2 points per side");
    if (!(length > 0.0)) throw precondition_error("field2d: domain length must be positive");
    if (n_planes != 1 && n_planes != 2)
        throw precondition_error("field2d: a field has one or two planes");
    Field2D f;
    f.n = n;
    f.length = length;
    f.basis = basis;
    f.complex_pair = complex_pair;
    f.planes.assign(n_planes,
                    std::vector<double>(std::size_t(n) * std::size_t(n), 0.0));
    return f;
}

void Field2D::sync_spectral() const
{
    if (hat_valid) return;
    const std::size_t m = std::size_t(n) * std::size_t(n);
    hat.assign(planes.size(), std::vector<std::complex<double>>(m));
    if (basis == SpectralBasis::cosine) {
        tl_cosine.ensure(n);
        for (std::size_t p = 0; p < planes.size(); ++p) {
            std::memcpy(tl_cosine.buf_in, planes[p].data(), m * sizeof(double));
            fftw_execute(tl_cosine.fwd);
            for (std::size_t i = 0; i < m; ++i) hat[p][i] = tl_cosine.buf_out[i];
        }
    } else {
        tl_periodic.ensure(n);
        for (std::size_t p = 0; p < planes.size(); ++p) {
            for (std::size_t i = 0; i < m; ++i) {
                tl_periodic.buf_in[i][0] = planes[p][i];
                tl_periodic.buf_in[i][1] = 0.0;
            }
            fftw_execute(tl_periodic.fwd);
            for (std::size_t i = 0; i < m; ++i)
                hat[p][i] = {tl_periodic.buf_out[i][0], tl_periodic.buf_out[i][1]};
        }
    }
    hat_valid = true;
}

void Field2D::sync_physical()
{
    if (!hat_valid)
        throw precondition_error("field2d: no valid spectral data to invert");
    const std::size_t m = std::size_t(n) * std::size_t(n);
    if (basis == SpectralBasis::cosine) {
        tl_cosine.ensure(n);
        const double scale = 1.0 / (4.0 * double(n) * double(n));
        for (std::size_t p = 0; p < planes.size(); ++p) {
            for (std::size_t i = 0; i < m; ++i)
                tl_cosine.buf_in[i] = hat[p][i].real();
            fftw_execute(tl_cosine.bwd);
            for (std::size_t i = 0; i < m; ++i)
                planes[p][i] = tl_cosine.buf_out[i] * scale;
        }
    } else {
        tl_periodic.ensure(n);
        const double scale = 1.0 / (double(n) * double(n));
        for (std::size_t p = 0; p < planes.size(); ++p) {
            for (std::size_t i = 0; i < m; ++i) {
                tl_periodic.buf_in[i][0] = hat[p][i].real();
                tl_periodic.buf_in[i][1] = hat[p][i].imag();
            }
            fftw_execute(tl_periodic.bwd);
            // The physical planes are real; the imaginary part of the inverse
            // is round-off as long as the spectral data kept the conjugate
            // symmetry of a real plane.
            for (std::size_t i = 0; i < m; ++i)
                planes[p][i] = tl_periodic.buf_out[i][0] * scale;
        }
    }
}

double Field2D::mode_xi(int ki, int kj) const
{
    if (basis == SpectralBasis::cosine) {
        const double pi = 3.14159265358979323846;
        return pi * std::hypot(double(ki), double(kj)) / length;
    }
    const int si = ki <= n / 2 ? ki : ki - n;
    const int sj = kj <= n / 2 ? kj : kj - n;
    const double two_pi = 6.28318530717958647692;
    return two_pi * std::hypot(double(si), double(sj)) / length;
}

} // namespace spiral
