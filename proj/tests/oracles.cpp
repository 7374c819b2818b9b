#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oracle {

namespace {

// Trapezoid value of f on [0, T] with m intervals.
template <class F>
double trapezoid(F&& f, double T, int m)
{
    const double h = T / m;
    double s = 0.5 * (f(0.0) + f(T));
    for (int i = 1; i < m; ++i) s += f(i * h);
    return s * h;
}

template <class F>
std::pair<double, double> refine_to_stability(F&& f, double T)
{
    double prev = trapezoid(f, T, 64);
    for (int m = 128; m <= (1 << 22); m *= 2) {
        const double cur = trapezoid(f, T, m);
        const double rel = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
        if (rel <= 1e-13) return {cur, rel};
        prev = cur;
    }
    throw std::runtime_error("oracle quadrature did not stabilize to 1e-13");
}

} // namespace

std::pair<double, double> bessel_K_refined(int n, double z)
{
    if (z <= 0.0) throw std::invalid_argument("bessel_K oracle: z must be positive");
    if (n != 0 && n != 1) throw std::invalid_argument("bessel_K oracle: n must be 0 or 1");
    // Truncate where z cosh T ~ 745 + margin for the cosh factor: the tail
    // beyond is below the double underflow threshold.
    const double arg = (745.0 + 40.0) / z;
    const double T = std::log(arg + std::sqrt(arg * arg + 1.0)); // acosh
    auto f = [n, z](double t) {
        const double c = std::cosh(t);
        const double e = std::exp(-z * c);
        return n == 0 ? e : e * c;
    };
    return refine_to_stability(f, T);
}

double bessel_K(int n, double z)
{
    return bessel_K_refined(n, z).first;
}

double bessel_I1(double z)
{
    if (z < 0.0) throw std::invalid_argument("bessel_I1 oracle: z must be nonnegative");
    const double pi = 3.14159265358979323846;
    auto f = [z](double th) { return std::exp(z * std::cos(th)) * std::cos(th); };
    return refine_to_stability(f, pi).first / pi;
}

namespace {

// Cash-Karp embedded 4(5) step for a first-order system in `dim` variables.
// Returns the fifth-order update and writes the embedded error estimate.
template <int dim, class RHS>
void cash_karp_step(RHS&& rhs, double x, const double* y, double h, double* y5,
                    double* err)
{
    static const double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
    static const double b21 = 0.2;
    static const double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
    static const double b41 = 0.3, b42 = -0.9, b43 = 1.2;
    static const double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0,
                        b54 = 35.0 / 27.0;
    static const double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                        b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                        b65 = 253.0 / 4096.0;
    static const double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                        c6 = 512.0 / 1771.0;
    static const double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                        d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                        d6 = c6 - 0.25;

    double k1[dim], k2[dim], k3[dim], k4[dim], k5[dim], k6[dim], t[dim];
    rhs(x, y, k1);
    for (int i = 0; i < dim; ++i) t[i] = y[i] + h * b21 * k1[i];
    rhs(x + a2 * h, t, k2);
    for (int i = 0; i < dim; ++i) t[i] = y[i] + h * (b31 * k1[i] + b32 * k2[i]);
    rhs(x + a3 * h, t, k3);
    for (int i = 0; i < dim; ++i)
        t[i] = y[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
    rhs(x + a4 * h, t, k4);
    for (int i = 0; i < dim; ++i)
        t[i] = y[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
    rhs(x + a5 * h, t, k5);
    for (int i = 0; i < dim; ++i)
        t[i] = y[i] +
               h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] + b64 * k4[i] + b65 * k5[i]);
    rhs(x + a6 * h, t, k6);
    for (int i = 0; i < dim; ++i) {
        y5[i] = y[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i]);
        err[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i]);
    }
}

// Advance the system from x to x_to with step-size control against a mixed
// absolute/relative tolerance; calls `record` after every accepted step.
template <int dim, class RHS, class Record>
void integrate_adaptive(RHS&& rhs, double& x, double* y, double x_to, double atol,
                        double rtol, Record&& record)
{
    double h = std::min(1e-4, x_to - x);
    int rejects_in_a_row = 0;
    while (x < x_to) {
        if (x + h > x_to) h = x_to - x;
        double y5[dim], err[dim];
        cash_karp_step<dim>(rhs, x, y, h, y5, err);
        double m = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            m = std::max(m, std::abs(err[i]) / sc);
        }
        if (m <= 1.0 || h <= 1e-12) {
            x += h;
            for (int i = 0; i < dim; ++i) y[i] = y5[i];
            record(x, y);
            rejects_in_a_row = 0;
        } else if (++rejects_in_a_row > 60) {
            throw std::runtime_error("oracle integrator: step control stalled");
        }
        const double grow = m > 0.0 ? 0.9 * std::pow(m, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        h = std::max(h, 1e-12);
    }
}

// One amplitude trajectory from the series start at r0 = 1e-3. Integration
// stops at r_stop or when the trajectory leaves the band |rho - 1| < 0.5
// past the core; the return value classifies the exit side (+1 overshoot,
// -1 undershoot/collapse), 0 if still in band at r_stop with rho < 1.
int amplitude_trajectory(double b, double r_stop,
                         const std::vector<double>& r_eval, std::vector<double>* out)
{
    auto rhs = [](double r, const double* y, double* dy) {
        dy[0] = y[1];
        dy[1] = -y[1] / r + y[0] / (r * r) - (1.0 - y[0] * y[0]) * y[0];
    };
    double r = 1e-3;
    double y[2] = {b * r * (1.0 - r * r / 8.0), b * (1.0 - 3.0 * r * r / 8.0)};
    std::size_t k = 0;
    if (out) {
        out->assign(r_eval.size(), 0.0);
        while (k < r_eval.size() && r_eval[k] <= r) (*out)[k++] = y[0];
    }
    int verdict = 0;
    auto classify = [&](double rho) {
        if (r > 2.0 && std::abs(rho - 1.0) > 0.5) verdict = rho > 1.0 ? +1 : -1;
    };
    while (r < r_stop && verdict == 0) {
        double r_next = r_stop;
        if (out && k < r_eval.size()) r_next = std::min(r_next, r_eval[k]);
        integrate_adaptive<2>(rhs, r, y, r_next, 1e-14, 1e-12,
                              [&](double, const double* s) { classify(s[0]); });
        if (out && k < r_eval.size() && r == r_eval[k]) (*out)[k++] = y[0];
    }
    if (verdict == 0 && y[0] > 1.0) verdict = +1;
    return verdict;
}

} // namespace

std::vector<double> shoot_amplitude(const std::vector<double>& r_eval, double* slope_out)
{
    for (std::size_t i = 0; i < r_eval.size(); ++i) {
        if (r_eval[i] > 16.0)
            throw std::invalid_argument("shoot_amplitude: samples past r = 16 exceed "
                                        "the separatrix resolution of double precision");
        if (i > 0 && r_eval[i] <= r_eval[i - 1])
            throw std::invalid_argument("shoot_amplitude: radii must increase");
    }
    double lo = 0.5, hi = 0.7;
    if (amplitude_trajectory(lo, 28.0, {}, nullptr) >= 0 ||
        amplitude_trajectory(hi, 28.0, {}, nullptr) <= 0)
        throw std::runtime_error("shoot_amplitude: slope bracket failed to classify");
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (amplitude_trajectory(mid, 28.0, {}, nullptr) > 0)
            hi = mid;
        else
            lo = mid;
    }
    const double b = 0.5 * (lo + hi);
    if (slope_out) *slope_out = b;
    std::vector<double> samples;
    amplitude_trajectory(b, r_eval.empty() ? 1.0 : r_eval.back(), r_eval, &samples);
    return samples;
}

std::vector<double> riccati_direct(double a, const std::function<double(double)>& b_of_x,
                                   double c, double d, double x0, double q0,
                                   const std::vector<double>& x_eval)
{
    for (std::size_t i = 0; i < x_eval.size(); ++i) {
        if (x_eval[i] < x0)
            throw std::invalid_argument("riccati_direct: samples must sit at x >= x0");
        if (i > 0 && x_eval[i] <= x_eval[i - 1])
            throw std::invalid_argument("riccati_direct: radii must increase");
    }
    auto rhs = [&](double x, const double* y, double* dy) {
        dy[0] = -(a / x) * y[0] - b_of_x(x) * y[0] + c * y[0] * y[0] - d / (x * x);
    };
    double x = x0;
    double y[1] = {q0};
    std::vector<double> out;
    out.reserve(x_eval.size());
    for (double xe : x_eval) {
        if (xe > x)
            integrate_adaptive<1>(rhs, x, y, xe, 1e-13, 1e-11, [](double, const double*) {});
        out.push_back(y[0]);
    }
    return out;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v)
{
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * (double(i) + double(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

} // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman: need two equal-length sequences, n >= 2");
    const auto ra = ranks(a), rb = ranks(b);
    const std::size_t n = a.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) { ma += ra[i]; mb += rb[i]; }
    ma /= double(n); mb /= double(n);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0)
        throw std::invalid_argument("spearman: a sequence is constant");
    return sab / std::sqrt(saa * sbb);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need two equal-length sequences, n >= 2");
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= double(n); my /= double(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: x is constant");
    LineFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return out;
}

} // namespace oracle
