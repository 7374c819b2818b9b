#include "spiral/simulator.hpp"

#include "spiral/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

namespace spiral {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ------------------------------------------------------------ small helpers

bool factors_into_small_primes(int n)
{
    if (n <= 0) return false;
    for (int p : {2, 3, 5, 7})
        while (n % p == 0) n /= p;
    return n == 1;
}

void check_field_matches(const Field2D& f, const SimConfig& cfg)
{
    if (f.n != cfg.n || f.length != cfg.length || f.basis != cfg.basis)
        throw precondition_error("simulator: field geometry does not match the "
                                 "configuration");
    const bool want_complex = cfg.model == ModelKind::nonlocal_cgl;
    if (f.planes.size() != 2 || f.complex_pair != want_complex)
        throw precondition_error("simulator: field layout does not match the "
                                 "configured model");
}

struct LineFit {
    double slope = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i];
        sxx += x[i] * x[i]; sxy += x[i] * y[i]; syy += y[i] * y[i];
    }
    LineFit f;
    const double vxx = n * sxx - sx * sx;
    const double vyy = n * syy - sy * sy;
    const double vxy = n * sxy - sx * sy;
    f.slope = vxy / vxx;
    // Zero-variance responses carry no phase information; report a dead fit
    // rather than 0/0.
    f.r2 = vyy > 1e-30 * (1.0 + sy * sy) ? vxy * vxy / (vxx * vyy) : 0.0;
    return f;
}

double wrap_angle(double a)
{
    return a - 2.0 * kPi * std::round(a / (2.0 * kPi));
}

// Phase/amplitude access that treats a complex field directly and a
// two-species field through the deviations from the plane means.
struct PhaseView {
    const Field2D* f = nullptr;
    double mu = 0.0, mv = 0.0;

    explicit PhaseView(const Field2D& field) : f(&field)
    {
        if (f->planes.size() != 2)
            throw precondition_error("simulator: need two planes to read a phase");
        if (!f->complex_pair) {
            const auto& u = f->planes[0];
            const auto& v = f->planes[1];
            for (double x : u) mu += x;
            for (double x : v) mv += x;
            mu /= double(u.size());
            mv /= double(v.size());
        }
    }

    double comp0(std::size_t k) const { return f->planes[0][k] - mu; }
    double comp1(std::size_t k) const { return f->planes[1][k] - mv; }
    double amp(std::size_t k) const { return std::hypot(comp0(k), comp1(k)); }
    double phase(std::size_t k) const { return std::atan2(comp1(k), comp0(k)); }

    // Bilinear interpolation of both components at physical (x, y), clamped
    // to the sampled rectangle.
    void sample(double x, double y, double& c0, double& c1) const
    {
        const double h = f->cell();
        const int n = f->n;
        auto pick = [&](double q) {
            double u = q / h - 0.5;
            u = std::clamp(u, 0.0, double(n - 1));
            const int i0 = std::min(int(u), n - 2);
            return std::pair<int, double>(i0, u - i0);
        };
        const auto [ix, tx] = pick(x);
        const auto [iy, ty] = pick(y);
        auto blend = [&](const std::vector<double>& p, double shift) {
            const double v00 = p[f->idx(std::size_t(iy), std::size_t(ix))] - shift;
            const double v01 = p[f->idx(std::size_t(iy), std::size_t(ix + 1))] - shift;
            const double v10 = p[f->idx(std::size_t(iy + 1), std::size_t(ix))] - shift;
            const double v11 = p[f->idx(std::size_t(iy + 1), std::size_t(ix + 1))] - shift;
            return (1 - ty) * ((1 - tx) * v00 + tx * v01) +
                   ty * ((1 - tx) * v10 + tx * v11);
        };
        c0 = blend(f->planes[0], mu);
        c1 = blend(f->planes[1], mv);
    }
};

// Amplitude minimum with ties broken toward the domain center, then a 3x3
// quadratic touch-up along each axis (clamped to half a cell).
void locate_core(const PhaseView& pv, double& cx, double& cy)
{
    const Field2D& f = *pv.f;
    const int n = f.n;
    const double mid = 0.5 * f.length;
    std::size_t bi = 0, bj = 0;
    double best = 1e300, best_d2 = 1e300;
    for (std::size_t i = 0; i < std::size_t(n); ++i)
        for (std::size_t j = 0; j < std::size_t(n); ++j) {
            const double a = pv.amp(f.idx(i, j));
            const double dx = f.coord(j) - mid, dy = f.coord(i) - mid;
            const double d2 = dx * dx + dy * dy;
            if (a < best || (a == best && d2 < best_d2)) {
                best = a; best_d2 = d2; bi = i; bj = j;
            }
        }
    double offx = 0.0, offy = 0.0;
    if (bi > 0 && bi + 1 < std::size_t(n) && bj > 0 && bj + 1 < std::size_t(n)) {
        const double c = pv.amp(f.idx(bi, bj));
        const double xl = pv.amp(f.idx(bi, bj - 1)), xr = pv.amp(f.idx(bi, bj + 1));
        const double yl = pv.amp(f.idx(bi - 1, bj)), yr = pv.amp(f.idx(bi + 1, bj));
        const double dxx = xl - 2.0 * c + xr, dyy = yl - 2.0 * c + yr;
        if (dxx > 0.0) offx = std::clamp(0.5 * (xl - xr) / dxx, -0.5, 0.5);
        if (dyy > 0.0) offy = std::clamp(0.5 * (yl - yr) / dyy, -0.5, 0.5);
    }
    cx = f.coord(bj) + offx * f.cell();
    cy = f.coord(bi) + offy * f.cell();
}

// ------------------------------------------------------- implicit-step data

// Per-mode solve data, built once per configuration. For the one-field model
// this is the scalar multiplier 1/(1 - dt (K + 1)); for the two-species
// model the entries of the 2x2 inverse of I - dt L(xi) with the coupling in
// the activator row only.
struct StepTables {
    std::vector<double> m;                    // cGL multiplier
    std::vector<double> a11, a12, a21, a22;   // two-species inverse entries
};

StepTables build_step_tables(const SimConfig& cfg)
{
    StepTables t;
    const int n = cfg.n;
    Field2D probe = Field2D::make(n, cfg.length, cfg.basis, 1, false);
    const double dt = cfg.dt;
    if (cfg.model == ModelKind::nonlocal_cgl) {
        t.m.resize(std::size_t(n) * std::size_t(n));
        for (int ki = 0; ki < n; ++ki)
            for (int kj = 0; kj < n; ++kj) {
                const double k = symbol_K(probe.mode_xi(ki, kj), cfg.params);
                t.m[std::size_t(ki) * n + kj] = 1.0 / (1.0 - dt * (k + 1.0));
            }
        return t;
    }
    const double er = cfg.coeff("eps_r", 0.2);
    const double al = cfg.coeff("alpha", 0.2);
    const std::size_t m2 = std::size_t(n) * std::size_t(n);
    t.a11.resize(m2); t.a12.resize(m2); t.a21.resize(m2); t.a22.resize(m2);
    for (int ki = 0; ki < n; ++ki)
        for (int kj = 0; kj < n; ++kj) {
            const double k = symbol_K(probe.mode_xi(ki, kj), cfg.params);
            const double m11 = 1.0 - dt * (k + 1.0); // activator: coupling + u
            const double m12 = dt;                   // activator: -v
            const double m21 = -dt * er;             // inhibitor: eps_r u
            const double m22 = 1.0 + dt * er * al;   // inhibitor: -eps_r alpha v
            const double det = m11 * m22 - m12 * m21;
            const std::size_t q = std::size_t(ki) * n + kj;
            t.a11[q] = m22 / det;
            t.a12[q] = -m12 / det;
            t.a21[q] = -m21 / det;
            t.a22[q] = m11 / det;
        }
    return t;
}

void step_inplace(Field2D& f, const SimConfig& cfg, const StepTables& t,
                  long step_index)
{
    const std::size_t m = std::size_t(f.n) * std::size_t(f.n);
    auto& p0 = f.planes[0];
    auto& p1 = f.planes[1];
    if (cfg.model == ModelKind::nonlocal_cgl) {
        const double beta = cfg.coeff("beta", -1.0);
        for (std::size_t k = 0; k < m; ++k) {
            const double re = p0[k], im = p1[k];
            const double a2 = re * re + im * im;
            p0[k] = re - cfg.dt * a2 * (re - beta * im);
            p1[k] = im - cfg.dt * a2 * (beta * re + im);
        }
    } else {
        for (std::size_t k = 0; k < m; ++k)
            p0[k] -= cfg.dt * p0[k] * p0[k] * p0[k]; // explicit -u^3 only
    }
    f.invalidate_spectral();
    f.sync_spectral();
    if (cfg.model == ModelKind::nonlocal_cgl) {
        for (auto& plane_hat : f.hat)
            for (std::size_t k = 0; k < m; ++k)
                plane_hat[k] *= t.m[k];
    } else {
        auto& hu = f.hat[0];
        auto& hv = f.hat[1];
        for (std::size_t k = 0; k < m; ++k) {
            const auto u = hu[k], v = hv[k];
            hu[k] = t.a11[k] * u + t.a12[k] * v;
            hv[k] = t.a21[k] * u + t.a22[k] * v;
        }
    }
    f.sync_physical();
    bool finite = true;
    for (double x : p0) finite = finite && std::isfinite(x);
    for (double x : p1) finite = finite && std::isfinite(x);
    if (!finite)
        throw blowup_error("simulator: non-finite field values", step_index);
}

// --------------------------------------------------------------- checksums

std::uint64_t fnv1a64(const void* data, std::size_t bytes, std::uint64_t h)
{
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string checksum_of(const Field2D& f)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& plane : f.planes)
        h = fnv1a64(plane.data(), plane.size() * sizeof(double), h);
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", (unsigned long long)h);
    return buf;
}

} // namespace

// -------------------------------------------------------------- SimConfig

const char* model_name(ModelKind m)
{
    return m == ModelKind::nonlocal_cgl ? "nonlocal_cgl" : "two_component";
}

const char* basis_name(SpectralBasis b)
{
    return b == SpectralBasis::cosine ? "cosine" : "periodic";
}

double SimConfig::coeff(const std::string& name, double fallback) const
{
    const auto it = model_coeffs.find(name);
    return it == model_coeffs.end() ? fallback : it->second;
}

void SimConfig::validate() const
{
    if (n < 8 || n > 8192)
        throw config_error("simulator: grid size out of range [8, 8192]");
    if (!factors_into_small_primes(n))
        throw config_error("simulator: grid size must factor into primes <= 7 "
                           "for the spectral transforms");
    if (!(length > 0.0))
        throw config_error("simulator: domain length must be positive");
    if (!(dt > 0.0))
        throw config_error("simulator: time step must be positive");
    if (steps < 0)
        throw config_error("simulator: step count must be nonnegative");
    params.validate();
    if (model == ModelKind::two_component) {
        if (!(coeff("eps_r", 0.2) > 0.0))
            throw config_error("simulator: inhibitor rate eps_r must be positive");
        if (coeff("alpha", 0.2) < 0.0)
            throw config_error("simulator: inhibitor coupling alpha must be "
                               "nonnegative");
    }
    if (seed == SeedKind::from_file && seed_file.empty())
        throw config_error("simulator: from_file seed needs seed_file");
}

// -------------------------------------------------------------- init_field

Field2D init_field(const SimConfig& cfg)
{
    cfg.validate();
    const bool cplx = cfg.model == ModelKind::nonlocal_cgl;

    if (cfg.seed == SeedKind::from_file) {
        const std::filesystem::path p(cfg.seed_file);
        const std::string dir = p.has_parent_path() ? p.parent_path().string()
                                                    : std::string(".");
        Field2D g = read_snapshot(dir, p.filename().string());
        if (g.n != cfg.n || g.length != cfg.length)
            throw format_error("simulator: seed snapshot shape " +
                               std::to_string(g.n) + " does not match the "
                               "configured grid");
        if (g.complex_pair != cplx)
            throw format_error("simulator: seed snapshot layout does not match "
                               "the configured model");
        g.basis = cfg.basis;
        g.invalidate_spectral();
        return g;
    }

    Field2D f = Field2D::make(cfg.n, cfg.length, cfg.basis, 2, cplx);
    const std::size_t n = std::size_t(cfg.n);

    if (cfg.seed == SeedKind::archimedean_phase) {
        // Pin the phase singularity on the sample point nearest the middle of
        // the square, so the amplitude zero sits on a grid cell exactly.
        const double cx = f.coord(n / 2);
        const double cy = f.coord(n / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double dx = f.coord(j) - cx;
                const double dy = f.coord(i) - cy;
                const double r = std::hypot(dx, dy);
                const double a = std::tanh(r);
                const double ph = std::atan2(dy, dx) + cfg.seed_kappa0 * r;
                f.planes[0][f.idx(i, j)] = a * std::cos(ph);
                f.planes[1][f.idx(i, j)] = a * std::sin(ph);
            }
        return f;
    }

    // Small-amplitude noise: modulus uniform in [0, 0.01], phase uniform.
    std::mt19937_64 gen(cfg.rng_seed);
    std::uniform_real_distribution<double> amp(0.0, 0.01);
    std::uniform_real_distribution<double> phs(0.0, 2.0 * kPi);
    for (std::size_t k = 0; k < n * n; ++k) {
        const double a = amp(gen);
        const double p = phs(gen);
        f.planes[0][k] = a * std::cos(p);
        f.planes[1][k] = a * std::sin(p);
    }
    return f;
}

// --------------------------------------------------------------- stepping

Field2D step_imex(const Field2D& f, const SimConfig& cfg, long step_index)
{
    cfg.validate();
    check_field_matches(f, cfg);
    const StepTables tables = build_step_tables(cfg);
    Field2D out = f;
    step_inplace(out, cfg, tables, step_index);
    return out;
}

// -------------------------------------------------------------- snapshots

void write_snapshot(const Field2D& f, const SimConfig& cfg, double t, long step,
                    const std::string& out_dir, const std::string& stem)
{
    namespace fs = std::filesystem;
    const fs::path raw = fs::path(out_dir) / (stem + ".f64");
    const fs::path side = fs::path(out_dir) / (stem + ".json");
    {
        std::ofstream out(raw, std::ios::binary);
        if (!out) throw config_error("cannot open " + raw.string() + " for writing");
        for (const auto& plane : f.planes)
            out.write(reinterpret_cast<const char*>(plane.data()),
                      std::streamsize(plane.size() * sizeof(double)));
        if (!out) throw config_error("write failed for " + raw.string());
    }
    nlohmann::json j;
    j["format_version"] = 1;
    j["n"] = f.n;
    j["length"] = f.length;
    j["t"] = t;
    j["step"] = step;
    j["model"] = model_name(cfg.model);
    j["layout"] = f.complex_pair ? "re_im" : "u_v";
    j["basis"] = basis_name(f.basis);
    j["planes"] = f.planes.size();
    j["checksum"] = checksum_of(f);
    std::ofstream out(side);
    if (!out) throw config_error("cannot open " + side.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw config_error("write failed for " + side.string());
}

Field2D read_snapshot(const std::string& out_dir, const std::string& stem,
                      double* t_out, long* step_out)
{
    namespace fs = std::filesystem;
    const fs::path raw = fs::path(out_dir) / (stem + ".f64");
    const fs::path side = fs::path(out_dir) / (stem + ".json");
    std::ifstream sin(side);
    if (!sin) throw config_error("cannot open " + side.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(sin);
    } catch (const nlohmann::json::exception& e) {
        throw format_error("snapshot sidecar " + side.string() + ": " + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != 1)
            throw format_error("snapshot sidecar " + side.string() +
                               ": unsupported format_version");
        const int n = j.at("n").get<int>();
        const double length = j.at("length").get<double>();
        const std::size_t planes = j.at("planes").get<std::size_t>();
        const std::string layout = j.at("layout").get<std::string>();
        const std::string basis = j.at("basis").get<std::string>();
        if (n <= 0 || planes < 1 || planes > 2)
            throw format_error("snapshot sidecar " + side.string() +
                               ": invalid geometry");
        Field2D f = Field2D::make(n, length,
                                  basis == "periodic" ? SpectralBasis::periodic
                                                      : SpectralBasis::cosine,
                                  planes, layout == "re_im");
        std::ifstream rin(raw, std::ios::binary);
        if (!rin) throw config_error("cannot open " + raw.string());
        for (auto& plane : f.planes)
            rin.read(reinterpret_cast<char*>(plane.data()),
                     std::streamsize(plane.size() * sizeof(double)));
        if (!rin || rin.gcount() != std::streamsize(f.planes.back().size() *
                                                    sizeof(double)))
            throw format_error("snapshot " + raw.string() +
                               ": payload shorter than the declared shape");
        rin.peek();
        if (!rin.eof())
            throw format_error("snapshot " + raw.string() +
                               ": payload longer than the declared shape");
        if (checksum_of(f) != j.at("checksum").get<std::string>())
            throw format_error("snapshot " + raw.string() + ": checksum mismatch");
        if (t_out) *t_out = j.at("t").get<double>();
        if (step_out) *step_out = j.at("step").get<long>();
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw format_error("snapshot sidecar " + side.string() + ": " + e.what());
    }
}

// -------------------------------------------------------------------- run

RunSummary run(const SimConfig& cfg, long snapshot_every, const std::string& out_dir)
{
    namespace fs = std::filesystem;
    cfg.validate();
    if (snapshot_every < 0)
        throw config_error("simulator: snapshot cadence must be nonnegative");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw config_error("cannot create " + out_dir + ": " + ec.message());

    const auto wall0 = std::chrono::steady_clock::now();
    RunSummary s;
    auto stem_for = [](long k) {
        char b[32];
        std::snprintf(b, sizeof b, "snap_%08ld", k);
        return std::string(b);
    };
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             wall0).count();
    };

    Field2D f = init_field(cfg);
    write_snapshot(f, cfg, 0.0, 0, out_dir, stem_for(0));
    s.snapshots.push_back(stem_for(0));

    // Retain the last three snapshot-cadence states for the frequency fit.
    std::vector<Field2D> recent{f};
    const StepTables tables = build_step_tables(cfg);

    auto write_summary_json = [&] {
        nlohmann::json j;
        j["format_version"] = 1;
        j["model"] = model_name(cfg.model);
        j["n"] = cfg.n;
        j["length"] = cfg.length;
        j["dt"] = cfg.dt;
        j["steps_completed"] = s.steps_completed;
        j["t_final"] = s.t_final;
        j["wall_seconds"] = s.wall_seconds;
        j["kappa_measured"] = s.final_measurement.kappa_measured;
        j["omega_measured"] = s.final_measurement.omega_measured;
        j["incoherence_score"] = s.final_measurement.incoherence_score;
        j["fit_r2"] = s.final_measurement.fit_r2;
        j["reliable"] = s.final_measurement.reliable;
        j["events"] = s.events;
        j["snapshots"] = s.snapshots;
        std::ofstream out(fs::path(out_dir) / "run_summary.json");
        if (!out) throw config_error("cannot open run_summary.json for writing");
        out << j.dump(2) << "\n";
    };

    for (long k = 1; k <= cfg.steps; ++k) {
        try {
            step_inplace(f, cfg, tables, k);
        } catch (const blowup_error&) {
            s.events.push_back("blow-up at step " + std::to_string(k) +
                               "; snapshots up to the previous cadence retained");
            s.wall_seconds = elapsed();
            write_summary_json();
            throw;
        }
        s.steps_completed = k;
        s.t_final = double(k) * cfg.dt;
        const bool cadence = snapshot_every > 0 && k % snapshot_every == 0;
        if (cadence || k == cfg.steps) {
            write_snapshot(f, cfg, s.t_final, k, out_dir, stem_for(k));
            s.snapshots.push_back(stem_for(k));
        }
        if (cadence) {
            recent.push_back(f);
            if (recent.size() > 3) recent.erase(recent.begin());
        }
    }

    s.final_measurement = measure_wavenumber(f);
    s.final_measurement.incoherence_score = detect_chimera(f);
    if (recent.size() >= 3) {
        try {
            s.final_measurement.omega_measured =
                measure_frequency(recent, double(snapshot_every) * cfg.dt);
        } catch (const error& e) {
            s.events.push_back(std::string("frequency fit unavailable: ") + e.what());
        }
    } else if (cfg.steps > 0) {
        s.events.push_back("frequency fit unavailable: fewer than 3 retained "
                           "snapshots");
    }
    s.wall_seconds = elapsed();
    write_summary_json();
    return s;
}

// ----------------------------------------------------------- measurements

PatternMeasurement measure_wavenumber(const Field2D& f)
{
    const PhaseView pv(f);
    PatternMeasurement out;
    double cx = 0.0, cy = 0.0;
    locate_core(pv, cx, cy);

    const double half = 0.5 * f.length;
    out.fit_window_lo = 0.25 * half;
    out.fit_window_hi = 0.45 * half;
    const double h = f.cell();

    double slope_sum = 0.0, r2_sum = 0.0;
    for (int ray = 0; ray < 8; ++ray) {
        const double ang = double(ray) * kPi / 4.0;
        std::vector<double> rs, ph;
        double prev = 0.0;
        double acc = 0.0;
        bool first = true;
        for (double r = out.fit_window_lo; r <= out.fit_window_hi; r += h) {
            double c0 = 0.0, c1 = 0.0;
            pv.sample(cx + r * std::cos(ang), cy + r * std::sin(ang), c0, c1);
            const double th = std::atan2(c1, c0);
            if (first) {
                acc = th;
                first = false;
            } else {
                acc += wrap_angle(th - prev);
            }
            prev = th;
            rs.push_back(r);
            ph.push_back(acc);
        }
        const LineFit lf = fit_line(rs, ph);
        slope_sum += lf.slope;
        r2_sum += lf.r2;
    }
    out.kappa_measured = std::abs(slope_sum / 8.0);
    out.fit_r2 = std::clamp(r2_sum / 8.0, 0.0, 1.0);
    out.reliable = out.fit_r2 >= 0.5;
    return out;
}

double measure_frequency(const std::vector<Field2D>& snaps, double dt_snapshot)
{
    if (snaps.size() < 3)
        throw precondition_error("frequency fit needs at least 3 snapshots");
    if (!(dt_snapshot > 0.0))
        throw precondition_error("frequency fit needs a positive snapshot spacing");
    const Field2D& f0 = snaps.front();
    for (const auto& s : snaps)
        if (s.n != f0.n || s.planes.size() != f0.planes.size())
            throw precondition_error("frequency fit: snapshots disagree in shape");

    // Probe ring well outside the core plus the domain center.
    const double half = 0.5 * f0.length;
    const double mid = half;
    std::vector<std::size_t> probes;
    auto cell_of = [&](double x, double y) {
        const double h = f0.cell();
        const auto cl = [&](double q) {
            return std::size_t(std::clamp(int(std::lround(q / h - 0.5)), 0, f0.n - 1));
        };
        return f0.idx(cl(y), cl(x));
    };
    for (int a = 0; a < 8; ++a) {
        const double ang = double(a) * kPi / 4.0;
        probes.push_back(cell_of(mid + 0.3 * half * std::cos(ang),
                                 mid + 0.3 * half * std::sin(ang)));
    }
    probes.push_back(cell_of(mid, mid));

    std::vector<PhaseView> views;
    views.reserve(snaps.size());
    for (const auto& s : snaps) views.emplace_back(s);

    double max_amp = 0.0;
    for (const auto& v : views)
        for (auto k : probes) max_amp = std::max(max_amp, v.amp(k));
    if (max_amp < 1e-12)
        throw undefined_error("frequency fit: no amplitude at the probe points");

    std::vector<double> ts(snaps.size());
    for (std::size_t m = 0; m < snaps.size(); ++m) ts[m] = double(m) * dt_snapshot;

    double slope_sum = 0.0;
    int used = 0;
    for (auto k : probes) {
        double lo = 1e300;
        for (const auto& v : views) lo = std::min(lo, v.amp(k));
        if (lo < 1e-6 * max_amp) continue; // probe crosses a phase defect
        std::vector<double> ph(snaps.size());
        double acc = views[0].phase(k);
        ph[0] = acc;
        for (std::size_t m = 1; m < snaps.size(); ++m) {
            acc += wrap_angle(views[m].phase(k) - views[m - 1].phase(k));
            ph[m] = acc;
        }
        slope_sum += fit_line(ts, ph).slope;
        ++used;
    }
    if (used == 0)
        throw undefined_error("frequency fit: all probe points sit on phase "
                              "defects");
    const double omega = slope_sum / double(used);
    if (std::abs(omega) * dt_snapshot > kPi)
        throw range_error("frequency fit: estimate aliases the snapshot cadence");
    return omega;
}

double detect_chimera(const Field2D& f)
{
    const PhaseView pv(f);
    const int n = f.n;

    // Core center: amplitude minimum (cell resolution is enough for a
    // median statistic).
    double cx = 0.0, cy = 0.0;
    locate_core(pv, cx, cy);

    const double half = 0.5 * f.length;
    const double r_core = 0.1 * half;
    const double far_lo = 0.3 * half, far_hi = 0.45 * half;

    std::vector<double> core, far;
    auto visit = [&](std::size_t ia, std::size_t ja, std::size_t ib, std::size_t jb) {
        const double x = 0.5 * (f.coord(ja) + f.coord(jb)) - cx;
        const double y = 0.5 * (f.coord(ia) + f.coord(ib)) - cy;
        const double r = std::hypot(x, y);
        const bool in_core = r <= r_core;
        const bool in_far = r >= far_lo && r <= far_hi;
        if (!in_core && !in_far) return;
        const double d = std::abs(wrap_angle(pv.phase(f.idx(ia, ja)) -
                                             pv.phase(f.idx(ib, jb))));
        (in_core ? core : far).push_back(d);
    };
    for (std::size_t i = 0; i < std::size_t(n); ++i)
        for (std::size_t j = 0; j < std::size_t(n); ++j) {
            if (j + 1 < std::size_t(n)) visit(i, j, i, j + 1);
            if (i + 1 < std::size_t(n)) visit(i, j, i + 1, j);
        }
    auto median = [](std::vector<double>& v) {
        if (v.empty()) return 0.0;
        const std::size_t m = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + long(m), v.end());
        return v[m];
    };
    const double mc = median(core);
    const double mf = median(far);
    return (mc + 1e-12) / (mf + 1e-12);
}

} // namespace spiral
