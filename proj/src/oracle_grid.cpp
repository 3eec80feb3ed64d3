#include "tdho/oracle.hpp"

#include "tdho/error.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

namespace tdho {

namespace {

using cplx = std::complex<double>;

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class FftPair {
public:
    explicit FftPair(std::size_t n) : n_(n) {
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        std::lock_guard lock(planner_mutex());
        fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPair() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    FftPair(const FftPair&) = delete;
    FftPair& operator=(const FftPair&) = delete;

    cplx* data() { return reinterpret_cast<cplx*>(buf_); }
    void forward() { fftw_execute(fwd_); }
    // unnormalized
    void backward() { fftw_execute(bwd_); }

private:
    std::size_t n_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
};

std::vector<double> wavenumbers(const GridGeometry& g) {
    const std::size_t n = g.n;
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * g.dx());
    std::vector<double> k(n);
    for (std::size_t j = 0; j < n; ++j)
        k[j] = dk * (j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n));
    return k;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

GridGeometry auto_box(const GaussianState& state) {
    const double sigma = std::sqrt(state.cov_xx);
    const double half = std::abs(state.mean_x) + 10.0 * sigma;
    std::size_t n = 64;
    while (2.0 * half / static_cast<double>(n) > sigma / 16.0) n *= 2;
    return {-half, half, n};
}

GridState::GridState(GridGeometry geom, std::vector<cplx> amplitudes)
    : geom_(geom), psi_(std::move(amplitudes)) {
    if (geom_.n < 4 || (geom_.n & (geom_.n - 1)) != 0)
        throw UsageError("grid size must be a power of two >= 4, got " + std::to_string(geom_.n));
    if (!(geom_.x_max > geom_.x_min)) throw UsageError("grid needs x_max > x_min");
    if (psi_.size() != geom_.n) throw UsageError("grid amplitude count does not match the geometry");
}

GridState GridState::from_gaussian(const GaussianState& g, const GridGeometry& geom) {
    std::vector<cplx> psi(geom.n);
    for (std::size_t i = 0; i < geom.n; ++i) psi[i] = g.amplitude(geom.x(i));
    GridState s(geom, std::move(psi));
    const double nrm = std::sqrt(s.norm());
    for (auto& v : s.psi_) v /= nrm;
    if (s.edge_density() > 1e-12)
        throw BoxOverflowError("Gaussian not contained in the grid box (edge density " + fmt(s.edge_density()) +
                                   ")",
                               0.0);
    return s;
}

double GridState::norm() const {
    double acc = 0.0;
    for (const auto& v : psi_) acc += std::norm(v);
    return acc * geom_.dx();
}

double GridState::edge_density() const {
    double worst = 0.0;
    const std::size_t n = psi_.size();
    for (std::size_t i = 0; i < 4; ++i) worst = std::max({worst, std::norm(psi_[i]), std::norm(psi_[n - 1 - i])});
    return worst;
}

GridMoments GridState::moments() const {
    const std::size_t n = geom_.n;
    const double dx = geom_.dx();
    double w = 0.0, sx = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = std::norm(psi_[i]) * dx;
        const double x = geom_.x(i);
        w += rho;
        sx += rho * x;
        sxx += rho * x * x;
    }
    const double mx = sx / w;

    FftPair fft(n);
    std::copy(psi_.begin(), psi_.end(), fft.data());
    fft.forward();
    const auto k = wavenumbers(geom_);
    double kw = 0.0, sk = 0.0, skk = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double r = std::norm(fft.data()[j]);
        kw += r;
        sk += r * k[j];
        skk += r * k[j] * k[j];
    }
    const double mp = sk / kw;

    // p psi back in position space, then Re <psi| x p |psi>
    for (std::size_t j = 0; j < n; ++j) fft.data()[j] *= k[j] / static_cast<double>(n);
    fft.backward();
    double sxp = 0.0;
    for (std::size_t i = 0; i < n; ++i) sxp += (std::conj(psi_[i]) * geom_.x(i) * fft.data()[i]).real() * dx;
    sxp /= w;

    return {mx, mp, sxx / w - mx * mx, sxp - mx * mp, skk / kw - mp * mp};
}

GridState grid_propagate(const OscillatorProfile& profile, const GridState& psi0, double t, std::size_t steps,
                         const SplitStepOptions& opts) {
    const double t0 = opts.t_start;
    if (t == t0) return psi0;
    if (!(t > t0)) throw UsageError("grid_propagate needs t > t_start");
    if (steps == 0) throw UsageError("grid_propagate needs at least one step");
    if (!profile.domain().contains(t0) || !profile.domain().contains(t))
        throw DomainError("grid propagation interval leaves the profile domain");

    const GridGeometry& g = psi0.geometry();
    const std::size_t n = g.n;
    const double dt = (t - t0) / static_cast<double>(steps);
    const auto k = wavenumbers(g);
    std::vector<double> x2(n);
    for (std::size_t i = 0; i < n; ++i) x2[i] = g.x(i) * g.x(i);

    FftPair fft(n);
    cplx* psi = fft.data();
    std::copy(psi0.amplitudes().begin(), psi0.amplitudes().end(), psi);
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<cplx> half_pot(n), kin(n);
    for (std::size_t s = 0; s < steps; ++s) {
        const double tm = t0 + (static_cast<double>(s) + 0.5) * dt;
        const ProfileSample p = profile.eval(tm);
        const double spring = 0.5 * p.mass * p.freq_sq;
        for (std::size_t i = 0; i < n; ++i) {
            const double ph = -0.5 * dt * spring * x2[i];
            half_pot[i] = {std::cos(ph), std::sin(ph)};
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double ph = -dt * k[j] * k[j] / (2.0 * p.mass);
            kin[j] = cplx(std::cos(ph), std::sin(ph)) * inv_n;
        }

        for (std::size_t i = 0; i < n; ++i) psi[i] *= half_pot[i];
        fft.forward();
        for (std::size_t j = 0; j < n; ++j) psi[j] *= kin[j];
        fft.backward();
        for (std::size_t i = 0; i < n; ++i) psi[i] *= half_pot[i];

        double edge = 0.0;
        for (std::size_t i = 0; i < 4; ++i) edge = std::max({edge, std::norm(psi[i]), std::norm(psi[n - 1 - i])});
        if (edge > opts.containment)
            throw BoxOverflowError("wavefunction reached the grid boundary at t = " + fmt(tm + 0.5 * dt) +
                                       " (edge density " + fmt(edge) + "); enlarge the box",
                                   tm + 0.5 * dt);
    }
    return GridState(g, std::vector<cplx>(psi, psi + n));
}

std::complex<double> overlap(const GridState& a, const GridState& b) {
    if (!(a.geometry() == b.geometry())) throw UsageError("overlap needs identical grids");
    cplx acc = 0.0;
    const auto pa = a.amplitudes(), pb = b.amplitudes();
    for (std::size_t i = 0; i < pa.size(); ++i) acc += std::conj(pa[i]) * pb[i];
    return acc * a.geometry().dx();
}

double fidelity(const GridState& a, const GridState& b) { return std::min(1.0, std::abs(overlap(a, b))); }

GridState oscillator_eigenstate(unsigned order, const GridGeometry& geom) {
    std::vector<cplx> psi(geom.n);
    for (std::size_t i = 0; i < geom.n; ++i) {
        const double x = geom.x(i);
        // physicists' Hermite recurrence
        double h0 = 1.0, h1 = 2.0 * x;
        double h = order == 0 ? h0 : h1;
        for (unsigned k = 2; k <= order; ++k) {
            h = 2.0 * x * h1 - 2.0 * (k - 1) * h0;
            h0 = h1;
            h1 = h;
        }
        psi[i] = h * std::exp(-0.5 * x * x);
    }
    GridState s(geom, std::move(psi));
    const double nrm = std::sqrt(s.norm());
    std::vector<cplx> scaled(s.amplitudes().begin(), s.amplitudes().end());
    for (auto& v : scaled) v /= nrm;
    return GridState(geom, std::move(scaled));
}

} // namespace tdho
