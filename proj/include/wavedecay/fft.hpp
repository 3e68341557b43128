#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <fftw3.h>

#include "wavedecay/grid.hpp"

namespace wavedecay {

// ---------------------------------------------------------------------------
// Real 1-D FFT pair (FFTW, deterministic FFTW_ESTIMATE plans) on the
// periodic extension of a Grid1D: n samples, period n*dx. Wavenumbers are
// xi_j = 2*pi*j/period for j = 0..n/2.
// ---------------------------------------------------------------------------
class RealSpectral {
  public:
    RealSpectral(int n, double period)
        : n_(n), period_(period),
          real_buf_(fftw_alloc_real(static_cast<size_t>(n))),
          cplx_buf_(fftw_alloc_complex(static_cast<size_t>(n / 2 + 1))) {
        if (n < 4) throw Error("RealSpectral: need at least 4 samples");
        fwd_ = fftw_plan_dft_r2c_1d(n_, real_buf_, cplx_buf_, FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_c2r_1d(n_, cplx_buf_, real_buf_, FFTW_ESTIMATE);
        xi_.resize(static_cast<size_t>(modes()));
        for (int j = 0; j < modes(); ++j)
            xi_[static_cast<size_t>(j)] = 2.0 * M_PI * j / period_;
    }

    explicit RealSpectral(const Grid1D& g)
        : RealSpectral(g.n, g.dx * static_cast<double>(g.n)) {}

    ~RealSpectral() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
        fftw_free(real_buf_);
        fftw_free(cplx_buf_);
    }

    RealSpectral(const RealSpectral&) = delete;
    RealSpectral& operator=(const RealSpectral&) = delete;

    int n() const { return n_; }
    int modes() const { return n_ / 2 + 1; }
    double period() const { return period_; }
    const std::vector<double>& xi() const { return xi_; }

    void forward(const std::vector<double>& in, std::vector<std::complex<double>>& out) {
        std::copy(in.begin(), in.end(), real_buf_);
        fftw_execute(fwd_);
        out.resize(static_cast<size_t>(modes()));
        for (int j = 0; j < modes(); ++j)
            out[static_cast<size_t>(j)] = {cplx_buf_[j][0], cplx_buf_[j][1]};
    }

    // normalized inverse (divides by n); preserves `in`
    void inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out) {
        for (int j = 0; j < modes(); ++j) {
            cplx_buf_[j][0] = in[static_cast<size_t>(j)].real();
            cplx_buf_[j][1] = in[static_cast<size_t>(j)].imag();
        }
        fftw_execute(inv_);
        out.resize(static_cast<size_t>(n_));
        const double s = 1.0 / static_cast<double>(n_);
        for (int i = 0; i < n_; ++i) out[static_cast<size_t>(i)] = real_buf_[i] * s;
    }

    // spectral d/dx on the periodic extension (Nyquist mode zeroed)
    void derivative(const std::vector<double>& in, std::vector<double>& out) {
        forward(in, work_);
        for (int j = 0; j < modes(); ++j) {
            const std::complex<double> v = work_[static_cast<size_t>(j)];
            work_[static_cast<size_t>(j)] =
                std::complex<double>(-xi_[static_cast<size_t>(j)] * v.imag(),
                                     xi_[static_cast<size_t>(j)] * v.real());
        }
        if (n_ % 2 == 0) work_[static_cast<size_t>(modes() - 1)] = 0.0;
        inverse(work_, out);
    }

  private:
    int n_;
    double period_;
    double* real_buf_;
    fftw_complex* cplx_buf_;
    fftw_plan fwd_;
    fftw_plan inv_;
    std::vector<double> xi_;
    std::vector<std::complex<double>> work_;
};

// ---------------------------------------------------------------------------
// Integrating-factor RK4 stepper for w_t = L w + N(w) with L diagonal in
// Fourier space (symbol sigma(xi)). The stiff constant-coefficient part is
// advanced exactly; N is evaluated in physical space by a callback.
// ---------------------------------------------------------------------------
class SpectralPropagator {
  public:
    using Nonlinearity =
        std::function<void(const std::vector<double>&, std::vector<double>&)>;

    SpectralPropagator(const Grid1D& grid,
                       const std::function<std::complex<double>(double)>& symbol)
        : fft_(grid), sigma_(static_cast<size_t>(fft_.modes())) {
        for (int j = 0; j < fft_.modes(); ++j)
            sigma_[static_cast<size_t>(j)] = symbol(fft_.xi()[static_cast<size_t>(j)]);
        // unpaired Nyquist mode: keep only the (real) dissipative part
        if (grid.n % 2 == 0) {
            auto& s = sigma_[static_cast<size_t>(fft_.modes() - 1)];
            s = std::complex<double>(s.real(), 0.0);
        }
    }

    RealSpectral& fft() { return fft_; }

    // exact constant-coefficient evolution w <- e^{sigma t} w
    void apply_symbol_exp(std::vector<double>& w, double t) {
        fft_.forward(w, spec_);
        for (size_t j = 0; j < sigma_.size(); ++j) spec_[j] *= std::exp(sigma_[j] * t);
        fft_.inverse(spec_, w);
    }

    // one IF-RK4 step; N(w, out) writes the nonlinear term into out
    void step(std::vector<double>& w, double dt, const Nonlinearity& N) {
        cache_exponentials(dt);
        const size_t m = sigma_.size();
        spec_.resize(m);

        fft_.forward(w, what_);
        N(w, phys_);
        fft_.forward(phys_, ahat_);

        // u1 = inv(E2 .* (what + dt/2 * ahat))
        for (size_t j = 0; j < m; ++j) spec_[j] = e2_[j] * (what_[j] + 0.5 * dt * ahat_[j]);
        fft_.inverse(spec_, stage_);
        N(stage_, phys_);
        fft_.forward(phys_, bhat_);

        // u2 = inv(E2 .* what + dt/2 * bhat)
        for (size_t j = 0; j < m; ++j) spec_[j] = e2_[j] * what_[j] + 0.5 * dt * bhat_[j];
        fft_.inverse(spec_, stage_);
        N(stage_, phys_);
        fft_.forward(phys_, chat_);

        // u3 = inv(E .* what + dt * E2 .* chat)
        for (size_t j = 0; j < m; ++j) spec_[j] = e1_[j] * what_[j] + dt * e2_[j] * chat_[j];
        fft_.inverse(spec_, stage_);
        N(stage_, phys_);
        fft_.forward(phys_, dhat_);

        for (size_t j = 0; j < m; ++j)
            spec_[j] = e1_[j] * what_[j] +
                       dt / 6.0 * (e1_[j] * ahat_[j] + 2.0 * e2_[j] * (bhat_[j] + chat_[j]) +
                                   dhat_[j]);
        fft_.inverse(spec_, w);
    }

    // fraction of spectral energy in the top third of the resolved modes
    double high_mode_energy_fraction(const std::vector<double>& w) {
        fft_.forward(w, spec_);
        double total = 0.0, high = 0.0;
        const int cut = 2 * fft_.modes() / 3;
        for (int j = 1; j < fft_.modes(); ++j) {
            const double e = std::norm(spec_[static_cast<size_t>(j)]);
            total += e;
            if (j >= cut) high += e;
        }
        return total > 0.0 ? high / total : 0.0;
    }

  private:
    void cache_exponentials(double dt) {
        if (dt == cached_dt_) return;
        e1_.resize(sigma_.size());
        e2_.resize(sigma_.size());
        for (size_t j = 0; j < sigma_.size(); ++j) {
            e1_[j] = std::exp(sigma_[j] * dt);
            e2_[j] = std::exp(sigma_[j] * (0.5 * dt));
        }
        cached_dt_ = dt;
    }

    RealSpectral fft_;
    std::vector<std::complex<double>> sigma_, e1_, e2_;
    std::vector<std::complex<double>> what_, ahat_, bhat_, chat_, dhat_, spec_;
    std::vector<double> stage_, phys_;
    double cached_dt_ = -1.0;
};

}  // namespace wavedecay
