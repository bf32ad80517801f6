#include "npnslab/core/spectral.hpp"

#include "npnslab/core/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace npnslab::core {

namespace {
// FFTW planning is not thread-safe; plan execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

std::shared_ptr<const XSpectral> XSpectral::get(int nx) {
    static std::mutex cache_mutex;
    static std::map<int, std::shared_ptr<const XSpectral>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(nx);
    if (it != cache.end()) return it->second;
    auto sp = std::make_shared<const XSpectral>(nx);
    cache.emplace(nx, sp);
    return sp;
}

XSpectral::XSpectral(int nx) : nx_(nx) {
    if (nx < 1 || (nx & (nx - 1)) != 0) throw InputError("spectral: nx must be a power of two");
    if (nx_ > 1) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        std::vector<double> r(nx_);
        std::vector<fftw_complex> c(nmodes());
        plan_r2c_ = fftw_plan_dft_r2c_1d(nx_, r.data(), c.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
        plan_c2r_ = fftw_plan_dft_c2r_1d(nx_, c.data(), r.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan_r2c_ || !plan_c2r_) throw std::runtime_error("spectral: FFTW planning failed");
    }
    dx_.assign(static_cast<std::size_t>(nx_) * nx_, 0.0);
    dxx_.assign(static_cast<std::size_t>(nx_) * nx_, 0.0);
    std::vector<double> e(nx_), col(nx_);
    for (int l = 0; l < nx_; ++l) {
        std::fill(e.begin(), e.end(), 0.0);
        e[l] = 1.0;
        apply_symbol(e.data(), col.data(), false);
        for (int j = 0; j < nx_; ++j) dx_[static_cast<std::size_t>(j) * nx_ + l] = col[j];
        apply_symbol(e.data(), col.data(), true);
        for (int j = 0; j < nx_; ++j) dxx_[static_cast<std::size_t>(j) * nx_ + l] = col[j];
    }
}

XSpectral::~XSpectral() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_r2c_) fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
    if (plan_c2r_) fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
}

void XSpectral::forward(const double* in, std::complex<double>* out) const {
    if (nx_ == 1) {
        out[0] = in[0];
        return;
    }
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void XSpectral::inverse(const std::complex<double>* in, double* out) const {
    if (nx_ == 1) {
        out[0] = in[0].real();
        return;
    }
    // c2r destroys its input
    std::vector<std::complex<double>> tmp(in, in + nmodes());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_), reinterpret_cast<fftw_complex*>(tmp.data()), out);
    const double s = 1.0 / nx_;
    for (int j = 0; j < nx_; ++j) out[j] *= s;
}

double XSpectral::wavenumber(int m) const noexcept { return 2.0 * std::numbers::pi * m; }

double XSpectral::first_symbol(int m) const noexcept {
    if (nx_ > 1 && 2 * m == nx_) return 0.0;
    return wavenumber(m);
}

double XSpectral::second_symbol(int m) const noexcept {
    const double k = wavenumber(m);
    return -k * k;
}

void XSpectral::apply_symbol(const double* in, double* out, bool second) const {
    if (nx_ == 1) {
        out[0] = 0.0;
        return;
    }
    std::vector<std::complex<double>> c(nmodes());
    forward(in, c.data());
    for (int m = 0; m < nmodes(); ++m) {
        if (second)
            c[m] *= second_symbol(m);
        else
            c[m] *= std::complex<double>(0.0, first_symbol(m));
    }
    c[0] = std::complex<double>(c[0].real() * (second ? 1.0 : 0.0), 0.0);
    if (nx_ % 2 == 0) c[nx_ / 2] = std::complex<double>(c[nx_ / 2].real(), 0.0);
    inverse(c.data(), out);
}

void XSpectral::dx(const double* in, double* out) const { apply_symbol(in, out, false); }
void XSpectral::dxx(const double* in, double* out) const { apply_symbol(in, out, true); }

} // namespace npnslab::core
