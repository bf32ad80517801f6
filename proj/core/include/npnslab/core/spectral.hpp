#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace npnslab::core {

/// Real Fourier transform along the periodic direction (unit period), backed by FFTW.
/// Instances are immutable and shared per nx; execution is thread-safe.
class XSpectral {
public:
    static std::shared_ptr<const XSpectral> get(int nx);

    explicit XSpectral(int nx);
    ~XSpectral();
    XSpectral(const XSpectral&) = delete;
    XSpectral& operator=(const XSpectral&) = delete;

    [[nodiscard]] int nx() const noexcept { return nx_; }
    [[nodiscard]] int nmodes() const noexcept { return nx_ / 2 + 1; }

    /// Unnormalized forward transform: out has nmodes() entries.
    void forward(const double* in, std::complex<double>* out) const;
    /// Inverse transform including the 1/nx normalization.
    void inverse(const std::complex<double>* in, double* out) const;

    /// 2 pi m
    [[nodiscard]] double wavenumber(int m) const noexcept;
    /// Symbol of d/dx' divided by i; zero on the Nyquist mode.
    [[nodiscard]] double first_symbol(int m) const noexcept;
    /// Symbol of d2/dx'2 (Nyquist included).
    [[nodiscard]] double second_symbol(int m) const noexcept;

    /// Dense collocation matrices (row-major nx*nx) equal to the spectral operators.
    [[nodiscard]] const std::vector<double>& dx_matrix() const noexcept { return dx_; }
    [[nodiscard]] const std::vector<double>& dxx_matrix() const noexcept { return dxx_; }

    /// out = d/dx' in, out = d2/dx'2 in (one row of nx values).
    void dx(const double* in, double* out) const;
    void dxx(const double* in, double* out) const;

private:
    int nx_;
    void* plan_r2c_ = nullptr;
    void* plan_c2r_ = nullptr;
    std::vector<double> dx_;
    std::vector<double> dxx_;

    void apply_symbol(const double* in, double* out, bool second) const;
};

} // namespace npnslab::core
