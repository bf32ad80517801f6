#pragma once

#include "npnslab/core/grid.hpp"
#include "npnslab/core/params.hpp"

#include <functional>
#include <vector>

namespace npnslab::core {

/// Nodal values of a scalar function, row-major with y as the slow index.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const ChannelGrid& g, double value = 0.0);
    ScalarField(const ChannelGrid& g, std::vector<double> values);

    /// Samples f(x', y) at every node.
    static ScalarField from_function(const ChannelGrid& g, const std::function<double(double, double)>& f);

    [[nodiscard]] const ChannelGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::vector<double>& values() noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] double* row(int iy) noexcept { return values_.data() + grid_.index(0, iy); }
    [[nodiscard]] const double* row(int iy) const noexcept { return values_.data() + grid_.index(0, iy); }

    double& operator()(int ix, int iy) noexcept { return values_[grid_.index(ix, iy)]; }
    double operator()(int ix, int iy) const noexcept { return values_[grid_.index(ix, iy)]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    [[nodiscard]] double min() const;
    [[nodiscard]] double max() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] bool all_finite() const;

    /// Wall rows as a trace.
    [[nodiscard]] BoundaryTrace trace() const;
    /// Overwrites the wall rows.
    void set_trace(const BoundaryTrace& bc);

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double a);
    /// this += a * o
    ScalarField& axpy(double a, const ScalarField& o);

private:
    ChannelGrid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Velocity with components v (along x') and w (along y). Both are always stored;
/// in d = 1 the field is x'-independent and incompressibility forces w = 0.
struct VelocityField {
    ScalarField v;
    ScalarField w;

    VelocityField() = default;
    explicit VelocityField(const ChannelGrid& g) : v(g), w(g) {}
    VelocityField(ScalarField v_, ScalarField w_);

    [[nodiscard]] const ChannelGrid& grid() const noexcept { return v.grid(); }
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] bool all_finite() const { return v.all_finite() && w.all_finite(); }

    VelocityField& operator+=(const VelocityField& o);
    VelocityField& operator-=(const VelocityField& o);
    VelocityField& operator*=(double a);
    VelocityField& axpy(double a, const VelocityField& o);
};

VelocityField operator+(VelocityField a, const VelocityField& b);
VelocityField operator-(VelocityField a, const VelocityField& b);
VelocityField operator*(double s, VelocityField a);

/// Full solution snapshot of the epsilon problem.
struct State {
    double t = 0.0;
    ScalarField c1;
    ScalarField c2;
    VelocityField u;
    ScalarField psi;  // potential with the harmonic part Phi_W removed
    ScalarField p;

    [[nodiscard]] const ChannelGrid& grid() const noexcept { return c1.grid(); }
    /// Space charge z1 c1 + z2 c2.
    [[nodiscard]] ScalarField charge(const Params& prm) const;
};

} // namespace npnslab::core
