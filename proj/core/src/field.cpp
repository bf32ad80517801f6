#include "npnslab/core/field.hpp"

#include "npnslab/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace npnslab::core {

namespace {
void require_same(const ChannelGrid& a, const ChannelGrid& b) {
    if (!(a == b)) throw InputError("field arithmetic: grid mismatch");
}
} // namespace

ScalarField::ScalarField(const ChannelGrid& g, double value) : grid_(g), values_(g.size(), value) {}

ScalarField::ScalarField(const ChannelGrid& g, std::vector<double> values) : grid_(g), values_(std::move(values)) {
    if (values_.size() != g.size()) throw InputError("scalar field: value count does not match grid");
}

ScalarField ScalarField::from_function(const ChannelGrid& g, const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) out(ix, iy) = f(g.x(ix), g.y(iy));
    return out;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

BoundaryTrace ScalarField::trace() const {
    const int nx = grid_.nx;
    BoundaryTrace t{std::vector<double>(row(0), row(0) + nx), std::vector<double>(row(grid_.ny - 1), row(grid_.ny - 1) + nx)};
    return t;
}

void ScalarField::set_trace(const BoundaryTrace& bc) {
    if (bc.nx() != grid_.nx || static_cast<int>(bc.top.size()) != grid_.nx)
        throw InputError("trace size does not match grid nx");
    std::copy(bc.bottom.begin(), bc.bottom.end(), row(0));
    std::copy(bc.top.begin(), bc.top.end(), row(grid_.ny - 1));
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same(grid_, o.grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same(grid_, o.grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double a) {
    for (double& v : values_) v *= a;
    return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& o) {
    require_same(grid_, o.grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * o.values_[i];
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
    require_same(a.grid(), b.grid());
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

VelocityField::VelocityField(ScalarField v_, ScalarField w_) : v(std::move(v_)), w(std::move(w_)) {
    require_same(v.grid(), w.grid());
}

double VelocityField::max_abs() const { return std::max(v.max_abs(), w.max_abs()); }

VelocityField& VelocityField::operator+=(const VelocityField& o) {
    v += o.v;
    w += o.w;
    return *this;
}

VelocityField& VelocityField::operator-=(const VelocityField& o) {
    v -= o.v;
    w -= o.w;
    return *this;
}

VelocityField& VelocityField::operator*=(double a) {
    v *= a;
    w *= a;
    return *this;
}

VelocityField& VelocityField::axpy(double a, const VelocityField& o) {
    v.axpy(a, o.v);
    w.axpy(a, o.w);
    return *this;
}

VelocityField operator+(VelocityField a, const VelocityField& b) { return a += b; }
VelocityField operator-(VelocityField a, const VelocityField& b) { return a -= b; }
VelocityField operator*(double s, VelocityField a) { return a *= s; }

ScalarField State::charge(const Params& prm) const {
    ScalarField rho(c1.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = prm.z1 * c1[i] + prm.z2 * c2[i];
    return rho;
}

} // namespace npnslab::core
