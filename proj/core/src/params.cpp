#include "npnslab/core/params.hpp"

#include "npnslab/core/errors.hpp"

#include <cmath>
#include <string>

namespace npnslab::core {

void Params::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(z1) || !finite(z2) || !finite(D1) || !finite(D2) || !finite(nu) || !finite(eps) ||
        !finite(lambda) || !finite(Lambda))
        throw ParameterError("params: non-finite value");
    if (!(z1 > 0.0)) throw ParameterError("z1 must be positive");
    if (!(z2 < 0.0)) throw ParameterError("z2 must be negative");
    if (!(D2 > 0.0)) throw ParameterError("D2 must be positive");
    if (!(D1 >= D2)) throw ParameterError("D1 must be >= D2");
    if (!(nu > 0.0)) throw ParameterError("nu must be positive");
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    if (K != 1.0) throw ParameterError("K is fixed to 1");
    if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
    if (!(lambda <= Lambda)) throw ParameterError("lambda must be <= Lambda");
}

BoundaryTrace BoundaryTrace::constant(int nx, double bottom_value, double top_value) {
    return BoundaryTrace{std::vector<double>(nx, bottom_value), std::vector<double>(nx, top_value)};
}

void BoundaryData::validate(const Params& p) const {
    const int nx = gamma1.nx();
    const BoundaryTrace* traces[] = {&gamma1, &gamma2, &W};
    for (const auto* t : traces) {
        if (t->nx() != nx || static_cast<int>(t->top.size()) != nx)
            throw InputError("boundary data: trace sizes differ");
        for (int i = 0; i < nx; ++i)
            if (!std::isfinite(t->bottom[i]) || !std::isfinite(t->top[i]))
                throw InputError("boundary data: non-finite trace value");
    }
    for (int i = 0; i < nx; ++i) {
        const double g1[2] = {gamma1.bottom[i], gamma1.top[i]};
        const double g2[2] = {gamma2.bottom[i], gamma2.top[i]};
        for (int w = 0; w < 2; ++w) {
            if (!(g1[w] > 0.0) || !(g2[w] > 0.0)) throw InputError("boundary data: gamma_i must be positive");
            const double scale = std::abs(p.z1 * g1[w]) + std::abs(p.z2 * g2[w]);
            if (std::abs(p.z1 * g1[w] + p.z2 * g2[w]) > 1e-12 * scale)
                throw InputError("boundary data: z1*gamma1 + z2*gamma2 != 0 at node " + std::to_string(i));
        }
    }
}

BoundaryData BoundaryData::electroneutral(const Params& p, BoundaryTrace gamma1, BoundaryTrace W) {
    BoundaryTrace g2 = gamma1;
    const double ratio = -p.z1 / p.z2;
    for (auto& v : g2.bottom) v *= ratio;
    for (auto& v : g2.top) v *= ratio;
    return BoundaryData{std::move(gamma1), std::move(g2), std::move(W)};
}

} // namespace npnslab::core
