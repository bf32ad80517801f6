#pragma once

#include <vector>

namespace npnslab::core {

/// Physical constants of the two-species system.
struct Params {
    double z1 = 1.0;
    double z2 = -1.0;
    double D1 = 1.0;
    double D2 = 1.0;
    double nu = 1.0;
    double eps = 0.1;
    double K = 1.0;       // coupling constant, fixed
    double lambda = 1.0;  // lower data bound
    double Lambda = 1.0;  // upper data bound

    /// Throws ParameterError naming the first violated invariant.
    void validate() const;

    [[nodiscard]] double D_star() const noexcept { return D2 < D1 ? D2 : D1; }
    /// z1 D1 - z2 D2, positive for admissible valences.
    [[nodiscard]] double kappa() const noexcept { return z1 * D1 - z2 * D2; }
};

/// Wall values of a field on y = 0 (bottom) and y = 1 (top), one entry per x' node.
struct BoundaryTrace {
    std::vector<double> bottom;
    std::vector<double> top;

    static BoundaryTrace constant(int nx, double bottom_value, double top_value);
    [[nodiscard]] int nx() const noexcept { return static_cast<int>(bottom.size()); }
};

struct BoundaryData {
    BoundaryTrace gamma1;
    BoundaryTrace gamma2;
    BoundaryTrace W;

    /// Positivity, matching sizes, finiteness and z1*gamma1 + z2*gamma2 = 0.
    void validate(const Params& p) const;

    /// gamma2 filled from gamma1 so that the electroneutral condition holds.
    static BoundaryData electroneutral(const Params& p, BoundaryTrace gamma1, BoundaryTrace W);
};

} // namespace npnslab::core
