#pragma once

#include "npnslab/core/field.hpp"

#include <string>
#include <vector>

namespace npnslab::layers {

enum class Wall { left, right };

struct FastVariables {
    double tau = 0.0;  // t / eps^2
    double xi = 0.0;   // y / eps
    double eta = 0.0;  // (1 - y) / eps
};
FastVariables fast_variables(double t, double y, double eps);

/// Cutoffs: f = 1 on [0, 1/4], f = 0 on [1/2, 1], quintic blend with two vanishing
/// derivatives at the joins; g(y) = f(1 - y).
double cutoff_f(double y);
double cutoff_g(double y);

/// Closed-form Debye layer at one wall and one time, per x' node.
struct BoundaryLayerProfile {
    Wall wall = Wall::left;
    std::vector<double> amplitude;  // Lap Phi^(0) on the wall
    std::vector<double> gamma1;     // gamma1 on the wall
    std::vector<double> rate;       // sqrt(z1 (z1 - z2) gamma1)
    double z1 = 1.0;
    double z2 = -1.0;

    /// s is the fast coordinate of the wall (xi on the left, eta on the right).
    [[nodiscard]] double rho(int ix, double s) const;
    [[nodiscard]] double c1(int ix, double s) const;
    [[nodiscard]] double c2(int ix, double s) const;
    [[nodiscard]] double phi(int ix, double s) const;
    [[nodiscard]] double velocity(int, double) const { return 0.0; }
};

BoundaryLayerProfile boundary_layer(Wall wall, std::vector<double> amplitude, std::vector<double> gamma1_trace,
                                    const core::Params& p);

struct InitialLayerState {
    double tau = 0.0;
    core::ScalarField rho;  // rho^(2)_I
    core::ScalarField phi;  // Phi^(0)_I, -Lap phi = rho, phi = 0 on the walls
};

/// c^(2)_{1,I} = D1 rho / (z1 D1 - z2 D2), c^(2)_{2,I} = -D2 rho / (z1 D1 - z2 D2).
core::ScalarField initial_layer_c1(const InitialLayerState& s, const core::Params& p);
core::ScalarField initial_layer_c2(const InitialLayerState& s, const core::Params& p);

/// Implicit Euler in tau of d rho/d tau = z1 (z1 D1 - z2 D2) div(c1_base grad Phi) (+ forcing),
/// -Lap Phi = rho, Phi = 0 on the walls. Interior rows in divergence form, wall rows in
/// the pointwise form (1/K') d rho/d tau + c rho = grad c . grad Phi. tau_grid starts at 0.
/// forcing, if given, holds one field per tau node added to the right side.
std::vector<InitialLayerState> solve_initial_layer(const core::ScalarField& c1_base, const core::ScalarField& rho0,
                                                   const std::vector<double>& tau_grid, const core::Params& p,
                                                   const std::vector<core::ScalarField>* forcing = nullptr);

/// Next-order initial layer: rho^(3)_I with the extra forcing
/// z1 (z1 D1 - z2 D2) div(c1^(1)(0) grad Phi^(0)_I(tau)) from the order-2 march.
std::vector<InitialLayerState> solve_initial_layer_next_order(const core::ScalarField& c1_base,
                                                              const core::ScalarField& c1_first,
                                                              const std::vector<InitialLayerState>& order2,
                                                              const core::ScalarField& rho0, const core::Params& p);

/// Linear interpolation in tau; zero fields past the last node.
InitialLayerState initial_layer_at(const std::vector<InitialLayerState>& march, double tau);

/// Half-line grid [0, xi_max].
struct XiGrid {
    std::vector<double> xi;

    /// xi_j = xi_max (e^{s j/n} - 1)/(e^s - 1): clustered near 0.
    static XiGrid clustered(double xi_max = 40.0, int n = 800, double stretch = 4.0);
    static XiGrid uniform(double xi_max, int n);
    [[nodiscard]] double xi_max() const { return xi.back(); }
};

struct MixedLayerState {
    double tau = 0.0;
    std::vector<double> alpha1;
    std::vector<double> alpha2;
    double a1 = 0.0;  // trace -c^(2)_{1,I}(wall, tau)
    double a2 = 0.0;
    std::vector<double> c1;  // alpha1 + a1 e^{-xi}
    std::vector<double> c2;
};

struct MixedLayerOptions {
    bool strict = false;
    /// Start from c_LM(., 0) = a(0) e^{-xi} (alpha = 0). When false, start from
    /// c_LM(., 0) = 0, which is incompatible with the corner value when a(0) != 0.
    bool compatible_start = true;
};

struct MixedLayerSolution {
    Wall wall = Wall::left;
    XiGrid grid;
    std::vector<MixedLayerState> states;
    std::vector<std::string> warnings;

    /// Linear interpolation in (xi, tau); zero outside the grids.
    [[nodiscard]] double c1_at(double xi, double tau) const;
    [[nodiscard]] double c2_at(double xi, double tau) const;
};

/// Mixed layer d tau c_i = D_i d2 c_i - z_i D_i gamma_i rho on the half-line via the
/// substitution alpha_i = c_i - a_i e^{-xi}; implicit Euler in tau, centered differences
/// on the (possibly non-uniform) xi grid, alpha = 0 at both ends.
MixedLayerSolution solve_mixed_layer(const std::vector<double>& a1, const std::vector<double>& a2, double gamma1,
                                     double gamma2, const core::Params& p, const XiGrid& xi_grid,
                                     const std::vector<double>& tau_grid, Wall wall,
                                     const MixedLayerOptions& opts = {});

/// Weighted energy sum ||alpha_i||^2/(2 gamma_i D_i) and its bound
/// E(0) + int sum b_i^2/(8 gamma_i D_i^2) d tau, b_i = a_i' - D_i a_i + z_i D_i gamma_i r.
struct MixedLayerEnergy {
    std::vector<double> energy;
    std::vector<double> bound;
};
MixedLayerEnergy mixed_layer_energy(const MixedLayerSolution& sol, const std::vector<double>& a1,
                                    const std::vector<double>& a2, double gamma1, double gamma2,
                                    const core::Params& p);

} // namespace npnslab::layers
