#pragma once

#include "npnslab/layers/layers.hpp"
#include "npnslab/limit/limit.hpp"

#include <utility>
#include <vector>

namespace npnslab::layers {

enum class CompositeVariant { full_S, reduced_R };

/// Everything evaluated at one physical time t (eps taken from Params). Null / empty members are absent terms.
struct CompositeInputs {
    const limit::InnerTerm* order0 = nullptr;  // required
    const limit::InnerTerm* order1 = nullptr;
    const limit::InnerTerm* order2 = nullptr;
    const BoundaryLayerProfile* left_bl = nullptr;
    const BoundaryLayerProfile* right_bl = nullptr;
    const std::vector<InitialLayerState>* initial = nullptr;       // rho^(2)_I, Phi^(0)_I
    const std::vector<InitialLayerState>* initial_next = nullptr;  // Phi^(1)_I in its phi member
    const std::vector<MixedLayerSolution>* left_ml = nullptr;      // one per x' node
    const std::vector<MixedLayerSolution>* right_ml = nullptr;
};

struct CompositeApproximation {
    double t = 0.0;
    CompositeVariant variant = CompositeVariant::full_S;
    core::ScalarField c1;
    core::ScalarField c2;
    core::ScalarField phi;  // full potential, Phi_W included through order 0
    core::VelocityField u;
};

/// Boundary layers at both walls driven by Lap Phi^(0) of the order-0 term.
std::pair<BoundaryLayerProfile, BoundaryLayerProfile> boundary_layers_at(const limit::InnerTerm& order0,
                                                                         const core::BoundaryData& bdata,
                                                                         const core::Params& p);

/// full_S:   c = c0 + eps c1 + eps^2 (c2 + c_I + f c_LB + g c_RB + f c_LM + g c_RM),
///           Phi = Phi0 + eps Phi1 + eps^2 Phi2 + Phi_I0 + eps Phi_I1 + eps^2 (f Phi_LB + g Phi_RB),
///           u = u0 + eps u1.
/// reduced_R: c = c0 + eps c1 + eps^2 (c_I + f c_LM + g c_RM), Phi = Phi0 + Phi_I0 + eps Phi_I1, u = u0.
CompositeApproximation assemble_composite(const CompositeInputs& in, const core::Params& p, CompositeVariant variant,
                                          double t);

struct CompositeResidual {
    core::ScalarField c1;
    core::ScalarField c2;
    core::ScalarField phi;
    core::VelocityField u;
};

/// state minus composite; the state potential is psi + Phi_W.
CompositeResidual residual(const core::State& s, const CompositeApproximation& app, const core::ScalarField& phiW);

} // namespace npnslab::layers
