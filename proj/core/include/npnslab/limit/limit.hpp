#pragma once

#include "npnslab/core/background.hpp"
#include "npnslab/core/field.hpp"
#include "npnslab/limit/limit_state.hpp"

#include <vector>

namespace npnslab::limit {

/// (z1 - z2) D1 D2 / (z1 D1 - z2 D2)
double effective_diffusivity(const core::Params& p);

/// div((D1 - D2) grad c1 + (z1 D1 - z2 D2) c1 (grad psi + grad Phi_W)) = 0, psi = 0 on the walls.
core::ScalarField solve_limit_psi(const core::ScalarField& c1, const core::Params& p, const core::ScalarField& phiW);

/// Max interior residual of the single-species divergence form.
double limit_psi_residual(const core::ScalarField& c1, const core::ScalarField& psi, const core::Params& p,
                          const core::ScalarField& phiW);
/// Max interior residual of the two-species form
/// div(sum z_i D_i grad c_i + sum z_i^2 D_i c_i (grad psi + grad Phi_W)).
double limit_psi_residual_two_species(const core::ScalarField& c1, const core::ScalarField& c2,
                                      const core::ScalarField& psi, const core::Params& p,
                                      const core::ScalarField& phiW);

/// Initial limit state: u projected and psi solved from c1.
LimitState limit_init(const core::ScalarField& c1_0, const core::VelocityField& u_0, const core::Params& p,
                      const core::BoundaryData& bdata);

class LimitStepper {
public:
    LimitStepper(core::Params p, core::BoundaryData bdata, const core::ChannelGrid& grid);

    [[nodiscard]] const core::Background& background() const noexcept { return bg_; }
    [[nodiscard]] LimitState step(const LimitState& s, double dt) const;

private:
    core::Params p_;
    core::BoundaryData bdata_;
    core::Background bg_;
};

LimitState step_limit(const LimitState& s, const core::Params& p, const core::BoundaryData& bdata, double dt);

struct LimitTrajectory {
    std::vector<LimitState> snapshots;
};

LimitTrajectory run_limit(const LimitState& init, const core::Params& p, const core::BoundaryData& bdata, double dt,
                          double t_end, int save_every);

/// One order of the inner expansion at one time. phi is the full potential of that
/// order (order 0 includes Phi_W).
struct InnerTerm {
    double t = 0.0;
    core::ScalarField c1;
    core::ScalarField c2;
    core::ScalarField phi;
    core::VelocityField u;
};
using InnerSeries = std::vector<InnerTerm>;

/// Order 0 from a limit trajectory saved every step.
InnerSeries inner_order0(const LimitTrajectory& traj, const core::Background& bg, const core::Params& p);

struct InnerInitialData {
    // Interior initial values of c1 and u for the requested order; zero when empty.
    core::ScalarField c1;
    core::VelocityField u;
};

/// Orders 1 and 2 on the time mesh of the order-0 series. base must hold orders
/// 0..order-1 in sequence; throws SequencingError otherwise.
InnerSeries solve_inner_hierarchy(int order, const std::vector<InnerSeries>& base, const core::Params& p,
                                  const core::BoundaryData& bdata, const InnerInitialData& init = {});

/// Lap Phi^(0) at every node, wall rows by one-sided differences.
core::ScalarField laplacian_phi0(const InnerTerm& order0);

} // namespace npnslab::limit
