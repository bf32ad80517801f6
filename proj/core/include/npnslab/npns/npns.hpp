#pragma once

#include "npnslab/core/background.hpp"
#include "npnslab/core/field.hpp"
#include "npnslab/diagnostics/diagnostics.hpp"

#include <string>
#include <vector>

namespace npnslab::npns {

enum class StiffMode {
    implicit_coupled,        // electro-coupling implicit, frozen c at level n
    implicit_diffusion_only  // electro-coupling explicit, needs dt <~ eps^2
};

struct NpnsConfig {
    core::Params params;
    core::BoundaryData bdata;
    core::ChannelGrid grid;
    double dt = 1e-3;
    double t_end = 0.1;
    StiffMode stiff_mode = StiffMode::implicit_coupled;

    /// Throws on invalid data; returns warnings (explicit-coupling stability bound).
    std::vector<std::string> validate() const;
};

struct Trajectory {
    std::vector<core::State> snapshots;
    std::vector<diag::DiagnosticsRecord> diagnostics;
    std::vector<std::string> warnings;
};

/// c2 = -(z1/z2) c1, u projected, psi = 0, t = 0.
core::State well_prepared_init(const core::ScalarField& c1_0, const core::VelocityField& u_0, const NpnsConfig& cfg);

/// Stepper with the harmonic background cached.
class NpnsStepper {
public:
    explicit NpnsStepper(NpnsConfig cfg);

    [[nodiscard]] const NpnsConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const core::Background& background() const noexcept { return bg_; }

    /// One step of size dt (defaults to the configured dt).
    [[nodiscard]] core::State step(const core::State& s) const { return step(s, cfg_.dt); }
    [[nodiscard]] core::State step(const core::State& s, double dt) const;

private:
    NpnsConfig cfg_;
    core::Background bg_;
};

core::State step_npns(const core::State& s, const NpnsConfig& cfg);

struct RunOptions {
    double guard_tol = 1e-4;  // abort threshold for the maximum principle
    bool record_energy = true;
};

/// Marches to t_end, saving every save_every steps and the final state. Aborts with
/// MaxPrincipleViolation when a concentration leaves its data band by more than guard_tol.
Trajectory run_npns(const core::State& init, const NpnsConfig& cfg, int save_every, const RunOptions& opts = {});

/// Residual max|-eps^2 Lap psi - rho| over interior nodes.
double poisson_residual(const core::State& s, const core::Params& p);

} // namespace npnslab::npns
