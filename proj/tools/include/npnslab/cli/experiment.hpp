#pragma once

#include "npnslab/cli/config.hpp"
#include "npnslab/core/field.hpp"
#include "npnslab/diagnostics/diagnostics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace npnslab::cli {

/// Discrete problem for one epsilon.
struct Fixture {
    core::Params params;
    core::BoundaryData bdata;
    core::ChannelGrid grid;
    core::ScalarField c1_limit0;  // limit initial concentration
    core::ScalarField c1_eps0;    // epsilon initial concentration (perturbed)
    core::VelocityField u0;
    double dt = 0.0;
};
Fixture build_fixture(const ExperimentConfig& cfg, double eps);

/// Error norms of one sweep member.
struct MemberResult {
    double eps = 0.0;
    double err_c_LinfL2 = 0.0;
    double err_u_LinfL2 = 0.0;
    double err_grad_psi_L2L2 = 0.0;
    double err_rho_over_eps_L2L2 = 0.0;
    double err_cS_grad_LinfL2 = 0.0;
    double err_c_LinfH2 = 0.0;
    double err_grad_c_L2L2 = 0.0;
    double eps_grad_psi_LinfL2 = 0.0;
    double wall_clock_s = 0.0;
    int ny = 0;
    double dt = 0.0;
    int steps = 0;
    bool max_principle_pass = true;
    double max_principle_margin = 0.0;  // worst distance outside the data band (<= 0 inside)
    double max_principle_tol = 0.0;
    std::string error;                  // non-empty when the run aborted
};
MemberResult run_member(const ExperimentConfig& cfg, double eps);

struct MetricFit {
    std::string metric;
    std::optional<diag::RateFit> fit;
    double lo = 0.0;
    double hi = 0.0;
    bool monotone = true;
    bool pass = false;
};

struct SweepResult {
    std::vector<MemberResult> members;  // in eps_list order
    std::vector<MetricFit> fits;        // first entry is the preset's primary metric
    std::vector<std::string> warnings;
    bool pass = false;
};
/// One worker per epsilon, merged in eps order.
SweepResult run_sweep(const ExperimentConfig& cfg);

struct EnergyLevel {
    double dt = 0.0;
    double max_residual = 0.0;
    std::vector<diag::DiagnosticsRecord> records;
};
struct EnergyIdentityResult {
    std::vector<EnergyLevel> levels;
    std::vector<double> ratios;  // residual ratio per halving
    std::optional<diag::RateFit> fit;
    bool pass = false;
    std::vector<std::string> warnings;
};
EnergyIdentityResult run_energy_identity(const ExperimentConfig& cfg);

struct ProfileMember {
    double eps = 0.0;
    double t = 0.0;
    double rel_l2_error = 0.0;
    double amplitude = 0.0;
    double rate = 0.0;
    std::vector<double> y, xi, measured, closed_form;
};
struct LayerProfileResult {
    std::vector<ProfileMember> members;
    double closed_form_residual = 0.0;  // discrete layer system on h_xi = 1e-2
    std::optional<diag::RateFit> fit;
    bool pass = false;
    std::vector<std::string> warnings;
};
LayerProfileResult run_layer_profile(const ExperimentConfig& cfg);

/// Max residual of the layer ODE system for the closed-form profile on a uniform
/// xi grid (sixth-order second differences).
double closed_form_layer_residual(double amplitude, double gamma1, const core::Params& p, double h_xi = 1e-2,
                                  double xi_max = 10.0);

struct InitialDecayResult {
    std::vector<double> tau;
    std::vector<double> rho_const, rho_exact, rho_var, grad_phi_var;
    double const_err_coarse = 0.0;  // max relative error at tau_steps
    double const_err_fine = 0.0;    // at 2 tau_steps
    double const_order = 0.0;
    double var_slope = 0.0;
    double var_bound = 0.0;  // -0.95 z1 (z1 D1 - z2 D2) lambda
    bool grad_phi_nonincreasing = true;
    double constraint_residual = 0.0;
    bool mixed_energy_bounded = true;
    std::vector<std::string> warnings;
    bool pass = false;
};
InitialDecayResult run_initial_layer_decay(const ExperimentConfig& cfg);

/// Runs the preset and writes its artifacts into out_dir. Returns the exit status.
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

/// Refits sweep.csv in out_dir and rewrites report.json. Returns the exit status.
int report_from_dir(const ExperimentConfig& cfg, const std::string& out_dir);

/// Fits for the preset from member rows (shared by run_sweep and report).
std::vector<MetricFit> fit_metrics(const ExperimentConfig& cfg, const std::vector<MemberResult>& members,
                                   std::vector<std::string>& warnings, bool& pass);

} // namespace npnslab::cli
