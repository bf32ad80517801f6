#pragma once

#include "npnslab/core/params.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace npnslab::cli {

enum class Preset { thm1_rate, thm2_h2_rate, thm51_rate, energy_identity, layer_profile, initial_layer_decay, custom };

Preset preset_from_string(const std::string& s);
std::string to_string(Preset p);

/// Trace a + b cos(2 pi k x') on one wall.
struct TraceSpec {
    double bottom = 1.0;
    double top = 1.0;
    double mode_amp = 0.0;
    int mode = 1;
    bool operator==(const TraceSpec&) const = default;
};

struct ExperimentConfig {
    Preset preset = Preset::custom;
    std::uint64_t seed = 0;
    bool strict = false;
    std::string fixture = "default";  // "equilibrium" for the zero-residual energy fixture

    // [params]; lambda == 0 means derived from the data.
    double z1 = 2.0, z2 = -1.0, D1 = 2.0, D2 = 1.0, nu = 1.0, eps = 0.125, lambda = 0.0, Lambda = 0.0;

    // [boundary]; gamma2 follows from electroneutrality.
    TraceSpec gamma1{1.0, 1.0, 0.0, 1};
    TraceSpec W{0.0, 1.0, 0.0, 1};

    // [grid]
    int d = 1, nx = 1, ny = 2048;
    double ny_per_eps = 0.0;  // ny >= ny_per_eps / eps + 1 when positive

    // [time]
    double dt = 1e-4;
    double dt_eps2 = 0.0;  // dt <= dt_eps2 * eps^2 when positive
    double t_end = 0.1;
    int save_every = 10;
    std::string stiff_mode = "implicit_coupled";

    // [sweep]
    std::vector<double> eps_list{0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
    std::vector<double> dt_list;

    // [initial]
    std::string c1_shape = "sine";  // constant | sine | exp
    double c1_amp = 0.5;
    double c1_rate = 0.0;           // exp shape; 0 selects the rate that makes psi(0) = 0
    double pert_amp = 0.3;          // eps * pert_amp * sin(pert_mode pi y) added to the epsilon data
    int pert_mode = 2;
    double u_amp = 0.0;             // v(y) = u_amp sin^2(pi y) shear, d = 2 only
    double tau_end = 4.0;
    int tau_steps = 400;

    // [output]
    std::string output_dir = "out";
    bool wall_clock = false;

    bool operator==(const ExperimentConfig&) const = default;

    [[nodiscard]] core::Params params_for(double eps_value) const;
    [[nodiscard]] int ny_for(double eps_value) const;
    [[nodiscard]] double dt_for(double eps_value) const;
};

/// Defaults of a preset applied on top of the built-in defaults.
ExperimentConfig preset_defaults(Preset p);

/// Parses the key=value format. Unknown keys and malformed values throw
/// InputError naming the key, the line and the expected type.
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig parse_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Checks invariants (decreasing eps list, valences, layer resolution, ...).
void validate_config(const ExperimentConfig& cfg);

/// FNV-1a of the serialized config, 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

} // namespace npnslab::cli
