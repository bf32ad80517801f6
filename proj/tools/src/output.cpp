#include "npnslab/cli/experiment.hpp"

#include "npnslab/core/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace npnslab::cli {

namespace {

using nlohmann::ordered_json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << text;
}

ordered_json fit_json(const std::optional<diag::RateFit>& f) {
    if (!f) return nullptr;
    return {{"slope", f->slope}, {"intercept", f->intercept}, {"r2", f->r2}};
}

ordered_json member_json(const MemberResult& m) {
    ordered_json j{{"epsilon", m.eps},
                   {"err_c_LinfL2", m.err_c_LinfL2},
                   {"err_u_LinfL2", m.err_u_LinfL2},
                   {"err_grad_psi_L2L2", m.err_grad_psi_L2L2},
                   {"err_rho_over_eps_L2L2", m.err_rho_over_eps_L2L2},
                   {"err_cS_grad_LinfL2", m.err_cS_grad_LinfL2},
                   {"err_c_LinfH2", m.err_c_LinfH2},
                   {"err_grad_c_L2L2", m.err_grad_c_L2L2},
                   {"eps_grad_psi_LinfL2", m.eps_grad_psi_LinfL2},
                   {"ny", m.ny},
                   {"dt", m.dt},
                   {"steps", m.steps},
                   {"max_principle_pass", m.max_principle_pass},
                   {"max_principle_margin", m.max_principle_margin},
                   {"max_principle_tol", m.max_principle_tol}};
    if (!m.error.empty()) j["error"] = m.error;
    return j;
}

ordered_json base_report(const ExperimentConfig& cfg, const std::optional<diag::RateFit>& fit, double lo, double hi,
                         bool pass) {
    ordered_json j;
    j["preset"] = to_string(cfg.preset);
    j["slope"] = fit ? ordered_json(fit->slope) : ordered_json(nullptr);
    j["intercept"] = fit ? ordered_json(fit->intercept) : ordered_json(nullptr);
    j["r2"] = fit ? ordered_json(fit->r2) : ordered_json(nullptr);
    j["window"] = {lo, hi};
    j["pass"] = pass;
    j["per_epsilon"] = ordered_json::array();
    return j;
}

ordered_json warnings_json(const std::vector<std::string>& ws) {
    ordered_json a = ordered_json::array();
    for (const auto& w : ws) {
        if (w.find("insufficient points for fit") != std::string::npos)
            a.push_back({{"code", "insufficient_points"}, {"message", w}});
        else if (w.find("truncation") != std::string::npos)
            a.push_back({{"code", "truncation"}, {"message", w}});
        else
            a.push_back({{"code", "note"}, {"message", w}});
    }
    return a;
}

void write_sweep(const ExperimentConfig& cfg, const std::string& hash, const std::vector<MemberResult>& members,
                 const std::vector<MetricFit>& fits, const std::vector<std::string>& warnings, bool pass,
                 const std::filesystem::path& dir) {
    std::ostringstream csv, extra;
    csv << "epsilon,err_c_LinfL2,err_u_LinfL2,err_grad_psi_L2L2,err_rho_over_eps_L2L2,err_cS_grad_LinfL2,"
           "err_c_LinfH2,wall_clock_s,config_hash\n";
    extra << "epsilon,err_grad_c_L2L2,eps_grad_psi_LinfL2,ny,dt,steps,max_principle_margin,max_principle_tol,"
             "config_hash\n";
    for (const auto& m : members) {
        csv << num(m.eps) << ',' << num(m.err_c_LinfL2) << ',' << num(m.err_u_LinfL2) << ','
            << num(m.err_grad_psi_L2L2) << ',' << num(m.err_rho_over_eps_L2L2) << ',' << num(m.err_cS_grad_LinfL2)
            << ',' << num(m.err_c_LinfH2) << ',' << num(m.wall_clock_s) << ',' << hash << '\n';
        extra << num(m.eps) << ',' << num(m.err_grad_c_L2L2) << ',' << num(m.eps_grad_psi_LinfL2) << ',' << m.ny
              << ',' << num(m.dt) << ',' << m.steps << ',' << num(m.max_principle_margin) << ','
              << num(m.max_principle_tol) << ',' << hash << '\n';
    }
    write_text(dir / "sweep.csv", csv.str());
    write_text(dir / "sweep_extra.csv", extra.str());

    const MetricFit& primary = fits.front();
    auto j = base_report(cfg, primary.fit, primary.lo, primary.hi, pass);
    j["metric"] = primary.metric;
    for (const auto& m : members) j["per_epsilon"].push_back(member_json(m));
    ordered_json f = ordered_json::object();
    for (const auto& mf : fits)
        f[mf.metric] = {{"fit", fit_json(mf.fit)},
                        {"window", {mf.lo, mf.hi}},
                        {"in_window", mf.pass},
                        {"monotone", mf.monotone}};
    j["fits"] = f;
    j["warnings"] = warnings_json(warnings);
    j["config_hash"] = hash;
    write_text(dir / "report.json", j.dump(2) + "\n");
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    validate_config(cfg);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const std::string hash = config_hash(cfg);

    switch (cfg.preset) {
    case Preset::thm1_rate:
    case Preset::thm2_h2_rate:
    case Preset::thm51_rate:
    case Preset::custom: {
        const auto r = run_sweep(cfg);
        write_sweep(cfg, hash, r.members, r.fits, r.warnings, r.pass, dir);
        for (const auto& m : r.members)
            if (!m.error.empty()) return 2;
        return r.pass ? 0 : 1;
    }
    case Preset::energy_identity: {
        const auto r = run_energy_identity(cfg);
        std::ostringstream csv;
        csv << "t,E,H,Theta,min_c1,max_c1,min_c2,max_c2,dissipation_residual,config_hash\n";
        for (const auto& rec : r.levels.back().records)
            csv << num(rec.t) << ',' << num(rec.E) << ',' << num(rec.H) << ',' << num(rec.Theta) << ','
                << num(rec.extrema.min_c1) << ',' << num(rec.extrema.max_c1) << ',' << num(rec.extrema.min_c2) << ','
                << num(rec.extrema.max_c2) << ',' << num(rec.dissipation_residual) << ',' << hash << '\n';
        write_text(dir / "diag.csv", csv.str());
        auto j = base_report(cfg, r.fit, std::log2(1.8), INFINITY, r.pass);
        j["window"] = {std::log2(1.8), nullptr};
        j["metric"] = "max_abs_dissipation_residual_vs_dt";
        j["per_level"] = ordered_json::array();
        for (const auto& l : r.levels) j["per_level"].push_back({{"dt", l.dt}, {"max_residual", l.max_residual}});
        j["ratios"] = r.ratios;
        j["warnings"] = warnings_json(r.warnings);
        j["config_hash"] = hash;
        write_text(dir / "report.json", j.dump(2) + "\n");
        return r.pass ? 0 : 1;
    }
    case Preset::layer_profile: {
        const auto r = run_layer_profile(cfg);
        std::ostringstream csv;
        csv << "epsilon,y,xi,measured,closed_form,config_hash\n";
        for (const auto& m : r.members)
            for (std::size_t i = 0; i < m.y.size(); ++i)
                csv << num(m.eps) << ',' << num(m.y[i]) << ',' << num(m.xi[i]) << ',' << num(m.measured[i]) << ','
                    << num(m.closed_form[i]) << ',' << hash << '\n';
        write_text(dir / "profile.csv", csv.str());
        auto j = base_report(cfg, r.fit, 0.0, 0.25, r.pass);
        j["metric"] = "rel_l2_error_on_0_8eps";
        for (const auto& m : r.members)
            j["per_epsilon"].push_back({{"epsilon", m.eps},
                                        {"t", m.t},
                                        {"rel_l2_error", m.rel_l2_error},
                                        {"amplitude", m.amplitude},
                                        {"rate", m.rate}});
        j["closed_form_residual"] = r.closed_form_residual;
        j["warnings"] = warnings_json(r.warnings);
        j["config_hash"] = hash;
        write_text(dir / "report.json", j.dump(2) + "\n");
        return r.pass ? 0 : 1;
    }
    case Preset::initial_layer_decay: {
        const auto r = run_initial_layer_decay(cfg);
        std::ostringstream csv;
        csv << "tau,rho_l2_constant,rho_exact_constant,rho_l2_variable,grad_phi_l2_variable,config_hash\n";
        for (std::size_t k = 0; k < r.tau.size(); ++k)
            csv << num(r.tau[k]) << ',' << num(r.rho_const[k]) << ',' << num(r.rho_exact[k]) << ','
                << num(r.rho_var[k]) << ',' << num(r.grad_phi_var[k]) << ',' << hash << '\n';
        write_text(dir / "decay.csv", csv.str());
        diag::RateFit f{r.var_slope, 0.0, 1.0};
        auto j = base_report(cfg, f, -INFINITY, r.var_bound, r.pass);
        j["window"] = {nullptr, r.var_bound};
        j["metric"] = "eventual_log_slope_rho_l2";
        j["intercept"] = nullptr;
        j["r2"] = nullptr;
        j["constant_background"] = {{"max_rel_err_coarse", r.const_err_coarse},
                                    {"max_rel_err_fine", r.const_err_fine},
                                    {"order", r.const_order}};
        j["grad_phi_nonincreasing"] = r.grad_phi_nonincreasing;
        j["constraint_residual"] = r.constraint_residual;
        j["mixed_layer_energy_bounded"] = r.mixed_energy_bounded;
        j["warnings"] = warnings_json(r.warnings);
        j["config_hash"] = hash;
        write_text(dir / "report.json", j.dump(2) + "\n");
        return r.pass ? 0 : 1;
    }
    }
    return 2;
}

int report_from_dir(const ExperimentConfig& cfg, const std::string& out_dir) {
    const std::filesystem::path dir(out_dir);
    const auto rows = read_csv(dir / "sweep.csv");
    if (rows.size() < 2) throw InputError("sweep.csv has no data rows");
    std::map<std::string, std::vector<std::string>> extra;
    if (std::filesystem::exists(dir / "sweep_extra.csv"))
        for (const auto& r : read_csv(dir / "sweep_extra.csv")) extra[r[0]] = r;
    std::vector<MemberResult> members;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 9) throw InputError("sweep.csv row " + std::to_string(i + 1) + " has the wrong column count");
        MemberResult m;
        m.eps = std::stod(r[0]);
        m.err_c_LinfL2 = std::stod(r[1]);
        m.err_u_LinfL2 = std::stod(r[2]);
        m.err_grad_psi_L2L2 = std::stod(r[3]);
        m.err_rho_over_eps_L2L2 = std::stod(r[4]);
        m.err_cS_grad_LinfL2 = std::stod(r[5]);
        m.err_c_LinfH2 = std::stod(r[6]);
        m.wall_clock_s = std::stod(r[7]);
        if (auto it = extra.find(r[0]); it != extra.end() && it->second.size() == 9) {
            m.err_grad_c_L2L2 = std::stod(it->second[1]);
            m.eps_grad_psi_LinfL2 = std::stod(it->second[2]);
            m.ny = std::stoi(it->second[3]);
            m.dt = std::stod(it->second[4]);
            m.steps = std::stoi(it->second[5]);
            m.max_principle_margin = std::stod(it->second[6]);
            m.max_principle_tol = std::stod(it->second[7]);
            m.max_principle_pass = m.max_principle_margin <= m.max_principle_tol;
        }
        members.push_back(m);
    }
    std::vector<std::string> warnings;
    bool pass = true;
    const auto fits = fit_metrics(cfg, members, warnings, pass);
    for (const auto& m : members)
        if (!m.max_principle_pass) pass = false;
    write_sweep(cfg, rows[1].back(), members, fits, warnings, pass, dir);
    return pass ? 0 : 1;
}

} // namespace npnslab::cli
