// Command-line front end: reproducible simulation, moment tables, QML fits
// and the two published-study reproductions, all driven by JSON configs.
//
// Exit codes: 0 success, 2 input error, 3 non-convergence, 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "carma/csv.hpp"
#include "carma/errors.hpp"
#include "carma/experiments.hpp"
#include "carma/json_io.hpp"
#include "carma/levy.hpp"
#include "carma/moments.hpp"
#include "carma/qml.hpp"
#include "carma/recovery.hpp"
#include "carma/sampler.hpp"

namespace fs = std::filesystem;
using carma::io::format_double;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNoConverge = 3;
constexpr int kExitNumerical = 4;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::optional<double> horizon;
    std::optional<double> h;
    std::optional<int> substeps;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->set_help_flag("--help", "print help");  // frees -h / --h for the grid step
    cmd->add_option("--config", flags.config_path, "JSON config file")->required();
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "RNG seed (overrides config)");
    cmd->add_option("--replications", flags.replications, "replication count (overrides config)");
    cmd->add_option("--horizon", flags.horizon, "time horizon (overrides config)");
    cmd->add_option("--h", flags.h, "grid step (overrides config)");
    cmd->add_option("--substeps", flags.substeps, "simulation sub-grid per step (overrides config)");
    cmd->add_option("--threads", flags.threads, "worker threads (overrides config)");
}

json load_config(const CommonFlags& flags) {
    std::ifstream in(flags.config_path);
    if (!in) throw std::domain_error("cannot open config file: " + flags.config_path);
    json cfg = json::parse(in);
    if (!cfg.contains("schema_version") || cfg.at("schema_version").get<int>() != 1)
        throw std::domain_error("config: expected schema_version 1");
    if (flags.seed) cfg["seed"] = *flags.seed;
    if (flags.replications) cfg["replications"] = *flags.replications;
    if (flags.horizon) cfg["horizon"] = *flags.horizon;
    if (flags.h) cfg["h"] = *flags.h;
    if (flags.substeps) cfg["substeps"] = *flags.substeps;
    if (flags.threads) cfg["threads"] = *flags.threads;
    return cfg;
}

std::uint64_t required_seed(const json& cfg) {
    if (!cfg.contains("seed"))
        throw std::domain_error("config: an explicit seed is required (no wall-clock default)");
    return cfg.at("seed").get<std::uint64_t>();
}

fs::path ensure_out_dir(const CommonFlags& flags) {
    fs::path dir(flags.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_json_file(const json& j, const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
    out << j.dump(2) << "\n";
}

// model: {"carma": {...}} or {"state_space": {...}}; sigma_l defaults to the
// driver covariance rate when a finite-variance driver is given.
carma::StateSpace model_from_config(const json& cfg, const carma::LevyModel* driver) {
    const json& model = cfg.at("model");
    carma::MatrixXd sigma_l;
    if (cfg.contains("sigma_l")) sigma_l = carma::io::matrix_from_json(cfg.at("sigma_l"));
    if (model.contains("state_space")) {
        carma::StateSpace ss = carma::io::state_space_from_json(model.at("state_space"));
        if (sigma_l.size() > 0) ss.sigma_l = sigma_l;
        return ss;
    }
    if (!model.contains("carma")) throw std::domain_error("config: model needs carma or state_space");
    carma::CarmaSpec spec = carma::io::carma_spec_from_json(model.at("carma"));
    if (sigma_l.size() == 0 && driver != nullptr) {
        try {
            sigma_l = carma::moment_rates(*driver).cov;
        } catch (const std::domain_error&) {
            sigma_l = carma::MatrixXd::Identity(spec.m, spec.m);  // infinite-variance driver
        }
    }
    return carma::companion(spec, sigma_l);
}

void require_causal(const carma::StateSpace& ss) {
    carma::Spectrum s = carma::spectrum(ss);
    if (!s.causal) {
        Eigen::Index worst = 0;
        s.eigenvalues.real().maxCoeff(&worst);
        throw std::domain_error("model is not causal: eigenvalue " +
                                format_double(s.eigenvalues(worst).real()) + " + " +
                                format_double(s.eigenvalues(worst).imag()) + "i");
    }
}

int cmd_simulate(const CommonFlags& flags) {
    json cfg = load_config(flags);
    const std::uint64_t seed = required_seed(cfg);
    const double h = cfg.at("h").get<double>();
    Eigen::Index steps = 0;
    if (cfg.contains("steps"))
        steps = cfg.at("steps").get<Eigen::Index>();
    else
        steps = static_cast<Eigen::Index>(std::llround(cfg.at("horizon").get<double>() / h));
    const int replications = cfg.value("replications", 1);
    const int substeps = cfg.value("substeps", 64);
    const int threads = cfg.value("threads", 1);

    std::optional<carma::LevyModel> driver;
    const bool gaussian = !cfg.contains("driver") || cfg.at("driver") == "gaussian";
    if (!gaussian) driver = carma::io::levy_from_json(cfg.at("driver"));

    carma::StateSpace ss = model_from_config(cfg, driver ? &*driver : nullptr);
    require_causal(ss);
    const fs::path dir = ensure_out_dir(flags);

    std::vector<carma::SampledPath> paths(static_cast<size_t>(replications));
    carma::experiments::parallel_for(replications, threads, [&](int r) {
        if (gaussian)
            paths[static_cast<size_t>(r)] =
                carma::simulate_gaussian(ss, h, steps, seed, static_cast<std::uint64_t>(r));
        else
            paths[static_cast<size_t>(r)] = carma::simulate_levy(
                ss, *driver, h, steps, substeps, seed, static_cast<std::uint64_t>(r));
    });

    for (int r = 0; r < replications; ++r) {
        char name[64];
        std::snprintf(name, sizeof(name), "path_%03d.csv", r);
        const fs::path csv = dir / name;
        carma::io::write_path_csv(paths[static_cast<size_t>(r)], csv.string());

        json meta{{"schema_version", 1},
                  {"h", h},
                  {"steps", steps},
                  {"seed", seed},
                  {"stream", r},
                  {"substeps", gaussian ? 0 : substeps},
                  {"driver", gaussian ? json("gaussian") : carma::io::to_json(*driver)},
                  {"state_space", carma::io::to_json(ss)}};
        std::snprintf(name, sizeof(name), "path_%03d.meta.json", r);
        write_json_file(meta, dir / name);
    }
    return kExitOk;
}

int cmd_moments(const CommonFlags& flags) {
    json cfg = load_config(flags);
    std::optional<carma::LevyModel> driver;
    if (cfg.contains("driver") && cfg.at("driver") != "gaussian")
        driver = carma::io::levy_from_json(cfg.at("driver"));
    carma::StateSpace ss = model_from_config(cfg, driver ? &*driver : nullptr);
    require_causal(ss);
    const fs::path dir = ensure_out_dir(flags);

    auto grid_from = [](const json& spec) {
        std::vector<double> grid;
        if (spec.is_array()) {
            for (const auto& v : spec) grid.push_back(v.get<double>());
        } else {
            const double start = spec.at("start").get<double>();
            const double stop = spec.at("stop").get<double>();
            const double step = spec.at("step").get<double>();
            for (double x = start; x <= stop + 1e-12; x += step) grid.push_back(x);
        }
        return grid;
    };

    const auto d = ss.d();
    {
        std::ofstream out(dir / "acf.csv");
        out << "lag";
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) out << ",g" << (i + 1) << (j + 1);
        out << "\n";
        if (cfg.contains("lags"))
            for (double lag : grid_from(cfg.at("lags"))) {
                carma::MatrixXd g = carma::autocov(ss, lag);
                out << format_double(lag);
                for (Eigen::Index i = 0; i < d; ++i)
                    for (Eigen::Index j = 0; j < d; ++j) out << "," << format_double(g(i, j));
                out << "\n";
            }
    }
    {
        std::ofstream out(dir / "spectrum.csv");
        out << "omega";
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                out << ",f" << (i + 1) << (j + 1) << "_re,f" << (i + 1) << (j + 1) << "_im";
        out << "\n";
        if (cfg.contains("frequencies"))
            for (double w : grid_from(cfg.at("frequencies"))) {
                carma::MatrixXcd f = carma::spectral_density(ss, w);
                out << format_double(w);
                for (Eigen::Index i = 0; i < d; ++i)
                    for (Eigen::Index j = 0; j < d; ++j)
                        out << "," << format_double(f(i, j).real()) << ","
                            << format_double(f(i, j).imag());
                out << "\n";
            }
    }
    return kExitOk;
}

int cmd_fit(const CommonFlags& flags) {
    json cfg = load_config(flags);
    const std::string data = cfg.at("data").get<std::string>();
    if (!fs::exists(data)) throw std::domain_error("data file not found: " + data);
    carma::SampledPath path = carma::io::read_path_csv(data);

    carma::Parametrization par = carma::io::parametrization_from_json(cfg.at("parametrization"));
    carma::VectorXd theta_init = carma::io::vector_from_json(cfg.at("theta_init"));

    carma::FitSettings settings;
    if (cfg.contains("settings")) {
        const json& s = cfg.at("settings");
        settings.starts = s.value("starts", settings.starts);
        settings.max_iter = s.value("max_iter", settings.max_iter);
        settings.multistart_seed = s.value("multistart_seed", settings.multistart_seed);
        settings.threads = s.value("threads", settings.threads);
        settings.grad_tol = s.value("grad_tol", settings.grad_tol);
    }

    carma::FitResult result = carma::fit(par, path, theta_init, settings);
    json out = carma::io::to_json(result);
    out["schema_version"] = 1;
    out["settings"] = {{"starts", settings.starts},
                       {"max_iter", settings.max_iter},
                       {"multistart_seed", settings.multistart_seed},
                       {"grad_tol", settings.grad_tol},
                       {"family", par.family},
                       {"data", data}};
    write_json_file(out, ensure_out_dir(flags) / "fit.json");
    return result.converged ? kExitOk : kExitNoConverge;
}

int cmd_table1(const CommonFlags& flags) {
    json cfg = load_config(flags);
    carma::experiments::Table1Settings settings;
    settings.seed = required_seed(cfg);
    settings.replications = cfg.value("replications", settings.replications);
    settings.horizon = cfg.value("horizon", settings.horizon);
    settings.h = cfg.value("h", settings.h);
    settings.substeps = cfg.value("substeps", settings.substeps);
    settings.threads = cfg.value("threads", settings.threads);
    settings.starts = cfg.value("starts", settings.starts);
    if (settings.replications >= 100)
        std::cerr << "table1: " << settings.replications
                  << " replications is a long-running (paper-scale) job\n";

    carma::experiments::Table1Result result = carma::experiments::run_table1(settings);

    const fs::path dir = ensure_out_dir(flags);
    std::ofstream out(dir / "table1.csv");
    out << "parameter,sample_mean,sample_bias,sample_sd,mean_estimated_sd\n";
    for (const auto& row : result.rows) {
        out << "theta_" << row.parameter << "," << format_double(row.sample_mean) << ","
            << format_double(row.sample_bias) << ",";
        if (settings.replications > 1)
            out << format_double(row.sample_sd);
        else
            out << "n/a";
        out << "," << format_double(row.mean_estimated_sd) << "\n";
    }
    if (result.non_converged > 0)
        std::cerr << "table1: " << result.non_converged << " fit(s) did not converge\n";
    return kExitOk;
}

int cmd_table2(const CommonFlags& flags) {
    json cfg = load_config(flags);
    carma::experiments::Table2Settings settings;
    settings.seed = required_seed(cfg);
    settings.paths = cfg.value("replications", cfg.value("paths", settings.paths));
    settings.horizon = cfg.value("horizon", settings.horizon);
    settings.a = cfg.value("a", settings.a);
    settings.g = cfg.value("gamma", settings.g);
    settings.substeps = cfg.value("substeps", settings.substeps);
    settings.threads = cfg.value("threads", settings.threads);
    if (cfg.contains("h_fine")) {
        settings.h_fine.clear();
        for (const auto& v : cfg.at("h_fine")) settings.h_fine.push_back(v.get<double>());
    }
    for (double hf : settings.h_fine)
        if (hf >= 1.0)
            std::cerr << "table2: h_fine = " << hf
                      << " leaves a single sample per unit interval; the drift integral "
                         "degenerates to the two-endpoint trapezoid\n";

    carma::experiments::Table2Result result = carma::experiments::run_table2(settings);

    const fs::path dir = ensure_out_dir(flags);
    std::ofstream out(dir / "table2.csv");
    out << "h,parameter,sample_mean,sample_sd,paths\n";
    for (const auto& row : result.rows) {
        out << format_double(row.h_fine) << ",gamma," << format_double(row.mean_gamma_hat) << ",";
        if (row.paths > 1)
            out << format_double(row.sd_gamma_hat);
        else
            out << "n/a";
        out << "," << row.paths << "\n";
    }
    return kExitOk;
}

int cmd_recover(const CommonFlags& flags) {
    json cfg = load_config(flags);
    const std::string data = cfg.at("data").get<std::string>();
    if (!fs::exists(data)) throw std::domain_error("data file not found: " + data);
    carma::SampledPath path = carma::io::read_path_csv(data);

    double a = 0.0;
    if (cfg.contains("a")) {
        a = cfg.at("a").get<double>();
    } else if (cfg.contains("fit")) {
        std::ifstream in(cfg.at("fit").get<std::string>());
        if (!in) throw std::domain_error("cannot open fit result: " + cfg.at("fit").get<std::string>());
        json fit_json = json::parse(in);
        a = fit_json.at("theta_hat").at(0).get<double>();
    } else {
        throw std::domain_error("config: recover needs either a or a fit result file");
    }

    const double h_coarse = cfg.value("h_coarse", 1.0);
    carma::RecoveredIncrements inc = carma::recover_increments(path, a, h_coarse);
    const fs::path dir = ensure_out_dir(flags);
    carma::io::write_increments_csv(inc, (dir / "increments.csv").string());

    json diag_json = carma::io::to_json(carma::increment_diagnostics(inc, cfg.value("bins", 50)));
    diag_json["schema_version"] = 1;
    diag_json["a_used"] = a;
    diag_json["h_coarse"] = h_coarse;
    diag_json["h_fine"] = inc.h_fine;
    write_json_file(diag_json, dir / "diagnostics.json");

    if (cfg.value("fit_gamma", false)) {
        carma::GammaFit gf = carma::fit_gamma(inc);
        json out{{"schema_version", 1},
                 {"gamma_hat", gf.gamma_hat},
                 {"stderr", gf.std_err},
                 {"loglik", gf.loglik},
                 {"clipped", gf.clipped}};
        write_json_file(out, dir / "gamma_fit.json");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Levy-driven CARMA state space models: simulation, moments, QML estimation "
                 "and driver recovery"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto* simulate = app.add_subcommand("simulate", "simulate sampled paths");
    auto* moments = app.add_subcommand("moments", "tabulate autocovariance and spectral density");
    auto* fit_cmd = app.add_subcommand("fit", "quasi-maximum-likelihood fit of a sampled path");
    auto* table1 = app.add_subcommand("table1", "bivariate NIG-driven QML simulation study");
    auto* table2 = app.add_subcommand("table2", "Gamma-OU driver recovery study");
    auto* recover = app.add_subcommand("recover", "recover driver increments from an OU path");
    for (auto* cmd : {simulate, moments, fit_cmd, table1, table2, recover}) add_common(cmd, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(flags);
        if (moments->parsed()) return cmd_moments(flags);
        if (fit_cmd->parsed()) return cmd_fit(flags);
        if (table1->parsed()) return cmd_table1(flags);
        if (table2->parsed()) return cmd_table2(flags);
        if (recover->parsed()) return cmd_recover(flags);
    } catch (const carma::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
