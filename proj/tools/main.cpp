// Command-line front end: simulate fields, fit models to CSV datasets, run
// simulation studies, and emit diagnostic curves. Exit codes: 0 success,
// 1 runtime failure, 2 configuration error.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ccp/inference.hpp"
#include "ccp/io.hpp"
#include "ccp/kernel.hpp"
#include "ccp/simulate.hpp"
#include "ccp/rng.hpp"
#include "ccp/study.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json require(const json& j, const std::string& field) {
    if (!j.contains(field)) throw ConfigError("missing config field '" + field + "'");
    return j.at(field);
}

ccp::Kernel kernel_of(const json& cfg) {
    try {
        return ccp::kernel_from_json(require(cfg, "kernel"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad 'kernel' config: ") + e.what());
    }
}

ccp::GaussianModel gaussian_of(const json& cfg) {
    ccp::GaussianModel g;
    const json jg = require(cfg, "gaussian");
    g.rate = require(jg, "rate").get<double>();
    g.alpha = jg.value("alpha", 1.0);
    g.tau = jg.value("tau", 0.0);
    g.validate();
    return g;
}

ccp::io::LabeledSites sites_of(const json& cfg) {
    const json js = require(cfg, "sites");
    ccp::io::LabeledSites out;
    if (js.contains("lattice_m")) {
        out.sites = ccp::lattice_sites(js.at("lattice_m").get<int>());
    } else if (js.contains("coords")) {
        for (const auto& c : js.at("coords"))
            out.sites.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
        if (out.sites.empty()) throw ConfigError("'sites.coords' is empty");
    } else {
        throw ConfigError("'sites' needs either 'lattice_m' or 'coords'");
    }
    if (js.contains("labels")) {
        out.labels = js.at("labels").get<std::vector<std::string>>();
        if (out.labels.size() != out.sites.size())
            throw ConfigError("'sites.labels' size does not match the sites");
    } else {
        for (size_t i = 0; i < out.sites.size(); ++i)
            out.labels.push_back("s" + std::to_string(i + 1));
    }
    return out;
}

ccp::Weights weights_of(const json& cfg) {
    ccp::Weights w;
    if (!cfg.contains("weights")) return w;
    const json jw = cfg.at("weights");
    const std::string scheme = jw.value("scheme", "equal");
    if (scheme == "equal") {
        w.scheme = ccp::Weights::Scheme::Equal;
    } else if (scheme == "distance_cutoff") {
        w.scheme = ccp::Weights::Scheme::DistanceCutoff;
        w.delta_max = require(jw, "delta_max").get<double>();
    } else {
        throw ConfigError("unknown weights scheme '" + scheme + "'");
    }
    return w;
}

ccp::OptimizerConfig optimizer_of(const json& cfg, std::uint64_t seed) {
    ccp::OptimizerConfig oc;
    oc.seed = seed;
    if (!cfg.contains("optimizer")) return oc;
    const json jo = cfg.at("optimizer");
    oc.n_starts = jo.value("n_starts", oc.n_starts);
    oc.max_iter = jo.value("max_iter", oc.max_iter);
    oc.log_lo = jo.value("log_lo", oc.log_lo);
    oc.log_hi = jo.value("log_hi", oc.log_hi);
    return oc;
}

std::uint64_t seed_or_entropy(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (std::uint64_t(rd()) << 32) ^ rd();
}

json load_config(const std::string& path) {
    try {
        return ccp::io::read_json(path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot parse config: ") + e.what());
    }
}

void write_curves_csv(const fs::path& path, const std::vector<ccp::CurvePoint>& pts) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "delta,statistic,value,source\n";
    for (const auto& p : pts)
        out << ccp::io::format_g17(p.delta) << ',' << p.statistic << ','
            << ccp::io::format_g17(p.value) << ',' << p.source << '\n';
}

int cmd_simulate(const std::string& config_path, const fs::path& outdir,
                 std::optional<std::uint64_t> seed_flag) {
    const json cfg = load_config(config_path);
    const std::string process = require(cfg, "process").get<std::string>();
    const ccp::Kernel kernel = kernel_of(cfg);
    const ccp::io::LabeledSites sites = sites_of(cfg);
    const int n = require(cfg, "n").get<int>();
    const int grid_m = cfg.value("grid_m", 200);
    const std::uint64_t seed = seed_or_entropy(seed_flag);

    ccp::ReplicateMatrix z;
    if (process == "cauchy") {
        const auto grid = ccp::SimGrid::default_for(sites.sites, kernel, grid_m);
        z = ccp::simulate_cauchy(kernel, sites.sites, grid, n, seed);
    } else if (process == "mixture") {
        const ccp::MixtureModel model{kernel, gaussian_of(cfg),
                                      require(cfg, "beta").get<double>()};
        const auto grid = ccp::SimGrid::default_for(sites.sites, kernel, grid_m);
        z = ccp::simulate_mixture(model, sites.sites, grid, n, seed);
    } else if (process == "ev") {
        z = ccp::simulate_ev(kernel, sites.sites, n, seed);
    } else {
        throw ConfigError("unknown process '" + process + "'");
    }
    if (cfg.value("scale", "raw") == "uniform") z = ccp::to_uniform(z);

    fs::create_directories(outdir);
    ccp::io::write_sites(outdir / "sites.csv", sites);
    ccp::io::write_observations(outdir / "observations.csv", sites.labels, z);
    json meta{{"process", process}, {"kernel", kernel}, {"n", n},
              {"seed", seed},       {"scale", ccp::scale_name(z.scale)}};
    if (process == "cauchy" || process == "mixture") meta["grid_m"] = grid_m;
    ccp::io::write_json(outdir / "meta.json", meta);
    return 0;
}

int cmd_fit(const std::string& sites_path, const std::string& obs_path,
            const std::string& config_path, const fs::path& outdir,
            std::optional<std::uint64_t> seed_flag) {
    const json cfg = load_config(config_path);
    const std::string fitter = require(cfg, "fitter").get<std::string>();
    const ccp::KernelFamily family =
        ccp::family_from_name(require(cfg, "family").get<std::string>());
    const double threshold_u = cfg.value("threshold_u", 0.95);
    const ccp::Weights weights = weights_of(cfg);
    const ccp::OptimizerConfig opt = optimizer_of(cfg, seed_or_entropy(seed_flag));

    const ccp::io::Dataset ds = ccp::io::read_dataset(sites_path, obs_path);
    const ccp::ReplicateMatrix u = ccp::to_uniform(ds.observations);

    ccp::FitResult fit;
    if (fitter == "scales") {
        fit = ccp::fit_kernel_by_scales(u, family, weights, opt);
    } else if (fitter == "taildep") {
        fit = ccp::fit_kernel_by_taildep(u, family, threshold_u, weights, opt);
    } else if (fitter == "mixture") {
        const ccp::FitResult kfit =
            ccp::fit_kernel_by_taildep(u, family, threshold_u, weights, opt);
        ccp::MixtureFitConfig mc;
        if (cfg.contains("mixture")) {
            const json jm = cfg.at("mixture");
            mc.alpha = jm.value("alpha", mc.alpha);
            mc.tau = jm.value("tau", mc.tau);
            mc.fit_alpha = jm.value("fit_alpha", mc.fit_alpha);
            mc.fit_tau = jm.value("fit_tau", mc.fit_tau);
            if (jm.contains("beta_grid"))
                mc.beta_grid = jm.at("beta_grid").get<std::vector<double>>();
        }
        fit = ccp::fit_mixture(u, ccp::Kernel::make(family, kfit.theta_K), mc,
                               weights, opt);
    } else if (fitter == "ev") {
        fit = ccp::fit_ev_pairwise(u, family, weights, opt);
    } else {
        throw ConfigError("unknown fitter '" + fitter + "'");
    }

    fs::create_directories(outdir);
    json jfit = fit;
    jfit["fitter"] = fitter;
    jfit["threshold_u"] = threshold_u;
    ccp::io::write_json(outdir / "fit.json", jfit);

    ccp::io::Table pairs;
    pairs.header = {"j", "k", "delta", "c_hat", "lambda_hat", "rho_hat"};
    for (const auto& s : ccp::compute_pair_summaries(u, threshold_u))
        pairs.rows.push_back({double(s.j), double(s.k), s.delta, s.c_hat,
                              s.lambda_hat, s.rho_hat});
    ccp::io::write_table(outdir / "pairs.csv", pairs);
    return 0;
}

ccp::StudyConfig cell_config(const json& jc, std::uint64_t seed, int jobs) {
    ccp::StudyConfig sc;
    sc.process = ccp::process_from_name(require(jc, "process").get<std::string>());
    sc.kernel = kernel_of(jc);
    if (sc.process == ccp::ProcessType::Mixture) {
        sc.gaussian = gaussian_of(jc);
        sc.beta = require(jc, "beta").get<double>();
        sc.mixture.alpha = sc.gaussian.alpha;
        sc.mixture.tau = sc.gaussian.tau;
    }
    sc.lattice_m = require(jc, "lattice_m").get<int>();
    sc.n = require(jc, "n").get<int>();
    sc.repetitions = jc.value("repetitions", 100);
    sc.threshold_u = jc.value("threshold_u", 0.95);
    sc.grid_m = jc.value("grid_m", 200);
    sc.seed = seed;
    sc.jobs = jobs;
    sc.optimizer = optimizer_of(jc, seed);
    return sc;
}

int cmd_study(const std::string& config_path, const fs::path& outdir,
              std::optional<std::uint64_t> seed_flag, int jobs) {
    if (!seed_flag) throw ConfigError("study mode requires --seed");
    const json cfg = load_config(config_path);
    std::vector<json> cells;
    if (cfg.contains("cells"))
        for (const auto& c : cfg.at("cells")) cells.push_back(c);
    else
        cells.push_back(cfg);

    std::vector<ccp::StudyReport> reports;
    for (size_t i = 0; i < cells.size(); ++i)
        reports.push_back(ccp::run_study(
            cell_config(cells[i], ccp::derive_seed(*seed_flag, i), jobs)));

    fs::create_directories(outdir);
    ccp::io::write_json(outdir / "report.json", json(reports));

    // flat table, one row per cell; rmse columns from the union of params
    std::vector<std::string> params;
    for (const auto& r : reports)
        for (const auto& p : r.param_names)
            if (std::find(params.begin(), params.end(), p) == params.end())
                params.push_back(p);
    std::ofstream out(outdir / "report.csv");
    if (!out) throw std::runtime_error("cannot open report.csv for writing");
    out << "process,d,n,repetitions,failures,delta_max,delta_avg";
    for (const auto& p : params) out << ",rmse_" << p;
    out << '\n';
    for (const auto& r : reports) {
        out << r.config_echo.at("process").get<std::string>() << ','
            << r.config_echo.at("d").get<int>() << ','
            << r.config_echo.at("n").get<int>() << ','
            << r.config_echo.at("repetitions").get<int>() << ',' << r.n_failures
            << ',' << ccp::io::format_g17(r.delta_max) << ','
            << ccp::io::format_g17(r.delta_avg);
        for (const auto& p : params) {
            const auto it = std::find(r.param_names.begin(), r.param_names.end(), p);
            out << ',';
            if (it != r.param_names.end())
                out << ccp::io::format_g17(r.rmse[it - r.param_names.begin()]);
        }
        out << '\n';
    }
    return 0;
}

int cmd_diagnose(const std::string& sites_path, const std::string& obs_path,
                 const std::string& fit_path, const fs::path& outdir,
                 std::optional<std::uint64_t> seed_flag, const std::string& config_path) {
    const json jfit = load_config(fit_path);
    ccp::MixtureModel model{
        ccp::Kernel::make(ccp::family_from_name(require(jfit, "family").get<std::string>()),
                          require(jfit, "theta_K").get<std::vector<double>>()),
        {}, 0.0};
    if (jfit.contains("theta_G")) {
        model.gaussian.rate = jfit.at("theta_G").at("rate").get<double>();
        model.gaussian.alpha = jfit.at("theta_G").value("alpha", 1.0);
        model.gaussian.tau = jfit.at("theta_G").value("tau", 0.0);
    }
    if (jfit.contains("beta")) model.beta = jfit.at("beta").get<double>();

    json cfg = config_path.empty() ? json::object() : load_config(config_path);
    const double threshold_u = cfg.value("threshold_u", 0.95);
    const int mc = cfg.value("mc_replicates", 20000);
    const double delta_min = cfg.value("delta_min", 0.0);

    const ccp::io::Dataset ds = ccp::io::read_dataset(sites_path, obs_path);
    const ccp::ReplicateMatrix u = ccp::to_uniform(ds.observations);
    const auto summaries = ccp::compute_pair_summaries(u, threshold_u);

    std::vector<ccp::CurvePoint> empirical;
    double delta_max = 0.0;
    for (const auto& s : summaries) {
        if (s.delta < delta_min) continue;
        empirical.push_back({s.delta, "spearman", s.rho_hat, "empirical"});
        empirical.push_back({s.delta, "tail_dep", s.lambda_hat, "empirical"});
        delta_max = std::max(delta_max, s.delta);
    }
    if (empirical.empty())
        throw std::runtime_error("diagnose: no site pairs left after the distance filter");

    std::vector<double> deltas;
    if (cfg.contains("deltas"))
        deltas = cfg.at("deltas").get<std::vector<double>>();
    else
        for (int i = 0; i <= 20; ++i) deltas.push_back(delta_max * i / 20.0);
    const auto curves =
        ccp::dependence_curves(model, deltas, mc, seed_or_entropy(seed_flag),
                               threshold_u, cfg.value("grid_m", 200));

    fs::create_directories(outdir);
    write_curves_csv(outdir / "empirical.csv", empirical);
    write_curves_csv(outdir / "curves.csv", curves);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cauchy kernel-convolution spatial processes"};
    app.require_subcommand(1);
    app.fallthrough();  // --seed/--jobs/--output may follow the subcommand

    std::string config_path, sites_path, obs_path, fit_path, output = ".";
    std::optional<std::uint64_t> seed;
    int jobs = 0;
    app.add_option("--seed", seed, "master RNG seed");
    app.add_option("--jobs", jobs, "worker count (default: hardware)");
    app.add_option("--output", output, "output directory");

    auto* sim = app.add_subcommand("simulate", "simulate a spatial process");
    sim->add_option("--config", config_path, "JSON config")->required();

    auto* fit = app.add_subcommand("fit", "fit a model to a CSV dataset");
    fit->add_option("--config", config_path, "JSON config")->required();
    fit->add_option("--sites", sites_path, "sites CSV")->required();
    fit->add_option("--observations", obs_path, "observations CSV")->required();

    auto* study = app.add_subcommand("study", "run a simulation study");
    study->add_option("--config", config_path, "JSON config")->required();

    auto* diag = app.add_subcommand("diagnose", "model-vs-empirical curves");
    diag->add_option("--config", config_path, "JSON config (optional)");
    diag->add_option("--sites", sites_path, "sites CSV")->required();
    diag->add_option("--observations", obs_path, "observations CSV")->required();
    diag->add_option("--fit", fit_path, "fit result JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, output, seed);
        if (fit->parsed()) return cmd_fit(sites_path, obs_path, config_path, output, seed);
        if (study->parsed()) return cmd_study(config_path, output, seed, jobs);
        return cmd_diagnose(sites_path, obs_path, fit_path, output, seed, config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
