#include "l1ica/experiment.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace l1ica;

namespace {

struct Options {
    std::string config;
    std::string preset;
    std::string algo;
    std::vector<double> alpha;
    std::vector<double> kappa;
    std::optional<Index> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> psi;
    std::optional<double> epsilon;
    std::string out;
    std::optional<int> jobs;
    bool baseline = false;
    std::string data;
    std::string reports;
    std::string timing;
};

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--config", o.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--preset", o.preset, "Dataset preset")->check(CLI::IsMember(preset_names()));
    cmd->add_option("--out", o.out, "Output directory (default $L1ICA_OUT or l1ica_out)");
    cmd->add_option("--seed", o.seed, "Base seed");
}

void add_fit(CLI::App* cmd, Options& o)
{
    cmd->add_option("--algo", o.algo, "fastica or l1ica")->check(CLI::IsMember({"fastica", "l1ica"}));
    cmd->add_option("--alpha", o.alpha, "l1 weight; a comma list makes a grid")->delimiter(',');
    cmd->add_option("--kappa", o.kappa, "Sparsity of Q#; a comma list makes a grid")->delimiter(',');
    cmd->add_option("--trials", o.trials, "Trials per cell")->check(CLI::PositiveNumber);
    cmd->add_option("--epsilon", o.epsilon, "Sparsity threshold")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", o.jobs, "Concurrent trials")->check(CLI::PositiveNumber);
    cmd->add_flag("--baseline", o.baseline, "Also fit a FastICA cell");
}

bool config_sets_out(const std::string& path)
{
    if (path.empty())
        return false;
    std::ifstream in(path);
    return nlohmann::json::parse(in, nullptr, false).contains("out");
}

// Defaults, then $L1ICA_OUT, then the config file, then flags.
ExperimentConfig resolve(const Options& o)
{
    ExperimentConfig c;
    if (!o.config.empty())
        c = load_config(o.config);
    if (const char* env = std::getenv("L1ICA_OUT"); env && *env && !config_sets_out(o.config))
        c.out = env;
    if (!o.preset.empty())
        c.dataset = preset(o.preset);
    if (!o.algo.empty())
        c.algorithm = parse_algorithm(o.algo);
    if (o.alpha.size() == 1) {
        c.params.alpha = o.alpha.front();
        c.alpha_grid.clear();
    } else if (!o.alpha.empty()) {
        c.alpha_grid = o.alpha;
    }
    if (o.kappa.size() == 1) {
        c.params.kappa = o.kappa.front();
        c.kappa_grid.clear();
    } else if (!o.kappa.empty()) {
        c.kappa_grid = o.kappa;
    }
    if (o.trials)
        c.trials = *o.trials;
    if (o.seed)
        c.base_seed = *o.seed;
    if (o.psi)
        c.psi = *o.psi;
    if (o.epsilon)
        c.epsilon = *o.epsilon;
    if (!o.out.empty())
        c.out = o.out;
    if (o.jobs)
        c.jobs = *o.jobs;
    if (o.baseline)
        c.baseline = true;
    c.validate();
    return c;
}

int report_fit(const FitSummary& s)
{
    if (s.failures > 0) {
        std::cerr << "l1ica: " << s.failures << " of " << s.reports << " trials failed (see reports.jsonl)\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"l1-regularised ICA experiments"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    add_common(gen, o);

    auto* fit = app.add_subcommand("fit", "Fit trials on a dataset");
    add_common(fit, o);
    add_fit(fit, o);
    fit->add_option("--data", o.data, "Dataset directory (default <out>/data)");
    fit->add_option("--timing", o.timing, "Timing vector file for correlations")->check(CLI::ExistingFile);

    auto* eval = app.add_subcommand("eval", "Aggregate trial reports");
    eval->add_option("--config", o.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
    eval->add_option("--out", o.out, "Output directory (default $L1ICA_OUT or l1ica_out)");
    eval->add_option("--reports", o.reports, "Reports file (default <out>/reports.jsonl)");
    eval->add_option("--psi", o.psi, "Success threshold on the Amari distance")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "gen, fit and eval over an (alpha, kappa) grid");
    add_common(sweep, o);
    add_fit(sweep, o);
    sweep->add_option("--psi", o.psi, "Success threshold on the Amari distance")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const ExperimentConfig c = resolve(o);
        if (*gen) {
            cmd_gen(c);
        } else if (*fit) {
            const fs::path data = o.data.empty() ? c.out / "data" : fs::path(o.data);
            std::optional<fs::path> timing;
            if (!o.timing.empty())
                timing = o.timing;
            return report_fit(cmd_fit(c, data, timing));
        } else if (*eval) {
            const fs::path reports = o.reports.empty() ? c.out / "reports.jsonl" : fs::path(o.reports);
            cmd_eval(reports, c.out, c.psi);
        } else if (*sweep) {
            return report_fit(cmd_sweep(c));
        }
    } catch (const std::exception& e) {
        std::cerr << "l1ica: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
