#include "l1ica/experiment.hpp"

#include "l1ica/fastica.hpp"
#include "l1ica/matrix_io.hpp"
#include "l1ica/metrics.hpp"
#include "l1ica/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace l1ica {

namespace {

std::vector<SourceRowSpec> laplace_uniform() { return {{Laplace{}, 0.2}, {Uniform{}, 0.8}}; }
std::vector<SourceRowSpec> lognormal_uniform() { return {{LogNormal{}, 0.2}, {Uniform{}, 0.8}}; }

DatasetSpec make(std::string name, Index p, double chi, double sigma, std::vector<SourceRowSpec> sources)
{
    DatasetSpec d;
    d.name = std::move(name);
    d.p = p;
    d.chi = chi;
    d.noise_sigma = sigma;
    d.sources = std::move(sources);
    return d;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where)
{
    require(j.is_object(), std::string(where) + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
            throw std::invalid_argument(std::string(where) + ": unknown key '" + key + "'");
    }
}

json source_to_json(const SourceRowSpec& s)
{
    json j;
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Laplace>)
                j = {{"distribution", "laplace"}, {"mu", d.mu}, {"sigma", d.sigma}};
            else if constexpr (std::is_same_v<T, LogNormal>)
                j = {{"distribution", "lognormal"}, {"mu", d.mu}, {"sigma", d.sigma}};
            else
                j = {{"distribution", "uniform"}, {"c1", d.c1}, {"c2", d.c2}};
        },
        s.distribution);
    j["fraction"] = s.fraction;
    return j;
}

SourceRowSpec source_from_json(const json& j)
{
    check_keys(j, {"distribution", "mu", "sigma", "c1", "c2", "fraction"}, "source");
    const auto kind = j.at("distribution").get<std::string>();
    SourceRowSpec s;
    s.fraction = j.value("fraction", 1.0);
    if (kind == "laplace")
        s.distribution = Laplace{j.value("mu", 0.0), j.value("sigma", 1.0)};
    else if (kind == "lognormal")
        s.distribution = LogNormal{j.value("mu", 0.0), j.value("sigma", 1.0)};
    else if (kind == "uniform")
        s.distribution = Uniform{j.value("c1", 0.0), j.value("c2", 1.0)};
    else
        throw std::invalid_argument("source: unknown distribution '" + kind + "'");
    return s;
}

json dataset_to_json(const DatasetSpec& d)
{
    json sources = json::array();
    for (const auto& s : d.sources)
        sources.push_back(source_to_json(s));
    return {{"name", d.name}, {"p", d.p}, {"K", d.K}, {"N", d.N}, {"chi", d.chi}, {"noise_sigma", d.noise_sigma},
            {"sources", sources}, {"timing_block", d.timing_block}};
}

DatasetSpec dataset_from_json(const json& j)
{
    check_keys(j, {"preset", "name", "p", "K", "N", "chi", "noise_sigma", "sources", "timing_block"}, "dataset");
    DatasetSpec d = j.contains("preset") ? preset(j.at("preset").get<std::string>()) : DatasetSpec{};
    if (!j.contains("preset") && !j.contains("sources"))
        d.sources = laplace_uniform();
    d.name = j.value("name", d.name);
    d.p = j.value("p", d.p);
    d.K = j.value("K", d.K);
    d.N = j.value("N", d.N);
    d.chi = j.value("chi", d.chi);
    d.noise_sigma = j.value("noise_sigma", d.noise_sigma);
    d.timing_block = j.value("timing_block", d.timing_block);
    if (j.contains("sources")) {
        d.sources.clear();
        for (const auto& s : j.at("sources"))
            d.sources.push_back(source_from_json(s));
    }
    return d;
}

json params_to_json(const IcaParams& p)
{
    json j = {{"alpha", p.alpha},
              {"kappa", p.kappa},
              {"max_dc_iter", p.max_dc_iter},
              {"rho", p.rho},
              {"zeta", p.zeta},
              {"eta", p.eta},
              {"lipschitz0", p.lipschitz0},
              {"admm_tol", p.admm_tol},
              {"admm_max_iter", p.admm_max_iter},
              {"dc_tol", p.dc_tol},
              {"max_backtracks", p.max_backtracks}};
    if (p.k0)
        j["k0"] = *p.k0;
    return j;
}

IcaParams params_from_json(const json& j)
{
    check_keys(j,
               {"alpha", "kappa", "k0", "max_dc_iter", "rho", "zeta", "eta", "lipschitz0", "admm_tol", "admm_max_iter",
                "dc_tol", "max_backtracks"},
               "params");
    IcaParams p;
    p.alpha = j.value("alpha", p.alpha);
    p.kappa = j.value("kappa", p.kappa);
    if (j.contains("k0"))
        p.k0 = j.at("k0").get<Index>();
    p.max_dc_iter = j.value("max_dc_iter", p.max_dc_iter);
    p.rho = j.value("rho", p.rho);
    p.zeta = j.value("zeta", p.zeta);
    p.eta = j.value("eta", p.eta);
    p.lipschitz0 = j.value("lipschitz0", p.lipschitz0);
    p.admm_tol = j.value("admm_tol", p.admm_tol);
    p.admm_max_iter = j.value("admm_max_iter", p.admm_max_iter);
    p.dc_tol = j.value("dc_tol", p.dc_tol);
    p.max_backtracks = j.value("max_backtracks", p.max_backtracks);
    return p;
}

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Vector row_vector(const Matrix& m)
{
    require(m.rows() == 1 || m.cols() == 1, "timing vector must be a single row or column");
    return m.rows() == 1 ? Vector(m.row(0).transpose()) : Vector(m.col(0));
}

struct LoadedData {
    Matrix X;
    std::optional<Matrix> A_star;
    std::optional<Vector> timing;
};

LoadedData load_data(const fs::path& data_dir, const std::optional<fs::path>& timing_path)
{
    LoadedData d;
    d.X = load_matrix(data_dir / "X.txt");
    if (fs::exists(data_dir / "A_star.txt"))
        d.A_star = load_matrix(data_dir / "A_star.txt");
    const fs::path tp = timing_path ? *timing_path : data_dir / "timing.txt";
    if (timing_path || fs::exists(tp))
        d.timing = row_vector(load_matrix(tp));
    if (d.A_star)
        require(d.A_star->rows() == d.X.rows(), "A_star row count does not match X");
    if (d.timing)
        require(d.timing->size() == d.X.cols(), "timing vector length does not match X");
    return d;
}

struct TrialResult {
    ordered_json report;
    ordered_json timing;
    std::optional<IcaModel> model;
};

// Runs all (cell, trial) jobs over a bounded pool; results come back in job
// order so that output does not depend on scheduling.
std::vector<std::vector<TrialResult>> run_cells(const ExperimentConfig& config, const std::vector<Cell>& cells,
                                                const LoadedData& data, Index K)
{
    struct Job {
        std::size_t cell;
        Index trial;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (Index t = 0; t < config.trials; ++t)
            jobs.push_back({c, t});

    std::vector<std::vector<TrialResult>> results(cells.size(), std::vector<TrialResult>(config.trials));
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(config.jobs, static_cast<int>(jobs.size())));

    auto work = [&] {
        if (workers > 1)
            omp_set_num_threads(1);
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const auto [c, t] = jobs[i];
            const Cell& cell = cells[c];
            const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(t);
            IcaParams params = config.params;
            params.alpha = cell.alpha;
            params.kappa = cell.kappa;
            params.seed = seed;
            TrialResult& r = results[c][t];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                IcaModel model;
                r.report = run_trial(data.X, K, cell, params, seed, t, config.epsilon,
                                     data.A_star ? &*data.A_star : nullptr, data.timing ? &*data.timing : nullptr,
                                     &model);
                r.model = std::move(model);
            } catch (const std::exception& e) {
                r.report = ordered_json{{"cell", cell.name()}, {"trial", t}, {"seed", seed}, {"error", e.what()}};
            }
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            r.timing = ordered_json{{"cell", cell.name()}, {"trial", t}, {"seconds", seconds}};
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    return results;
}

std::string jsonl(const std::vector<ordered_json>& lines)
{
    std::string s;
    for (const auto& l : lines)
        s += l.dump() + "\n";
    return s;
}

// Writes one cell's models and reports; returns the number of failed trials.
Index write_cell(const fs::path& out, const Cell& cell, std::vector<TrialResult>& results)
{
    const fs::path dir = out / "models" / cell.name();
    fs::create_directories(dir);
    std::vector<ordered_json> reports, timings;
    Index failures = 0;
    for (std::size_t t = 0; t < results.size(); ++t) {
        auto& r = results[t];
        if (r.model) {
            const fs::path td = dir / ("trial_" + std::to_string(t));
            fs::create_directories(td);
            save_matrix(r.model->W, td / "W.txt");
            save_matrix(r.model->A, td / "A.txt");
            save_matrix(r.model->S, td / "S.txt");
        } else {
            ++failures;
        }
        reports.push_back(r.report);
        timings.push_back(r.timing);
    }
    write_text(dir / "reports.jsonl", jsonl(reports));
    write_text(dir / "timings.jsonl", jsonl(timings));
    return failures;
}

// Concatenates per-cell reports in cell order.
void collect_reports(const fs::path& out, const std::vector<Cell>& cells)
{
    std::string reports, timings;
    for (const auto& cell : cells) {
        const fs::path dir = out / "models" / cell.name();
        if (fs::exists(dir / "reports.jsonl"))
            reports += read_text(dir / "reports.jsonl");
        if (fs::exists(dir / "timings.jsonl"))
            timings += read_text(dir / "timings.jsonl");
    }
    write_text(out / "reports.jsonl", reports);
    write_text(out / "timings.jsonl", timings);
}

Index resolve_K(const ExperimentConfig& config, const LoadedData& data)
{
    return data.A_star ? data.A_star->cols() : config.dataset.K;
}

struct Accumulator {
    std::vector<double> values;
    void add(double v) { values.push_back(v); }
};

std::string cell_fields(const std::vector<double>& v)
{
    if (v.empty())
        return ",";
    return format_number(mean(v)) + "," + format_number(standard_error(v));
}

} // namespace

std::string to_string(Algorithm a) { return a == Algorithm::fastica ? "fastica" : "l1ica"; }

Algorithm parse_algorithm(const std::string& name)
{
    if (name == "fastica")
        return Algorithm::fastica;
    if (name == "l1ica")
        return Algorithm::l1ica;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected fastica or l1ica)");
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"X1", "X2", "X3", "X4", "X3-small", "X4-small"};
    return names;
}

DatasetSpec preset(const std::string& name)
{
    if (name == "X1")
        return make(name, 10, 0.8, 1.0, laplace_uniform());
    if (name == "X2")
        return make(name, 10, 0.8, 1.0, lognormal_uniform());
    if (name == "X3")
        return make(name, 10000, 0.999, 1.0, lognormal_uniform());
    if (name == "X4")
        return make(name, 10000, 0.999, 2.0, lognormal_uniform());
    if (name == "X3-small")
        return make(name, 500, 0.99, 1.0, lognormal_uniform());
    if (name == "X4-small")
        return make(name, 500, 0.99, 2.0, lognormal_uniform());
    throw std::invalid_argument("unknown preset '" + name + "'");
}

void ExperimentConfig::validate() const
{
    require(dataset.p >= 1 && dataset.K >= 1 && dataset.N >= 2, "dataset dimensions must be positive (N >= 2)");
    require(dataset.K <= dataset.p, "K must not exceed p");
    require(dataset.chi >= 0.0 && dataset.chi < 1.0, "chi must lie in [0, 1)");
    require(dataset.noise_sigma >= 0.0, "noise_sigma must be nonnegative");
    require(dataset.timing_block >= 0, "timing_block must be nonnegative");
    (void)source_row_counts(dataset.K, dataset.sources);
    require(trials >= 1, "trials must be at least 1");
    require(psi > 0.0, "psi must be positive");
    require(epsilon > 0.0, "epsilon must be positive");
    require(jobs >= 1, "jobs must be at least 1");
    require(!out.empty(), "output directory must be set");
    for (double a : alpha_grid)
        require(a >= 0.0, "alpha grid values must be nonnegative");
    for (double k : kappa_grid)
        require(k >= 0.0 && k < 1.0, "kappa grid values must lie in [0, 1)");
    params.validate();
}

void to_json(json& j, const ExperimentConfig& c)
{
    j = {{"dataset", dataset_to_json(c.dataset)},
         {"algorithm", to_string(c.algorithm)},
         {"params", params_to_json(c.params)},
         {"alpha_grid", c.alpha_grid},
         {"kappa_grid", c.kappa_grid},
         {"baseline", c.baseline},
         {"trials", c.trials},
         {"base_seed", c.base_seed},
         {"psi", c.psi},
         {"epsilon", c.epsilon},
         {"out", c.out.string()},
         {"jobs", c.jobs}};
}

void from_json(const json& j, ExperimentConfig& c)
{
    check_keys(j,
               {"dataset", "algorithm", "params", "alpha_grid", "kappa_grid", "baseline", "trials", "base_seed", "psi",
                "epsilon", "out", "jobs"},
               "config");
    c = ExperimentConfig{};
    if (j.contains("dataset"))
        c.dataset = dataset_from_json(j.at("dataset"));
    if (j.contains("algorithm"))
        c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (j.contains("params"))
        c.params = params_from_json(j.at("params"));
    c.alpha_grid = j.value("alpha_grid", c.alpha_grid);
    c.kappa_grid = j.value("kappa_grid", c.kappa_grid);
    c.baseline = j.value("baseline", c.baseline);
    c.trials = j.value("trials", c.trials);
    c.base_seed = j.value("base_seed", c.base_seed);
    c.psi = j.value("psi", c.psi);
    c.epsilon = j.value("epsilon", c.epsilon);
    if (j.contains("out"))
        c.out = j.at("out").get<std::string>();
    c.jobs = j.value("jobs", c.jobs);
    if (j.contains("alpha_grid"))
        require(!c.alpha_grid.empty(), "alpha_grid must not be empty");
    if (j.contains("kappa_grid"))
        require(!c.kappa_grid.empty(), "kappa_grid must not be empty");
}

ExperimentConfig load_config(const fs::path& path)
{
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    try {
        return j.get<ExperimentConfig>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

std::string Cell::name() const
{
    if (algorithm == Algorithm::fastica)
        return "fastica";
    char buf[64];
    std::snprintf(buf, sizeof buf, "l1ica_a%g_k%g", alpha, kappa);
    return buf;
}

std::vector<Cell> expand_cells(const ExperimentConfig& config)
{
    std::vector<Cell> cells;
    if (config.baseline || config.algorithm == Algorithm::fastica)
        cells.push_back({Algorithm::fastica, 0.0, 0.0});
    if (config.algorithm == Algorithm::fastica)
        return cells;
    std::vector<double> alphas = config.alpha_grid.empty() ? std::vector<double>{config.params.alpha} : config.alpha_grid;
    std::vector<double> kappas = config.kappa_grid.empty() ? std::vector<double>{config.params.kappa} : config.kappa_grid;
    std::sort(alphas.begin(), alphas.end());
    std::sort(kappas.begin(), kappas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
    kappas.erase(std::unique(kappas.begin(), kappas.end()), kappas.end());
    for (double a : alphas)
        for (double k : kappas)
            cells.push_back({Algorithm::l1ica, a, k});
    return cells;
}

Dataset generate_dataset(const DatasetSpec& spec, std::uint64_t base_seed)
{
    Dataset d;
    d.truth.chi = spec.chi;
    d.truth.noise_sigma = spec.noise_sigma;
    d.truth.S_star = gen_sources(spec.K, spec.N, spec.sources, derive_seed(base_seed, "sources"));
    if (spec.timing_block > 0) {
        Vector timing(spec.N);
        for (Index t = 0; t < spec.N; ++t)
            timing[t] = (t / spec.timing_block) % 2 == 0 ? 1.0 : 0.0;
        d.truth.S_star.row(0) = timing.transpose();
        d.timing = std::move(timing);
    }
    constexpr std::uint64_t max_draws = 1000;
    for (std::uint64_t draw = 0;; ++draw) {
        if (draw == max_draws)
            throw NumericalError("could not draw a mixing matrix without zero columns");
        d.truth.A_star = gen_mixing(spec.p, spec.K, spec.chi, derive_seed(base_seed, "mixing", draw));
        if ((d.truth.A_star.colwise().squaredNorm().array() > 0.0).all())
            break;
    }
    d.X = gen_observation(d.truth, derive_seed(base_seed, "noise"));
    return d;
}

ordered_json run_trial(const Matrix& X, Index K, const Cell& cell, const IcaParams& params, std::uint64_t seed,
                       Index trial, double epsilon, const Matrix* A_star, const Vector* timing, IcaModel* model_out)
{
    IcaModel model = cell.algorithm == Algorithm::fastica ? fastica_fit(X, K, seed) : l1ica_fit(X, K, params);

    ordered_json r;
    r["cell"] = cell.name();
    r["algorithm"] = to_string(cell.algorithm);
    if (cell.algorithm == Algorithm::l1ica) {
        r["alpha"] = cell.alpha;
        r["kappa"] = cell.kappa;
        r["k0"] = model.whitening.k0;
    }
    r["trial"] = trial;
    r["seed"] = seed;
    r["p"] = X.rows();
    r["K"] = K;
    r["N"] = X.cols();
    r["sparsity"] = sparsity(model.A, epsilon);
    r["zero_columns"] = zero_columns(model.A);
    r["mak"] = mak(model.S);
    r["rmse"] = rmse(model.whitening.center(X), model.A, model.S);
    if (A_star)
        r["amari"] = amari_distance(unmixing_product(model.W, model.whitening.Q, *A_star));
    if (timing) {
        std::vector<double> corr;
        for (Index i = 0; i < model.S.rows(); ++i) {
            const Vector s = model.S.row(i).transpose();
            corr.push_back(correlation({s.data(), static_cast<std::size_t>(s.size())},
                                       {timing->data(), static_cast<std::size_t>(timing->size())}));
        }
        r["max_correlation"] = *std::max_element(corr.begin(), corr.end());
        r["correlations"] = corr;
    }
    Index iterations = 0, backtracks = 0, admm = 0, restarts = 0;
    std::vector<double> costs;
    for (const auto& c : model.components) {
        iterations += c.iterations;
        backtracks += c.backtracks;
        admm += c.admm_iterations;
        restarts += c.restarts;
        costs.push_back(c.final_cost);
    }
    r["converged"] = model.converged();
    r["iterations"] = iterations;
    if (cell.algorithm == Algorithm::l1ica) {
        r["backtracks"] = backtracks;
        r["admm_iterations"] = admm;
    }
    r["restarts"] = restarts;
    r["final_costs"] = costs;
    if (model_out)
        *model_out = std::move(model);
    return r;
}

void cmd_gen(const ExperimentConfig& config)
{
    config.validate();
    const Dataset d = generate_dataset(config.dataset, config.base_seed);
    const fs::path dir = config.out / "data";
    fs::create_directories(dir);
    save_matrix(d.X, dir / "X.txt");
    save_matrix(d.truth.A_star, dir / "A_star.txt");
    save_matrix(d.truth.S_star, dir / "S_star.txt");
    if (d.timing)
        save_matrix(Matrix(d.timing->transpose()), dir / "timing.txt");
    ordered_json manifest;
    manifest["dataset"] = dataset_to_json(config.dataset);
    manifest["base_seed"] = config.base_seed;
    manifest["seeds"] = {{"sources", derive_seed(config.base_seed, "sources")},
                         {"noise", derive_seed(config.base_seed, "noise")}};
    manifest["files"] = {"X.txt", "A_star.txt", "S_star.txt"};
    if (d.timing)
        manifest["files"].push_back("timing.txt");
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

FitSummary cmd_fit(const ExperimentConfig& config, const fs::path& data_dir, const std::optional<fs::path>& timing_path)
{
    config.validate();
    const LoadedData data = load_data(data_dir, timing_path);
    const Index K = resolve_K(config, data);
    const auto cells = expand_cells(config);
    auto results = run_cells(config, cells, data, K);
    FitSummary summary;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        summary.failures += write_cell(config.out, cells[c], results[c]);
        summary.reports += static_cast<Index>(results[c].size());
    }
    collect_reports(config.out, cells);
    return summary;
}

std::vector<json> read_reports(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::vector<json> reports;
    std::string line;
    Index lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            reports.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    require(!reports.empty(), path.string() + ": no reports");
    return reports;
}

void cmd_eval(const fs::path& reports_path, const fs::path& out_dir, double psi)
{
    require(psi > 0.0, "psi must be positive");
    const auto reports = read_reports(reports_path);

    struct CellStats {
        std::string algorithm;
        double alpha = 0.0, kappa = 0.0;
        Index failed = 0, converged = 0;
        Accumulator sparsity, mak, rmse, amari, max_corr;
    };
    std::map<std::string, CellStats> cells;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_algorithm; // sparsity, AD
    std::optional<std::array<Index, 3>> shape;

    for (const auto& r : reports) {
        const auto name = r.at("cell").get<std::string>();
        auto& s = cells[name];
        if (r.contains("error")) {
            ++s.failed;
            continue;
        }
        const std::array<Index, 3> this_shape{r.at("p").get<Index>(), r.at("K").get<Index>(), r.at("N").get<Index>()};
        if (shape && *shape != this_shape)
            throw std::invalid_argument("mixed-shape reports: cannot aggregate fits of different data sizes");
        shape = this_shape;
        s.algorithm = r.at("algorithm").get<std::string>();
        s.alpha = r.value("alpha", 0.0);
        s.kappa = r.value("kappa", 0.0);
        s.sparsity.add(r.at("sparsity").get<double>());
        s.mak.add(r.at("mak").get<double>());
        s.rmse.add(r.at("rmse").get<double>());
        if (r.at("converged").get<bool>())
            ++s.converged;
        if (r.contains("amari")) {
            s.amari.add(r.at("amari").get<double>());
            auto& [sp, ad] = by_algorithm[s.algorithm];
            sp.push_back(r.at("sparsity").get<double>());
            ad.push_back(r.at("amari").get<double>());
        }
        if (r.contains("max_correlation"))
            s.max_corr.add(r.at("max_correlation").get<double>());
    }

    std::vector<std::pair<std::string, const CellStats*>> order;
    for (const auto& [name, s] : cells)
        order.emplace_back(name, &s);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        const auto ka = std::make_tuple(a.second->algorithm != "fastica", a.second->alpha, a.second->kappa, a.first);
        const auto kb = std::make_tuple(b.second->algorithm != "fastica", b.second->alpha, b.second->kappa, b.first);
        return ka < kb;
    });

    fs::create_directories(out_dir);
    std::string csv = "cell,algorithm,alpha,kappa,trials,failed,converged,sparsity_mean,sparsity_se,mak_mean,mak_se,"
                      "rmse_mean,rmse_se,amari_mean,amari_se,sr,max_correlation_mean,max_correlation_se\n";
    for (const auto& [name, s] : order) {
        const bool sparse = s->algorithm == "l1ica";
        csv += name + "," + s->algorithm + "," + (sparse ? format_number(s->alpha) : "") + "," +
               (sparse ? format_number(s->kappa) : "") + "," + std::to_string(s->sparsity.values.size()) + "," +
               std::to_string(s->failed) + "," + std::to_string(s->converged) + "," + cell_fields(s->sparsity.values) +
               "," + cell_fields(s->mak.values) + "," + cell_fields(s->rmse.values) + "," +
               cell_fields(s->amari.values) + "," +
               (s->amari.values.empty() ? "" : format_number(success_rate(s->amari.values, psi))) + "," +
               cell_fields(s->max_corr.values) + "\n";
    }
    write_text(out_dir / "aggregate.csv", csv);

    std::string bins = "algorithm,bin_center,lo,hi,frequency,sr\n";
    for (const auto& [algorithm, values] : by_algorithm) {
        for (const auto& b : success_by_sparsity(values.first, values.second, psi))
            bins += algorithm + "," + format_number(b.center) + "," + format_number(b.lo) + "," + format_number(b.hi) +
                    "," + std::to_string(b.frequency) + "," + format_number(b.success_rate) + "\n";
    }
    write_text(out_dir / "sr_by_sparsity.csv", bins);
}

FitSummary cmd_sweep(const ExperimentConfig& config)
{
    config.validate();
    const auto cells = expand_cells(config);
    require(!cells.empty(), "sweep grid is empty");
    fs::create_directories(config.out);

    const fs::path manifest_path = config.out / "sweep_manifest.json";
    const json config_json = config;
    std::set<std::string> completed;
    if (fs::exists(manifest_path)) {
        const json m = json::parse(read_text(manifest_path));
        // Resume only if the sweep is the same one; "jobs" does not change results.
        json a = m.at("config"), b = config_json;
        a.erase("jobs");
        b.erase("jobs");
        if (a == b)
            completed = m.at("completed").get<std::set<std::string>>();
    }
    auto save_manifest = [&] {
        ordered_json m;
        m["config"] = config_json;
        std::vector<std::string> done;
        for (const auto& c : cells)
            if (completed.count(c.name()))
                done.push_back(c.name());
        m["completed"] = done;
        write_text(manifest_path, m.dump(2) + "\n");
    };

    const fs::path data_dir = config.out / "data";
    if (completed.empty() || !fs::exists(data_dir / "X.txt")) {
        completed.clear();
        cmd_gen(config);
    }
    save_manifest();

    const LoadedData data = load_data(data_dir, std::nullopt);
    const Index K = resolve_K(config, data);
    FitSummary summary;
    for (const auto& cell : cells) {
        if (completed.count(cell.name()))
            continue;
        auto results = run_cells(config, {cell}, data, K);
        const Index failures = write_cell(config.out, cell, results[0]);
        summary.failures += failures;
        summary.reports += static_cast<Index>(results[0].size());
        if (failures == 0) {
            completed.insert(cell.name());
            save_manifest();
        }
    }
    collect_reports(config.out, cells);
    cmd_eval(config.out / "reports.jsonl", config.out, config.psi);
    return summary;
}

} // namespace l1ica
