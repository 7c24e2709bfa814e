#pragma once

#include "l1ica/datagen.hpp"
#include "l1ica/l1ica.hpp"
#include "l1ica/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace l1ica {

enum class Algorithm { fastica, l1ica };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

/// Synthetic dataset description. A nonzero timing_block replaces source row 0
/// with a 0/1 boxcar that switches every timing_block samples; the boxcar is
/// saved as the timing vector.
struct DatasetSpec {
    std::string name = "custom";
    Index p = 10;
    Index K = 10;
    Index N = 500;
    double chi = 0.8;
    double noise_sigma = 1.0;
    std::vector<SourceRowSpec> sources;
    Index timing_block = 0;
};

/// X1, X2, X3, X4, X3-small, X4-small.
DatasetSpec preset(const std::string& name);
const std::vector<std::string>& preset_names();

struct ExperimentConfig {
    DatasetSpec dataset = preset("X1");
    Algorithm algorithm = Algorithm::l1ica;
    IcaParams params;
    std::vector<double> alpha_grid; // empty: params.alpha alone
    std::vector<double> kappa_grid; // empty: params.kappa alone
    bool baseline = false;          // also fit a FastICA cell
    Index trials = 10;
    std::uint64_t base_seed = 1;
    double psi = 35.0;
    double epsilon = 1e-2;
    std::filesystem::path out = "l1ica_out";
    int jobs = 1;

    void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One (algorithm, alpha, kappa) combination of a sweep.
struct Cell {
    Algorithm algorithm = Algorithm::l1ica;
    double alpha = 0.0;
    double kappa = 0.0;

    std::string name() const;
};

/// Cells in (alpha, kappa) order, with the FastICA baseline first when asked.
std::vector<Cell> expand_cells(const ExperimentConfig& config);

struct Dataset {
    GroundTruth truth;
    Matrix X;
    std::optional<Vector> timing;
};

/// Draws the dataset from config.base_seed. Mixing matrices with an all-zero
/// column are redrawn from the next substream index.
Dataset generate_dataset(const DatasetSpec& spec, std::uint64_t base_seed);

/// Runs one trial and returns its report (without wall times).
nlohmann::ordered_json run_trial(const Matrix& X, Index K, const Cell& cell, const IcaParams& params,
                                 std::uint64_t seed, Index trial, double epsilon, const Matrix* A_star,
                                 const Vector* timing, IcaModel* model_out = nullptr);

struct FitSummary {
    Index reports = 0;
    Index failures = 0;
};

/// Writes <out>/data/{X,A_star,S_star}.txt, timing.txt when planted, and
/// manifest.json.
void cmd_gen(const ExperimentConfig& config);

/// Fits every cell x trial on the dataset under data_dir and writes
/// models/<cell>/trial_<k>/{W,A,S}.txt, reports.jsonl and timings.jsonl.
/// A failing trial leaves an error record and the rest continue.
FitSummary cmd_fit(const ExperimentConfig& config, const std::filesystem::path& data_dir,
                   const std::optional<std::filesystem::path>& timing_path = std::nullopt);

/// Aggregates reports into aggregate.csv and sr_by_sparsity.csv under out_dir.
void cmd_eval(const std::filesystem::path& reports_path, const std::filesystem::path& out_dir, double psi);

/// gen -> fit -> eval over the grid. Completed cells listed in
/// sweep_manifest.json are skipped on rerun.
FitSummary cmd_sweep(const ExperimentConfig& config);

std::vector<nlohmann::json> read_reports(const std::filesystem::path& path);

} // namespace l1ica
