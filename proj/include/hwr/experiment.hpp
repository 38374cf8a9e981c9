#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hwr/regression.hpp"
#include "hwr/sensitivity.hpp"

namespace hwr {

inline constexpr const char* kVersion = "0.1.0";

struct TestFunction {
    std::string name;
    int dim = 0;  // 0: any dimension
    std::function<double(const double*, int)> eval;
};

const TestFunction& test_function(const std::string& name);
std::vector<std::string> test_function_names();
// analytic GSIs of the 8-d benchmark for its significant terms
std::map<Subset, double> f8_reference_gsi();

struct ExperimentConfig {
    std::string function = "gauss";
    int dim = 1;
    std::vector<nlohmann::json> densities;  // sampling densities, one per dimension
    std::vector<nlohmann::json> transforms;  // "known" or {"kde": rule}, one per dimension
    int m = 2;
    int n_min = 2;
    int n_max = 6;
    std::optional<std::pair<int, int>> slope_window;
    nlohmann::json subsets = "full";  // "full", integer nu, or list of labels
    std::uint64_t seed = 1;
    int seeds = 1;
    double oversampling = 1.0;
    double test_multiplier = 3.0;
    std::optional<std::size_t> samples;  // fixed M
    double eps = 0.03;
    int stage1_level = 2;
    int stage1_order = 2;
    std::vector<int> stage2_levels{0, 5, 3};  // by term order
    std::optional<double> eta;
    double lsqr_tol = 1e-10;
    bool condition = false;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig eight_dim_default();
    nlohmann::json to_json() const;
    std::string hash() const;
    void validate() const;
    std::vector<TransformPlan> plans() const;
    std::vector<DensityPtr> sampling_densities() const;
    std::vector<Subset> subset_list() const;
};

double rmse(const RegressionModel& model, const std::vector<double>& Ytest, const std::vector<double>& ftrue);
double rmse(const std::vector<double>& pred, const std::vector<double>& ftrue);

std::size_t default_sample_count(std::size_t N, double c);
// least-squares slope of log2(rmse) against n
double fit_slope(const std::vector<int>& n, const std::vector<double>& rmse);
double median(std::vector<double> v);

struct DataSet {
    std::size_t M = 0;
    int d = 0;
    std::vector<double> Y;
    std::vector<double> f;
};
DataSet make_data(const ExperimentConfig& cfg, std::size_t M, std::uint64_t seed);

struct ConvergenceRow {
    int seed_index = 0;
    int n = 0;
    std::size_t N = 0;
    std::size_t M = 0;
    double rmse = 0.0;
    double cond = 0.0;  // 0 when not computed
    std::size_t iterations = 0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    std::vector<double> slopes;  // per seed
    double median_slope = 0.0;
    std::pair<int, int> window;
    std::string to_csv(const std::string& config_hash) const;
};

ConvergenceResult run_convergence(const ExperimentConfig& cfg);

struct Table1Row {
    int m = 0;
    int n = 0;  // -1 marks the full-torus column
    double eta = 0.0;
    double mu_min = 0.0;
    double mu_max = 0.0;
};
std::vector<Table1Row> run_table1(const std::vector<int>& ms, int n_min, int n_max);
std::string table1_csv(const std::vector<Table1Row>& rows, const std::string& config_hash);

struct TwoStageResult {
    SensitivityReport stage1;
    SensitivityReport stage2;
    std::vector<Subset> active;
    double rmse1 = 0.0;
    double rmse2 = 0.0;
    std::size_t N1 = 0, N2 = 0, M = 0;
    std::vector<std::string> warnings;
    nlohmann::json to_json() const;
};
TwoStageResult run_two_stage(const ExperimentConfig& cfg, std::uint64_t seed);

// Design matrix of a fitted model at new points.
SparseDesignMatrix design_matrix(const RegressionModel& model, const std::vector<double>& Y, std::size_t M);

std::string csv_banner(const std::string& config_hash);
std::string fnv1a_hex(const std::string& s);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);
void write_text(const std::string& path, const std::string& content);

}  // namespace hwr
