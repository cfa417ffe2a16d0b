#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rcukf/config.hpp"
#include "rcukf/estimator.hpp"
#include "rcukf/reservoir.hpp"
#include "rcukf/systems.hpp"
#include "rcukf/trajectory.hpp"

namespace rcukf {

/// How the filter's process noise Q is chosen: from the per-dimension
/// one-step training residual variance (floored by the true simulation
/// noise), or a fixed isotropic value.
enum class QMode { Residual, Fixed };

/// Full description of one benchmark cell: system, regime, model and filter
/// settings, replication seeds and harness options.
struct BenchConfig {
    SystemSpec system;
    int n_points = 700;
    double split_fraction = 0.7;
    double measurement_noise_std = 0.1;
    ReservoirConfig reservoir; // input/output dims are forced to the system dim
    TrainConfig train;
    UkfParams ukf;
    double initial_cov = 0.1; // P0 = initial_cov * I
    PropagationMode mode = PropagationMode::SharedState;
    QMode q_mode = QMode::Residual;
    double q_value = 0.0; // used when q_mode == Fixed
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    int workers = 0; // 0 = one per seed up to the hardware thread count

    /// Defaults that reproduce the benchmark protocol for a system/regime
    /// cell, including per-system input scaling and noise levels.
    static BenchConfig standard(SystemKind kind, int n_points);

    static BenchConfig from_config(const KeyValueConfig& kv);
    KeyValueConfig to_config() const;
    void validate() const;
};

struct MethodResult {
    bool ok = false;
    std::string error;
    Eigen::VectorXd per_dim_rmse;
    double mean_rmse = 0.0;
    double seconds = 0.0;
};

struct SeedResult {
    std::uint64_t seed = 0;
    bool ok = false;    // generation + training succeeded
    std::string error;  // set when !ok
    double generate_seconds = 0.0;
    double train_seconds = 0.0;
    MethodResult rc;
    MethodResult rcukf;
};

/// Per-seed results plus config echo for one benchmark cell.
struct BenchReport {
    KeyValueConfig config_echo;
    std::string system;
    int regime = 0;
    std::vector<SeedResult> seeds;
    double total_seconds = 0.0;

    /// Median across successful seeds; NaN when none succeeded.
    double median_mean_rmse(const std::string& method) const;
    Eigen::VectorXd median_per_dim_rmse(const std::string& method) const;
};

/// Contiguous prefix/suffix split at floor(N * fraction). No shuffling.
std::pair<Trajectory, Trajectory> split(const Trajectory& traj, double fraction);

struct RmseResult {
    Eigen::VectorXd per_dim;
    double mean = 0.0;
};

/// Per-dimension root mean squared error and its average over dimensions.
RmseResult rmse(const Trajectory& truth, const Trajectory& estimate);

/// Runs the full protocol for every seed: generate, split, train, standard
/// RC free-run and RCUKF filtering over the test window, RMSE for both.
/// Per-seed failures are recorded in the report, never silently dropped.
BenchReport run_benchmark(const BenchConfig& cfg);

/// Test-window trajectories of a single seed's run, for plotting.
struct SeedTrajectories {
    Trajectory truth;
    Trajectory measurements;
    Trajectory rc;
    Trajectory rcukf;
};

/// Replays one seed of the protocol and returns the trajectories instead of
/// summary statistics.
SeedTrajectories run_seed_trajectories(const BenchConfig& cfg, std::uint64_t seed);

/// Long-format CSV: `system,regime,method,seed,dim,rmse` rows for every
/// seed and dimension, a `mean` row per (method, seed), and `median`
/// aggregate rows. Byte-deterministic for a fixed report.
std::string report_csv_string(const BenchReport& report);
void write_report_csv(const BenchReport& report, const std::string& path);

/// Machine-readable key-value report: config echo, per-seed RMSE values,
/// timings and failure records. Parses back to identical values.
void write_report_kv(const BenchReport& report, const std::string& path);
BenchReport read_report_kv(const std::string& path);

} // namespace rcukf
