#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "rcukf/bench.hpp"
#include "rcukf/config.hpp"
#include "rcukf/csv_io.hpp"
#include "rcukf/errors.hpp"
#include "rcukf/estimator.hpp"
#include "rcukf/model_io.hpp"
#include "rcukf/reservoir.hpp"
#include "rcukf/systems.hpp"

namespace {

using namespace rcukf;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

/// Registers one `--key` option per config key so that every config-file
/// entry can be overridden by a flag of the same name.
class ConfigFlags {
public:
    void add(CLI::App* cmd, const std::string& key, const std::string& desc) {
        auto holder = std::make_shared<std::string>();
        cmd->add_option("--" + key, *holder, desc);
        flags_.emplace_back(key, holder);
    }

    void apply(KeyValueConfig& kv, const CLI::App& cmd) const {
        for (const auto& [key, holder] : flags_)
            if (cmd.count("--" + key) > 0)
                kv.set(key, *holder);
    }

private:
    std::vector<std::pair<std::string, std::shared_ptr<std::string>>> flags_;
};

void add_system_flags(CLI::App* cmd, ConfigFlags& flags) {
    flags.add(cmd, "system.dt", "integration step");
    flags.add(cmd, "system.process_noise_std", "std of the noise term in the dynamics");
    flags.add(cmd, "lorenz.sigma", "Lorenz sigma");
    flags.add(cmd, "lorenz.rho", "Lorenz rho");
    flags.add(cmd, "lorenz.beta", "Lorenz beta");
    flags.add(cmd, "rossler.a", "Rossler a");
    flags.add(cmd, "rossler.b", "Rossler b");
    flags.add(cmd, "rossler.c", "Rossler c");
    flags.add(cmd, "mackey-glass.beta", "Mackey-Glass beta");
    flags.add(cmd, "mackey-glass.gamma", "Mackey-Glass gamma");
    flags.add(cmd, "mackey-glass.tau", "Mackey-Glass delay tau");
    flags.add(cmd, "mackey-glass.exponent", "Mackey-Glass exponent");
    flags.add(cmd, "lissajous.amplitude", "Lissajous amplitude");
}

void add_model_flags(CLI::App* cmd, ConfigFlags& flags) {
    flags.add(cmd, "split.fraction", "training fraction of the dataset");
    flags.add(cmd, "noise.measurement_std", "sensor noise std for the filter input");
    flags.add(cmd, "reservoir.size", "reservoir neuron count");
    flags.add(cmd, "reservoir.leak_rate", "leak rate in (0, 1]");
    flags.add(cmd, "reservoir.spectral_radius", "target spectral radius in (0, 1)");
    flags.add(cmd, "reservoir.input_scale", "input weight scale");
    flags.add(cmd, "reservoir.connectivity", "recurrent nonzero fraction");
    flags.add(cmd, "train.ridge_delta", "ridge regularization");
    flags.add(cmd, "train.washout", "teacher-forced steps discarded");
    flags.add(cmd, "ukf.eta", "sigma point spread");
    flags.add(cmd, "ukf.kappa", "secondary scaling");
    flags.add(cmd, "ukf.zeta", "prior-knowledge weight term");
    flags.add(cmd, "filter.initial_cov", "initial covariance scale (P0 = v*I)");
    flags.add(cmd, "filter.mode", "reservoir bookkeeping: shared | per-sigma");
    flags.add(cmd, "filter.q_mode", "process noise source: residual | fixed");
    flags.add(cmd, "filter.q_value", "fixed process noise variance");
    flags.add(cmd, "bench.workers", "parallel seed jobs (0 = auto)");
}

KeyValueConfig load_layered_config(const std::string& config_path,
                                   const ConfigFlags& flags, const CLI::App& cmd) {
    KeyValueConfig kv;
    if (!config_path.empty())
        kv = KeyValueConfig::from_file(config_path);
    flags.apply(kv, cmd);
    return kv;
}

int run_generate(const std::string& system, int points, std::uint64_t seed,
                 const std::string& out, const KeyValueConfig& kv) {
    KeyValueConfig merged = kv;
    merged.set("system", system);
    merged.set("points", std::to_string(points));
    BenchConfig cfg = BenchConfig::from_config(merged);
    SystemSpec spec = cfg.system;
    spec.seed = seed;

    const Trajectory traj = generate(spec, points);
    write_trajectory_csv(traj, out);
    std::cout << "wrote " << traj.size() << " points (" << to_string(spec.kind)
              << ", dt=" << format_double(spec.dt) << ") to " << out << "\n";
    return kExitOk;
}

int run_train(const std::string& data, std::uint64_t seed, const std::string& out,
              const KeyValueConfig& kv) {
    const Trajectory traj = read_trajectory_csv(data);
    const double fraction = kv.get_double("split.fraction", 0.7);
    auto [train_split, test_split] = split(traj, fraction);
    (void)test_split;

    ReservoirConfig rcfg;
    rcfg.reservoir_size = kv.get_int("reservoir.size", 300);
    rcfg.leak_rate = kv.get_double("reservoir.leak_rate", 1.0);
    rcfg.spectral_radius = kv.get_double("reservoir.spectral_radius", 0.9);
    rcfg.input_scale = kv.get_double("reservoir.input_scale", 1.0);
    rcfg.connectivity = kv.get_double("reservoir.connectivity", 0.1);
    rcfg.input_dim = traj.dim();
    rcfg.output_dim = traj.dim();
    rcfg.seed = seed;

    TrainConfig tcfg;
    tcfg.ridge_delta = kv.get_double("train.ridge_delta", 1e-6);
    tcfg.washout = kv.get_int("train.washout", 100);

    if (train_split.size() < 2)
        throw ConfigError("training split too short");
    std::vector<Eigen::VectorXd> inputs(train_split.states.begin(),
                                        train_split.states.end() - 1);
    std::vector<Eigen::VectorXd> targets(train_split.states.begin() + 1,
                                         train_split.states.end());

    Reservoir reservoir(rcfg);
    reservoir.train(inputs, targets, tcfg);
    save_model(reservoir, out);

    std::cout << "trained reservoir (size=" << reservoir.size() << ") on "
              << train_split.size() << " states; residual std per dim:";
    for (Eigen::Index d = 0; d < reservoir.training_residual_variance().size(); ++d)
        std::cout << ' '
                  << format_double(std::sqrt(reservoir.training_residual_variance()(d)));
    std::cout << "\nwrote model to " << out << "\n";
    return kExitOk;
}

int run_run(const std::string& model_path, const std::string& data,
            const std::string& method, std::uint64_t seed, const std::string& out,
            const KeyValueConfig& kv) {
    Reservoir reservoir = load_model(model_path);
    const Trajectory traj = read_trajectory_csv(data);
    const double fraction = kv.get_double("split.fraction", 0.7);
    auto [train_split, test_split] = split(traj, fraction);
    if (train_split.empty() || test_split.empty())
        throw ConfigError("split produced an empty part");

    Trajectory estimate;
    if (method == "rc") {
        // Warm on all training states but the last, then feed the last one
        // back as the first closed-loop input.
        for (std::size_t k = 0; k + 1 < train_split.size(); ++k)
            reservoir.update_state(train_split.states[k]);
        estimate = reservoir.free_run(train_split.states.back(),
                                      static_cast<int>(test_split.size()),
                                      test_split.times.front(), test_split.dt());
    } else if (method == "rcukf") {
        const int n = reservoir.input_dim();
        const double meas_std = kv.get_double("noise.measurement_std", 0.1);

        RcukfConfig fcfg;
        fcfg.params.eta = kv.get_double("ukf.eta", 1e-3);
        fcfg.params.kappa = kv.get_double("ukf.kappa", 0.0);
        fcfg.params.zeta = kv.get_double("ukf.zeta", 2.0);
        fcfg.initial_covariance =
            kv.get_double("filter.initial_cov", 0.1) * Eigen::MatrixXd::Identity(n, n);
        fcfg.noise.measurement = meas_std * meas_std * Eigen::MatrixXd::Identity(n, n);
        const std::string mode = kv.get_string("filter.mode", "shared");
        if (mode != "shared" && mode != "per-sigma")
            throw ConfigError("filter.mode must be 'shared' or 'per-sigma'");
        fcfg.mode = mode == "shared" ? PropagationMode::SharedState
                                     : PropagationMode::PerSigma;

        const std::string q_mode = kv.get_string("filter.q_mode", "residual");
        if (q_mode == "fixed") {
            fcfg.noise.process =
                kv.get_double("filter.q_value", 1e-4) * Eigen::MatrixXd::Identity(n, n);
        } else if (q_mode == "residual") {
            if (train_split.size() < 2)
                throw ConfigError("training split too short for residual q");
            std::vector<Eigen::VectorXd> inputs(train_split.states.begin(),
                                                train_split.states.end() - 1);
            std::vector<Eigen::VectorXd> targets(train_split.states.begin() + 1,
                                                 train_split.states.end());
            Eigen::VectorXd q = one_step_residual_variance(
                reservoir, inputs, targets, kv.get_int("train.washout", 100));
            fcfg.noise.process = q.cwiseMax(1e-12).asDiagonal();
        } else {
            throw ConfigError("filter.q_mode must be 'residual' or 'fixed'");
        }

        RcukfEstimator estimator(std::move(reservoir), std::move(fcfg));
        estimator.warmup(train_split);
        const auto measurements = add_measurement_noise(test_split, meas_std, seed);
        estimate = estimator.run(measurements, test_split.times.front(), test_split.dt());
    } else {
        throw ConfigError("--method must be 'rc' or 'rcukf'");
    }

    write_trajectory_csv(estimate, out);
    const RmseResult r = rmse(test_split, estimate);
    std::cout << "method=" << method << " rmse";
    for (Eigen::Index d = 0; d < r.per_dim.size(); ++d)
        std::cout << " x" << d << "=" << format_double(r.per_dim(d));
    std::cout << " mean=" << format_double(r.mean) << "\nwrote estimate to " << out << "\n";
    return kExitOk;
}

int run_bench(const std::string& system, int points, std::uint64_t seed,
              const std::string& out_dir, const KeyValueConfig& kv,
              bool dump_trajectories) {
    KeyValueConfig merged = kv;
    merged.set("system", system);
    merged.set("points", std::to_string(points));
    if (!merged.has("seeds")) {
        std::string seeds;
        for (std::uint64_t s = seed; s < seed + 5; ++s) {
            if (s != seed)
                seeds += ',';
            seeds += std::to_string(s);
        }
        merged.set("seeds", seeds);
    }

    const BenchConfig cfg = BenchConfig::from_config(merged);
    const BenchReport report = run_benchmark(cfg);

    std::filesystem::create_directories(out_dir);
    const std::string csv_path = out_dir + "/report.csv";
    const std::string kv_path = out_dir + "/report.kv";
    write_report_csv(report, csv_path);
    write_report_kv(report, kv_path);

    if (dump_trajectories) {
        const SeedTrajectories trajs = run_seed_trajectories(cfg, cfg.seeds.front());
        write_trajectory_csv(trajs.truth, out_dir + "/truth.csv");
        write_trajectory_csv(trajs.measurements, out_dir + "/measurements.csv");
        write_trajectory_csv(trajs.rc, out_dir + "/rc.csv");
        write_trajectory_csv(trajs.rcukf, out_dir + "/rcukf.csv");
    }

    std::cout << "system=" << report.system << " regime=" << report.regime
              << " seeds=" << report.seeds.size() << "\n";
    for (const std::string method : {"rc", "rcukf"})
        std::cout << "  " << method << " median mean RMSE = "
                  << format_double(report.median_mean_rmse(method)) << "\n";
    std::cout << "wrote " << csv_path << " and " << kv_path << "\n";
    return kExitOk;
}

int run_report(const std::string& in_path, const std::string& csv_out) {
    const BenchReport report = read_report_kv(in_path);
    std::cout << "system=" << report.system << " regime=" << report.regime
              << " seeds=" << report.seeds.size() << " total_seconds="
              << format_double(report.total_seconds) << "\n";
    std::cout << "method,seed,dim,rmse\n";
    std::cout << report_csv_string(report);
    if (!csv_out.empty()) {
        write_report_csv(report, csv_out);
        std::cout << "wrote " << csv_out << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rcukf: reservoir-computing surrogate models inside an unscented "
                 "Kalman filter, with chaotic-system benchmarks"};
    app.require_subcommand(1);

    std::string system;
    std::string out;
    std::string data;
    std::string model;
    std::string config_path;
    std::string method = "rcukf";
    std::string report_in;
    std::string report_csv;
    int points = 700;
    std::uint64_t seed = 1;
    bool dump_trajectories = false;

    auto* gen = app.add_subcommand("generate", "simulate a benchmark system to CSV");
    gen->add_option("--system", system, "lorenz | rossler | mackey-glass | lissajous")
        ->required();
    gen->add_option("--points", points, "number of samples")->required();
    gen->add_option("--seed", seed, "noise seed")->required();
    gen->add_option("--out", out, "output CSV path")->required();
    gen->add_option("--config", config_path, "key-value config file");
    ConfigFlags gen_flags;
    add_system_flags(gen, gen_flags);

    auto* train = app.add_subcommand("train", "train a reservoir readout on a dataset");
    train->add_option("--data", data, "trajectory CSV")->required();
    train->add_option("--seed", seed, "reservoir init seed")->required();
    train->add_option("--out", out, "output model path")->required();
    train->add_option("--config", config_path, "key-value config file");
    ConfigFlags train_flags;
    add_model_flags(train, train_flags);

    auto* run = app.add_subcommand("run", "estimate the test split of a dataset");
    run->add_option("--model", model, "trained model file")->required();
    run->add_option("--data", data, "trajectory CSV")->required();
    run->add_option("--seed", seed, "measurement noise seed")->required();
    run->add_option("--out", out, "output estimate CSV")->required();
    run->add_option("--method", method, "rc | rcukf (default rcukf)");
    run->add_option("--config", config_path, "key-value config file");
    ConfigFlags run_flags;
    add_model_flags(run, run_flags);

    auto* bench = app.add_subcommand("bench", "standard-RC vs RCUKF benchmark cell");
    bench->add_option("--system", system, "lorenz | rossler | mackey-glass | lissajous")
        ->required();
    bench->add_option("--points", points, "dataset size (e.g. 700 or 10000)")->required();
    bench->add_option("--seed", seed, "base seed; seeds = seed..seed+4 unless --seeds")
        ->required();
    bench->add_option("--out", out, "output directory")->required();
    bench->add_option("--config", config_path, "key-value config file");
    bench->add_flag("--dump-trajectories", dump_trajectories,
                    "also write truth/measurement/estimate CSVs for the first seed");
    ConfigFlags bench_flags;
    bench_flags.add(bench, "seeds", "comma-separated seed list");
    add_system_flags(bench, bench_flags);
    add_model_flags(bench, bench_flags);

    auto* rep = app.add_subcommand("report", "print a saved benchmark report");
    rep->add_option("--in", report_in, "report.kv path")->required();
    rep->add_option("--csv", report_csv, "also rewrite the CSV to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (gen->parsed())
            return run_generate(system, points, seed, out,
                                load_layered_config(config_path, gen_flags, *gen));
        if (train->parsed())
            return run_train(data, seed, out,
                             load_layered_config(config_path, train_flags, *train));
        if (run->parsed())
            return run_run(model, data, method, seed, out,
                           load_layered_config(config_path, run_flags, *run));
        if (bench->parsed())
            return run_bench(system, points, seed, out,
                             load_layered_config(config_path, bench_flags, *bench),
                             dump_trajectories);
        if (rep->parsed())
            return run_report(report_in, report_csv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
