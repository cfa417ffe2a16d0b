#include "rcukf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <thread>
#include <utility>

#include "rcukf/csv_io.hpp"
#include "rcukf/errors.hpp"

namespace rcukf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// splitmix64 with a stream tag; decorrelates the per-seed generation,
/// reservoir and measurement-noise streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::pair<std::vector<Eigen::VectorXd>, std::vector<Eigen::VectorXd>>
one_step_pairs(const Trajectory& traj) {
    if (traj.size() < 2)
        throw ConfigError("training split needs at least two states");
    std::vector<Eigen::VectorXd> inputs(traj.states.begin(), traj.states.end() - 1);
    std::vector<Eigen::VectorXd> targets(traj.states.begin() + 1, traj.states.end());
    return {std::move(inputs), std::move(targets)};
}

double median_of(std::vector<double> values) {
    if (values.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

struct PreparedSeed {
    Trajectory train_split;
    Trajectory test_split;
    Reservoir reservoir;
    Eigen::VectorXd residual_estimate; // held-out one-step residual variance
    double generate_seconds = 0.0;
    double train_seconds = 0.0;
};

/// One-step residual variance on a held-out tail of the training pairs: a
/// clone is fitted on the leading 85% and its teacher-forced residuals are
/// measured on the remainder. In-sample residuals of a near-interpolating
/// readout underestimate the deployed one-step error by orders of magnitude.
Eigen::VectorXd heldout_residual_variance(const BenchConfig& cfg,
                                          const ReservoirConfig& rcfg,
                                          const Reservoir& trained,
                                          const std::vector<Eigen::VectorXd>& inputs,
                                          const std::vector<Eigen::VectorXd>& targets) {
    const int pairs = static_cast<int>(inputs.size());
    const int fit_len = static_cast<int>(0.85 * pairs);
    if (fit_len <= cfg.train.washout + 1 || fit_len >= pairs)
        return trained.training_residual_variance();

    Reservoir clone(rcfg);
    std::vector<Eigen::VectorXd> fit_inputs(inputs.begin(), inputs.begin() + fit_len);
    std::vector<Eigen::VectorXd> fit_targets(targets.begin(), targets.begin() + fit_len);
    clone.train(fit_inputs, fit_targets, cfg.train);
    return one_step_residual_variance(clone, inputs, targets, fit_len);
}

PreparedSeed prepare_seed(const BenchConfig& cfg, std::uint64_t seed) {
    SystemSpec spec = cfg.system;
    spec.seed = mix_seed(seed, 0);
    auto start = Clock::now();
    const Trajectory traj = generate(spec, cfg.n_points);
    const double generate_seconds = seconds_since(start);

    auto [train_split, test_split] = split(traj, cfg.split_fraction);
    if (test_split.empty())
        throw ConfigError("empty test split");

    ReservoirConfig rcfg = cfg.reservoir;
    rcfg.input_dim = spec.dim();
    rcfg.output_dim = spec.dim();
    rcfg.seed = mix_seed(seed, 1);

    start = Clock::now();
    Reservoir reservoir(rcfg);
    auto [inputs, targets] = one_step_pairs(train_split);
    reservoir.train(inputs, targets, cfg.train);
    Eigen::VectorXd residual_estimate =
        heldout_residual_variance(cfg, rcfg, reservoir, inputs, targets);
    const double train_seconds = seconds_since(start);

    return {std::move(train_split), std::move(test_split), std::move(reservoir),
            std::move(residual_estimate), generate_seconds, train_seconds};
}

MethodResult run_standard_rc(const Reservoir& reservoir, const Trajectory& test) {
    MethodResult result;
    const auto start = Clock::now();
    const Trajectory estimate = reservoir.predict_autonomous(
        static_cast<int>(test.size()), test.times.front(), test.dt());
    const RmseResult r = rmse(test, estimate);
    result.per_dim_rmse = r.per_dim;
    result.mean_rmse = r.mean;
    result.seconds = seconds_since(start);
    result.ok = true;
    return result;
}

RcukfConfig make_filter_config(const BenchConfig& cfg,
                               const Eigen::VectorXd& residual_estimate, int n) {
    RcukfConfig fcfg;
    fcfg.params = cfg.ukf;
    fcfg.mode = cfg.mode;
    fcfg.initial_covariance = cfg.initial_cov * Eigen::MatrixXd::Identity(n, n);
    const double r_var = cfg.measurement_noise_std * cfg.measurement_noise_std;
    fcfg.noise.measurement = r_var * Eigen::MatrixXd::Identity(n, n);

    if (cfg.q_mode == QMode::Fixed) {
        fcfg.noise.process = cfg.q_value * Eigen::MatrixXd::Identity(n, n);
    } else {
        // Held-out one-step residual variance per dimension, floored by the
        // simulation noise entering each step and by the sensor noise
        // variance. The sensor floor covers the error recycled through the
        // reservoir input: in shared-state mode the reservoir consumes the
        // posterior mean, whose error is measurement-noise-scale, so the
        // surrogate's effective process noise cannot sit below it.
        const double per_step_noise = cfg.system.dt * cfg.system.process_noise_std;
        const double floor_var =
            std::max({per_step_noise * per_step_noise, r_var, 1e-12});
        fcfg.noise.process = residual_estimate.cwiseMax(floor_var).asDiagonal();
    }
    return fcfg;
}

MethodResult run_rcukf(const BenchConfig& cfg, const PreparedSeed& prep,
                       std::uint64_t measurement_seed) {
    MethodResult result;
    const auto start = Clock::now();

    const Trajectory& test = prep.test_split;
    RcukfEstimator estimator(
        prep.reservoir,
        make_filter_config(cfg, prep.residual_estimate, prep.reservoir.input_dim()));
    estimator.warmup(prep.train_split);
    const auto measurements =
        add_measurement_noise(test, cfg.measurement_noise_std, measurement_seed);
    const Trajectory estimate = estimator.run(measurements, test.times.front(), test.dt());
    const RmseResult r = rmse(test, estimate);
    result.per_dim_rmse = r.per_dim;
    result.mean_rmse = r.mean;
    result.seconds = seconds_since(start);
    result.ok = true;
    return result;
}

SeedResult run_seed(const BenchConfig& cfg, std::uint64_t seed) {
    SeedResult out;
    out.seed = seed;

    std::optional<PreparedSeed> prep;
    try {
        prep.emplace(prepare_seed(cfg, seed));
        out.generate_seconds = prep->generate_seconds;
        out.train_seconds = prep->train_seconds;
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
        return out;
    }

    try {
        out.rc = run_standard_rc(prep->reservoir, prep->test_split);
    } catch (const std::exception& e) {
        out.rc.ok = false;
        out.rc.error = e.what();
    }
    try {
        out.rcukf = run_rcukf(cfg, *prep, mix_seed(seed, 2));
    } catch (const std::exception& e) {
        out.rcukf.ok = false;
        out.rcukf.error = e.what();
    }
    return out;
}

std::string dim_label(int d) { return "x" + std::to_string(d); }

const MethodResult& method_of(const SeedResult& seed, const std::string& method) {
    if (method == "rc")
        return seed.rc;
    if (method == "rcukf")
        return seed.rcukf;
    throw ConfigError("unknown method '" + method + "'");
}

} // namespace

BenchConfig BenchConfig::standard(SystemKind kind, int n_points) {
    BenchConfig cfg;
    cfg.system = SystemSpec::standard(kind);
    cfg.n_points = n_points;

    cfg.reservoir.reservoir_size = 300;
    cfg.reservoir.connectivity = 0.1;
    cfg.reservoir.spectral_radius = 0.9;
    cfg.reservoir.leak_rate = 1.0;
    cfg.train.washout = 100;
    cfg.train.ridge_delta = 1e-6;

    // Input scaling keeps the tanh preactivations in their responsive range
    // for each system's raw state magnitudes. Sensor noise defaults to
    // N(0, 0.01) per channel; Mackey-Glass sensing is finer because its
    // per-step diffusion already dominates what the filter can recover.
    switch (kind) {
    case SystemKind::Lorenz:
        cfg.reservoir.input_scale = 0.05;
        cfg.measurement_noise_std = 0.1;
        break;
    case SystemKind::Rossler:
        cfg.reservoir.input_scale = 0.1;
        cfg.measurement_noise_std = 0.1;
        break;
    case SystemKind::MackeyGlass:
        cfg.reservoir.input_scale = 1.0;
        cfg.measurement_noise_std = 0.005;
        // The near-interpolating readout free-runs off the attractor on this
        // noisy 1-D series; a firmer ridge keeps the baseline bounded.
        cfg.train.ridge_delta = 1e-4;
        break;
    case SystemKind::Lissajous:
        cfg.reservoir.input_scale = 1.0;
        cfg.measurement_noise_std = 0.1;
        break;
    }
    return cfg;
}

void BenchConfig::validate() const {
    system.validate();
    if (!(split_fraction > 0.0) || !(split_fraction < 1.0))
        throw ConfigError("bench config: split fraction must be in (0, 1)");
    if (n_points < 2)
        throw ConfigError("bench config: need at least two points");
    if (static_cast<double>(n_points) * split_fraction < train.washout + 2)
        throw ConfigError("bench config: training split must cover washout + 2 points");
    if (measurement_noise_std < 0.0)
        throw ConfigError("bench config: measurement noise std must be non-negative");
    if (initial_cov <= 0.0)
        throw ConfigError("bench config: initial covariance must be positive");
    if (q_mode == QMode::Fixed && q_value < 0.0)
        throw ConfigError("bench config: fixed q value must be non-negative");
    if (seeds.empty())
        throw ConfigError("bench config: need at least one seed");
    if (workers < 0)
        throw ConfigError("bench config: workers must be non-negative");
}

BenchConfig BenchConfig::from_config(const KeyValueConfig& kv) {
    const SystemKind kind = system_kind_from_string(kv.get_string("system", "lorenz"));
    const int points = kv.get_int("points", 700);
    BenchConfig cfg = standard(kind, points);

    cfg.system.dt = kv.get_double("system.dt", cfg.system.dt);
    cfg.system.process_noise_std =
        kv.get_double("system.process_noise_std", cfg.system.process_noise_std);
    switch (kind) {
    case SystemKind::Lorenz:
        cfg.system.lorenz.sigma = kv.get_double("lorenz.sigma", cfg.system.lorenz.sigma);
        cfg.system.lorenz.rho = kv.get_double("lorenz.rho", cfg.system.lorenz.rho);
        cfg.system.lorenz.beta = kv.get_double("lorenz.beta", cfg.system.lorenz.beta);
        break;
    case SystemKind::Rossler:
        cfg.system.rossler.a = kv.get_double("rossler.a", cfg.system.rossler.a);
        cfg.system.rossler.b = kv.get_double("rossler.b", cfg.system.rossler.b);
        cfg.system.rossler.c = kv.get_double("rossler.c", cfg.system.rossler.c);
        break;
    case SystemKind::MackeyGlass:
        cfg.system.mackey_glass.beta =
            kv.get_double("mackey-glass.beta", cfg.system.mackey_glass.beta);
        cfg.system.mackey_glass.gamma =
            kv.get_double("mackey-glass.gamma", cfg.system.mackey_glass.gamma);
        cfg.system.mackey_glass.tau =
            kv.get_double("mackey-glass.tau", cfg.system.mackey_glass.tau);
        cfg.system.mackey_glass.exponent =
            kv.get_double("mackey-glass.exponent", cfg.system.mackey_glass.exponent);
        break;
    case SystemKind::Lissajous:
        cfg.system.lissajous.amplitude =
            kv.get_double("lissajous.amplitude", cfg.system.lissajous.amplitude);
        break;
    }

    cfg.split_fraction = kv.get_double("split.fraction", cfg.split_fraction);
    cfg.measurement_noise_std =
        kv.get_double("noise.measurement_std", cfg.measurement_noise_std);

    cfg.reservoir.reservoir_size = kv.get_int("reservoir.size", cfg.reservoir.reservoir_size);
    cfg.reservoir.leak_rate = kv.get_double("reservoir.leak_rate", cfg.reservoir.leak_rate);
    cfg.reservoir.spectral_radius =
        kv.get_double("reservoir.spectral_radius", cfg.reservoir.spectral_radius);
    cfg.reservoir.input_scale =
        kv.get_double("reservoir.input_scale", cfg.reservoir.input_scale);
    cfg.reservoir.connectivity =
        kv.get_double("reservoir.connectivity", cfg.reservoir.connectivity);

    cfg.train.ridge_delta = kv.get_double("train.ridge_delta", cfg.train.ridge_delta);
    cfg.train.washout = kv.get_int("train.washout", cfg.train.washout);

    cfg.ukf.eta = kv.get_double("ukf.eta", cfg.ukf.eta);
    cfg.ukf.kappa = kv.get_double("ukf.kappa", cfg.ukf.kappa);
    cfg.ukf.zeta = kv.get_double("ukf.zeta", cfg.ukf.zeta);

    cfg.initial_cov = kv.get_double("filter.initial_cov", cfg.initial_cov);
    const std::string mode = kv.get_string("filter.mode", "shared");
    if (mode == "shared")
        cfg.mode = PropagationMode::SharedState;
    else if (mode == "per-sigma")
        cfg.mode = PropagationMode::PerSigma;
    else
        throw ConfigError("filter.mode must be 'shared' or 'per-sigma'");
    const std::string q_mode = kv.get_string("filter.q_mode", "residual");
    if (q_mode == "residual")
        cfg.q_mode = QMode::Residual;
    else if (q_mode == "fixed")
        cfg.q_mode = QMode::Fixed;
    else
        throw ConfigError("filter.q_mode must be 'residual' or 'fixed'");
    cfg.q_value = kv.get_double("filter.q_value", cfg.q_value);

    cfg.seeds = kv.get_uint64_list("seeds", cfg.seeds);
    cfg.workers = kv.get_int("bench.workers", cfg.workers);
    return cfg;
}

KeyValueConfig BenchConfig::to_config() const {
    KeyValueConfig kv;
    kv.set("system", to_string(system.kind));
    kv.set("points", std::to_string(n_points));
    kv.set("system.dt", format_double(system.dt));
    kv.set("system.process_noise_std", format_double(system.process_noise_std));
    switch (system.kind) {
    case SystemKind::Lorenz:
        kv.set("lorenz.sigma", format_double(system.lorenz.sigma));
        kv.set("lorenz.rho", format_double(system.lorenz.rho));
        kv.set("lorenz.beta", format_double(system.lorenz.beta));
        break;
    case SystemKind::Rossler:
        kv.set("rossler.a", format_double(system.rossler.a));
        kv.set("rossler.b", format_double(system.rossler.b));
        kv.set("rossler.c", format_double(system.rossler.c));
        break;
    case SystemKind::MackeyGlass:
        kv.set("mackey-glass.beta", format_double(system.mackey_glass.beta));
        kv.set("mackey-glass.gamma", format_double(system.mackey_glass.gamma));
        kv.set("mackey-glass.tau", format_double(system.mackey_glass.tau));
        kv.set("mackey-glass.exponent", format_double(system.mackey_glass.exponent));
        break;
    case SystemKind::Lissajous:
        kv.set("lissajous.amplitude", format_double(system.lissajous.amplitude));
        break;
    }
    kv.set("split.fraction", format_double(split_fraction));
    kv.set("noise.measurement_std", format_double(measurement_noise_std));
    kv.set("reservoir.size", std::to_string(reservoir.reservoir_size));
    kv.set("reservoir.leak_rate", format_double(reservoir.leak_rate));
    kv.set("reservoir.spectral_radius", format_double(reservoir.spectral_radius));
    kv.set("reservoir.input_scale", format_double(reservoir.input_scale));
    kv.set("reservoir.connectivity", format_double(reservoir.connectivity));
    kv.set("train.ridge_delta", format_double(train.ridge_delta));
    kv.set("train.washout", std::to_string(train.washout));
    kv.set("ukf.eta", format_double(ukf.eta));
    kv.set("ukf.kappa", format_double(ukf.kappa));
    kv.set("ukf.zeta", format_double(ukf.zeta));
    kv.set("filter.initial_cov", format_double(initial_cov));
    kv.set("filter.mode", mode == PropagationMode::SharedState ? "shared" : "per-sigma");
    kv.set("filter.q_mode", q_mode == QMode::Residual ? "residual" : "fixed");
    kv.set("filter.q_value", format_double(q_value));
    std::string seed_list;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i > 0)
            seed_list += ',';
        seed_list += std::to_string(seeds[i]);
    }
    kv.set("seeds", seed_list);
    kv.set("bench.workers", std::to_string(workers));
    return kv;
}

std::pair<Trajectory, Trajectory> split(const Trajectory& traj, double fraction) {
    if (!(fraction > 0.0) || !(fraction < 1.0))
        throw ConfigError("split: fraction must be in (0, 1)");
    // The epsilon keeps N * fraction from landing just below the integer it
    // represents exactly (700 * 0.7 evaluates to 489.99999999999994).
    const auto cut = static_cast<std::size_t>(
        std::floor(static_cast<double>(traj.size()) * fraction + 1e-9));

    Trajectory head;
    Trajectory tail;
    head.times.assign(traj.times.begin(), traj.times.begin() + static_cast<long>(cut));
    head.states.assign(traj.states.begin(), traj.states.begin() + static_cast<long>(cut));
    tail.times.assign(traj.times.begin() + static_cast<long>(cut), traj.times.end());
    tail.states.assign(traj.states.begin() + static_cast<long>(cut), traj.states.end());
    return {std::move(head), std::move(tail)};
}

RmseResult rmse(const Trajectory& truth, const Trajectory& estimate) {
    if (truth.size() != estimate.size())
        throw ConfigError("rmse: trajectory length mismatch");
    if (truth.empty())
        throw ConfigError("rmse: empty trajectories");
    const int dim = truth.dim();
    if (estimate.dim() != dim)
        throw ConfigError("rmse: dimension mismatch");

    Eigen::VectorXd accum = Eigen::VectorXd::Zero(dim);
    for (std::size_t k = 0; k < truth.size(); ++k)
        accum += (truth.states[k] - estimate.states[k]).array().square().matrix();
    accum /= static_cast<double>(truth.size());

    RmseResult out;
    out.per_dim = accum.array().sqrt();
    out.mean = out.per_dim.mean();
    return out;
}

double BenchReport::median_mean_rmse(const std::string& method) const {
    std::vector<double> values;
    for (const auto& s : seeds)
        if (s.ok && method_of(s, method).ok)
            values.push_back(method_of(s, method).mean_rmse);
    return median_of(std::move(values));
}

Eigen::VectorXd BenchReport::median_per_dim_rmse(const std::string& method) const {
    int dim = 0;
    for (const auto& s : seeds)
        if (s.ok && method_of(s, method).ok)
            dim = static_cast<int>(method_of(s, method).per_dim_rmse.size());
    Eigen::VectorXd out =
        Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::quiet_NaN());
    for (int d = 0; d < dim; ++d) {
        std::vector<double> values;
        for (const auto& s : seeds)
            if (s.ok && method_of(s, method).ok)
                values.push_back(method_of(s, method).per_dim_rmse(d));
        out(d) = median_of(std::move(values));
    }
    return out;
}

BenchReport run_benchmark(const BenchConfig& cfg) {
    cfg.validate();
    const auto start = Clock::now();

    BenchReport report;
    report.config_echo = cfg.to_config();
    report.system = to_string(cfg.system.kind);
    report.regime = cfg.n_points;
    report.seeds.resize(cfg.seeds.size());

    const std::size_t jobs = cfg.seeds.size();
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers =
        std::min(jobs, cfg.workers > 0 ? static_cast<std::size_t>(cfg.workers)
                                       : static_cast<std::size_t>(hw));

    // Seeds are independent jobs; results land in their slot, so the merge
    // is deterministic regardless of scheduling.
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs;)
            report.seeds[i] = run_seed(cfg, cfg.seeds[i]);
    };
    if (workers <= 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(drain);
        for (auto& t : pool)
            t.join();
    }

    report.total_seconds = seconds_since(start);
    return report;
}

std::string report_csv_string(const BenchReport& report) {
    std::string out = "system,regime,method,seed,dim,rmse\n";
    const std::string prefix = report.system + "," + std::to_string(report.regime) + ",";

    for (const std::string method : {"rc", "rcukf"}) {
        for (const auto& seed : report.seeds) {
            const std::string row = prefix + method + "," + std::to_string(seed.seed) + ",";
            if (!seed.ok) {
                out += row + "error,nan\n";
                continue;
            }
            const MethodResult& m = method_of(seed, method);
            if (!m.ok) {
                out += row + "error,nan\n";
                continue;
            }
            for (Eigen::Index d = 0; d < m.per_dim_rmse.size(); ++d)
                out += row + dim_label(static_cast<int>(d)) + "," +
                       format_double(m.per_dim_rmse(d)) + "\n";
            out += row + "mean," + format_double(m.mean_rmse) + "\n";
        }
        const Eigen::VectorXd med = report.median_per_dim_rmse(method);
        const std::string row = prefix + method + ",median,";
        for (Eigen::Index d = 0; d < med.size(); ++d)
            out += row + dim_label(static_cast<int>(d)) + "," + format_double(med(d)) + "\n";
        out += row + "mean," + format_double(report.median_mean_rmse(method)) + "\n";
    }
    return out;
}

void write_report_csv(const BenchReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << report_csv_string(report);
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

void write_report_kv(const BenchReport& report, const std::string& path) {
    KeyValueConfig kv;
    kv.set("report.system", report.system);
    kv.set("report.regime", std::to_string(report.regime));
    kv.set("report.total_seconds", format_double(report.total_seconds));
    for (const auto& [key, value] : report.config_echo.entries())
        kv.set("config." + key, value);

    std::string seed_list;
    for (std::size_t i = 0; i < report.seeds.size(); ++i) {
        if (i > 0)
            seed_list += ',';
        seed_list += std::to_string(report.seeds[i].seed);
    }
    kv.set("report.seeds", seed_list);

    for (const auto& seed : report.seeds) {
        const std::string base = "seed." + std::to_string(seed.seed) + ".";
        kv.set(base + "ok", seed.ok ? "1" : "0");
        if (!seed.error.empty())
            kv.set(base + "error", seed.error);
        kv.set(base + "generate_seconds", format_double(seed.generate_seconds));
        kv.set(base + "train_seconds", format_double(seed.train_seconds));
        for (const std::string method : {"rc", "rcukf"}) {
            const MethodResult& m = method_of(seed, method);
            const std::string mbase = base + method + ".";
            kv.set(mbase + "ok", m.ok ? "1" : "0");
            if (!m.error.empty())
                kv.set(mbase + "error", m.error);
            if (m.ok) {
                for (Eigen::Index d = 0; d < m.per_dim_rmse.size(); ++d)
                    kv.set(mbase + "rmse." + dim_label(static_cast<int>(d)),
                           format_double(m.per_dim_rmse(d)));
                kv.set(mbase + "rmse.mean", format_double(m.mean_rmse));
                kv.set(mbase + "seconds", format_double(m.seconds));
            }
        }
    }

    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << kv.serialize();
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

SeedTrajectories run_seed_trajectories(const BenchConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    PreparedSeed prep = prepare_seed(cfg, seed);
    const Trajectory& test = prep.test_split;

    SeedTrajectories out;
    out.truth = test;
    out.measurements.times = test.times;
    out.measurements.states =
        add_measurement_noise(test, cfg.measurement_noise_std, mix_seed(seed, 2));
    out.rc = prep.reservoir.predict_autonomous(static_cast<int>(test.size()),
                                               test.times.front(), test.dt());

    RcukfEstimator estimator(
        prep.reservoir,
        make_filter_config(cfg, prep.residual_estimate, prep.reservoir.input_dim()));
    estimator.warmup(prep.train_split);
    out.rcukf = estimator.run(out.measurements.states, test.times.front(), test.dt());
    return out;
}

BenchReport read_report_kv(const std::string& path) {
    const KeyValueConfig kv = KeyValueConfig::from_file(path);

    BenchReport report;
    report.system = kv.get_string("report.system", "");
    report.regime = kv.get_int("report.regime", 0);
    report.total_seconds = kv.get_double("report.total_seconds", 0.0);
    if (report.system.empty())
        throw IoError("'" + path + "': missing report.system");

    for (const auto& [key, value] : kv.entries())
        if (key.rfind("config.", 0) == 0)
            report.config_echo.set(key.substr(7), value);

    const auto seed_ids = kv.get_uint64_list("report.seeds", {});
    for (std::uint64_t id : seed_ids) {
        SeedResult seed;
        seed.seed = id;
        const std::string base = "seed." + std::to_string(id) + ".";
        seed.ok = kv.get_bool(base + "ok", false);
        seed.error = kv.get_string(base + "error", "");
        seed.generate_seconds = kv.get_double(base + "generate_seconds", 0.0);
        seed.train_seconds = kv.get_double(base + "train_seconds", 0.0);
        for (const std::string method : {"rc", "rcukf"}) {
            MethodResult m;
            const std::string mbase = base + method + ".";
            m.ok = kv.get_bool(mbase + "ok", false);
            m.error = kv.get_string(mbase + "error", "");
            if (m.ok) {
                std::vector<double> dims;
                for (int d = 0; kv.has(mbase + "rmse." + dim_label(d)); ++d)
                    dims.push_back(kv.get_double(mbase + "rmse." + dim_label(d), 0.0));
                m.per_dim_rmse = Eigen::Map<const Eigen::VectorXd>(
                    dims.data(), static_cast<Eigen::Index>(dims.size()));
                m.mean_rmse = kv.get_double(mbase + "rmse.mean", 0.0);
                m.seconds = kv.get_double(mbase + "seconds", 0.0);
            }
            if (method == std::string("rc"))
                seed.rc = std::move(m);
            else
                seed.rcukf = std::move(m);
        }
        report.seeds.push_back(std::move(seed));
    }
    return report;
}

} // namespace rcukf
