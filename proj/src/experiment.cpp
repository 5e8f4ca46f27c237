#include "pvqd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace pvqd {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) {
    throw std::invalid_argument("config error: " + msg);
}

void require_keys(const json& obj, const std::string& where,
                  const std::vector<std::string>& allowed) {
    if (!obj.is_object()) config_error(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            config_error("unknown key '" + key + "' in " + where);
    }
}

double get_number(const json& obj, const std::string& where, const std::string& key,
                  double fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) config_error("missing key '" + key + "' in " + where);
        return fallback;
    }
    if (!obj[key].is_number()) config_error("key '" + key + "' in " + where + " must be a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& where, const std::string& key,
            int fallback, bool required = false) {
    const double v = get_number(obj, where, key, fallback, required);
    if (v != std::floor(v)) config_error("key '" + key + "' in " + where + " must be an integer");
    return static_cast<int>(v);
}

bool get_bool(const json& obj, const std::string& where, const std::string& key,
              bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) config_error("key '" + key + "' in " + where + " must be a boolean");
    return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key,
                       const std::string& fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) config_error("missing key '" + key + "' in " + where);
        return fallback;
    }
    if (!obj[key].is_string()) config_error("key '" + key + "' in " + where + " must be a string");
    return obj[key].get<std::string>();
}

SweepPolicy parse_policy(const json& obj) {
    require_keys(obj, "policy",
                 {"kind", "loss_threshold", "warm_start_zeta", "escalation",
                  "reset_each_step", "warm_start_use_increment"});
    SweepPolicy p;
    const std::string kind = get_string(obj, "policy", "kind", "", true);
    if (kind == "full") p.kind = SweepPolicy::Kind::Full;
    else if (kind == "sequential") p.kind = SweepPolicy::Kind::Sequential;
    else if (kind == "random") p.kind = SweepPolicy::Kind::Random;
    else if (kind == "fidelity") p.kind = SweepPolicy::Kind::Fidelity;
    else config_error("policy kind must be full|sequential|random|fidelity, got '" + kind + "'");
    p.loss_threshold = get_number(obj, "policy", "loss_threshold", 1e-7);
    if (p.kind == SweepPolicy::Kind::Fidelity && p.loss_threshold <= 0.0)
        config_error("policy loss_threshold must be positive");
    p.warm_start_zeta = get_number(obj, "policy", "warm_start_zeta", 0.0);
    p.fidelity_reset_each_step = get_bool(obj, "policy", "reset_each_step", false);
    p.warm_start_use_increment = get_bool(obj, "policy", "warm_start_use_increment", false);
    if (obj.contains("escalation")) {
        const json& esc = obj["escalation"];
        require_keys(esc, "policy.escalation",
                     {"stagnation_window", "max_simultaneous_blocks"});
        EscalationConfig e;
        e.stagnation_window =
            get_int(esc, "policy.escalation", "stagnation_window", 5);
        e.max_simultaneous_blocks =
            get_int(esc, "policy.escalation", "max_simultaneous_blocks", 2);
        if (e.stagnation_window < 1 || e.max_simultaneous_blocks < 1)
            config_error("escalation settings must be positive");
        p.escalation = e;
    }
    return p;
}

OptimizerConfig parse_optimizer(const json& obj) {
    require_keys(obj, "optimizer",
                 {"mode", "max_iterations", "loss_tolerance", "gradient_tolerance",
                  "spsa"});
    OptimizerConfig o;
    const std::string mode = get_string(obj, "optimizer", "mode", "lbfgs");
    if (mode == "lbfgs") o.mode = OptimizerConfig::Mode::GradientQuasiNewton;
    else if (mode == "spsa") o.mode = OptimizerConfig::Mode::Spsa;
    else config_error("optimizer mode must be lbfgs|spsa, got '" + mode + "'");
    o.max_iterations = get_int(obj, "optimizer", "max_iterations", 500);
    o.loss_tolerance = get_number(obj, "optimizer", "loss_tolerance", 1e-9);
    o.gradient_tolerance = get_number(obj, "optimizer", "gradient_tolerance", 1e-8);
    if (o.max_iterations < 1) config_error("optimizer max_iterations must be >= 1");
    if (o.loss_tolerance <= 0 || o.gradient_tolerance <= 0)
        config_error("optimizer tolerances must be positive");
    if (obj.contains("spsa")) {
        const json& s = obj["spsa"];
        require_keys(s, "optimizer.spsa", {"a", "c", "A", "alpha", "gamma"});
        o.spsa.a = get_number(s, "optimizer.spsa", "a", 0.0);
        o.spsa.c = get_number(s, "optimizer.spsa", "c", 0.01);
        o.spsa.big_a = get_number(s, "optimizer.spsa", "A", 10.0);
        o.spsa.alpha = get_number(s, "optimizer.spsa", "alpha", 0.602);
        o.spsa.gamma = get_number(s, "optimizer.spsa", "gamma", 0.101);
        if (o.spsa.c <= 0) config_error("spsa gain c must be positive");
    }
    return o;
}

MeasurementConfig parse_measurement(const json& obj) {
    require_keys(obj, "measurement", {"mode", "shots", "noise"});
    MeasurementConfig m;
    const std::string mode = get_string(obj, "measurement", "mode", "exact");
    if (mode == "exact") m.mode = MeasurementConfig::Mode::Exact;
    else if (mode == "shots") m.mode = MeasurementConfig::Mode::Shots;
    else config_error("measurement mode must be exact|shots, got '" + mode + "'");
    const int shots = get_int(obj, "measurement", "shots", 1024);
    if (shots < 1) config_error("measurement shots must be >= 1");
    m.num_shots = static_cast<std::uint64_t>(shots);
    if (obj.contains("noise")) {
        const json& n = obj["noise"];
        require_keys(n, "measurement.noise",
                     {"depolarizing_1q", "depolarizing_2q", "readout_flip"});
        m.noise.depolarizing_1q = get_number(n, "measurement.noise", "depolarizing_1q", 0.0);
        m.noise.depolarizing_2q = get_number(n, "measurement.noise", "depolarizing_2q", 0.0);
        m.noise.readout_flip = get_number(n, "measurement.noise", "readout_flip", 0.0);
        for (const double p :
             {m.noise.depolarizing_1q, m.noise.depolarizing_2q, m.noise.readout_flip})
            if (!(p >= 0.0 && p < 1.0))
                config_error("noise probabilities must lie in [0, 1)");
    }
    return m;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string blocks_string(const std::vector<std::uint32_t>& blocks) {
    std::string s;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) s += '+';
        s += std::to_string(blocks[i]);
    }
    return s;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::string partial_csv(const EvolutionConfig& cfg,
                        const std::vector<TimeStepRecord>& records);

}  // namespace

ExperimentSpec parse_config_text(const std::string& json_text,
                                 const std::string& default_label) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        config_error(std::string("invalid JSON: ") + e.what());
    }
    require_keys(root, "config",
                 {"label", "model", "num_qubits", "J", "h", "Jx", "Jy", "Jz",
                  "periodic", "hamiltonian_file", "dt", "num_steps", "trotter_steps",
                  "ansatz_blocks", "initial_bits", "policy", "optimizer", "measurement",
                  "num_runs", "base_seed"});

    ExperimentSpec spec;
    spec.label = get_string(root, "config", "label", default_label);
    const std::string model = get_string(root, "config", "model", "", true);
    if (model == "tfim") spec.model = ExperimentSpec::Model::Tfim;
    else if (model == "xyz") spec.model = ExperimentSpec::Model::Xyz;
    else if (model == "custom") spec.model = ExperimentSpec::Model::Custom;
    else config_error("model must be tfim|xyz|custom, got '" + model + "'");

    spec.num_qubits = get_int(root, "config", "num_qubits", 0, true);
    if (spec.num_qubits < 1) config_error("num_qubits must be >= 1");
    spec.coupling_j = get_number(root, "config", "J", spec.coupling_j);
    spec.field_h = get_number(root, "config", "h", spec.field_h);
    spec.jx = get_number(root, "config", "Jx", spec.jx);
    spec.jy = get_number(root, "config", "Jy", spec.jy);
    spec.jz = get_number(root, "config", "Jz", spec.jz);
    spec.periodic = get_bool(root, "config", "periodic", false);
    spec.hamiltonian_file = get_string(root, "config", "hamiltonian_file", "");
    if (spec.model == ExperimentSpec::Model::Custom && spec.hamiltonian_file.empty())
        config_error("custom model requires 'hamiltonian_file'");

    spec.dt = get_number(root, "config", "dt", 0.0, true);
    if (spec.dt <= 0.0) config_error("dt must be positive");
    spec.num_steps = get_int(root, "config", "num_steps", 0, true);
    if (spec.num_steps < 1) config_error("num_steps must be >= 1");
    spec.trotter_steps = get_int(root, "config", "trotter_steps", 8);
    if (spec.trotter_steps < 1) config_error("trotter_steps must be >= 1");
    spec.ansatz_blocks = get_int(root, "config", "ansatz_blocks", 0, true);
    if (spec.ansatz_blocks < 1) config_error("ansatz_blocks must be >= 1");
    const int bits = get_int(root, "config", "initial_bits", 0);
    if (bits < 0) config_error("initial_bits must be non-negative");
    spec.initial_bits = static_cast<std::uint64_t>(bits);

    if (root.contains("policy")) spec.policy = parse_policy(root["policy"]);
    if (root.contains("optimizer")) spec.optimizer = parse_optimizer(root["optimizer"]);
    if (root.contains("measurement"))
        spec.measurement = parse_measurement(root["measurement"]);

    spec.num_runs = get_int(root, "config", "num_runs", 1);
    if (spec.num_runs < 1) config_error("num_runs must be >= 1");
    const double seed = get_number(root, "config", "base_seed", 1.0);
    if (seed < 0 || seed != std::floor(seed)) config_error("base_seed must be a non-negative integer");
    spec.base_seed = static_cast<std::uint64_t>(seed);
    return spec;
}

ExperimentSpec parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::filesystem::path(path).stem().string());
}

PauliSum build_hamiltonian(const ExperimentSpec& spec) {
    const auto n = static_cast<std::uint32_t>(spec.num_qubits);
    switch (spec.model) {
        case ExperimentSpec::Model::Tfim:
            return build_tfim(n, spec.coupling_j, spec.field_h, spec.periodic);
        case ExperimentSpec::Model::Xyz:
            return build_xyz(n, spec.jx, spec.jy, spec.jz, spec.periodic);
        case ExperimentSpec::Model::Custom: {
            std::ifstream in(spec.hamiltonian_file);
            if (!in) config_error("cannot open hamiltonian file " + spec.hamiltonian_file);
            return parse_pauli_sum(in, n);
        }
    }
    throw std::logic_error("unreachable model");
}

std::vector<NamedObservable> default_observables(const ExperimentSpec& spec,
                                                 const PauliSum& hamiltonian) {
    const auto n = static_cast<std::uint32_t>(spec.num_qubits);
    std::vector<NamedObservable> obs;
    obs.push_back({"energy", hamiltonian});
    if (spec.model == ExperimentSpec::Model::Tfim) {
        std::vector<PauliTerm> xs, zs;
        for (std::uint32_t q = 0; q < n; ++q) {
            xs.push_back({1.0, {{q, Pauli::X}}});
            zs.push_back({1.0, {{q, Pauli::Z}}});
        }
        obs.push_back({"sigma_x", PauliSum(n, std::move(xs))});
        obs.push_back({"sigma_z", PauliSum(n, std::move(zs))});
    } else if (spec.model == ExperimentSpec::Model::Xyz) {
        obs.push_back({"z0", PauliSum(n, {{1.0, {{0, Pauli::Z}}}})});
        obs.push_back({"z0z1", PauliSum(n, {{1.0, {{0, Pauli::Z}, {1, Pauli::Z}}}})});
    }
    return obs;
}

EvolutionConfig to_evolution_config(const ExperimentSpec& spec, std::uint64_t run_seed) {
    const PauliSum h = build_hamiltonian(spec);
    EvolutionConfig cfg{h,
                        spec.ansatz_blocks,
                        spec.trotter_steps,
                        spec.dt,
                        spec.num_steps,
                        spec.policy,
                        spec.optimizer,
                        default_observables(spec, h),
                        spec.measurement,
                        run_seed,
                        spec.initial_bits};
    return cfg;
}

namespace {

std::string csv_header(const EvolutionConfig& cfg) {
    std::string h = "step,t";
    for (const auto& obs : cfg.observables)
        h += "," + obs.name + "_sim," + obs.name + "_exact";
    h += ",loss,infidelity,iterations,active_blocks\n";
    return h;
}

std::string csv_row(const TimeStepRecord& r) {
    std::string line = std::to_string(r.step_index) + "," + fmt(r.t);
    for (std::size_t j = 0; j < r.observed.size(); ++j)
        line += "," + fmt(r.observed[j]) + "," + fmt(r.exact[j]);
    line += "," + fmt(r.loss) + "," + fmt(r.infidelity) + "," +
            std::to_string(r.iterations) + "," + blocks_string(r.active_blocks);
    return line + "\n";
}

std::string partial_csv(const EvolutionConfig& cfg,
                        const std::vector<TimeStepRecord>& records) {
    std::string out = csv_header(cfg);
    for (const auto& r : records) out += csv_row(r);
    return out;
}

}  // namespace

std::string run_csv(const RunResult& run) {
    return partial_csv(run.config, run.records);
}

AggregateReport aggregate_runs(const std::vector<RunResult>& runs) {
    if (runs.empty()) throw std::invalid_argument("no runs to aggregate");
    const auto& first = runs.front();
    const std::size_t steps = first.records.size();
    AggregateReport rep;
    rep.num_runs = static_cast<int>(runs.size());
    rep.t.reserve(steps);
    for (const auto& r : first.records) rep.t.push_back(r.t);

    std::vector<std::pair<std::string, std::vector<std::vector<double>>>> columns;
    auto add_column = [&](const std::string& name, auto&& getter) {
        std::vector<std::vector<double>> per_run;
        for (const auto& run : runs) {
            std::vector<double> vals;
            vals.reserve(steps);
            for (const auto& rec : run.records) vals.push_back(getter(rec));
            per_run.push_back(std::move(vals));
        }
        columns.emplace_back(name, std::move(per_run));
    };

    for (std::size_t j = 0; j < first.config.observables.size(); ++j) {
        const std::string& name = first.config.observables[j].name;
        add_column(name + "_sim", [j](const TimeStepRecord& r) { return r.observed[j]; });
        add_column(name + "_exact", [j](const TimeStepRecord& r) { return r.exact[j]; });
    }
    add_column("loss", [](const TimeStepRecord& r) { return r.loss; });
    add_column("infidelity", [](const TimeStepRecord& r) { return r.infidelity; });
    add_column("iterations",
               [](const TimeStepRecord& r) { return static_cast<double>(r.iterations); });

    const auto n = static_cast<double>(runs.size());
    for (auto& [name, per_run] : columns) {
        AggregateQuantity q;
        q.name = name;
        q.mean.resize(steps, 0.0);
        q.stdev.resize(steps, 0.0);
        for (std::size_t s = 0; s < steps; ++s) {
            double mean = 0.0;
            for (const auto& run_vals : per_run) mean += run_vals[s];
            mean /= n;
            double var = 0.0;
            for (const auto& run_vals : per_run) {
                const double d = run_vals[s] - mean;
                var += d * d;
            }
            q.mean[s] = mean;
            q.stdev[s] = std::sqrt(var / n);  // population std across runs
        }
        rep.quantities.push_back(std::move(q));
    }
    return rep;
}

std::string aggregate_csv(const AggregateReport& report) {
    std::string out = "step,t";
    for (const auto& q : report.quantities) out += "," + q.name + "_mean," + q.name + "_std";
    out += "\n";
    for (std::size_t s = 0; s < report.t.size(); ++s) {
        out += std::to_string(s + 1) + "," + fmt(report.t[s]);
        for (const auto& q : report.quantities)
            out += "," + fmt(q.mean[s]) + "," + fmt(q.stdev[s]);
        out += "\n";
    }
    return out;
}

std::string report_json(const ExperimentSpec& spec, const ExperimentOutput& output) {
    json root;
    root["label"] = spec.label;
    root["num_runs"] = output.runs.size();
    root["num_steps"] = spec.num_steps;
    root["dt"] = spec.dt;
    root["ansatz_blocks"] = spec.ansatz_blocks;
    root["trotter_steps"] = spec.trotter_steps;

    json runs = json::array();
    for (std::size_t k = 0; k < output.runs.size(); ++k) {
        const RunSummary& s = output.runs[k].summary;
        json r;
        r["run_index"] = k;
        r["seed"] = spec.base_seed + k;
        json errs = json::object();
        for (const auto& e : s.observable_errors) {
            errs[e.name] = {{"mean_abs_error", e.mean_abs_error},
                            {"std_abs_error", e.std_abs_error}};
        }
        r["observable_errors"] = errs;
        r["mean_infidelity"] = s.mean_infidelity;
        r["max_infidelity"] = s.max_infidelity;
        r["total_iterations"] = s.total_iterations;
        r["total_wall_ms"] = s.total_wall_ms;
        r["mean_wall_ms_per_step"] = s.mean_wall_ms_per_step;
        runs.push_back(std::move(r));
    }
    root["runs"] = runs;

    json agg;
    agg["num_runs"] = output.aggregate.num_runs;
    agg["t"] = output.aggregate.t;
    json quantities = json::object();
    for (const auto& q : output.aggregate.quantities)
        quantities[q.name] = {{"mean", q.mean}, {"std", q.stdev}};
    agg["quantities"] = quantities;
    root["aggregate"] = agg;
    return root.dump(2) + "\n";
}

namespace {

void run_one(const ExperimentSpec& spec, std::size_t run_index,
             const std::string& out_dir, std::optional<RunResult>& slot,
             std::string& file, std::exception_ptr& error) {
    const std::string base =
        out_dir + "/" + spec.label + "_run" + std::to_string(run_index) + ".csv";
    try {
        const EvolutionConfig cfg = to_evolution_config(spec, spec.base_seed + run_index);
        try {
            slot = run_evolution(cfg);
        } catch (const PartialRunError& e) {
            write_file(base + ".partial", partial_csv(cfg, e.records));
            throw std::runtime_error("run " + std::to_string(run_index) +
                                     " failed: " + e.what());
        }
        write_file(base, run_csv(*slot));
        file = base;
    } catch (...) {
        error = std::current_exception();
    }
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentSpec& spec, const std::string& out_dir,
                                int threads) {
    std::filesystem::create_directories(out_dir);
    const auto n = static_cast<std::size_t>(spec.num_runs);
    std::vector<std::optional<RunResult>> runs(n);
    std::vector<std::string> files(n);
    std::vector<std::exception_ptr> errors(n);

    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t k = 0; k < n; ++k)
            run_one(spec, k, out_dir, runs[k], files[k], errors[k]);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next.fetch_add(1); k < n; k = next.fetch_add(1))
                    run_one(spec, k, out_dir, runs[k], files[k], errors[k]);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    ExperimentOutput out;
    out.runs.reserve(n);
    for (auto& slot : runs) out.runs.push_back(std::move(*slot));
    out.files_written.assign(files.begin(), files.end());
    out.aggregate = aggregate_runs(out.runs);

    const std::string agg_path = out_dir + "/" + spec.label + "_aggregate.csv";
    write_file(agg_path, aggregate_csv(out.aggregate));
    out.files_written.push_back(agg_path);
    const std::string report_path = out_dir + "/" + spec.label + "_report.json";
    write_file(report_path, report_json(spec, out));
    out.files_written.push_back(report_path);
    return out;
}

namespace {

std::string policy_name(const SweepPolicy& p) {
    switch (p.kind) {
        case SweepPolicy::Kind::Full: return "full";
        case SweepPolicy::Kind::Sequential: return "sequential";
        case SweepPolicy::Kind::Random: return "random";
        case SweepPolicy::Kind::Fidelity: return "fidelity";
    }
    return "?";
}

}  // namespace

std::vector<PolicyComparisonRow> compare_policies(const std::vector<ExperimentSpec>& specs,
                                                  const std::string& out_dir,
                                                  int threads) {
    if (specs.empty()) throw std::invalid_argument("no specs to compare");
    const ExperimentSpec& ref = specs.front();
    for (const auto& s : specs) {
        const bool same_model =
            s.model == ref.model && s.num_qubits == ref.num_qubits &&
            s.coupling_j == ref.coupling_j && s.field_h == ref.field_h &&
            s.jx == ref.jx && s.jy == ref.jy && s.jz == ref.jz &&
            s.periodic == ref.periodic && s.hamiltonian_file == ref.hamiltonian_file;
        if (!same_model || s.dt != ref.dt || s.num_steps != ref.num_steps ||
            s.trotter_steps != ref.trotter_steps)
            throw std::invalid_argument(
                "comparison error: specs must share model parameters, dt, steps, and "
                "Trotter depth (offending label: " + s.label + ")");
    }

    std::vector<PolicyComparisonRow> rows;
    for (const auto& spec : specs) {
        const ExperimentOutput out = run_experiment(spec, out_dir, threads);
        PolicyComparisonRow row;
        row.label = spec.label;
        row.policy = policy_name(spec.policy);
        row.ansatz_blocks = spec.ansatz_blocks;
        const auto runs_n = static_cast<double>(out.runs.size());
        for (const auto& run : out.runs) {
            double params = 0.0;
            for (const auto& rec : run.records)
                params += static_cast<double>(rec.optimized_parameters);
            row.mean_params_per_step += params / static_cast<double>(run.records.size());
            row.mean_infidelity += run.summary.mean_infidelity;
            row.mean_total_iterations += static_cast<double>(run.summary.total_iterations);
            row.mean_total_wall_ms += run.summary.total_wall_ms;
        }
        row.mean_params_per_step /= runs_n;
        row.mean_infidelity /= runs_n;
        row.mean_total_iterations /= runs_n;
        row.mean_total_wall_ms /= runs_n;
        for (std::size_t j = 0; j < out.runs.front().summary.observable_errors.size(); ++j) {
            ObservableErrorStats stats;
            stats.name = out.runs.front().summary.observable_errors[j].name;
            for (const auto& run : out.runs) {
                stats.mean_abs_error += run.summary.observable_errors[j].mean_abs_error;
                stats.std_abs_error += run.summary.observable_errors[j].std_abs_error;
            }
            stats.mean_abs_error /= runs_n;
            stats.std_abs_error /= runs_n;
            row.observable_errors.push_back(std::move(stats));
        }
        rows.push_back(std::move(row));
    }

    std::string csv = "label,policy,blocks,params_per_step";
    for (const auto& e : rows.front().observable_errors)
        csv += ",err_" + e.name + "_mean,err_" + e.name + "_std";
    csv += ",mean_infidelity,total_iterations,total_wall_ms\n";
    for (const auto& row : rows) {
        csv += row.label + "," + row.policy + "," + std::to_string(row.ansatz_blocks) +
               "," + fmt(row.mean_params_per_step);
        for (const auto& e : row.observable_errors)
            csv += "," + fmt(e.mean_abs_error) + "," + fmt(e.std_abs_error);
        csv += "," + fmt(row.mean_infidelity) + "," + fmt(row.mean_total_iterations) +
               "," + fmt(row.mean_total_wall_ms) + "\n";
    }
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/comparison.csv", csv);
    return rows;
}

std::string format_comparison_table(const std::vector<PolicyComparisonRow>& rows) {
    std::ostringstream out;
    out << "label            policy      blocks  params/step  ";
    if (!rows.empty())
        for (const auto& e : rows.front().observable_errors)
            out << "err(" << e.name << ")  ";
    out << "mean_infid    iters     wall_ms\n";
    for (const auto& row : rows) {
        char buf[512];
        std::snprintf(buf, sizeof(buf), "%-16s %-11s %5d  %10.1f  ", row.label.c_str(),
                      row.policy.c_str(), row.ansatz_blocks, row.mean_params_per_step);
        out << buf;
        for (const auto& e : row.observable_errors) {
            std::snprintf(buf, sizeof(buf), "%-11.4g ", e.mean_abs_error);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "%-11.3e %8.0f  %10.1f\n", row.mean_infidelity,
                      row.mean_total_iterations, row.mean_total_wall_ms);
        out << buf;
    }
    return out.str();
}

namespace {

const std::map<std::string, std::string>& preset_map() {
    auto make = [](const std::string& body) { return "{\n" + body + "\n}\n"; };
    static const std::map<std::string, std::string> presets = {
        {"ising2_smoke", make(R"(  "model": "tfim", "num_qubits": 2, "J": -0.25, "h": -1.0,
  "dt": 0.05, "num_steps": 5, "trotter_steps": 4, "ansatz_blocks": 2,
  "num_runs": 2, "base_seed": 7,
  "policy": {"kind": "fidelity", "loss_threshold": 1e-7})")},
        {"ising4_fs2", make(R"(  "model": "tfim", "num_qubits": 4, "J": -0.25, "h": -1.0,
  "dt": 0.05, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "fidelity", "loss_threshold": 0.3})")},
        {"ising4_warm", make(R"(  "model": "tfim", "num_qubits": 4, "J": -0.25, "h": -1.0,
  "dt": 0.05, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "sequential", "warm_start_zeta": -0.05})")},
        {"ising4_noisy", make(R"(  "model": "tfim", "num_qubits": 4, "J": -0.25, "h": -1.0,
  "dt": 0.05, "num_steps": 50, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "fidelity", "loss_threshold": 0.3},
  "measurement": {"mode": "shots", "shots": 4096,
    "noise": {"depolarizing_1q": 0.001, "depolarizing_2q": 0.01, "readout_flip": 0.01}})")},
        {"ising4_noisy_spsa", make(R"(  "model": "tfim", "num_qubits": 4, "J": -0.25, "h": -1.0,
  "dt": 0.05, "num_steps": 50, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "fidelity", "loss_threshold": 0.3},
  "optimizer": {"mode": "spsa", "max_iterations": 300, "loss_tolerance": 1e-5},
  "measurement": {"mode": "shots", "shots": 4096,
    "noise": {"depolarizing_1q": 0.001, "depolarizing_2q": 0.01, "readout_flip": 0.01}})")},
        {"ising8_pvqd1", make(R"(  "model": "tfim", "num_qubits": 8, "J": -0.25, "h": -1.0,
  "dt": 0.01, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 1,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "full"})")},
        {"ising8_pvqd2", make(R"(  "model": "tfim", "num_qubits": 8, "J": -0.25, "h": -1.0,
  "dt": 0.01, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "full"})")},
        {"ising8_fs2", make(R"(  "model": "tfim", "num_qubits": 8, "J": -0.25, "h": -1.0,
  "dt": 0.01, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "fidelity", "loss_threshold": 3e-2})")},
        {"ising8_seq2", make(R"(  "model": "tfim", "num_qubits": 8, "J": -0.25, "h": -1.0,
  "dt": 0.01, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "sequential"})")},
        {"ising8_rand2", make(R"(  "model": "tfim", "num_qubits": 8, "J": -0.25, "h": -1.0,
  "dt": 0.01, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "random"})")},
        {"ising8_warm", make(R"(  "model": "tfim", "num_qubits": 8, "J": -0.25, "h": -1.0,
  "dt": 0.05, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "sequential", "warm_start_zeta": -0.05})")},
        {"ising8_noisy", make(R"(  "model": "tfim", "num_qubits": 8, "J": -0.25, "h": -1.0,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "fidelity", "loss_threshold": 0.1},
  "measurement": {"mode": "shots", "shots": 4096,
    "noise": {"depolarizing_1q": 0.001, "depolarizing_2q": 0.01, "readout_flip": 0.01}})")},
        {"ising10_pvqd1", make(R"(  "model": "tfim", "num_qubits": 10, "J": -0.25, "h": -1.0,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 1,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "full"})")},
        {"ising10_pvqd2", make(R"(  "model": "tfim", "num_qubits": 10, "J": -0.25, "h": -1.0,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "full"})")},
        {"ising10_pvqd4", make(R"(  "model": "tfim", "num_qubits": 10, "J": -0.25, "h": -1.0,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 4,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "full"})")},
        {"ising10_fs2", make(R"(  "model": "tfim", "num_qubits": 10, "J": -0.25, "h": -1.0,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "fidelity", "loss_threshold": 0.1})")},
        {"xyz6_pvqd1", make(R"(  "model": "xyz", "num_qubits": 6, "Jx": 1.0, "Jy": 0.8, "Jz": 0.6,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 1,
  "num_runs": 1, "base_seed": 1,
  "policy": {"kind": "full"})")},
        {"xyz6_pvqd2", make(R"(  "model": "xyz", "num_qubits": 6, "Jx": 1.0, "Jy": 0.8, "Jz": 0.6,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 1, "base_seed": 1,
  "policy": {"kind": "full"})")},
        {"xyz6_fs2", make(R"(  "model": "xyz", "num_qubits": 6, "Jx": 1.0, "Jy": 0.8, "Jz": 0.6,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 1, "base_seed": 1,
  "policy": {"kind": "fidelity", "loss_threshold": 0.5})")},
        {"xyz8_escalation", make(R"(  "model": "xyz", "num_qubits": 8, "Jx": 1.0, "Jy": 0.8, "Jz": 0.6,
  "dt": 0.05, "num_steps": 30, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 1, "base_seed": 1,
  "policy": {"kind": "fidelity", "loss_threshold": 1e-10,
    "escalation": {"stagnation_window": 12, "max_simultaneous_blocks": 2}},
  "optimizer": {"mode": "lbfgs", "max_iterations": 500, "loss_tolerance": 1e-12})")},
        {"xyz10_pvqd1", make(R"(  "model": "xyz", "num_qubits": 10, "Jx": 1.0, "Jy": 0.8, "Jz": 0.6,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 1,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "full"})")},
        {"xyz10_pvqd2", make(R"(  "model": "xyz", "num_qubits": 10, "Jx": 1.0, "Jy": 0.8, "Jz": 0.6,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "full"})")},
        {"xyz10_pvqd4", make(R"(  "model": "xyz", "num_qubits": 10, "Jx": 1.0, "Jy": 0.8, "Jz": 0.6,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 4,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "full"})")},
        {"xyz10_fs2", make(R"(  "model": "xyz", "num_qubits": 10, "Jx": 1.0, "Jy": 0.8, "Jz": 0.6,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "fidelity", "loss_threshold": 0.5})")},
        {"xyz10_fs4", make(R"(  "model": "xyz", "num_qubits": 10, "Jx": 1.0, "Jy": 0.8, "Jz": 0.6,
  "dt": 0.03, "num_steps": 100, "trotter_steps": 8, "ansatz_blocks": 4,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "fidelity", "loss_threshold": 0.5})")},
        {"xyz12_sweepn", make(R"(  "model": "xyz", "num_qubits": 12, "Jx": 1.0, "Jy": 0.8, "Jz": 0.6,
  "dt": 0.05, "num_steps": 80, "trotter_steps": 8, "ansatz_blocks": 2,
  "num_runs": 10, "base_seed": 1,
  "policy": {"kind": "fidelity", "loss_threshold": 1e-3,
    "escalation": {"stagnation_window": 5, "max_simultaneous_blocks": 2}})")},
    };
    return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : preset_map()) names.push_back(name);
    return names;
}

std::string preset_text(const std::string& name) {
    const auto& presets = preset_map();
    const auto it = presets.find(name);
    if (it == presets.end())
        throw std::invalid_argument("unknown preset '" + name + "'");
    return it->second;
}

}  // namespace pvqd
