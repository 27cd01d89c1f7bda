// Batch front-end: noisy-sweep CSVs, single-circuit simulation, depth
// analysis and eigenvalue reconstruction.
//
// Exit codes: 0 success, 1 usage error, 2 input parse error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "entspec/circuit_io.hpp"
#include "entspec/depth.hpp"
#include "entspec/engine.hpp"
#include "entspec/jobs.hpp"
#include "entspec/sweep.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;

entspec::NoiseProfile load_noise(const std::string& spec) {
    if (std::filesystem::exists(spec)) {
        std::ifstream in(spec);
        nlohmann::json j;
        in >> j;
        return entspec::noise_from_json(j);
    }
    return entspec::noise_preset(spec);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::cout << data;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << data;
}

std::vector<entspec::Algorithm> parse_algorithms(const std::vector<std::string>& names) {
    std::vector<entspec::Algorithm> algs;
    for (const auto& n : names) {
        if (n == "all") {
            for (auto a : {entspec::Algorithm::HT, entspec::Algorithm::QeHt4k,
                           entspec::Algorithm::QeHt3k, entspec::Algorithm::TCT,
                           entspec::Algorithm::QeTct6k, entspec::Algorithm::QeTct4k})
                algs.push_back(a);
        } else {
            algs.push_back(entspec::algorithm_from_name(n));
        }
    }
    return algs;
}

int cmd_sweep(const std::vector<std::string>& alg_names, const std::vector<int>& n_values,
              int states, std::uint64_t shots, const std::string& noise_spec, std::uint64_t seed,
              const std::string& out_path, const std::string& format, int threads) {
    entspec::SweepConfig cfg;
    cfg.algorithms = parse_algorithms(alg_names);
    cfg.n_values = n_values;
    cfg.state_count = states;
    cfg.shots = shots;
    cfg.master_seed = seed;
    cfg.threads = threads;
    const entspec::NoiseProfile noise = load_noise(noise_spec);
    const entspec::SweepResult result = entspec::run_sweep(cfg, noise);
    if (format == "json") {
        write_output(out_path, entspec::sweep_to_json(result).dump(2) + "\n");
        return 0;
    }
    write_output(out_path, entspec::sweep_csv(result.rows));
    const std::string reg = entspec::regression_csv(result.regressions);
    if (out_path.empty() || out_path == "-") {
        std::cout << reg;
    } else {
        write_output(out_path + ".regression.csv", reg);
        std::cout << reg;
    }
    return 0;
}

int cmd_simulate(const std::string& circuit_path, const std::string& noise_spec,
                 std::uint64_t shots, std::uint64_t seed, const std::string& out_path,
                 int threads) {
    const entspec::NoiseProfile noise = load_noise(noise_spec);
    const auto prog = entspec::parse_circuit_text(read_file(circuit_path));
    entspec::Circuit c = entspec::pad_idle(entspec::schedule_asap(prog, noise.durations));
    entspec::RunOptions opts;
    opts.threads = threads;
    const entspec::Counts counts = entspec::run(c, noise, shots, seed, opts);
    write_output(out_path, counts.to_json().dump(2) + "\n");
    return 0;
}

int cmd_depth(const std::string& circuit_path, const std::string& builder, int n, int k,
              double theta, bool table, const std::vector<int>& table_n,
              const std::string& noise_spec, const std::string& out_path) {
    if (circuit_path.empty() == builder.empty()) {
        std::cerr << "depth: give exactly one of a circuit file or --builder\n";
        return kExitUsage;
    }
    const entspec::DurationTable durations = load_noise(noise_spec).durations;
    const entspec::StatePrep prep =
        k == 1 ? entspec::theta_prep(theta) : entspec::replicated_theta_prep(k, theta);
    if (table) {
        const auto rows = entspec::depth_table(k, table_n, prep, durations);
        write_output(out_path, entspec::depth_table_csv(rows));
        return 0;
    }
    entspec::Circuit c;
    if (!circuit_path.empty()) {
        c = entspec::pad_idle(entspec::schedule_asap(entspec::parse_circuit_text(read_file(circuit_path)), durations));
    } else if (builder == "contrived") {
        c = entspec::build_contrived_qe_ht(n, k, prep, durations).circuit;
    } else {
        c = entspec::build_algorithm(entspec::algorithm_from_name(builder), n, k, prep, durations)
                .circuit;
    }
    write_output(out_path, entspec::depth_report_to_json(entspec::effective_depth(c)).dump(2) + "\n");
    return 0;
}

int cmd_spectrum(const std::string& traces_path, const std::string& inline_traces,
                 const std::string& out_path) {
    std::string text;
    if (!inline_traces.empty())
        text = inline_traces;
    else if (!traces_path.empty())
        text = read_file(traces_path);
    else {
        std::cerr << "spectrum: give a traces file or --traces\n";
        return kExitUsage;
    }
    std::istringstream ss(text);
    std::vector<double> traces;
    std::string tok;
    while (ss >> tok) {
        try {
            size_t pos = 0;
            traces.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            std::cerr << "spectrum: non-numeric input '" << tok << "'\n";
            return kExitParse;
        }
    }
    const auto eigs = entspec::newton_girard(traces);
    nlohmann::json j;
    j["eigenvalues"] = eigs;
    double sum = 0;
    for (double e : eigs) sum += e;
    j["notes"] = nlohmann::json::array();
    if (std::abs(sum - 1.0) > 1e-9)
        j["notes"].push_back("roots were projected/clamped; eigenvalue sum deviates from 1");
    write_output(out_path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement-spectroscopy simulation toolkit"};
    app.require_subcommand(1);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run theta sweeps and emit estimate/regression CSVs");
    std::vector<std::string> alg_names{"all"};
    std::vector<int> n_values{2};
    int states = 20;
    std::uint64_t shots = 100000, seed = 1;
    std::string noise_spec = "noiseless", out_path, format = "csv";
    int threads = 1;
    sweep->add_option("--algorithm", alg_names,
                      "Algorithms: ht, qe-ht-4k, qe-ht-3k, tct, qe-tct-6k, qe-tct-4k, all")
        ->delimiter(',');
    sweep->add_option("--n", n_values, "Trace powers")->delimiter(',');
    sweep->add_option("--states", states, "States per sweep (default 20)");
    sweep->add_option("--shots", shots, "Shots per job (default 100000)");
    sweep->add_option("--noise", noise_spec, "Noise preset name or JSON file (default noiseless)");
    sweep->add_option("--seed", seed, "Master seed (default 1)");
    sweep->add_option("--out", out_path, "Rows CSV path; regression CSV gets .regression.csv");
    sweep->add_option("--format", format, "Output format: csv (default) or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--threads", threads, "Parallel jobs (default 1)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a textual circuit, print Counts JSON");
    std::string circuit_path;
    std::uint64_t sim_shots = 100000, sim_seed = 1;
    std::string sim_noise = "noiseless", sim_out;
    int sim_threads = 1;
    simulate->add_option("circuit", circuit_path, "Circuit file")->required();
    simulate->add_option("--noise", sim_noise, "Noise preset name or JSON file");
    simulate->add_option("--shots", sim_shots, "Shots (default 100000)");
    simulate->add_option("--seed", sim_seed, "Master seed (default 1)");
    simulate->add_option("--out", sim_out, "Output path (default stdout)");
    simulate->add_option("--threads", sim_threads, "Worker threads (default 1)");

    // depth
    auto* depth = app.add_subcommand("depth", "Standard and effective depth of a circuit");
    std::string depth_circuit, builder;
    int depth_n = 2, depth_k = 1;
    double depth_theta = M_PI / 4;
    bool table = false;
    std::vector<int> table_n{2, 3, 4, 5, 6};
    std::string depth_noise = "noiseless", depth_out;
    depth->add_option("circuit", depth_circuit, "Circuit file");
    depth->add_option("--builder", builder, "Algorithm builder name, or 'contrived'");
    depth->add_option("--n", depth_n, "Trace power for --builder");
    depth->add_option("--k", depth_k, "Subsystem qubits for --builder");
    depth->add_option("--theta", depth_theta, "Prep angle for --builder");
    depth->add_flag("--table", table, "Emit the depth table CSV across --table-n");
    depth->add_option("--table-n", table_n, "n values for --table")->delimiter(',');
    depth->add_option("--noise", depth_noise, "Noise preset/JSON supplying the duration table");
    depth->add_option("--out", depth_out, "Output path (default stdout)");

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues from traces of powers");
    std::string traces_path, inline_traces, spectrum_out;
    spectrum->add_option("traces_file", traces_path, "Whitespace-separated traces file");
    spectrum->add_option("--traces", inline_traces, "Inline traces, e.g. \"1 0.68\"");
    spectrum->add_option("--out", spectrum_out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sweep->parsed())
            return cmd_sweep(alg_names, n_values, states, shots, noise_spec, seed, out_path,
                             format, threads);
        if (simulate->parsed())
            return cmd_simulate(circuit_path, sim_noise, sim_shots, sim_seed, sim_out, sim_threads);
        if (depth->parsed())
            return cmd_depth(depth_circuit, builder, depth_n, depth_k, depth_theta, table, table_n,
                             depth_noise, depth_out);
        if (spectrum->parsed()) return cmd_spectrum(traces_path, inline_traces, spectrum_out);
    } catch (const entspec::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}
