// Command-line front end: run netlists, reproduce the named bench
// experiments with noise knobs, emit CSV/JSON.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "loqsim/experiments.hpp"
#include "loqsim/netlist.hpp"
#include "loqsim/serialize.hpp"

namespace {

using loqsim::experiments::AngleGrid;
using loqsim::experiments::NoiseConfig;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDiagnostic = 2;
constexpr int kExitZeroHerald = 3;

struct Options {
    NoiseConfig noise;
    std::string grid = "0:180:37";
    std::string format = "json";
    std::string out_path;
    std::string input_pol = "L";
    std::uint64_t seed = 12345;
    int samples = 100000;
    bool analytic = false;
};

bool parse_grid(const std::string& text, AngleGrid& grid) {
    double a = 0, b = 0;
    int n = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3) return false;
    if (n < 2) return false;
    grid = AngleGrid{a, b, n};
    return true;
}

int emit(const Options& opt, const json& j, const std::string& csv) {
    std::string text = opt.format == "csv" ? csv : j.dump(2) + "\n";
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(opt.out_path, std::ios::binary);
        if (!f) {
            std::cerr << "cannot write " << opt.out_path << "\n";
            return kExitUsage;
        }
        f << text;
    }
    return kExitOk;
}

void add_noise_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--lambda23", opt.noise.lambda23, "mode overlap at the 2/3 junction")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--lambda45", opt.noise.lambda45, "mode overlap at the 4/5 junction")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--pair-prob", opt.noise.pair_prob, "SPDC pair probability per pulse")
        ->check(CLI::Range(0.0, 0.1));
    cmd->add_option("--mu", opt.noise.mu, "weak coherent mean photon number (0 = single photon)")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--order", opt.noise.spdc_order, "SPDC emission order")
        ->check(CLI::Range(1, 2));
}

void add_output_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", opt.out_path, "output file (default stdout)");
}

int run_netlist_command(const std::string& path, const Options& opt, bool check_only) {
    std::string io_error;
    auto res = loqsim::netlist::compile_file(path, &io_error);
    if (!io_error.empty()) {
        std::cerr << io_error << "\n";
        return kExitUsage;
    }
    if (!res.ok()) {
        for (const auto& d : res.diagnostics) std::cerr << d.render(path) << "\n";
        return kExitDiagnostic;
    }
    if (check_only) {
        std::cout << path << ": ok (pipeline " << res.circuit->pipeline_size() << ", detectors "
                  << res.circuit->detectors.size() << ")\n";
        return kExitOk;
    }

    auto results = loqsim::netlist::run_circuit(*res.circuit);
    json j;
    j["experiment"] = "run:" + path;
    json rows = json::array();
    for (const auto& r : results) {
        for (const auto& p : r.patterns) {
            json e;
            if (r.angle_deg) e["angle_deg"] = *r.angle_deg;
            e["pattern"] = p.pattern;
            e["probability"] = p.probability;
            e["fraction"] = p.fraction;
            rows.push_back(e);
        }
    }
    j["curves"] = json{{"patterns", rows}};
    return emit(opt, j, loqsim::detection::to_csv(results));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polarization-encoded linear-optics circuit simulator"};
    app.require_subcommand(1);
    Options opt;

    std::string netlist_path;
    auto* run = app.add_subcommand("run", "run a netlist file");
    run->add_option("file", netlist_path, "netlist (.net) file")->required();
    add_output_flags(run, opt);

    auto* check = app.add_subcommand("check", "validate a netlist file");
    check->add_option("file", netlist_path, "netlist (.net) file")->required();

    auto* cnot = app.add_subcommand("cnot-table", "heralded CNOT logic table");
    add_noise_flags(cnot, opt);
    add_output_flags(cnot, opt);

    auto* fringe = app.add_subcommand("entangle-fringe", "entangling run: patterns and P2 fringe");
    add_noise_flags(fringe, opt);
    add_output_flags(fringe, opt);
    fringe->add_option("--grid", opt.grid, "scan grid start:stop:steps");

    auto* teleport = app.add_subcommand("teleport", "teleportation with full Bell analysis");
    add_noise_flags(teleport, opt);
    add_output_flags(teleport, opt);
    teleport->add_option("--grid", opt.grid, "scan grid start:stop:steps");
    teleport->add_option("--input", opt.input_pol, "input polarization")
        ->check(CLI::IsMember({"H", "V", "P", "M", "L", "R"}));

    auto* baseline = app.add_subcommand("classical-baseline", "measure-and-resend bound");
    add_output_flags(baseline, opt);
    baseline->add_flag("--analytic", opt.analytic, "report the analytic value 2/3");
    baseline->add_option("--samples", opt.samples, "Monte Carlo sample count")
        ->check(CLI::PositiveNumber);
    baseline->add_option("--seed", opt.seed, "Monte Carlo seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    AngleGrid grid;
    if (!parse_grid(opt.grid, grid)) {
        std::cerr << "bad --grid, expected start:stop:steps with steps >= 2\n";
        return kExitUsage;
    }

    try {
        if (run->parsed()) return run_netlist_command(netlist_path, opt, false);
        if (check->parsed()) return run_netlist_command(netlist_path, opt, true);
        if (cnot->parsed()) {
            auto r = loqsim::experiments::run_cnot_truth_table(opt.noise);
            return emit(opt, loqsim::serialize::to_json(r), loqsim::serialize::to_csv(r));
        }
        if (fringe->parsed()) {
            auto r = loqsim::experiments::run_entangling_fringe(opt.noise, grid);
            return emit(opt, loqsim::serialize::to_json(r), loqsim::serialize::to_csv(r));
        }
        if (teleport->parsed()) {
            auto r = loqsim::experiments::run_teleportation(
                loqsim::QubitState::named(opt.input_pol[0]), opt.noise, grid);
            r = loqsim::experiments::apply_feedforward(r);
            return emit(opt, loqsim::serialize::to_json(r), loqsim::serialize::to_csv(r));
        }
        if (baseline->parsed()) {
            const double value =
                opt.analytic ? loqsim::experiments::classical_baseline_analytic()
                             : loqsim::experiments::classical_baseline_monte_carlo(opt.samples,
                                                                                   opt.seed);
            const json j = loqsim::serialize::baseline_json(opt.analytic ? "analytic" : "mc",
                                                            value, opt.samples, opt.seed);
            std::string csv = "mode,value\n";
            csv += (opt.analytic ? std::string("analytic,") : std::string("mc,")) +
                   std::to_string(value) + "\n";
            return emit(opt, j, csv);
        }
    } catch (const loqsim::experiments::ZeroHeraldProbability& e) {
        std::cerr << "zero-probability herald: " << e.what() << "\n";
        return kExitZeroHerald;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
