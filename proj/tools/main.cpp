#include <charconv>
#include <map>
#include <optional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_commands.hpp"

namespace {

using impnet::cli::RunConfig;

std::optional<std::size_t> parse_size(std::string_view s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// "6x4" -> {6, 4}
std::string parse_grid(const std::string& text, RunConfig& cfg) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) return "grid must look like MxN";
    const auto m = parse_size(std::string_view(text).substr(0, x));
    const auto n = parse_size(std::string_view(text).substr(x + 1));
    if (!m || !n) return "grid must look like MxN";
    cfg.grid = impnet::cli::GridSpec{*m, *n};
    return {};
}

// "re,im" or "re"
std::string parse_complex(const std::string& text, RunConfig& cfg) {
    const auto comma = text.find(',');
    const auto re = parse_double(std::string_view(text).substr(0, comma));
    const auto im = comma == std::string::npos ? std::optional<double>(0.0)
                                               : parse_double(std::string_view(text).substr(comma + 1));
    if (!re || !im) return "impedance must look like re,im";
    cfg.ring_impedance = {*re, *im};
    return {};
}

void add_netlist(CLI::App& sub, RunConfig& cfg) {
    sub.add_option("netlist", cfg.netlist_path, "Netlist file");
}

void add_frequency(CLI::App& sub, RunConfig& cfg) {
    auto* omega = sub.add_option_function<double>("--omega,-w", [&cfg](double v) { cfg.omega = v; },
                                                  "Angular frequency in rad/s");
    auto* freq = sub.add_option_function<double>("--freq,-f", [&cfg](double v) { cfg.freq_hz = v; },
                                                 "Frequency in Hz (converted as 2*pi*f)");
    omega->excludes(freq);
}

void add_pair(CLI::App& sub, RunConfig& cfg) {
    sub.add_option_function<std::vector<std::size_t>>(
           "--pair", [&cfg](const std::vector<std::size_t>& v) { cfg.pair = std::pair{v[0], v[1]}; },
           "Node pair p q (1-based)")
        ->expected(2);
}

void add_format(CLI::App& sub, RunConfig& cfg) {
    const std::map<std::string, impnet::cli::OutputFormat> formats{{"human", impnet::cli::OutputFormat::Human},
                                                                  {"json", impnet::cli::OutputFormat::Json},
                                                                  {"csv", impnet::cli::OutputFormat::Csv}};
    sub.add_option("--format", cfg.format, "Output format: human, json or csv")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
}

void add_tolerances(CLI::App& sub, RunConfig& cfg) {
    sub.add_option("--zero-rel-tol", cfg.tolerances.zero_rel_tol, "Relative threshold below which sigma counts as zero")
        ->check(CLI::PositiveNumber);
    sub.add_option("--degeneracy-rel-tol", cfg.tolerances.degeneracy_rel_tol,
                   "Relative gap below which sigma values form one cluster")
        ->check(CLI::PositiveNumber);
}

void add_range(CLI::App& sub, RunConfig& cfg) {
    sub.add_option("--from", cfg.sweep_from, "Lowest angular frequency")->required();
    sub.add_option("--to", cfg.sweep_to, "Highest angular frequency")->required();
    sub.add_option("--points", cfg.sweep_points, "Number of log-spaced sweep points");
}

void add_generators(CLI::App& sub, RunConfig& cfg) {
    sub.add_option_function<std::string>(
        "--grid", [&cfg](const std::string& s) {
            if (auto msg = parse_grid(s, cfg); !msg.empty()) throw CLI::ValidationError("--grid", msg);
        },
        "LC grid MxN (capacitors along M, inductors along N)");
    sub.add_option("--inductance", cfg.inductance, "Grid inductance in henries");
    sub.add_option("--capacitance", cfg.capacitance, "Grid capacitance in farads");
    sub.add_flag("--toroidal", cfg.toroidal, "Wrap the grid in both directions");
    sub.add_option_function<std::size_t>("--ring", [&cfg](std::size_t n) { cfg.ring = n; },
                                         "Ring of N equal impedances");
    sub.add_option_function<std::string>(
        "--z", [&cfg](const std::string& s) {
            if (auto msg = parse_complex(s, cfg); !msg.empty()) throw CLI::ValidationError("--z", msg);
        },
        "Ring element impedance re,im");
    sub.add_option_function<std::size_t>("--random", [&cfg](std::size_t n) { cfg.random_nodes = n; },
                                         "Random connected RLC network with N nodes");
    sub.add_option("--seed", cfg.seed, "Seed for --random");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace impnet::cli;
    RunConfig cfg;
    CLI::App app{"Two-point impedance and resonance analysis of R/L/C networks"};
    app.require_subcommand(1);

    auto* imp = app.add_subcommand("impedance", "Impedance between two nodes at one frequency");
    add_netlist(*imp, cfg);
    add_frequency(*imp, cfg);
    add_pair(*imp, cfg);
    add_tolerances(*imp, cfg);
    add_generators(*imp, cfg);
    imp->callback([&] { cfg.command = Command::Impedance; });

    auto* sweep = app.add_subcommand("sweep", "Impedance and smallest nontrivial sigma over a frequency range");
    add_netlist(*sweep, cfg);
    add_pair(*sweep, cfg);
    add_range(*sweep, cfg);
    add_tolerances(*sweep, cfg);
    add_generators(*sweep, cfg);
    sweep->callback([&] { cfg.command = Command::Sweep; });

    auto* res = app.add_subcommand("resonances", "Locate resonance frequencies in a range");
    add_netlist(*res, cfg);
    add_range(*res, cfg);
    res->add_flag("!--no-refine", cfg.refine, "Report grid minima without golden-section refinement");
    add_generators(*res, cfg);
    res->callback([&] { cfg.command = Command::Resonances; });

    auto* gen = app.add_subcommand("generate", "Print the netlist of a generated network");
    add_generators(*gen, cfg);
    gen->callback([&] { cfg.command = Command::Generate; });

    auto* check = app.add_subcommand("check", "Compare spectral impedances against a direct solve");
    add_netlist(*check, cfg);
    add_frequency(*check, cfg);
    add_pair(*check, cfg);
    add_tolerances(*check, cfg);
    add_generators(*check, cfg);
    check->callback([&] { cfg.command = Command::Check; });

    for (auto* sub : {imp, sweep, res, check}) add_format(*sub, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_code::ok : exit_code::input_error;
    }
    // A sweep is a table; without an explicit choice it comes out as csv.
    if (sweep->parsed() && sweep->get_option("--format")->count() == 0) cfg.format = OutputFormat::Csv;

    try {
        return run(cfg, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::input_error;
    }
}
