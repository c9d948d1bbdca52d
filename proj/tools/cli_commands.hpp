#pragma once

// Command implementations behind the impnet executable. Each command writes
// its report to `out`, diagnostics to `err`, and returns the process exit code.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include <impnet/impnet.hpp>

namespace impnet::cli {

enum class Command { Impedance, Sweep, Resonances, Generate, Check };
enum class OutputFormat { Human, Json, Csv };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int input_error = 1;
inline constexpr int resonant = 2;
inline constexpr int check_failed = 3;
}  // namespace exit_code

struct GridSpec {
    std::size_t m = 0;
    std::size_t n = 0;
};

struct RunConfig {
    Command command = Command::Impedance;
    std::string netlist_path;
    std::optional<double> omega;
    std::optional<double> freq_hz;
    std::optional<std::pair<std::size_t, std::size_t>> pair;  // 1-based, as typed
    double sweep_from = 0.0;
    double sweep_to = 0.0;
    std::size_t sweep_points = 200;
    bool refine = true;
    OutputFormat format = OutputFormat::Human;
    ImpedanceOptions tolerances;

    // Generators, used by `generate` and as a netlist substitute elsewhere.
    std::optional<GridSpec> grid;
    double inductance = 1.0;
    double capacitance = 1.0;
    bool toroidal = false;
    std::optional<std::size_t> ring;
    Complex ring_impedance{1.0, 0.0};
    std::optional<std::size_t> random_nodes;
    std::uint64_t seed = 1;
};

inline constexpr double check_tolerance = 1e-8;

/// Shortest representation that parses back to the same double; '.' decimal
/// point regardless of locale.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_human(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string format_complex_human(Complex z) {
    const double im = z.imag();
    return format_human(z.real()) + (std::signbit(im) ? " - " : " + ") + format_human(std::abs(im)) + "j";
}

/// Angular frequency from --omega or --freq; exactly one must be present.
inline AngularFrequency resolve_frequency(const RunConfig& cfg) {
    if (cfg.omega && cfg.freq_hz) throw ValidationError("give either --omega or --freq, not both");
    if (cfg.omega) return AngularFrequency(*cfg.omega);
    if (cfg.freq_hz) return AngularFrequency::from_hertz(*cfg.freq_hz);
    throw ValidationError("a frequency is required (--omega or --freq)");
}

inline bool has_generator(const RunConfig& cfg) { return cfg.grid || cfg.ring || cfg.random_nodes; }

inline Network generate_network(const RunConfig& cfg) {
    const int sources = int(cfg.grid.has_value()) + int(cfg.ring.has_value()) + int(cfg.random_nodes.has_value());
    if (sources != 1) throw ValidationError("choose exactly one of --grid, --ring, --random");
    if (cfg.grid)
        return grid_network(cfg.grid->m, cfg.grid->n, cfg.inductance, cfg.capacitance,
                            cfg.toroidal ? Boundary::Toroidal : Boundary::Free);
    if (cfg.ring) {
        if (*cfg.ring < 3) throw ValidationError("ring needs at least 3 nodes");
        return ring_network(*cfg.ring, std::vector<Element>(*cfg.ring, FixedImpedance{cfg.ring_impedance}));
    }
    std::mt19937_64 rng(cfg.seed);
    RandomNetworkOptions opt;
    opt.nodes = *cfg.random_nodes;
    opt.extra_branches = opt.nodes;
    return random_network(opt, rng);
}

inline Network load_network(const RunConfig& cfg) {
    if (!cfg.netlist_path.empty()) {
        if (has_generator(cfg)) throw ValidationError("give either a netlist file or a generator, not both");
        std::ifstream in(cfg.netlist_path, std::ios::binary);
        if (!in) throw ValidationError("cannot open netlist '" + cfg.netlist_path + "'");
        return parse_netlist(in);
    }
    if (has_generator(cfg)) return generate_network(cfg);
    throw ValidationError("no network given (netlist path or --grid/--ring/--random)");
}

/// Converts the 1-based pair to internal indices; defaults to nodes 1 and 2.
inline std::pair<std::size_t, std::size_t> resolve_pair(const RunConfig& cfg, const Network& net) {
    const auto [p, q] = cfg.pair.value_or(std::pair<std::size_t, std::size_t>{1, 2});
    const std::size_t n = net.node_count();
    if (p < 1 || q < 1 || p > n || q > n)
        throw InvalidNodeError("node pair (" + std::to_string(p) + ", " + std::to_string(q) + ") outside 1.." +
                               std::to_string(n));
    if (p == q) throw InvalidNodeError("node pair must name two distinct nodes");
    return {p - 1, q - 1};
}

namespace detail {

inline nlohmann::json impedance_json(const ImpedanceResult& r) {
    nlohmann::json j;
    j["status"] = to_string(r.status);
    if (r.finite()) {
        j["z_re"] = r.value.real();
        j["z_im"] = r.value.imag();
    } else {
        j["z_re"] = nullptr;
        j["z_im"] = nullptr;
    }
    j["omega"] = r.omega.value();
    j["resonant_mode_count"] = r.resonant_mode_count;
    if (r.divergent_coefficient) j["divergent_coefficient"] = *r.divergent_coefficient;
    return j;
}

}  // namespace detail

inline int cmd_impedance(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Network net = load_network(cfg);
    const AngularFrequency omega = resolve_frequency(cfg);
    const auto [p, q] = resolve_pair(cfg, net);
    const ImpedanceResult r = two_point_impedance(net, omega, p, q, cfg.tolerances);

    switch (cfg.format) {
        case OutputFormat::Json:
            out << detail::impedance_json(r).dump() << '\n';
            break;
        case OutputFormat::Csv:
            out << "p,q,omega,status,z_re,z_im,resonant_mode_count\n"
                << p + 1 << ',' << q + 1 << ',' << format_number(omega.value()) << ',' << to_string(r.status) << ','
                << (r.finite() ? format_number(r.value.real()) : "inf") << ','
                << (r.finite() ? format_number(r.value.imag()) : "inf") << ',' << r.resonant_mode_count << '\n';
            break;
        case OutputFormat::Human:
            if (r.finite()) {
                out << format_complex_human(r.value) << '\n'
                    << "status = finite\n"
                    << "|Z| = " << format_human(std::abs(r.value)) << '\n'
                    << "phase = " << format_human(std::arg(r.value)) << " rad\n";
            } else {
                out << "RESONANT\n"
                    << "nontrivial zero modes = " << r.resonant_mode_count << '\n'
                    << "divergent coefficient = " << format_human(r.divergent_coefficient.value_or(0.0)) << '\n';
            }
            break;
    }
    if (r.near_resonance) err << "warning: close to resonance, result is ill-conditioned\n";
    if (!r.finite() && r.divergent_coefficient.value_or(0.0) <= 1e-12)
        err << "warning: resonant modes do not couple to this pair (coefficient ~ 0)\n";
    return r.finite() ? exit_code::ok : exit_code::resonant;
}

inline void require_sweep_range(const RunConfig& cfg) {
    if (!(cfg.sweep_from > 0.0) || !(cfg.sweep_to > cfg.sweep_from) || !std::isfinite(cfg.sweep_to))
        throw ValidationError("sweep range needs 0 < --from < --to");
    if (cfg.sweep_points < 3) throw ValidationError("sweep needs --points >= 3");
}

/// One row per log-spaced angular frequency. Csv is the default rendering;
/// json gives an array of row objects.
inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    require_sweep_range(cfg);
    const Network net = load_network(cfg);
    const auto [p, q] = resolve_pair(cfg, net);

    nlohmann::json rows = nlohmann::json::array();
    if (cfg.format != OutputFormat::Json) out << "omega,z_re,z_im,min_sigma,status\n";
    for (double w : log_sweep_grid(cfg.sweep_from, cfg.sweep_to, cfg.sweep_points)) {
        const AngularFrequency omega(w);
        const NetworkSpectrum s = analyze_network(net, omega, cfg.tolerances);
        const ImpedanceResult r = impedance_between(s, p, q);
        const double min_sigma = smallest_nontrivial_sigma(net, omega, cfg.tolerances.max_sweeps);
        const char* status = r.finite() ? "ok" : "resonant";
        if (cfg.format == OutputFormat::Json) {
            nlohmann::json row = detail::impedance_json(r);
            row["min_sigma"] = min_sigma;
            rows.push_back(std::move(row));
        } else {
            out << format_number(w) << ',' << (r.finite() ? format_number(r.value.real()) : "inf") << ','
                << (r.finite() ? format_number(r.value.imag()) : "inf") << ',' << format_number(min_sigma) << ','
                << status << '\n';
        }
    }
    if (cfg.format == OutputFormat::Json) out << rows.dump() << '\n';
    return exit_code::ok;
}

inline int cmd_resonances(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    require_sweep_range(cfg);
    const Network net = load_network(cfg);
    const ResonanceReport found =
        sweep_resonances(net, AngularFrequency(cfg.sweep_from), AngularFrequency(cfg.sweep_to), cfg.sweep_points,
                         cfg.refine);
    std::optional<ResonanceReport> analytic;
    if (cfg.grid && cfg.netlist_path.empty())
        analytic = cfg.toroidal ? toroidal_grid_resonances_analytic(cfg.grid->m, cfg.grid->n, cfg.inductance,
                                                                    cfg.capacitance)
                                : grid_resonances_analytic(cfg.grid->m, cfg.grid->n, cfg.inductance, cfg.capacitance);

    switch (cfg.format) {
        case OutputFormat::Json: {
            nlohmann::json j;
            j["method"] = to_string(found.method);
            j["omegas"] = found.omegas;
            j["residuals"] = found.residuals;
            j["distinct_count"] = found.distinct_count;
            j["raw_count"] = found.raw_count;
            if (analytic) {
                j["analytic_omegas"] = analytic->omegas;
                j["analytic_raw_count"] = analytic->raw_count;
            }
            out << j.dump() << '\n';
            break;
        }
        case OutputFormat::Csv:
            out << "omega,residual\n";
            for (std::size_t i = 0; i < found.omegas.size(); ++i)
                out << format_number(found.omegas[i]) << ',' << format_number(found.residuals[i]) << '\n';
            break;
        case OutputFormat::Human:
            out << found.distinct_count << " resonance(s) in [" << format_human(cfg.sweep_from) << ", "
                << format_human(cfg.sweep_to) << "]\n";
            for (std::size_t i = 0; i < found.omegas.size(); ++i)
                out << "  omega = " << format_human(found.omegas[i]) << "  (min sigma " << format_human(found.residuals[i])
                    << ")\n";
            if (analytic) {
                out << "closed form: " << analytic->distinct_count << " distinct of " << analytic->raw_count << '\n';
                for (double w : analytic->omegas) out << "  omega = " << format_human(w) << '\n';
            }
            break;
    }
    return exit_code::ok;
}

inline int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    out << serialize_netlist(generate_network(cfg));
    return exit_code::ok;
}

struct PairComparison {
    std::size_t p, q;
    std::optional<Complex> spectral;  // empty when resonant
    std::optional<Complex> direct;    // empty when singular
    double deviation;
};

/// Relative deviation with a floor of 1/admittance_scale, so pairs whose
/// impedance is tiny compared with the network's natural scale are measured
/// against that scale. Both sides resonant counts as agreement.
inline double pair_deviation(const std::optional<Complex>& a, const std::optional<Complex>& b, double z_scale) {
    if (!a && !b) return 0.0;
    if (!a || !b) return std::numeric_limits<double>::infinity();
    const double denom = std::max({std::abs(*a), std::abs(*b), z_scale});
    return std::abs(*a - *b) / denom;
}

inline int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const Network net = load_network(cfg);
    const AngularFrequency omega = resolve_frequency(cfg);
    const NetworkSpectrum s = analyze_network(net, omega, cfg.tolerances);
    const double z_scale = 1.0 / admittance_scale(net, omega);

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (cfg.pair) {
        pairs.push_back(resolve_pair(cfg, net));
    } else {
        for (std::size_t p = 0; p < net.node_count(); ++p)
            for (std::size_t q = p + 1; q < net.node_count(); ++q) pairs.emplace_back(p, q);
    }

    std::vector<PairComparison> rows;
    double worst = 0.0;
    for (const auto& [p, q] : pairs) {
        PairComparison c{p, q, {}, {}, 0.0};
        const ImpedanceResult r = impedance_between(s, p, q);
        if (r.finite()) c.spectral = r.value;
        const DirectResult direct = solve_direct(net, omega, p, q);
        if (const auto* d = std::get_if<DirectSolution>(&direct)) c.direct = d->impedance;
        c.deviation = pair_deviation(c.spectral, c.direct, z_scale);
        worst = std::max(worst, c.deviation);
        rows.push_back(c);
    }
    const bool pass = worst <= check_tolerance;

    auto text = [](const std::optional<Complex>& z) { return z ? format_complex_human(*z) : std::string("resonant"); };
    switch (cfg.format) {
        case OutputFormat::Json: {
            nlohmann::json j;
            j["omega"] = omega.value();
            j["max_deviation"] = worst;
            j["pass"] = pass;
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& c : rows) {
                nlohmann::json row{{"p", c.p + 1}, {"q", c.q + 1}, {"deviation", c.deviation}};
                row["spectral"] = c.spectral ? nlohmann::json::array({c.spectral->real(), c.spectral->imag()})
                                             : nlohmann::json(nullptr);
                row["direct"] =
                    c.direct ? nlohmann::json::array({c.direct->real(), c.direct->imag()}) : nlohmann::json(nullptr);
                arr.push_back(std::move(row));
            }
            j["pairs"] = std::move(arr);
            out << j.dump() << '\n';
            break;
        }
        case OutputFormat::Csv:
            out << "p,q,spectral_re,spectral_im,direct_re,direct_im,deviation\n";
            for (const auto& c : rows) {
                out << c.p + 1 << ',' << c.q + 1 << ',';
                out << (c.spectral ? format_number(c.spectral->real()) + ',' + format_number(c.spectral->imag())
                                   : std::string("inf,inf"))
                    << ',';
                out << (c.direct ? format_number(c.direct->real()) + ',' + format_number(c.direct->imag())
                                 : std::string("inf,inf"))
                    << ',' << format_number(c.deviation) << '\n';
            }
            break;
        case OutputFormat::Human:
            for (const auto& c : rows)
                out << c.p + 1 << '-' << c.q + 1 << "  spectral " << text(c.spectral) << "  direct " << text(c.direct)
                    << "  dev " << format_human(c.deviation) << '\n';
            out << "max deviation " << format_human(worst) << (pass ? "  OK" : "  FAIL") << '\n';
            break;
    }
    return pass ? exit_code::ok : exit_code::check_failed;
}

/// Dispatches and maps library errors to exit code 1.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        switch (cfg.command) {
            case Command::Impedance: return cmd_impedance(cfg, out, err);
            case Command::Sweep: return cmd_sweep(cfg, out, err);
            case Command::Resonances: return cmd_resonances(cfg, out, err);
            case Command::Generate: return cmd_generate(cfg, out, err);
            case Command::Check: return cmd_check(cfg, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::input_error;
    }
    return exit_code::input_error;
}

}  // namespace impnet::cli
