#pragma once

// Network data model, netlist text format and the canonical network
// families (rings, free and toroidal LC grids).
//
// Node indices are 0-based everywhere in the library. The netlist format and
// the command line use 1-based indices; conversion happens in parse_netlist /
// serialize_netlist and in the CLI.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace impnet {

struct Resistor {
    double ohms;
    bool operator==(const Resistor&) const = default;
};

struct Inductor {
    double henries;
    bool operator==(const Inductor&) const = default;
};

struct Capacitor {
    double farads;
    bool operator==(const Capacitor&) const = default;
};

/// Frequency-independent complex impedance z = r + jx.
struct FixedImpedance {
    Complex ohms;
    bool operator==(const FixedImpedance&) const = default;
};

using Element = std::variant<Resistor, Inductor, Capacitor, FixedImpedance>;

inline bool is_reactive(const Element& e) {
    return std::holds_alternative<Inductor>(e) || std::holds_alternative<Capacitor>(e);
}

/// Netlist letter for an element kind.
inline char element_letter(const Element& e) {
    constexpr char letters[] = {'R', 'L', 'C', 'Z'};
    return letters[e.index()];
}

/// Throws ValidationError unless R/L/C values are positive and finite and a
/// fixed impedance is finite and nonzero.
inline void validate_element(const Element& e) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    std::visit(
        [&](const auto& el) {
            using T = std::decay_t<decltype(el)>;
            if constexpr (std::is_same_v<T, Resistor>) {
                if (!positive(el.ohms)) throw ValidationError("resistance must be positive and finite");
            } else if constexpr (std::is_same_v<T, Inductor>) {
                if (!positive(el.henries)) throw ValidationError("inductance must be positive and finite");
            } else if constexpr (std::is_same_v<T, Capacitor>) {
                if (!positive(el.farads)) throw ValidationError("capacitance must be positive and finite");
            } else {
                if (!std::isfinite(el.ohms.real()) || !std::isfinite(el.ohms.imag()))
                    throw ValidationError("impedance must be finite");
                if (el.ohms == Complex{}) throw ValidationError("impedance must be nonzero");
            }
        },
        e);
}

struct Branch {
    std::size_t node_a;
    std::size_t node_b;
    Element element;

    bool operator==(const Branch&) const = default;
};

/// A validated, connected network. Immutable after construction.
class Network {
public:
    Network(std::size_t node_count, std::vector<Branch> branches)
        : node_count_(node_count), branches_(std::move(branches)) {
        validate();
    }

    std::size_t node_count() const noexcept { return node_count_; }
    const std::vector<Branch>& branches() const noexcept { return branches_; }

    bool operator==(const Network&) const = default;

private:
    void validate() const {
        if (node_count_ == 0) throw ValidationError("network needs at least one node");
        if (branches_.empty()) throw ValidationError("network needs at least one branch");
        for (std::size_t k = 0; k < branches_.size(); ++k) {
            const Branch& b = branches_[k];
            const std::string where = "branch " + std::to_string(k + 1) + ": ";
            if (b.node_a >= node_count_ || b.node_b >= node_count_)
                throw ValidationError(where + "node index out of range");
            if (b.node_a == b.node_b) throw ValidationError(where + "self-loop on node " + std::to_string(b.node_a + 1));
            try {
                validate_element(b.element);
            } catch (const ValidationError& e) {
                throw ValidationError(where + e.what());
            }
        }
        check_connected();
    }

    void check_connected() const {
        std::vector<std::size_t> parent(node_count_);
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const Branch& b : branches_) parent[find(b.node_a)] = find(b.node_b);

        std::vector<std::vector<std::size_t>> components;
        std::vector<std::size_t> slot(node_count_, node_count_);
        for (std::size_t v = 0; v < node_count_; ++v) {
            const std::size_t r = find(v);
            if (slot[r] == node_count_) {
                slot[r] = components.size();
                components.emplace_back();
            }
            components[slot[r]].push_back(v);
        }
        if (components.size() == 1) return;

        std::string msg = "network is disconnected (" + std::to_string(components.size()) + " components):";
        for (const auto& comp : components) {
            msg += " {";
            for (std::size_t i = 0; i < comp.size(); ++i) msg += (i ? "," : "") + std::to_string(comp[i] + 1);
            msg += "}";
        }
        throw DisconnectedError(msg);
    }

    std::size_t node_count_;
    std::vector<Branch> branches_;
};

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

inline std::size_t parse_count(std::string_view tok, std::size_t line, const char* what) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw SyntaxError(line, std::string("expected integer ") + what + ", got '" + std::string(tok) + "'");
    return value;
}

inline double parse_real(std::string_view tok, std::size_t line) {
    std::string_view body = tok;
    if (!body.empty() && body.front() == '+') body.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec == std::errc::result_out_of_range)
        throw ValidationError("line " + std::to_string(line) + ": value out of range '" + std::string(tok) + "'");
    if (ec != std::errc{} || ptr != body.data() + body.size() || body.empty())
        throw SyntaxError(line, "expected number, got '" + std::string(tok) + "'");
    return value;
}

inline std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Parses the netlist text format:
///
///     # comment
///     NET <node_count>
///     R <a> <b> <ohms>
///     L <a> <b> <henries>
///     C <a> <b> <farads>
///     Z <a> <b> <re_ohms> <im_ohms>
///
/// Node numbers in the text are 1-based.
inline Network parse_netlist(std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;
    std::size_t node_count = 0;
    bool have_header = false;
    std::vector<Branch> branches;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const auto tokens = detail::split_tokens(line);
        if (tokens.empty() || tokens.front().front() == '#') continue;

        if (!have_header) {
            if (tokens[0] != "NET") throw SyntaxError(line_no, "expected 'NET <node_count>' header");
            if (tokens.size() != 2) throw SyntaxError(line_no, "header takes exactly one argument");
            node_count = detail::parse_count(tokens[1], line_no, "node count");
            if (node_count == 0) throw ValidationError("line " + std::to_string(line_no) + ": node count must be positive");
            have_header = true;
            continue;
        }

        const std::string_view kind = tokens[0];
        const std::size_t expected = kind == "Z" ? 5 : 4;
        if (kind != "R" && kind != "L" && kind != "C" && kind != "Z")
            throw SyntaxError(line_no, "unknown element '" + std::string(kind) + "'");
        if (tokens.size() != expected)
            throw SyntaxError(line_no, "element " + std::string(kind) + " takes " + std::to_string(expected - 1) +
                                           " arguments, got " + std::to_string(tokens.size() - 1));

        const std::size_t a = detail::parse_count(tokens[1], line_no, "node");
        const std::size_t b = detail::parse_count(tokens[2], line_no, "node");
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (a < 1 || a > node_count || b < 1 || b > node_count)
            throw ValidationError(where + "node index out of range [1, " + std::to_string(node_count) + "]");
        if (a == b) throw ValidationError(where + "self-loop on node " + std::to_string(a));

        Element element;
        const double v = detail::parse_real(tokens[3], line_no);
        switch (kind[0]) {
            case 'R': element = Resistor{v}; break;
            case 'L': element = Inductor{v}; break;
            case 'C': element = Capacitor{v}; break;
            default: element = FixedImpedance{Complex(v, detail::parse_real(tokens[4], line_no))}; break;
        }
        try {
            validate_element(element);
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
        branches.push_back(Branch{a - 1, b - 1, element});
    }

    if (!have_header) throw SyntaxError(line_no, "missing 'NET <node_count>' header");
    return Network(node_count, std::move(branches));
}

inline Network parse_netlist(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_netlist(in);
}

/// Emits the netlist text for a network; values carry 17 significant digits so
/// that parse_netlist reproduces them bit for bit.
inline std::string serialize_netlist(const Network& net) {
    std::string out = "NET " + std::to_string(net.node_count()) + "\n";
    for (const Branch& b : net.branches()) {
        out += element_letter(b.element);
        out += ' ' + std::to_string(b.node_a + 1) + ' ' + std::to_string(b.node_b + 1) + ' ';
        std::visit(
            [&](const auto& el) {
                using T = std::decay_t<decltype(el)>;
                if constexpr (std::is_same_v<T, Resistor>) out += detail::format_real(el.ohms);
                else if constexpr (std::is_same_v<T, Inductor>) out += detail::format_real(el.henries);
                else if constexpr (std::is_same_v<T, Capacitor>) out += detail::format_real(el.farads);
                else out += detail::format_real(el.ohms.real()) + ' ' + detail::format_real(el.ohms.imag());
            },
            b.element);
        out += '\n';
    }
    return out;
}

/// Ring of n elements; element k joins node k and node k+1 (mod n).
inline Network ring_network(std::size_t n, const std::vector<Element>& elements) {
    if (n < 3) throw ValidationError("ring needs at least 3 nodes");
    if (elements.size() != n)
        throw ValidationError("ring of " + std::to_string(n) + " nodes needs " + std::to_string(n) + " elements, got " +
                              std::to_string(elements.size()));
    std::vector<Branch> branches;
    branches.reserve(n);
    for (std::size_t k = 0; k < n; ++k) branches.push_back(Branch{k, (k + 1) % n, elements[k]});
    return Network(n, std::move(branches));
}

enum class Boundary { Free, Toroidal };

/// Node of an m x n grid at (x, y), x in [0, m), y in [0, n).
inline std::size_t grid_node(std::size_t x, std::size_t y, std::size_t n) { return x * n + y; }

/// m x n grid with capacitors along x (the m direction) and inductors along y
/// (the n direction). Toroidal boundaries add the wrap-around edges; for a
/// side of length 2 the wrap edge is a parallel branch.
inline Network grid_network(std::size_t m, std::size_t n, double inductance, double capacitance,
                            Boundary boundary = Boundary::Free) {
    if (m < 2 || n < 2) throw ValidationError("grid needs m >= 2 and n >= 2");
    validate_element(Inductor{inductance});
    validate_element(Capacitor{capacitance});

    const bool torus = boundary == Boundary::Toroidal;
    std::vector<Branch> branches;
    for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            const std::size_t here = grid_node(x, y, n);
            if (x + 1 < m) branches.push_back({here, grid_node(x + 1, y, n), Capacitor{capacitance}});
            else if (torus) branches.push_back({here, grid_node(0, y, n), Capacitor{capacitance}});
            if (y + 1 < n) branches.push_back({here, grid_node(x, y + 1, n), Inductor{inductance}});
            else if (torus) branches.push_back({here, grid_node(x, 0, n), Inductor{inductance}});
        }
    }
    return Network(m * n, std::move(branches));
}

struct RandomNetworkOptions {
    std::size_t nodes = 6;
    std::size_t extra_branches = 4;
    bool resistors_only = false;
    bool reactances_only = false;
    double min_value = 0.1;
    double max_value = 10.0;
};

/// Random connected network: a random spanning tree plus extra random
/// branches. Element values are log-uniform in [min_value, max_value].
template <typename Rng>
Network random_network(const RandomNetworkOptions& opt, Rng& rng) {
    if (opt.nodes < 2) throw ValidationError("random network needs at least 2 nodes");
    std::uniform_real_distribution<double> log_value(std::log(opt.min_value), std::log(opt.max_value));
    std::uniform_real_distribution<double> signed_unit(-1.0, 1.0);
    auto value = [&] { return std::exp(log_value(rng)); };
    auto element = [&]() -> Element {
        if (opt.resistors_only) return Resistor{value()};
        const int kinds = opt.reactances_only ? 2 : 4;
        switch (std::uniform_int_distribution<int>(0, kinds - 1)(rng)) {
            case 0: return Inductor{value()};
            case 1: return Capacitor{value()};
            case 2: return Resistor{value()};
            default: return FixedImpedance{Complex(value(), value() * signed_unit(rng))};
        }
    };

    std::vector<Branch> branches;
    for (std::size_t v = 1; v < opt.nodes; ++v) {
        const std::size_t u = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
        branches.push_back({u, v, element()});
    }
    std::uniform_int_distribution<std::size_t> pick(0, opt.nodes - 1);
    for (std::size_t k = 0; k < opt.extra_branches; ++k) {
        std::size_t a = pick(rng), b = pick(rng);
        while (b == a) b = pick(rng);
        branches.push_back({a, b, element()});
    }
    return Network(opt.nodes, std::move(branches));
}

}  // namespace impnet
