#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "circuitlab/errors.hpp"
#include "circuitlab/truth_table.hpp"

namespace circuitlab {

// The 16 two-input Boolean functions, encoded by their truth code: bit
// ((b<<1)|a) of the code is op(a, b). The whole set is the gate basis, so
// circuit size is exactly the gate count.
enum class gate_op : std::uint8_t {
    FALSE_ = 0,
    NOR = 1,
    ANDNB = 2,  // a & ~b
    NB = 3,     // ~b
    ANDNA = 4,  // ~a & b
    NA = 5,     // ~a
    XOR = 6,
    NAND = 7,
    AND = 8,
    XNOR = 9,
    A = 10,
    ORNB = 11,  // a | ~b
    B = 12,
    ORNA = 13,  // ~a | b
    OR = 14,
    TRUE_ = 15,
};

inline const char* gate_op_name(gate_op op) {
    static const char* names[16] = {"FALSE", "NOR",  "ANDNB", "NB",   "ANDNA", "NA",
                                    "XOR",   "NAND", "AND",   "XNOR", "A",     "ORNB",
                                    "B",     "ORNA", "OR",    "TRUE"};
    return names[static_cast<unsigned>(op) & 15];
}

inline gate_op gate_op_from_name(const std::string& name) {
    for (unsigned v = 0; v < 16; ++v)
        if (name == gate_op_name(static_cast<gate_op>(v))) return static_cast<gate_op>(v);
    throw structural_error("unknown gate op: " + name);
}

inline bool apply_op(gate_op op, bool a, bool b) {
    const unsigned idx = (static_cast<unsigned>(b) << 1) | static_cast<unsigned>(a);
    return (static_cast<unsigned>(op) >> idx) & 1;
}

inline std::uint64_t apply_op_words(gate_op op, std::uint64_t a, std::uint64_t b) {
    const unsigned code = static_cast<unsigned>(op);
    std::uint64_t out = 0;
    if (code & 1) out |= ~a & ~b;
    if (code & 2) out |= a & ~b;
    if (code & 4) out |= ~a & b;
    if (code & 8) out |= a & b;
    return out;
}

// A wire is a constant, an input variable, or the output of an earlier gate.
struct wire {
    enum class kind : std::uint8_t { constant, input, gate };
    kind k = kind::constant;
    std::uint32_t index = 0;

    static wire constant(bool v) { return {kind::constant, v ? 1u : 0u}; }
    static wire input(std::uint32_t i) { return {kind::input, i}; }
    static wire gate(std::uint32_t j) { return {kind::gate, j}; }

    bool operator==(const wire&) const = default;
};

struct gate {
    gate_op op;
    wire a;
    wire b;
    bool operator==(const gate&) const = default;
};

// Fan-in-two gate DAG in topological order. With no gates the output wire is
// a constant or input projection; with gates it must be the last gate.
struct circuit {
    std::uint32_t n = 1;
    std::vector<gate> gates;
    wire output = wire::constant(false);

    std::size_t size() const { return gates.size(); }
    bool operator==(const circuit&) const = default;
};

inline void validate_wire(const circuit& c, const wire& w, std::size_t gate_limit) {
    switch (w.k) {
        case wire::kind::constant:
            if (w.index > 1) throw structural_error("constant wire must be 0 or 1");
            return;
        case wire::kind::input:
            if (w.index >= c.n) throw structural_error("input wire out of range");
            return;
        case wire::kind::gate:
            if (w.index >= gate_limit) throw structural_error("gate wire not earlier");
            return;
    }
    throw structural_error("bad wire kind");
}

inline void validate(const circuit& c) {
    if (c.n < 1) throw structural_error("circuit needs at least one input");
    for (std::size_t j = 0; j < c.gates.size(); ++j) {
        validate_wire(c, c.gates[j].a, j);
        validate_wire(c, c.gates[j].b, j);
    }
    if (c.gates.empty()) {
        if (c.output.k == wire::kind::gate)
            throw structural_error("gateless circuit cannot output a gate");
        validate_wire(c, c.output, 0);
    } else if (!(c.output.k == wire::kind::gate && c.output.index == c.gates.size() - 1)) {
        throw structural_error("output must be the last gate");
    }
}

// Evaluate on one input point; variable i is bit i of x.
inline bool eval(const circuit& c, std::uint64_t x) {
    auto wire_value = [&](const wire& w, const std::vector<bool>& vals) -> bool {
        switch (w.k) {
            case wire::kind::constant: return w.index != 0;
            case wire::kind::input: return (x >> w.index) & 1;
            case wire::kind::gate: return vals[w.index];
        }
        return false;
    };
    std::vector<bool> vals(c.gates.size());
    for (std::size_t j = 0; j < c.gates.size(); ++j)
        vals[j] = apply_op(c.gates[j].op, wire_value(c.gates[j].a, vals),
                           wire_value(c.gates[j].b, vals));
    return wire_value(c.output, vals);
}

// Truth table over all 2^n points at once, one word of 64 points per step.
inline truth_table to_truth_table(const circuit& c) {
    validate(c);
    const std::uint64_t points = std::uint64_t(1) << c.n;
    const std::size_t nwords = static_cast<std::size_t>((points + 63) / 64);
    // Variable patterns: bit x of pattern i is the value of variable i at x.
    std::vector<std::vector<std::uint64_t>> var(c.n, std::vector<std::uint64_t>(nwords));
    for (std::uint32_t i = 0; i < c.n; ++i) {
        if (i < 6) {
            static const std::uint64_t low[6] = {
                0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
                0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull};
            for (std::size_t k = 0; k < nwords; ++k) var[i][k] = low[i];
        } else {
            for (std::size_t k = 0; k < nwords; ++k)
                var[i][k] = (k >> (i - 6)) & 1 ? ~0ull : 0ull;
        }
    }
    std::vector<std::vector<std::uint64_t>> gv(c.gates.size());
    auto wire_words = [&](const wire& w) -> std::vector<std::uint64_t> {
        switch (w.k) {
            case wire::kind::constant:
                return std::vector<std::uint64_t>(nwords, w.index ? ~0ull : 0ull);
            case wire::kind::input: return var[w.index];
            case wire::kind::gate: return gv[w.index];
        }
        return {};
    };
    for (std::size_t j = 0; j < c.gates.size(); ++j) {
        const auto a = wire_words(c.gates[j].a);
        const auto b = wire_words(c.gates[j].b);
        gv[j].resize(nwords);
        for (std::size_t k = 0; k < nwords; ++k)
            gv[j][k] = apply_op_words(c.gates[j].op, a[k], b[k]);
    }
    const auto out = wire_words(c.output);
    bitstring bits(points);
    for (std::size_t k = 0; k < nwords; ++k) bits.words()[k] = out[k];
    bits.mask_tail();
    return truth_table(c.n, std::move(bits));
}

// ---------------------------------------------------------------------------
// Text format, one gate per line:
//   g0 = AND(x0, x1)
//   g1 = XOR(g0, c1)
//   out = g1
// Inputs are x<i>, constants c0/c1, gates g<i> in topological order.
// ---------------------------------------------------------------------------

inline std::string format_wire(const wire& w) {
    switch (w.k) {
        case wire::kind::constant: return w.index ? "c1" : "c0";
        case wire::kind::input: return "x" + std::to_string(w.index);
        case wire::kind::gate: return "g" + std::to_string(w.index);
    }
    return "?";
}

inline wire parse_wire(const std::string& s) {
    if (s.size() < 2) throw structural_error("bad wire token: " + s);
    const std::uint32_t idx = static_cast<std::uint32_t>(std::stoul(s.substr(1)));
    switch (s[0]) {
        case 'c':
            if (idx > 1) throw structural_error("bad constant: " + s);
            return wire::constant(idx != 0);
        case 'x': return wire::input(idx);
        case 'g': return wire::gate(idx);
        default: throw structural_error("bad wire token: " + s);
    }
}

inline std::string to_text(const circuit& c) {
    std::ostringstream out;
    for (std::size_t j = 0; j < c.gates.size(); ++j)
        out << "g" << j << " = " << gate_op_name(c.gates[j].op) << "("
            << format_wire(c.gates[j].a) << ", " << format_wire(c.gates[j].b) << ")\n";
    out << "out = " << format_wire(c.output) << "\n";
    return out.str();
}

// One-line label for reports.
inline std::string label(const circuit& c) {
    std::string s = to_text(c);
    for (auto& ch : s)
        if (ch == '\n') ch = ';';
    if (!s.empty() && s.back() == ';') s.pop_back();
    return s;
}

inline circuit from_text(const std::string& text, std::uint32_t n) {
    circuit c;
    c.n = n;
    std::istringstream in(text);
    std::string line;
    bool saw_out = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string lhs, eq, rhs;
        ls >> lhs >> eq;
        if (eq != "=") throw structural_error("bad circuit line: " + line);
        std::getline(ls, rhs);
        while (!rhs.empty() && rhs.front() == ' ') rhs.erase(rhs.begin());
        if (lhs == "out") {
            c.output = parse_wire(rhs);
            saw_out = true;
            continue;
        }
        if (lhs.empty() || lhs[0] != 'g' ||
            std::stoul(lhs.substr(1)) != c.gates.size())
            throw structural_error("gates must be g0, g1, ... in order: " + line);
        const auto open = rhs.find('(');
        const auto comma = rhs.find(',');
        const auto close = rhs.find(')');
        if (open == std::string::npos || comma == std::string::npos ||
            close == std::string::npos)
            throw structural_error("bad gate expression: " + line);
        auto strip = [](std::string s) {
            while (!s.empty() && s.front() == ' ') s.erase(s.begin());
            while (!s.empty() && s.back() == ' ') s.pop_back();
            return s;
        };
        gate g;
        g.op = gate_op_from_name(strip(rhs.substr(0, open)));
        g.a = parse_wire(strip(rhs.substr(open + 1, comma - open - 1)));
        g.b = parse_wire(strip(rhs.substr(comma + 1, close - comma - 1)));
        c.gates.push_back(g);
    }
    if (!saw_out) throw structural_error("circuit text missing out line");
    validate(c);
    return c;
}

// Append a copy of `sub` to `host`, feeding sub's input i from inputs[i].
// Returns the wire carrying sub's output.
inline wire inline_circuit(circuit& host, const circuit& sub,
                           const std::vector<wire>& inputs) {
    if (inputs.size() != sub.n)
        throw structural_error("inline_circuit: wrong input count");
    const std::uint32_t base = static_cast<std::uint32_t>(host.gates.size());
    auto map_wire = [&](const wire& w) -> wire {
        switch (w.k) {
            case wire::kind::constant: return w;
            case wire::kind::input: return inputs[w.index];
            case wire::kind::gate: return wire::gate(base + w.index);
        }
        return w;
    };
    for (const auto& g : sub.gates)
        host.gates.push_back({g.op, map_wire(g.a), map_wire(g.b)});
    return map_wire(sub.output);
}

// Small builders used throughout the tests and tools.
inline circuit projection(std::uint32_t n, std::uint32_t i) {
    circuit c;
    c.n = n;
    c.output = wire::input(i);
    return c;
}

inline circuit constant_circuit(std::uint32_t n, bool v) {
    circuit c;
    c.n = n;
    c.output = wire::constant(v);
    return c;
}

inline circuit single_gate(std::uint32_t n, gate_op op, wire a, wire b) {
    circuit c;
    c.n = n;
    c.gates.push_back({op, a, b});
    c.output = wire::gate(0);
    return c;
}

}  // namespace circuitlab
