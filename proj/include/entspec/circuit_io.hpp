#pragma once

// Line-based textual circuit format, one instruction per line:
//   u1 q<i> <lambda>
//   u2 q<i> <phi> <lambda>
//   h q<i> | t q<i> | tdg q<i> | id q<i>
//   cx q<control> q<target>
//   measure q<i> c<j>
//   reset q<i>
// '#' begins a comment. Parser and serializer round-trip.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "entspec/circuit.hpp"

namespace entspec {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline int parse_index(const std::string& tok, char prefix, int line) {
    if (tok.size() < 2 || tok[0] != prefix)
        throw ParseError(line, std::string("expected ") + prefix + "<index>, got '" + tok + "'");
    size_t pos = 0;
    int v;
    try {
        v = std::stoi(tok.substr(1), &pos);
    } catch (const std::exception&) {
        throw ParseError(line, std::string("bad index in '") + tok + "'");
    }
    if (pos != tok.size() - 1 || v < 0)
        throw ParseError(line, std::string("bad index in '") + tok + "'");
    return v;
}

inline double parse_real(const std::string& tok, int line) {
    size_t pos = 0;
    double v;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError(line, "bad real number '" + tok + "'");
    }
    if (pos != tok.size()) throw ParseError(line, "bad real number '" + tok + "'");
    return v;
}

}  // namespace detail

// Parses the textual format into an unscheduled instruction list.
inline std::vector<Instruction> parse_circuit_text(const std::string& text) {
    std::vector<Instruction> prog;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        const std::string& m = tok[0];
        auto want = [&](size_t n) {
            if (tok.size() != n + 1)
                throw ParseError(lineno, "'" + m + "' expects " + std::to_string(n) + " arguments");
        };
        if (m == "u1") {
            want(2);
            prog.push_back(make1(Op::U1, detail::parse_index(tok[1], 'q', lineno), 0.0,
                                 detail::parse_real(tok[2], lineno)));
        } else if (m == "u2") {
            want(3);
            prog.push_back(make1(Op::U2, detail::parse_index(tok[1], 'q', lineno),
                                 detail::parse_real(tok[2], lineno),
                                 detail::parse_real(tok[3], lineno)));
        } else if (m == "h" || m == "t" || m == "tdg" || m == "id") {
            want(1);
            Op op = m == "h" ? Op::H : m == "t" ? Op::T : m == "tdg" ? Op::Tdg : Op::Identity;
            prog.push_back(make1(op, detail::parse_index(tok[1], 'q', lineno)));
        } else if (m == "cx") {
            want(2);
            int c = detail::parse_index(tok[1], 'q', lineno);
            int t = detail::parse_index(tok[2], 'q', lineno);
            if (c == t) throw ParseError(lineno, "cx control equals target");
            prog.push_back(make_cnot(c, t));
        } else if (m == "measure") {
            want(2);
            prog.push_back(make_measure(detail::parse_index(tok[1], 'q', lineno),
                                        detail::parse_index(tok[2], 'c', lineno)));
        } else if (m == "reset") {
            want(1);
            prog.push_back(make_reset(detail::parse_index(tok[1], 'q', lineno)));
        } else {
            throw ParseError(lineno, "unknown mnemonic '" + m + "'");
        }
    }
    return prog;
}

inline std::string instruction_text(const Instruction& in) {
    std::string s = op_mnemonic(in.op);
    s += " q" + std::to_string(in.qubits[0]);
    switch (in.op) {
        case Op::U1: s += " " + detail::format_double(in.lambda); break;
        case Op::U2:
            s += " " + detail::format_double(in.phi) + " " + detail::format_double(in.lambda);
            break;
        case Op::Cnot: s += " q" + std::to_string(in.qubits[1]); break;
        case Op::Measure: s += " c" + std::to_string(in.cbit); break;
        default: break;
    }
    return s;
}

inline std::string serialize_circuit_text(const std::vector<Instruction>& instrs) {
    std::string out;
    for (const auto& in : instrs) {
        out += instruction_text(in);
        out += '\n';
    }
    return out;
}

inline std::string serialize_circuit_text(const Circuit& c) {
    return serialize_circuit_text(c.instructions);
}

}  // namespace entspec
