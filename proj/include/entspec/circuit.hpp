#pragma once

// Circuit intermediate representation: a timed instruction list over qubits
// and classical bits, with mid-circuit measurement and reset.
//
// Conventions used throughout:
//   - control qubit is listed first for CNOT (and CSWAP decompositions);
//   - qubit index 0 is the most significant position in basis-state labels;
//   - time is integer timesteps, instruction intervals are [start, start+duration).

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "entspec/gates.hpp"

namespace entspec {

struct Instruction {
    Op op = Op::Identity;
    std::array<int, 2> qubits{0, 0};
    int num_qubits = 1;
    double phi = 0.0;     // U2 only
    double lambda = 0.0;  // U1 and U2
    int cbit = -1;        // Measure only
    bool discard = false;  // pre-reset measurement, excluded from Counts
    bool padding = false;  // idle-fill identity, exempt from gate noise
    long long start = -1;
    long long duration = -1;
    long long not_before = 0;  // scheduler hint, earliest admissible start

    long long end() const { return start + duration; }
    bool acts_on(int q) const {
        return qubits[0] == q || (num_qubits == 2 && qubits[1] == q);
    }
};

inline Instruction make1(Op op, int q, double phi = 0.0, double lambda = 0.0) {
    Instruction in;
    in.op = op;
    in.qubits = {q, q};
    in.num_qubits = 1;
    in.phi = phi;
    in.lambda = lambda;
    return in;
}

inline Instruction make_cnot(int control, int target) {
    if (control == target)
        throw std::invalid_argument("cnot: control and target must differ");
    Instruction in;
    in.op = Op::Cnot;
    in.qubits = {control, target};
    in.num_qubits = 2;
    return in;
}

inline Instruction make_measure(int q, int cbit, bool discard = false) {
    Instruction in;
    in.op = Op::Measure;
    in.qubits = {q, q};
    in.num_qubits = 1;
    in.cbit = cbit;
    in.discard = discard;
    return in;
}

inline Instruction make_reset(int q) {
    Instruction in;
    in.op = Op::Reset;
    in.qubits = {q, q};
    in.num_qubits = 1;
    return in;
}

struct Circuit {
    int num_qubits = 0;
    int num_cbits = 0;
    // Sorted by (start, lowest qubit); intervals on any one qubit are disjoint.
    std::vector<Instruction> instructions;
    DurationTable durations;

    bool scheduled() const {
        for (const auto& in : instructions)
            if (in.start < 0 || in.duration <= 0) return false;
        return true;
    }

    long long makespan() const {
        long long m = 0;
        for (const auto& in : instructions) m = std::max(m, in.end());
        return m;
    }

    int width() const { return num_qubits; }
};

namespace detail {

inline void sort_time_order(std::vector<Instruction>& instrs) {
    std::stable_sort(instrs.begin(), instrs.end(),
                     [](const Instruction& a, const Instruction& b) {
                         if (a.start != b.start) return a.start < b.start;
                         int qa = a.num_qubits == 2 ? std::min(a.qubits[0], a.qubits[1]) : a.qubits[0];
                         int qb = b.num_qubits == 2 ? std::min(b.qubits[0], b.qubits[1]) : b.qubits[0];
                         return qa < qb;
                     });
}

inline void check_instruction(const Instruction& in) {
    if (in.num_qubits == 2 && in.qubits[0] == in.qubits[1])
        throw std::invalid_argument("instruction uses the same qubit twice");
    if (in.qubits[0] < 0 || (in.num_qubits == 2 && in.qubits[1] < 0))
        throw std::invalid_argument("negative qubit index");
}

}  // namespace detail

// Schedules each instruction at the earliest time >= the end of all prior
// instructions touching any of its qubits (and >= its not_before hint),
// preserving relative program order on shared qubits. Idempotent.
inline Circuit schedule_asap(std::vector<Instruction> prog, const DurationTable& durations,
                             int num_qubits = -1, int num_cbits = -1) {
    durations.validate();
    int max_q = -1, max_c = -1;
    for (auto& in : prog) {
        detail::check_instruction(in);
        max_q = std::max({max_q, in.qubits[0], in.num_qubits == 2 ? in.qubits[1] : -1});
        if (in.op == Op::Measure) max_c = std::max(max_c, in.cbit);
    }
    Circuit c;
    c.durations = durations;
    c.num_qubits = num_qubits >= 0 ? num_qubits : max_q + 1;
    c.num_cbits = num_cbits >= 0 ? num_cbits : max_c + 1;
    if (max_q >= c.num_qubits)
        throw std::invalid_argument("schedule_asap: qubit index out of range");

    std::vector<long long> free_at(c.num_qubits, 0);
    for (auto& in : prog) {
        long long t = in.not_before;
        for (int i = 0; i < in.num_qubits; ++i) t = std::max(t, free_at[in.qubits[i]]);
        in.start = t;
        in.duration = durations.of(in.op);
        for (int i = 0; i < in.num_qubits; ++i) free_at[in.qubits[i]] = in.end();
    }
    c.instructions = std::move(prog);
    detail::sort_time_order(c.instructions);
    return c;
}

// Fills every gap on every qubit between its first and last instruction with
// unit-duration identities flagged as padding (thermal noise only, no gate
// noise). Gaps are integer-length, so unit tiles cover them exactly.
inline Circuit pad_idle(const Circuit& c) {
    if (!c.scheduled()) throw std::invalid_argument("pad_idle: circuit not scheduled");
    std::vector<std::vector<std::pair<long long, long long>>> busy(c.num_qubits);
    for (const auto& in : c.instructions)
        for (int i = 0; i < in.num_qubits; ++i)
            busy[in.qubits[i]].push_back({in.start, in.end()});

    Circuit out = c;
    for (int q = 0; q < c.num_qubits; ++q) {
        auto& iv = busy[q];
        std::sort(iv.begin(), iv.end());
        for (size_t i = 1; i < iv.size(); ++i) {
            for (long long t = iv[i - 1].second; t < iv[i].first; ++t) {
                Instruction idp = make1(Op::Identity, q);
                idp.padding = true;
                idp.start = t;
                idp.duration = 1;
                out.instructions.push_back(idp);
            }
        }
    }
    detail::sort_time_order(out.instructions);
    return out;
}

// Appendix decomposition of CSWAP(control, a, b) over {H, T, Tdg, CNOT}:
// the Toffoli(control, a, b) standard-cell sandwiched between CNOT(b, a).
inline std::vector<Instruction> cswap_decomposed(int control, int a, int b) {
    if (control == a || control == b || a == b)
        throw std::invalid_argument("cswap_decomposed: qubits must be distinct");
    std::vector<Instruction> g;
    g.push_back(make_cnot(b, a));
    g.push_back(make1(Op::H, b));
    g.push_back(make_cnot(a, b));
    g.push_back(make1(Op::Tdg, b));
    g.push_back(make_cnot(control, b));
    g.push_back(make1(Op::T, b));
    g.push_back(make_cnot(a, b));
    g.push_back(make1(Op::T, a));
    g.push_back(make1(Op::Tdg, b));
    g.push_back(make_cnot(control, b));
    g.push_back(make_cnot(control, a));
    g.push_back(make1(Op::T, b));
    g.push_back(make1(Op::T, control));
    g.push_back(make1(Op::Tdg, a));
    g.push_back(make1(Op::H, b));
    g.push_back(make_cnot(control, a));
    g.push_back(make_cnot(b, a));
    return g;
}

inline std::vector<Instruction> swap_decomposed(int a, int b) {
    return {make_cnot(a, b), make_cnot(b, a), make_cnot(a, b)};
}

// Checks the per-qubit non-overlap invariant; throws on violation.
inline void validate_non_overlap(const Circuit& c) {
    std::vector<std::vector<std::pair<long long, long long>>> busy(c.num_qubits);
    for (const auto& in : c.instructions)
        for (int i = 0; i < in.num_qubits; ++i)
            busy[in.qubits[i]].push_back({in.start, in.end()});
    for (auto& iv : busy) {
        std::sort(iv.begin(), iv.end());
        for (size_t i = 1; i < iv.size(); ++i)
            if (iv[i].first < iv[i - 1].second)
                throw std::runtime_error("circuit invariant violated: overlapping instructions on a qubit");
    }
}

}  // namespace entspec
