#pragma once

// Circuit builders for the six trace-estimation algorithms.
//
// Hadamard-test family: one ancilla controls k(n-1) sequential decomposed
// CSWAPs implementing the cyclic permutation over the A registers (right
// shift, transpositions (1 2)(1 3)...(1 n)); the qubit-efficient variants
// measure-and-reset exhausted copies and prepare the next copy in place.
//
// Two-copy-test family: 2n copies paired for a destructive Bell-basis
// measurement with the permutation folded into the CNOT wiring: B of copy i
// pairs with B of primed copy i, A of copy i with A of primed copy i-1
// (indices mod n). Qubit-efficient variants keep three (6k) or two (4k)
// copies' worth of qubits live, consuming the pairing ring from both ends.
//
// Classical bits are labeled by logical role so the post-processing formula
// is circuit-independent: recorded bits always occupy indices 0..R-1,
// discarded pre-reset measurement bits follow from R upward.

#include <map>
#include <string>
#include <vector>

#include "entspec/circuit.hpp"
#include "entspec/stateprep.hpp"

namespace entspec {

enum class Algorithm { HT, QeHt4k, QeHt3k, TCT, QeTct6k, QeTct4k };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::HT: return "ht";
        case Algorithm::QeHt4k: return "qe-ht-4k";
        case Algorithm::QeHt3k: return "qe-ht-3k";
        case Algorithm::TCT: return "tct";
        case Algorithm::QeTct6k: return "qe-tct-6k";
        case Algorithm::QeTct4k: return "qe-tct-4k";
    }
    return "?";
}

inline Algorithm algorithm_from_name(const std::string& s) {
    for (Algorithm a : {Algorithm::HT, Algorithm::QeHt4k, Algorithm::QeHt3k, Algorithm::TCT,
                        Algorithm::QeTct6k, Algorithm::QeTct4k})
        if (s == algorithm_name(a)) return a;
    throw std::invalid_argument("unknown algorithm '" + s + "'");
}

inline bool is_ht_family(Algorithm a) {
    return a == Algorithm::HT || a == Algorithm::QeHt4k || a == Algorithm::QeHt3k;
}

enum class ShiftDirection { Right, Left };

// Logical identity of one measured bit in the two-copy-test families.
struct TctBitInfo {
    int copy;          // 1..n
    bool primed;
    bool subsystem_a;  // A side (contributes A_l . A'_{l-1}) vs B side
    int pos;           // 0..k-1
    int cbit;
};

struct EstimatorSpec {
    enum class Family { HadamardAncilla, BellParity };
    Family family = Family::HadamardAncilla;
    int n = 0;
    int k = 0;
    int ancilla_cbit = 0;
    std::vector<TctBitInfo> bit_map;
};

struct BuiltCircuit {
    Circuit circuit;  // scheduled and idle-padded
    EstimatorSpec estimator;
};

namespace build_detail {

inline void check_nk(int n, int k) {
    if (n < 2) throw std::invalid_argument("builder: n must be >= 2");
    if (k < 1) throw std::invalid_argument("builder: k must be >= 1");
}

inline void check_prep(const StatePrep& prep, int k) {
    if (prep.k != k) throw std::invalid_argument("builder: prep subsystem size mismatch");
    for (const auto& g : prep.gates)
        for (int i = 0; i < g.num_qubits; ++i)
            if (g.qubits[i] < 0 || g.qubits[i] >= 2 * k)
                throw std::invalid_argument("builder: prep gate outside its 2k qubits");
}

// Appends the prep remapped onto physical registers; returns the indices of
// the appended instructions (used for delayed-prep scheduling).
inline std::vector<size_t> emit_prep(std::vector<Instruction>& prog, const StatePrep& prep,
                                     const std::vector<int>& a_phys,
                                     const std::vector<int>& b_phys) {
    std::vector<size_t> idx;
    for (const auto& g : prep.gates) {
        Instruction in = g;
        for (int i = 0; i < in.num_qubits; ++i) {
            const int lq = in.qubits[i];
            in.qubits[i] = lq < prep.k ? a_phys[lq] : b_phys[lq - prep.k];
        }
        idx.push_back(prog.size());
        prog.push_back(in);
    }
    return idx;
}

inline void emit_cswap(std::vector<Instruction>& prog, int control, int a, int b) {
    for (const auto& g : cswap_decomposed(control, a, b)) prog.push_back(g);
}

// Discarded pre-reset measurement (recorded in the shot, excluded from
// Counts) followed by the reset itself.
inline void emit_discard_and_reset(std::vector<Instruction>& prog, int q, int& next_discard_bit) {
    prog.push_back(make_measure(q, next_discard_bit++, /*discard=*/true));
    prog.push_back(make_reset(q));
}

// ASAP schedule in which each tagged instruction group (one state prep) is
// rigidly delayed so it finishes exactly when its registers are first used.
inline Circuit schedule_with_delayed_preps(std::vector<Instruction> prog,
                                           const std::vector<std::vector<size_t>>& groups,
                                           const DurationTable& durations, int num_qubits) {
    std::vector<long long> start(prog.size());
    std::vector<long long> free_at(num_qubits, 0);
    for (size_t i = 0; i < prog.size(); ++i) {
        long long t = prog[i].not_before;
        for (int s = 0; s < prog[i].num_qubits; ++s) t = std::max(t, free_at[prog[i].qubits[s]]);
        start[i] = t;
        for (int s = 0; s < prog[i].num_qubits; ++s)
            free_at[prog[i].qubits[s]] = t + durations.of(prog[i].op);
    }
    for (const auto& g : groups) {
        std::vector<char> in_group(prog.size(), 0);
        std::vector<char> group_qubit(num_qubits, 0);
        long long group_end = 0;
        for (size_t i : g) {
            in_group[i] = 1;
            group_end = std::max(group_end, start[i] + durations.of(prog[i].op));
            for (int s = 0; s < prog[i].num_qubits; ++s) group_qubit[prog[i].qubits[s]] = 1;
        }
        long long first_use = -1;
        for (size_t i = 0; i < prog.size(); ++i) {
            if (in_group[i]) continue;
            bool touches = false;
            for (int s = 0; s < prog[i].num_qubits; ++s) touches |= group_qubit[prog[i].qubits[s]] != 0;
            if (touches && start[i] >= group_end)
                first_use = first_use < 0 ? start[i] : std::min(first_use, start[i]);
        }
        const long long slack = first_use < 0 ? 0 : first_use - group_end;
        if (slack > 0)
            for (size_t i : g) prog[i].not_before = start[i] + slack;
    }
    return schedule_asap(std::move(prog), durations, num_qubits);
}

}  // namespace build_detail

// ---------------------------------------------------------------------------
// Hadamard-test family
// ---------------------------------------------------------------------------

inline BuiltCircuit build_ht(int n, int k, const StatePrep& prep, const DurationTable& durations,
                             ShiftDirection dir = ShiftDirection::Right) {
    build_detail::check_nk(n, k);
    build_detail::check_prep(prep, k);
    const int anc = 0;
    auto reg_a = [&](int copy) {  // copy 1..n
        std::vector<int> r(k);
        for (int q = 0; q < k; ++q) r[q] = 1 + (copy - 1) * 2 * k + q;
        return r;
    };
    auto reg_b = [&](int copy) {
        std::vector<int> r(k);
        for (int q = 0; q < k; ++q) r[q] = 1 + (copy - 1) * 2 * k + k + q;
        return r;
    };

    std::vector<Instruction> prog;
    std::vector<std::vector<size_t>> prep_groups;
    prog.push_back(make1(Op::H, anc));
    for (int i = 1; i <= n; ++i)
        prep_groups.push_back(build_detail::emit_prep(prog, prep, reg_a(i), reg_b(i)));
    const auto a1 = reg_a(1);
    for (int j = 0; j < n - 1; ++j) {
        const int partner = dir == ShiftDirection::Right ? 2 + j : n - j;
        const auto ap = reg_a(partner);
        for (int q = 0; q < k; ++q) build_detail::emit_cswap(prog, anc, a1[q], ap[q]);
    }
    prog.push_back(make1(Op::H, anc));
    prog.push_back(make_measure(anc, 0));

    BuiltCircuit out;
    out.circuit = pad_idle(build_detail::schedule_with_delayed_preps(
        std::move(prog), prep_groups, durations, 2 * k * n + 1));
    out.estimator.family = EstimatorSpec::Family::HadamardAncilla;
    out.estimator.n = n;
    out.estimator.k = k;
    out.estimator.ancilla_cbit = 0;
    return out;
}

inline BuiltCircuit build_qe_ht_4k(int n, int k, const StatePrep& prep,
                                   const DurationTable& durations) {
    build_detail::check_nk(n, k);
    build_detail::check_prep(prep, k);
    const int anc = 0;
    std::vector<int> acc_a(k), acc_b(k), rot_a(k), rot_b(k);
    for (int q = 0; q < k; ++q) {
        acc_a[q] = 1 + q;
        acc_b[q] = 1 + k + q;
        rot_a[q] = 1 + 2 * k + q;
        rot_b[q] = 1 + 3 * k + q;
    }
    std::vector<Instruction> prog;
    int discard_bit = 1;
    prog.push_back(make1(Op::H, anc));
    build_detail::emit_prep(prog, prep, acc_a, acc_b);
    build_detail::emit_prep(prog, prep, rot_a, rot_b);
    for (int j = 1; j <= n - 1; ++j) {
        for (int q = 0; q < k; ++q) build_detail::emit_cswap(prog, anc, acc_a[q], rot_a[q]);
        if (j < n - 1) {
            for (int q = 0; q < k; ++q)
                build_detail::emit_discard_and_reset(prog, rot_a[q], discard_bit);
            for (int q = 0; q < k; ++q)
                build_detail::emit_discard_and_reset(prog, rot_b[q], discard_bit);
            build_detail::emit_prep(prog, prep, rot_a, rot_b);
        }
    }
    prog.push_back(make1(Op::H, anc));
    prog.push_back(make_measure(anc, 0));

    BuiltCircuit out;
    out.circuit = pad_idle(schedule_asap(std::move(prog), durations, 4 * k + 1));
    out.estimator.family = EstimatorSpec::Family::HadamardAncilla;
    out.estimator.n = n;
    out.estimator.k = k;
    out.estimator.ancilla_cbit = 0;
    return out;
}

inline BuiltCircuit build_qe_ht_3k(int n, int k, const StatePrep& prep,
                                   const DurationTable& durations) {
    build_detail::check_nk(n, k);
    build_detail::check_prep(prep, k);
    const int anc = 0;
    std::vector<int> acc_a(k), tmp(k), rot2(k);
    for (int q = 0; q < k; ++q) {
        acc_a[q] = 1 + q;
        tmp[q] = 1 + k + q;
        rot2[q] = 1 + 2 * k + q;
    }
    std::vector<Instruction> prog;
    int discard_bit = 1;
    prog.push_back(make1(Op::H, anc));
    // First copy lands on (acc_a, tmp); its B subsystem is discarded right
    // away, which leaves rho_A on acc_a untouched.
    build_detail::emit_prep(prog, prep, acc_a, tmp);
    for (int q = 0; q < k; ++q) build_detail::emit_discard_and_reset(prog, tmp[q], discard_bit);
    for (int j = 1; j <= n - 1; ++j) {
        build_detail::emit_prep(prog, prep, tmp, rot2);
        for (int q = 0; q < k; ++q) build_detail::emit_cswap(prog, anc, acc_a[q], tmp[q]);
        if (j < n - 1) {
            for (int q = 0; q < k; ++q)
                build_detail::emit_discard_and_reset(prog, tmp[q], discard_bit);
            for (int q = 0; q < k; ++q)
                build_detail::emit_discard_and_reset(prog, rot2[q], discard_bit);
        }
    }
    prog.push_back(make1(Op::H, anc));
    prog.push_back(make_measure(anc, 0));

    BuiltCircuit out;
    out.circuit = pad_idle(schedule_asap(std::move(prog), durations, 3 * k + 1));
    out.estimator.family = EstimatorSpec::Family::HadamardAncilla;
    out.estimator.n = n;
    out.estimator.k = k;
    out.estimator.ancilla_cbit = 0;
    return out;
}

// ---------------------------------------------------------------------------
// Two-copy-test family
// ---------------------------------------------------------------------------

namespace build_detail {

// Bit labeling shared by the whole family: recorded bits are ordered
// (unprimed copies 1..n, then primed copies 1..n) x (A then B) x position.
inline int tct_cbit(int n, int k, int copy, bool primed, bool subsystem_a, int pos) {
    return ((primed ? n : 0) + copy - 1) * 2 * k + (subsystem_a ? 0 : k) + pos;
}

inline std::vector<TctBitInfo> tct_bit_map(int n, int k) {
    std::vector<TctBitInfo> map;
    for (int primed = 0; primed < 2; ++primed)
        for (int copy = 1; copy <= n; ++copy)
            for (int sub_a = 1; sub_a >= 0; --sub_a)
                for (int pos = 0; pos < k; ++pos)
                    map.push_back({copy, primed != 0, sub_a != 0, pos,
                                   tct_cbit(n, k, copy, primed != 0, sub_a != 0, pos)});
    return map;
}

// One destructive Bell pairing: CNOT(unprimed -> primed), H on the unprimed
// side, measure both sides into their logical bits. The two measures of a
// pair are aligned (the H side would otherwise lag by one timestep), which
// keeps recycled registers in lockstep in the qubit-efficient variants.
inline void emit_bell_pair(std::vector<Instruction>& prog,
                           std::vector<std::pair<size_t, size_t>>& measure_pairs,
                           const std::vector<int>& x, const std::vector<int>& y, int n, int k,
                           int copy_x, bool primed_x, int copy_y, bool primed_y,
                           bool subsystem_a) {
    const int kk = static_cast<int>(x.size());
    for (int q = 0; q < kk; ++q) prog.push_back(make_cnot(x[q], y[q]));
    for (int q = 0; q < kk; ++q) prog.push_back(make1(Op::H, x[q]));
    for (int q = 0; q < kk; ++q) {
        const size_t xi = prog.size();
        prog.push_back(make_measure(x[q], tct_cbit(n, k, copy_x, primed_x, subsystem_a, q)));
        measure_pairs.push_back({xi, prog.size()});
        prog.push_back(make_measure(y[q], tct_cbit(n, k, copy_y, primed_y, subsystem_a, q)));
    }
}

// Sets not_before on each pair's second measure to the first one's ASAP
// start. The first measure's chain (CNOT then H) never depends on the second,
// so a single pass is exact.
inline void align_measure_pairs(std::vector<Instruction>& prog,
                                const std::vector<std::pair<size_t, size_t>>& measure_pairs,
                                const DurationTable& durations, int num_qubits) {
    std::vector<long long> start(prog.size());
    std::vector<long long> free_at(num_qubits, 0);
    for (size_t i = 0; i < prog.size(); ++i) {
        long long t = prog[i].not_before;
        for (int s = 0; s < prog[i].num_qubits; ++s) t = std::max(t, free_at[prog[i].qubits[s]]);
        start[i] = t;
        for (int s = 0; s < prog[i].num_qubits; ++s)
            free_at[prog[i].qubits[s]] = t + durations.of(prog[i].op);
    }
    for (const auto& [xi, yi] : measure_pairs)
        prog[yi].not_before = std::max(prog[yi].not_before, start[xi]);
}

// Ring of 2n copies: even index -> unprimed copy r/2+1, odd -> primed
// (r-1)/2+1. The edge following an unprimed copy is its B pairing; the edge
// following a primed copy i is the A pairing of copy i+1 with primed i.
struct RingCopy {
    int copy;
    bool primed;
};

inline RingCopy ring_copy(int r, int n) {
    if (r % 2 == 0) return {r / 2 + 1, false};
    return {(r - 1) / 2 + 1, true};
}

}  // namespace build_detail

inline BuiltCircuit build_tct(int n, int k, const StatePrep& prep,
                              const DurationTable& durations) {
    build_detail::check_nk(n, k);
    build_detail::check_prep(prep, k);
    auto reg = [&](int copy, bool primed, bool sub_a) {
        std::vector<int> r(k);
        const int slot = (primed ? n : 0) + copy - 1;
        for (int q = 0; q < k; ++q) r[q] = slot * 2 * k + (sub_a ? 0 : k) + q;
        return r;
    };
    std::vector<Instruction> prog;
    std::vector<std::pair<size_t, size_t>> measure_pairs;
    for (int i = 1; i <= n; ++i)
        build_detail::emit_prep(prog, prep, reg(i, false, true), reg(i, false, false));
    for (int i = 1; i <= n; ++i)
        build_detail::emit_prep(prog, prep, reg(i, true, true), reg(i, true, false));
    for (int i = 1; i <= n; ++i) {
        build_detail::emit_bell_pair(prog, measure_pairs, reg(i, false, false),
                                     reg(i, true, false), n, k, i, false, i, true, false);
        const int next = i % n + 1;  // A of copy i+1 pairs with A' of copy i
        build_detail::emit_bell_pair(prog, measure_pairs, reg(next, false, true),
                                     reg(i, true, true), n, k, next, false, i, true, true);
    }
    build_detail::align_measure_pairs(prog, measure_pairs, durations, 4 * k * n);
    BuiltCircuit out;
    out.circuit = pad_idle(schedule_asap(std::move(prog), durations, 4 * k * n));
    out.estimator.family = EstimatorSpec::Family::BellParity;
    out.estimator.n = n;
    out.estimator.k = k;
    out.estimator.bit_map = build_detail::tct_bit_map(n, k);
    return out;
}

namespace build_detail {

// Shared machinery for the qubit-efficient two-copy tests: copies are
// prepared into k-sized half-slots from a free list (reset on reuse), the
// pairing ring is consumed from both ends, and every Bell pairing frees two
// half-slots.
class QeTctBuilder {
  public:
    QeTctBuilder(int n, int k, const StatePrep& prep, int half_slots)
        : n_(n), k_(k), prep_(&prep), half_slots_(half_slots) {
        a_loc_.assign(2 * n, -1);
        b_loc_.assign(2 * n, -1);
    }

    std::vector<Instruction> take_program(const DurationTable& durations) {
        align_measure_pairs(prog_, measure_pairs_, durations, half_slots_ * k_);
        return std::move(prog_);
    }

    void prep_ring_copy(int r) {
        const int ha = alloc_half(), hb = alloc_half();
        a_loc_[r] = ha;
        b_loc_[r] = hb;
        emit_prep(prog_, *prep_, half_qubits(ha), half_qubits(hb));
    }

    // Bell pairing along the ring edge between ring positions r and r+1.
    void bell_edge(int r) {
        const int r2 = (r + 1) % (2 * n_);
        const RingCopy cx = ring_copy(r, n_), cy = ring_copy(r2, n_);
        if (!cx.primed) {
            // B pairing: B_i with B'_i.
            pair_and_free(b_loc_[r], b_loc_[r2], cx.copy, false, cy.copy, true, false);
        } else {
            // A pairing: A_{i+1} (unprimed r+1) with A'_i (primed r).
            pair_and_free(a_loc_[r2], a_loc_[r], cy.copy, false, cx.copy, true, true);
        }
    }

  private:
    int n_, k_, half_slots_;
    const StatePrep* prep_;
    int fresh_half_ = 0;
    std::vector<int> freed_queue_;  // oldest-freed first, reused in that order
    size_t freed_head_ = 0;
    std::vector<int> a_loc_, b_loc_;
    std::vector<Instruction> prog_;
    std::vector<std::pair<size_t, size_t>> measure_pairs_;

    std::vector<int> half_qubits(int h) const {
        std::vector<int> r(k_);
        for (int q = 0; q < k_; ++q) r[q] = h * k_ + q;
        return r;
    }

    int alloc_half() {
        if (fresh_half_ < half_slots_) return fresh_half_++;
        if (freed_head_ < freed_queue_.size()) {
            const int h = freed_queue_[freed_head_++];
            for (int q : half_qubits(h)) prog_.push_back(make_reset(q));
            return h;
        }
        throw std::logic_error("QeTctBuilder: no free half-slot");
    }

    void pair_and_free(int hx, int hy, int copy_x, bool primed_x, int copy_y, bool primed_y,
                       bool subsystem_a) {
        emit_bell_pair(prog_, measure_pairs_, half_qubits(hx), half_qubits(hy), n_, k_, copy_x,
                       primed_x, copy_y, primed_y, subsystem_a);
        freed_queue_.push_back(hx);
        freed_queue_.push_back(hy);
    }
};

}  // namespace build_detail

// Three live copies; the greedy schedule always prepares the copy needed by
// the longest-lived one, consuming the ring from both ends.
inline BuiltCircuit build_qe_tct_6k(int n, int k, const StatePrep& prep,
                                    const DurationTable& durations) {
    build_detail::check_nk(n, k);
    build_detail::check_prep(prep, k);
    build_detail::QeTctBuilder b(n, k, prep, 6);
    const int m = 2 * n;
    b.prep_ring_copy(0);
    b.prep_ring_copy(1);
    b.prep_ring_copy(m - 1);
    b.bell_edge(0);      // B_1 with B'_1
    b.bell_edge(m - 1);  // A_1 with A'_n
    int left = 1, right = m - 1;
    while (right - left > 1) {
        b.prep_ring_copy(left + 1);
        b.bell_edge(left);
        ++left;
        if (right - left <= 1) break;
        b.prep_ring_copy(right - 1);
        b.bell_edge(right - 1);
        --right;
    }
    if (right - left == 1) b.bell_edge(left);

    BuiltCircuit out;
    out.circuit = pad_idle(schedule_asap(b.take_program(durations), durations, 6 * k));
    out.estimator.family = EstimatorSpec::Family::BellParity;
    out.estimator.n = n;
    out.estimator.k = k;
    out.estimator.bit_map = build_detail::tct_bit_map(n, k);
    return out;
}

// Two live copies' worth of qubits: one prep at a time into whichever half
// registers are free, alternating ring ends.
inline BuiltCircuit build_qe_tct_4k(int n, int k, const StatePrep& prep,
                                    const DurationTable& durations) {
    build_detail::check_nk(n, k);
    build_detail::check_prep(prep, k);
    build_detail::QeTctBuilder b(n, k, prep, 4);
    const int m = 2 * n;
    b.prep_ring_copy(0);
    b.prep_ring_copy(1);
    b.bell_edge(0);
    b.prep_ring_copy(m - 1);
    b.bell_edge(m - 1);
    int left = 1, right = m - 1;
    while (right - left > 1) {
        b.prep_ring_copy(left + 1);
        b.bell_edge(left);
        ++left;
        if (right - left <= 1) break;
        b.prep_ring_copy(right - 1);
        b.bell_edge(right - 1);
        --right;
    }
    if (right - left == 1) b.bell_edge(left);

    BuiltCircuit out;
    out.circuit = pad_idle(schedule_asap(b.take_program(durations), durations, 4 * k));
    out.estimator.family = EstimatorSpec::Family::BellParity;
    out.estimator.n = n;
    out.estimator.k = k;
    out.estimator.bit_map = build_detail::tct_bit_map(n, k);
    return out;
}

inline BuiltCircuit build_algorithm(Algorithm a, int n, int k, const StatePrep& prep,
                                    const DurationTable& durations) {
    switch (a) {
        case Algorithm::HT: return build_ht(n, k, prep, durations);
        case Algorithm::QeHt4k: return build_qe_ht_4k(n, k, prep, durations);
        case Algorithm::QeHt3k: return build_qe_ht_3k(n, k, prep, durations);
        case Algorithm::TCT: return build_tct(n, k, prep, durations);
        case Algorithm::QeTct6k: return build_qe_tct_6k(n, k, prep, durations);
        case Algorithm::QeTct4k: return build_qe_tct_4k(n, k, prep, durations);
    }
    throw std::logic_error("build_algorithm: bad enum");
}

// Counts of each non-identity unitary kind, for the gate-parity checks.
inline std::map<Op, int> unitary_gate_counts(const Circuit& c) {
    std::map<Op, int> counts;
    for (const auto& in : c.instructions)
        if (op_is_unitary(in.op) && in.op != Op::Identity) ++counts[in.op];
    return counts;
}

}  // namespace entspec
