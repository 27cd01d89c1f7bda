#pragma once

// Effective circuit depth for circuits with qubit resets.
//
// Information-flow paths start at any qubit (re)initialization, follow the
// qubit forward in time, may cross between qubits at every multi-qubit gate
// (in both directions), and terminate at a reset or at the last operation.
// The effective depth is the maximum elapsed scheduled time along any such
// path; with no resets it reduces to the standard depth. Instructions are
// the path vertices: consecutive instructions on a qubit are linked unless
// separated by a Reset, and a two-qubit instruction belongs to both of its
// qubits' chains, which realizes the crossing.

#include <string>
#include <vector>

#include "entspec/builders.hpp"
#include "entspec/circuit.hpp"
#include "entspec/circuit_io.hpp"
#include "json.hpp"

namespace entspec {

struct DepthReport {
    long long standard_depth = 0;
    long long effective_depth = 0;
    std::vector<Instruction> witness_path;
};

inline DepthReport effective_depth(const Circuit& c) {
    if (!c.scheduled()) throw std::invalid_argument("effective_depth: circuit not scheduled");
    DepthReport report;
    report.standard_depth = c.makespan();
    const auto& ins = c.instructions;  // sorted by start time
    const int n = static_cast<int>(ins.size());

    std::vector<int> last(c.num_qubits, -1);
    std::vector<std::vector<int>> preds(n);
    std::vector<bool> segment_head(n, false);
    for (int i = 0; i < n; ++i) {
        if (ins[i].op == Op::Reset) {
            // Boundary: terminates the incoming segment, the next instruction
            // on this qubit starts a fresh one.
            last[ins[i].qubits[0]] = -1;
            continue;
        }
        for (int s = 0; s < ins[i].num_qubits; ++s) {
            const int q = ins[i].qubits[s];
            if (last[q] < 0)
                segment_head[i] = true;
            else
                preds[i].push_back(last[q]);
            last[q] = i;
        }
    }

    // Longest elapsed time: propagate the earliest reachable segment start.
    constexpr long long kInf = std::numeric_limits<long long>::max();
    std::vector<long long> min_start(n, kInf);
    std::vector<int> parent(n, -1);
    long long best = 0;
    int best_at = -1;
    for (int i = 0; i < n; ++i) {
        if (ins[i].op == Op::Reset) continue;
        if (segment_head[i]) min_start[i] = ins[i].start;
        for (int p : preds[i]) {
            if (min_start[p] < min_start[i]) {
                min_start[i] = min_start[p];
                parent[i] = p;
            }
        }
        if (min_start[i] == kInf) continue;
        const long long elapsed = ins[i].end() - min_start[i];
        if (elapsed > best || best_at < 0) {
            best = elapsed;
            best_at = i;
        }
    }
    report.effective_depth = best_at < 0 ? 0 : best;
    for (int v = best_at; v >= 0; v = parent[v]) report.witness_path.push_back(ins[v]);
    std::reverse(report.witness_path.begin(), report.witness_path.end());
    return report;
}

// Largest elapsed time between consecutive (re)initializations of one qubit,
// i.e. the naive reset-frequency metric that the effective depth replaces.
inline long long max_time_between_resets(const Circuit& c, int qubit) {
    long long boundary = -1, last_end = -1, best = 0;
    for (const auto& in : c.instructions) {
        if (!in.acts_on(qubit)) continue;
        if (boundary < 0) boundary = in.start;
        if (in.op == Op::Reset) {
            best = std::max(best, in.start - boundary);
            boundary = in.end();
        }
        last_end = in.end();
    }
    if (boundary >= 0 && last_end > boundary) best = std::max(best, last_end - boundary);
    return best;
}

// The two-ancilla variant of the qubit-efficient Hadamard test: the control
// ping-pongs between two ancillas through decomposed SWAPs, so each physical
// ancilla is reset every round even though the control information stays
// coherent for the whole circuit. Width 4k + 2; a fixture showing that
// time-between-resets misjudges such circuits.
inline BuiltCircuit build_contrived_qe_ht(int n, int k, const StatePrep& prep,
                                          const DurationTable& durations) {
    build_detail::check_nk(n, k);
    build_detail::check_prep(prep, k);
    const int anc = 0, anc2 = 1;
    std::vector<int> acc_a(k), acc_b(k), rot_a(k), rot_b(k);
    for (int q = 0; q < k; ++q) {
        acc_a[q] = 2 + q;
        acc_b[q] = 2 + k + q;
        rot_a[q] = 2 + 2 * k + q;
        rot_b[q] = 2 + 3 * k + q;
    }
    std::vector<Instruction> prog;
    int discard_bit = 1;
    auto emit_swap = [&](int a, int b) {
        for (const auto& g : swap_decomposed(a, b)) prog.push_back(g);
    };
    prog.push_back(make1(Op::H, anc));
    build_detail::emit_prep(prog, prep, acc_a, acc_b);
    build_detail::emit_prep(prog, prep, rot_a, rot_b);
    for (int j = 1; j <= n - 1; ++j) {
        for (int q = 0; q < k; ++q) build_detail::emit_cswap(prog, anc, acc_a[q], rot_a[q]);
        if (j < n - 1) {
            // Shuttle the control out, reset the emptied ancilla, shuttle back.
            emit_swap(anc, anc2);
            build_detail::emit_discard_and_reset(prog, anc, discard_bit);
            emit_swap(anc2, anc);
            build_detail::emit_discard_and_reset(prog, anc2, discard_bit);
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
    out.circuit = pad_idle(schedule_asap(std::move(prog), durations, 4 * k + 2));
    out.estimator.family = EstimatorSpec::Family::HadamardAncilla;
    out.estimator.n = n;
    out.estimator.k = k;
    out.estimator.ancilla_cbit = 0;
    return out;
}

struct DepthTableRow {
    std::string algorithm;
    int n = 0;
    int k = 0;
    int width = 0;
    long long depth = 0;
    long long effective = 0;
};

// Regenerates the per-algorithm width/depth/effective-depth scaling table.
inline std::vector<DepthTableRow> depth_table(int k, const std::vector<int>& n_values,
                                              const StatePrep& prep,
                                              const DurationTable& durations) {
    std::vector<DepthTableRow> rows;
    for (Algorithm a : {Algorithm::HT, Algorithm::QeHt4k, Algorithm::QeHt3k, Algorithm::TCT,
                        Algorithm::QeTct6k, Algorithm::QeTct4k}) {
        for (int n : n_values) {
            const BuiltCircuit built = build_algorithm(a, n, k, prep, durations);
            const DepthReport rep = effective_depth(built.circuit);
            rows.push_back({algorithm_name(a), n, k, built.circuit.width(), rep.standard_depth,
                            rep.effective_depth});
        }
    }
    return rows;
}

inline std::string depth_table_csv(const std::vector<DepthTableRow>& rows) {
    std::string out = "algorithm,n,k,width,depth,effective_depth\n";
    for (const auto& r : rows) {
        out += r.algorithm;
        out += ',' + std::to_string(r.n) + ',' + std::to_string(r.k) + ',' +
               std::to_string(r.width) + ',' + std::to_string(r.depth) + ',' +
               std::to_string(r.effective) + '\n';
    }
    return out;
}

inline nlohmann::json depth_report_to_json(const DepthReport& rep) {
    nlohmann::json j;
    j["depth"] = rep.standard_depth;
    j["effective_depth"] = rep.effective_depth;
    j["witness_path"] = nlohmann::json::array();
    for (const auto& in : rep.witness_path) {
        nlohmann::json step;
        step["op"] = instruction_text(in);
        step["start"] = in.start;
        step["duration"] = in.duration;
        j["witness_path"].push_back(step);
    }
    return j;
}

}  // namespace entspec
