#pragma once

// Shot-based stochastic-trajectory executor.
//
// The state of a shot is kept as a set of product factors rather than one
// dense register: factors merge when a two-qubit gate spans them and split
// again at every projective event (measurement, reset, thermal relaxation),
// since a projected qubit is always in a definite basis state. Instructions
// execute in a fixed commuting-equivalent topological order of the per-qubit
// dependency graph, chosen greedily to keep factors small; operations on
// disjoint qubits commute as channels, so outcome distributions are exactly
// those of in-time-order execution. The order is a pure function of the
// circuit, and every shot derives its RNG from (master_seed, shot_index),
// which makes runs reproducible independently of thread count.
//
// For a noiseless profile the trajectory is deterministic up to the first
// measurement or reset; that prefix is executed once and shared by all shots.

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <thread>
#include <vector>

#include "entspec/circuit.hpp"
#include "entspec/counts.hpp"
#include "entspec/noise.hpp"
#include "entspec/statevector.hpp"

namespace entspec {

struct RunOptions {
    int threads = 1;
    bool literal_order = false;  // execute in startTime order (reference mode)
};

namespace engine_detail {

inline void validate_runnable(const Circuit& c) {
    if (!c.scheduled()) throw std::invalid_argument("run: circuit is not scheduled");
    std::vector<std::vector<std::pair<long long, long long>>> busy(c.num_qubits);
    std::set<int> cbits;
    for (const auto& in : c.instructions) {
        for (int i = 0; i < in.num_qubits; ++i) busy[in.qubits[i]].push_back({in.start, in.end()});
        if (in.op == Op::Measure) {
            if (!cbits.insert(in.cbit).second)
                throw std::invalid_argument("run: classical bit measured twice");
        }
    }
    for (auto& iv : busy) {
        std::sort(iv.begin(), iv.end());
        for (size_t i = 1; i < iv.size(); ++i) {
            if (iv[i].first < iv[i - 1].second)
                throw std::invalid_argument("run: overlapping instructions on a qubit");
            if (iv[i].first > iv[i - 1].second)
                throw std::invalid_argument("run: circuit has unpadded idle gaps");
        }
    }
}

inline std::vector<int> recorded_cbits(const Circuit& c) {
    std::set<int> bits;
    for (const auto& in : c.instructions)
        if (in.op == Op::Measure && !in.discard) bits.insert(in.cbit);
    return {bits.begin(), bits.end()};
}

// Greedy topological order over the per-qubit dependency graph. Ready
// instructions are ranked: projective shrink ops first, then ops confined to
// one factor, then the merge yielding the smallest factor; ties break on
// (start, lowest qubit, program index) so the order is deterministic.
inline std::vector<int> plan_order(const Circuit& c) {
    const auto& ins = c.instructions;
    const int n = static_cast<int>(ins.size());
    std::vector<int> last(c.num_qubits, -1);
    std::vector<std::vector<int>> succ(n);
    std::vector<int> indeg(n, 0);
    for (int i = 0; i < n; ++i) {
        for (int s = 0; s < ins[i].num_qubits; ++s) {
            int q = ins[i].qubits[s];
            if (last[q] >= 0) {
                succ[last[q]].push_back(i);
                ++indeg[i];
            }
            last[q] = i;
        }
    }

    // Symbolic factor occupancy; group -1 means a parked (basis-state) qubit.
    std::vector<int> group(c.num_qubits, -1);
    std::vector<std::vector<int>> members;
    auto group_size = [&](int q) { return group[q] < 0 ? 1 : static_cast<int>(members[group[q]].size()); };

    std::vector<int> ready;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push_back(i);

    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
        int best_at = -1;
        long long best_cls = 0, best_key = 0, best_start = 0;
        int best_q = 0;
        for (size_t r = 0; r < ready.size(); ++r) {
            const auto& in = ins[ready[r]];
            long long cls, key = 0;
            if (in.op == Op::Measure || in.op == Op::Reset) {
                cls = 0;
            } else if (in.num_qubits == 1) {
                cls = 1;
            } else {
                int a = in.qubits[0], b = in.qubits[1];
                if (group[a] >= 0 && group[a] == group[b]) {
                    cls = 1;
                } else {
                    cls = 2;
                    key = group_size(a) + group_size(b);
                }
            }
            int lowq = in.num_qubits == 2 ? std::min(in.qubits[0], in.qubits[1]) : in.qubits[0];
            if (best_at < 0 || std::tuple(cls, key, in.start, lowq, ready[r]) <
                                   std::tuple(best_cls, best_key, best_start, best_q, ready[best_at])) {
                best_at = static_cast<int>(r);
                best_cls = cls;
                best_key = key;
                best_start = in.start;
                best_q = lowq;
            }
        }
        int i = ready[best_at];
        ready[best_at] = ready.back();
        ready.pop_back();
        order.push_back(i);

        const auto& in = ins[i];
        auto ensure_group = [&](int q) {
            if (group[q] < 0) {
                group[q] = static_cast<int>(members.size());
                members.push_back({q});
            }
        };
        if (in.op == Op::Measure || in.op == Op::Reset) {
            int q = in.qubits[0];
            if (group[q] >= 0) {
                auto& m = members[group[q]];
                m.erase(std::find(m.begin(), m.end(), q));
                group[q] = -1;
            }
        } else if (in.num_qubits == 2) {
            ensure_group(in.qubits[0]);
            ensure_group(in.qubits[1]);
            int ga = group[in.qubits[0]], gb = group[in.qubits[1]];
            if (ga != gb) {
                for (int q : members[gb]) {
                    group[q] = ga;
                    members[ga].push_back(q);
                }
                members[gb].clear();
            }
        } else if (in.op != Op::Identity) {
            ensure_group(in.qubits[0]);
        }
        for (int j : succ[i])
            if (--indeg[j] == 0) ready.push_back(j);
    }
    if (static_cast<int>(order.size()) != n)
        throw std::runtime_error("plan_order: dependency cycle");
    return order;
}

}  // namespace engine_detail

class TrajectoryEngine {
  public:
    TrajectoryEngine(const Circuit& c, const NoiseProfile& noise, std::vector<int> order)
        : c_(&c), noise_(&noise), order_(std::move(order)) {
        reset_state();
    }

    struct Snapshot {
        std::vector<std::vector<int>> factor_qubits;
        std::vector<StateVector> factor_states;
        std::vector<int> q_factor, q_pos;
        std::vector<std::uint8_t> parked;
    };

    void reset_state() {
        factors_.clear();
        free_.clear();
        q_factor_.assign(c_->num_qubits, -1);
        q_pos_.assign(c_->num_qubits, 0);
        parked_.assign(c_->num_qubits, 0);
    }

    Snapshot snapshot() const {
        Snapshot s;
        for (const auto& f : factors_) {
            s.factor_qubits.push_back(f.qubits);
            s.factor_states.push_back(f.sv);
        }
        s.q_factor = q_factor_;
        s.q_pos = q_pos_;
        s.parked = parked_;
        return s;
    }

    void restore(const Snapshot& s) {
        factors_.resize(s.factor_qubits.size());
        free_.clear();
        for (size_t i = 0; i < factors_.size(); ++i) {
            factors_[i].qubits = s.factor_qubits[i];
            factors_[i].sv = s.factor_states[i];
            if (factors_[i].qubits.empty()) free_.push_back(static_cast<int>(i));
        }
        q_factor_ = s.q_factor;
        q_pos_ = s.q_pos;
        parked_ = s.parked;
    }

    void execute_range(size_t from, size_t to, ShotRng* rng, ShotRecord* rec) {
        for (size_t i = from; i < to; ++i) step(c_->instructions[order_[i]], rng, rec);
    }

    size_t plan_size() const { return order_.size(); }

    // Index of the first stochastic instruction under a noiseless profile.
    size_t deterministic_prefix() const {
        for (size_t i = 0; i < order_.size(); ++i) {
            Op op = c_->instructions[order_[i]].op;
            if (op == Op::Measure || op == Op::Reset) return i;
        }
        return order_.size();
    }

  private:
    struct Factor {
        std::vector<int> qubits;  // global ids, position = local MSB-first index
        StateVector sv;
    };

    const Circuit* c_;
    const NoiseProfile* noise_;
    std::vector<int> order_;
    std::vector<Factor> factors_;
    std::vector<int> free_;
    std::vector<int> q_factor_, q_pos_;
    std::vector<std::uint8_t> parked_;

    int alloc_factor() {
        if (!free_.empty()) {
            int id = free_.back();
            free_.pop_back();
            return id;
        }
        factors_.emplace_back();
        return static_cast<int>(factors_.size() - 1);
    }

    int ensure_factor(int q) {
        if (q_factor_[q] >= 0) return q_factor_[q];
        int id = alloc_factor();
        auto& f = factors_[id];
        f.qubits = {q};
        f.sv.num_qubits = 1;
        f.sv.amp.assign(2, cd{0, 0});
        f.sv.amp[parked_[q]] = 1.0;
        q_factor_[q] = id;
        q_pos_[q] = 0;
        return id;
    }

    void merge(int fa, int fb) {
        auto& a = factors_[fa];
        auto& b = factors_[fb];
        const size_t da = a.sv.dim(), db = b.sv.dim();
        std::vector<cd> out(da * db);
        for (size_t ia = 0; ia < da; ++ia)
            for (size_t ib = 0; ib < db; ++ib) out[ia * db + ib] = a.sv.amp[ia] * b.sv.amp[ib];
        const int base = static_cast<int>(a.qubits.size());
        for (size_t p = 0; p < b.qubits.size(); ++p) {
            int q = b.qubits[p];
            q_factor_[q] = fa;
            q_pos_[q] = base + static_cast<int>(p);
        }
        a.qubits.insert(a.qubits.end(), b.qubits.begin(), b.qubits.end());
        a.sv.amp = std::move(out);
        a.sv.num_qubits += b.sv.num_qubits;
        b.qubits.clear();
        b.sv.amp.clear();
        b.sv.num_qubits = 0;
        free_.push_back(fb);
    }

    // Forces qubit q to |bit>, removes it from its factor and parks it.
    void collapse_and_park(int q, int bit) {
        const int fid = q_factor_[q];
        auto& f = factors_[fid];
        const int p = q_pos_[q];
        sv::force_qubit(f.sv, p, bit);
        const int sz = f.sv.num_qubits;
        const std::size_t st = sv::stride_of(sz, p);
        const std::size_t half = f.sv.dim() / 2;
        std::vector<cd> out(half);
        for (std::size_t j = 0; j < half; ++j) {
            const std::size_t high = j / st, low = j % st;
            out[j] = f.sv.amp[((high * 2 + static_cast<std::size_t>(bit)) * st) | low];
        }
        f.sv.amp = std::move(out);
        f.sv.num_qubits = sz - 1;
        f.qubits.erase(f.qubits.begin() + p);
        for (size_t i = static_cast<size_t>(p); i < f.qubits.size(); ++i) q_pos_[f.qubits[i]] = static_cast<int>(i);
        q_factor_[q] = -1;
        parked_[q] = static_cast<std::uint8_t>(bit);
        if (f.qubits.empty()) free_.push_back(fid);
    }

    void thermal(int q, long long duration, ShotRng* rng) {
        const double p_rel = noise_->relax_probability(duration);
        if (p_rel <= 0.0) return;
        const double u = rng->uniform();
        int target;
        if (u < p_rel * (1.0 - noise_->excited_population))
            target = 0;
        else if (u < p_rel)
            target = 1;
        else
            return;
        if (q_factor_[q] < 0)
            parked_[q] = static_cast<std::uint8_t>(target);
        else
            collapse_and_park(q, target);
    }

    void gate_noise(const Instruction& in, ShotRng* rng) {
        if (in.op == Op::Identity || in.padding) return;
        if (noise_->pauli_prob_1q == 0.0 && noise_->depol_lambda_1q == 0.0) return;
        // Qubits were materialized by the ideal action just before.
        const int fid = q_factor_[in.qubits[0]];
        int pos[2] = {q_pos_[in.qubits[0]], in.num_qubits == 2 ? q_pos_[in.qubits[1]] : 0};
        apply_gate_noise_local(factors_[fid].sv, pos, in.num_qubits, in.op == Op::Cnot, *noise_,
                               *rng);
    }

    int born_sample(int q, ShotRng* rng) {
        if (q_factor_[q] < 0) return parked_[q];
        const double p1 = sv::prob_one(factors_[q_factor_[q]].sv, q_pos_[q]);
        const int raw = rng->uniform() < p1 ? 1 : 0;
        collapse_and_park(q, raw);
        return raw;
    }

    void step(const Instruction& in, ShotRng* rng, ShotRecord* rec) {
        switch (in.op) {
            case Op::Measure: {
                const int q = in.qubits[0];
                const int raw = born_sample(q, rng);
                int recorded = raw;
                if (noise_->readout_flip_prob > 0.0 && rng->uniform() < noise_->readout_flip_prob)
                    recorded = 1 - recorded;
                rec->write(in.cbit, recorded);
                thermal(q, in.duration, rng);
                return;
            }
            case Op::Reset: {
                const int q = in.qubits[0];
                born_sample(q, rng);  // unrecorded; conditional X folds into parking at 0
                parked_[q] = 0;
                thermal(q, in.duration, rng);
                return;
            }
            case Op::Identity: {
                thermal(in.qubits[0], in.duration, rng);
                return;
            }
            case Op::Cnot: {
                const int qc = in.qubits[0], qt = in.qubits[1];
                int fc = ensure_factor(qc), ft = ensure_factor(qt);
                if (fc != ft) merge(fc, ft);
                auto& f = factors_[q_factor_[qc]];
                sv::apply_cnot(f.sv, q_pos_[qc], q_pos_[qt]);
                gate_noise(in, rng);
                thermal(qc, in.duration, rng);
                thermal(qt, in.duration, rng);
                return;
            }
            default: {  // single-qubit unitary
                const int q = in.qubits[0];
                auto& f = factors_[ensure_factor(q)];
                sv::apply_single(f.sv, q_pos_[q], single_qubit_matrix(in.op, in.phi, in.lambda));
                gate_noise(in, rng);
                thermal(q, in.duration, rng);
                return;
            }
        }
    }
};

namespace engine_detail {

inline std::string outcome_string(const ShotRecord& rec, const std::vector<int>& recorded) {
    std::string s(recorded.size(), '0');
    for (size_t i = 0; i < recorded.size(); ++i) {
        const auto b = rec.bits[recorded[i]];
        if (b < 0) throw std::runtime_error("run: recorded classical bit never written");
        s[i] = static_cast<char>('0' + b);
    }
    return s;
}

}  // namespace engine_detail

// Executes `shots` trajectories and aggregates recorded (non-discarded) bits.
inline Counts run(const Circuit& c, const NoiseProfile& noise, std::uint64_t shots,
                  std::uint64_t master_seed, const RunOptions& opts = {}) {
    noise.validate();
    engine_detail::validate_runnable(c);
    const auto recorded = engine_detail::recorded_cbits(c);

    std::vector<int> order;
    if (opts.literal_order) {
        order.resize(c.instructions.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    } else {
        order = engine_detail::plan_order(c);
    }

    TrajectoryEngine prototype(c, noise, order);
    size_t cut = 0;
    std::unique_ptr<TrajectoryEngine::Snapshot> snap;
    if (noise.is_noiseless()) {
        cut = prototype.deterministic_prefix();
        if (cut > 0) {
            prototype.execute_range(0, cut, nullptr, nullptr);
            snap = std::make_unique<TrajectoryEngine::Snapshot>(prototype.snapshot());
        }
    }

    auto worker = [&](std::uint64_t lo, std::uint64_t hi, Counts& out) {
        TrajectoryEngine eng(c, noise, order);
        for (std::uint64_t i = lo; i < hi; ++i) {
            if (snap)
                eng.restore(*snap);
            else
                eng.reset_state();
            ShotRng rng(master_seed, i);
            ShotRecord rec(c.num_cbits);
            rec.seed = derive_seed(master_seed, i);
            eng.execute_range(cut, eng.plan_size(), &rng, &rec);
            out.add(engine_detail::outcome_string(rec, recorded));
        }
    };

    const int threads = std::max(1, opts.threads);
    if (threads == 1 || shots < 2) {
        Counts out;
        worker(0, shots, out);
        return out;
    }
    std::vector<Counts> partial(threads);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (shots + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::uint64_t lo = t * chunk, hi = std::min(shots, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(worker, lo, hi, std::ref(partial[t]));
    }
    for (auto& th : pool) th.join();
    Counts out;
    for (const auto& p : partial) out.merge(p);
    return out;
}

// One deterministic trajectory; (master_seed, shot_index) fully determine it.
inline ShotRecord run_single_shot(const Circuit& c, const NoiseProfile& noise,
                                  std::uint64_t master_seed, std::uint64_t shot_index,
                                  const RunOptions& opts = {}) {
    noise.validate();
    engine_detail::validate_runnable(c);
    std::vector<int> order;
    if (opts.literal_order) {
        order.resize(c.instructions.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    } else {
        order = engine_detail::plan_order(c);
    }
    TrajectoryEngine eng(c, noise, order);
    ShotRng rng(master_seed, shot_index);
    ShotRecord rec(c.num_cbits);
    rec.seed = derive_seed(master_seed, shot_index);
    eng.execute_range(0, eng.plan_size(), &rng, &rec);
    return rec;
}

}  // namespace entspec
