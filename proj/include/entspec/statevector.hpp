#pragma once

// Dense statevector and the per-instruction stochastic-trajectory channels.
//
// Basis convention: qubit 0 is the most significant bit of the basis index.
// All channel samplers take local qubit indices so the same code runs on a
// full register or on a factor of one (see engine.hpp).

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "entspec/circuit.hpp"
#include "entspec/noise.hpp"
#include "entspec/rng.hpp"

namespace entspec {

struct StateVector {
    int num_qubits = 0;
    std::vector<cd> amp;

    StateVector() = default;
    explicit StateVector(int nq) : num_qubits(nq), amp(std::size_t{1} << nq, cd{0, 0}) {
        amp[0] = 1.0;
    }

    std::size_t dim() const { return amp.size(); }

    double norm2() const {
        double s = 0;
        for (const auto& a : amp) s += std::norm(a);
        return s;
    }

    void renormalize() {
        double n = std::sqrt(norm2());
        if (n <= 0) throw std::runtime_error("StateVector: zero norm");
        for (auto& a : amp) a /= n;
    }
};

namespace sv {

// Stride of qubit q under the MSB-first convention.
inline std::size_t stride_of(int num_qubits, int q) {
    return std::size_t{1} << (num_qubits - 1 - q);
}

inline void apply_single(StateVector& s, int q, const std::array<cd, 4>& m) {
    const std::size_t st = stride_of(s.num_qubits, q);
    const std::size_t n = s.dim();
    for (std::size_t base = 0; base < n; base += 2 * st) {
        for (std::size_t i = base; i < base + st; ++i) {
            cd a0 = s.amp[i], a1 = s.amp[i + st];
            s.amp[i] = m[0] * a0 + m[1] * a1;
            s.amp[i + st] = m[2] * a0 + m[3] * a1;
        }
    }
}

inline void apply_cnot(StateVector& s, int control, int target) {
    const std::size_t sc = stride_of(s.num_qubits, control);
    const std::size_t st = stride_of(s.num_qubits, target);
    const std::size_t n = s.dim();
    for (std::size_t i = 0; i < n; ++i) {
        if ((i & sc) && !(i & st)) std::swap(s.amp[i], s.amp[i | st]);
    }
}

inline void apply_x(StateVector& s, int q) {
    const std::size_t st = stride_of(s.num_qubits, q);
    for (std::size_t i = 0; i < s.dim(); ++i)
        if (!(i & st)) std::swap(s.amp[i], s.amp[i | st]);
}

inline void apply_y(StateVector& s, int q) {
    const std::size_t st = stride_of(s.num_qubits, q);
    const cd im{0, 1};
    for (std::size_t i = 0; i < s.dim(); ++i) {
        if (!(i & st)) {
            cd a0 = s.amp[i], a1 = s.amp[i | st];
            s.amp[i] = -im * a1;
            s.amp[i | st] = im * a0;
        }
    }
}

inline void apply_z(StateVector& s, int q) {
    const std::size_t st = stride_of(s.num_qubits, q);
    for (std::size_t i = 0; i < s.dim(); ++i)
        if (i & st) s.amp[i] = -s.amp[i];
}

// index 1 = X, 2 = Y, 3 = Z
inline void apply_pauli(StateVector& s, int q, int pauli) {
    switch (pauli) {
        case 1: apply_x(s, q); break;
        case 2: apply_y(s, q); break;
        case 3: apply_z(s, q); break;
        default: break;
    }
}

inline double prob_one(const StateVector& s, int q) {
    const std::size_t st = stride_of(s.num_qubits, q);
    double p = 0;
    for (std::size_t i = 0; i < s.dim(); ++i)
        if (i & st) p += std::norm(s.amp[i]);
    return p;
}

// Probability mass of the |bit> plane, summed directly so that an exactly
// empty subspace reads as exactly zero (no cancellation against the norm).
inline double prob_of(const StateVector& s, int q, int bit) {
    const std::size_t st = stride_of(s.num_qubits, q);
    double p = 0;
    for (std::size_t i = 0; i < s.dim(); ++i)
        if (((i & st) != 0) == (bit != 0)) p += std::norm(s.amp[i]);
    return p;
}

// Zeroes the branch where qubit q != bit, then renormalizes. Falls back to a
// deterministic flip when the kept branch carries (numerically) no weight.
inline void force_qubit(StateVector& s, int q, int bit) {
    const std::size_t st = stride_of(s.num_qubits, q);
    const double keep = prob_of(s, q, bit);
    if (keep < 1e-15) {
        apply_x(s, q);
        return;
    }
    for (std::size_t i = 0; i < s.dim(); ++i) {
        bool one = (i & st) != 0;
        if (one != (bit != 0)) s.amp[i] = 0;
    }
    s.renormalize();
}

}  // namespace sv

// Ideal unitary action of an instruction.
inline void apply_gate(StateVector& s, const Instruction& in) {
    if (!op_is_unitary(in.op)) throw std::invalid_argument("apply_gate: non-unitary instruction");
    if (in.op == Op::Cnot) {
        sv::apply_cnot(s, in.qubits[0], in.qubits[1]);
    } else if (in.op != Op::Identity) {
        sv::apply_single(s, in.qubits[0], single_qubit_matrix(in.op, in.phi, in.lambda));
    }
}

// Thermal relaxation for `duration` timesteps on one qubit: with probability
// p_rel (1 - T_pop) the qubit is forced to |0>, with p_rel T_pop to |1>,
// otherwise left unchanged. No dephasing branch since T1 == T2.
inline void apply_thermal(StateVector& s, int q, long long duration, const NoiseProfile& noise,
                          ShotRng& rng) {
    const double p_rel = noise.relax_probability(duration);
    if (p_rel <= 0.0) return;
    const double u = rng.uniform();
    if (u < p_rel * (1.0 - noise.excited_population)) {
        sv::force_qubit(s, q, 0);
    } else if (u < p_rel) {
        sv::force_qubit(s, q, 1);
    }
}

// Gate-noise channels after a non-padding unitary, in order: the per-qubit
// exclusive X/Y/Z Pauli channel, then the m-qubit depolarizing channel
// unravelled as a uniformly random non-identity Pauli firing with
// probability lambda (4^m - 1) / 4^m.
inline void apply_gate_noise_local(StateVector& s, const int* qubits, int m, bool is_cnot,
                                   const NoiseProfile& noise, ShotRng& rng) {
    const double mult = is_cnot ? noise.cnot_error_multiplier : 1.0;
    const double p_axis = noise.pauli_prob_1q * mult;
    if (p_axis > 0.0) {
        for (int i = 0; i < m; ++i) {
            const double u = rng.uniform();
            if (u < 3.0 * p_axis) sv::apply_pauli(s, qubits[i], 1 + static_cast<int>(u / p_axis));
        }
    }
    const double lambda = noise.depol_lambda_1q * mult;
    if (lambda > 0.0) {
        const std::uint64_t npauli = (std::uint64_t{1} << (2 * m)) - 1;  // 4^m - 1
        const double fire = lambda * static_cast<double>(npauli) / static_cast<double>(npauli + 1);
        if (rng.uniform() < fire) {
            const std::uint64_t idx = 1 + rng.below(npauli);  // skip identity
            for (int i = 0; i < m; ++i) {
                int p = static_cast<int>((idx >> (2 * i)) & 3u);
                sv::apply_pauli(s, qubits[i], p);
            }
        }
    }
}

inline void apply_gate_noise(StateVector& s, const Instruction& in, const NoiseProfile& noise,
                             ShotRng& rng) {
    if (!op_is_unitary(in.op) || in.op == Op::Identity || in.padding) return;
    int qs[2] = {in.qubits[0], in.qubits[1]};
    apply_gate_noise_local(s, qs, in.num_qubits, in.op == Op::Cnot, noise, rng);
}

struct MeasureOutcome {
    int raw_bit;
    int recorded_bit;
};

// Born-rule measurement with collapse; the recorded bit is flipped with the
// readout probability while the post-measurement state follows the raw bit.
inline MeasureOutcome measure(StateVector& s, int q, const NoiseProfile& noise, ShotRng& rng) {
    const double p1 = sv::prob_one(s, q);
    const int raw = rng.uniform() < p1 ? 1 : 0;
    sv::force_qubit(s, q, raw);
    int recorded = raw;
    if (noise.readout_flip_prob > 0.0 && rng.uniform() < noise.readout_flip_prob)
        recorded = 1 - recorded;
    return {raw, recorded};
}

// Unrecorded Born-rule measurement followed by a conditional X.
inline void reset(StateVector& s, int q, ShotRng& rng) {
    const double p1 = sv::prob_one(s, q);
    const int raw = rng.uniform() < p1 ? 1 : 0;
    sv::force_qubit(s, q, raw);
    if (raw == 1) sv::apply_x(s, q);
}

}  // namespace entspec
