#pragma once

// Gate vocabulary and timing table. The native set is I, U1, U2, CNOT plus
// the derived H, T, Tdg, with Measure and Reset as non-unitary operations.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace entspec {

using cd = std::complex<double>;

enum class Op {
    U1,        // diag(1, e^{i lambda})
    U2,        // (1/sqrt2) [[1, -e^{i lambda}], [e^{i phi}, e^{i(phi+lambda)}]]
    H,
    T,
    Tdg,
    Cnot,      // control first
    Identity,
    Measure,
    Reset,
};

inline bool op_is_unitary(Op op) {
    return op != Op::Measure && op != Op::Reset;
}

inline bool op_is_two_qubit(Op op) { return op == Op::Cnot; }

inline const char* op_mnemonic(Op op) {
    switch (op) {
        case Op::U1: return "u1";
        case Op::U2: return "u2";
        case Op::H: return "h";
        case Op::T: return "t";
        case Op::Tdg: return "tdg";
        case Op::Cnot: return "cx";
        case Op::Identity: return "id";
        case Op::Measure: return "measure";
        case Op::Reset: return "reset";
    }
    return "?";
}

// 2x2 unitary for a single-qubit op, row-major {m00, m01, m10, m11}.
inline std::array<cd, 4> single_qubit_matrix(Op op, double phi, double lambda) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (op) {
        case Op::U1:
            return {cd{1, 0}, cd{0, 0}, cd{0, 0}, std::polar(1.0, lambda)};
        case Op::U2:
            return {cd{s, 0}, -std::polar(s, lambda), std::polar(s, phi),
                    std::polar(s, phi + lambda)};
        case Op::H:
            return {cd{s, 0}, cd{s, 0}, cd{s, 0}, cd{-s, 0}};
        case Op::T:
            return {cd{1, 0}, cd{0, 0}, cd{0, 0}, std::polar(1.0, M_PI / 4)};
        case Op::Tdg:
            return {cd{1, 0}, cd{0, 0}, cd{0, 0}, std::polar(1.0, -M_PI / 4)};
        case Op::Identity:
            return {cd{1, 0}, cd{0, 0}, cd{0, 0}, cd{1, 0}};
        default:
            throw std::invalid_argument("single_qubit_matrix: not a single-qubit unitary");
    }
}

// Durations in integer timesteps. Defaults follow the convention that a
// single-qubit gate takes one timestep, a CNOT five, a measurement three and
// a reset two.
struct DurationTable {
    long long single_qubit = 1;
    long long cnot = 5;
    long long measure = 3;
    long long reset = 2;

    void validate() const {
        if (single_qubit <= 0 || cnot <= 0 || measure <= 0 || reset <= 0)
            throw std::invalid_argument("DurationTable: durations must be positive");
    }

    long long of(Op op) const {
        switch (op) {
            case Op::Cnot: return cnot;
            case Op::Measure: return measure;
            case Op::Reset: return reset;
            default: return single_qubit;
        }
    }
};

}  // namespace entspec
