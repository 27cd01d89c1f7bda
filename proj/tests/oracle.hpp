#pragma once

// Test-side oracles, independent of the library's simulation path: a dense
// matrix toolbox for small unitaries and an exact noiseless outcome
// distribution computed by enumerating measurement/reset branches.

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "entspec/circuit.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat = std::vector<std::vector<cd>>;

inline Mat identity(int dim) {
    Mat m(dim, std::vector<cd>(dim, cd{0, 0}));
    for (int i = 0; i < dim; ++i) m[i][i] = 1.0;
    return m;
}

inline Mat matmul(const Mat& a, const Mat& b) {
    const int n = static_cast<int>(a.size());
    Mat out(n, std::vector<cd>(n, cd{0, 0}));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

// Gate matrices re-derived from their defining formulas.
inline Mat gate2(entspec::Op op, double phi, double lambda) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (op) {
        case entspec::Op::U1: return {{1.0, 0.0}, {0.0, std::polar(1.0, lambda)}};
        case entspec::Op::U2:
            return {{cd{s, 0}, -std::polar(s, lambda)},
                    {std::polar(s, phi), std::polar(s, phi + lambda)}};
        case entspec::Op::H: return {{s, s}, {s, -s}};
        case entspec::Op::T: return {{1.0, 0.0}, {0.0, std::polar(1.0, M_PI / 4)}};
        case entspec::Op::Tdg: return {{1.0, 0.0}, {0.0, std::polar(1.0, -M_PI / 4)}};
        case entspec::Op::Identity: return identity(2);
        default: throw std::logic_error("gate2: not single-qubit");
    }
}

// Embeds an instruction into the full 2^n unitary by acting on basis states.
// Qubit 0 is the most significant bit of the basis index.
inline Mat embed(const entspec::Instruction& in, int num_qubits) {
    const int dim = 1 << num_qubits;
    Mat m(dim, std::vector<cd>(dim, cd{0, 0}));
    if (in.op == entspec::Op::Cnot) {
        const int cb = num_qubits - 1 - in.qubits[0];
        const int tb = num_qubits - 1 - in.qubits[1];
        for (int col = 0; col < dim; ++col) {
            const int row = (col >> cb) & 1 ? col ^ (1 << tb) : col;
            m[row][col] = 1.0;
        }
        return m;
    }
    const Mat g = gate2(in.op, in.phi, in.lambda);
    const int qb = num_qubits - 1 - in.qubits[0];
    for (int col = 0; col < dim; ++col) {
        const int cbit = (col >> qb) & 1;
        for (int rbit = 0; rbit < 2; ++rbit) {
            const int row = (col & ~(1 << qb)) | (rbit << qb);
            m[row][col] += g[rbit][cbit];
        }
    }
    return m;
}

inline Mat compose(const std::vector<entspec::Instruction>& gates, int num_qubits) {
    Mat u = identity(1 << num_qubits);
    for (const auto& g : gates) u = matmul(embed(g, num_qubits), u);
    return u;
}

inline Mat cswap_matrix() {
    Mat m(8, std::vector<cd>(8, cd{0, 0}));
    for (int c = 0; c < 2; ++c)
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                const int col = (c << 2) | (x << 1) | y;
                const int row = c ? (c << 2) | (y << 1) | x : col;
                m[row][col] = 1.0;
            }
    return m;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
    double d = 0;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
    return d;
}

// Exact outcome distribution of a noiseless circuit over its recorded bits,
// by branch enumeration at every measurement and reset.
inline std::map<std::string, double> exact_distribution(const entspec::Circuit& c) {
    struct Branch {
        std::vector<cd> amp;
        double prob;
        std::map<int, char> bits;
    };
    const int n = c.num_qubits;
    const int dim = 1 << n;
    std::vector<Branch> branches;
    Branch init;
    init.amp.assign(dim, cd{0, 0});
    init.amp[0] = 1.0;
    init.prob = 1.0;
    branches.push_back(init);

    auto apply_unitary = [&](Branch& b, const entspec::Instruction& in) {
        if (in.op == entspec::Op::Identity) return;
        if (in.op == entspec::Op::Cnot) {
            const int cb = n - 1 - in.qubits[0], tb = n - 1 - in.qubits[1];
            std::vector<cd> out(dim);
            for (int i = 0; i < dim; ++i)
                out[(i >> cb) & 1 ? i ^ (1 << tb) : i] = b.amp[i];
            b.amp = std::move(out);
            return;
        }
        const Mat g = gate2(in.op, in.phi, in.lambda);
        const int qb = n - 1 - in.qubits[0];
        for (int i = 0; i < dim; ++i) {
            if ((i >> qb) & 1) continue;
            const cd a0 = b.amp[i], a1 = b.amp[i | (1 << qb)];
            b.amp[i] = g[0][0] * a0 + g[0][1] * a1;
            b.amp[i | (1 << qb)] = g[1][0] * a0 + g[1][1] * a1;
        }
    };

    for (const auto& in : c.instructions) {
        if (entspec::op_is_unitary(in.op)) {
            for (auto& b : branches) apply_unitary(b, in);
            continue;
        }
        const int qb = n - 1 - in.qubits[0];
        std::vector<Branch> next;
        for (auto& b : branches) {
            double p1 = 0;
            for (int i = 0; i < dim; ++i)
                if ((i >> qb) & 1) p1 += std::norm(b.amp[i]);
            for (int outcome = 0; outcome < 2; ++outcome) {
                const double p = outcome ? p1 : 1.0 - p1;
                if (b.prob * p < 1e-15) continue;
                Branch nb;
                nb.prob = b.prob * p;
                nb.bits = b.bits;
                nb.amp.assign(dim, cd{0, 0});
                const double scale = 1.0 / std::sqrt(p);
                for (int i = 0; i < dim; ++i)
                    if (((i >> qb) & 1) == outcome) nb.amp[i] = b.amp[i] * scale;
                if (in.op == entspec::Op::Measure) {
                    if (!in.discard) nb.bits[in.cbit] = static_cast<char>('0' + outcome);
                } else {  // Reset: conditional X back to |0>
                    if (outcome == 1) {
                        std::vector<cd> flipped(dim);
                        for (int i = 0; i < dim; ++i) flipped[i ^ (1 << qb)] = nb.amp[i];
                        nb.amp = std::move(flipped);
                    }
                }
                next.push_back(std::move(nb));
            }
        }
        branches = std::move(next);
    }

    std::map<std::string, double> dist;
    for (const auto& b : branches) {
        std::string key;
        for (const auto& [bit, ch] : b.bits) key += ch;  // ascending cbit order
        dist[key] += b.prob;
    }
    return dist;
}

}  // namespace oracle
