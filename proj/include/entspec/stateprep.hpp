#pragma once

// The theta-parameterized two-qubit state-preparation family and its exact
// reduced-state oracle. Logical prep qubits are 0..k-1 for subsystem A and
// k..2k-1 for subsystem B; builders remap them onto physical registers.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "entspec/circuit.hpp"
#include "entspec/statevector.hpp"

namespace entspec {

struct StatePrep {
    int k = 1;
    std::vector<Instruction> gates;  // over logical qubits [0, 2k)
};

// H on A, U2(theta - pi/2, pi/2) on B, then CNOT with control A.
inline StatePrep theta_prep(double theta) {
    if (theta < 0.0 || theta > M_PI)
        throw std::invalid_argument("theta_prep: theta outside [0, pi]");
    StatePrep p;
    p.k = 1;
    p.gates.push_back(make1(Op::H, 0));
    p.gates.push_back(make1(Op::U2, 1, theta - M_PI / 2, M_PI / 2));
    p.gates.push_back(make_cnot(0, 1));
    return p;
}

// Product of k independent theta pairs; the default hook for k > 1.
inline StatePrep replicated_theta_prep(int k, double theta) {
    StatePrep p;
    p.k = k;
    for (int j = 0; j < k; ++j) {
        p.gates.push_back(make1(Op::H, j));
        p.gates.push_back(make1(Op::U2, k + j, theta - M_PI / 2, M_PI / 2));
        p.gates.push_back(make_cnot(j, k + j));
    }
    return p;
}

// Scheduled makespan of one prep in isolation (T_sp).
inline long long prep_makespan(const StatePrep& prep, const DurationTable& durations) {
    return schedule_asap(prep.gates, durations, 2 * prep.k).makespan();
}

// Exact Tr(rho_A^n) for the k=1 family: dense 2-qubit state, partial trace
// over B, eigen-decomposition of the 2x2 reduced matrix.
inline double trace_oracle(double theta, int n) {
    if (n < 1) throw std::invalid_argument("trace_oracle: n must be >= 1");
    StateVector s(2);
    for (const auto& g : theta_prep(theta).gates) apply_gate(s, g);
    // rho_A[a][a'] = sum_b psi[ab] conj(psi[a'b]); qubit 0 is A (most significant).
    cd r00{0, 0}, r01{0, 0}, r11{0, 0};
    for (int b = 0; b < 2; ++b) {
        r00 += s.amp[b] * std::conj(s.amp[b]);
        r11 += s.amp[2 + b] * std::conj(s.amp[2 + b]);
        r01 += s.amp[b] * std::conj(s.amp[2 + b]);
    }
    const double half_tr = 0.5 * (r00.real() + r11.real());
    const double det = r00.real() * r11.real() - std::norm(r01);
    const double disc = std::sqrt(std::max(0.0, half_tr * half_tr - det));
    const double lam1 = half_tr + disc, lam2 = half_tr - disc;
    return std::pow(lam1, n) + std::pow(std::max(0.0, lam2), n);
}

// Theta values whose oracle traces are evenly spaced over [2^{1-n}, 1],
// found by bisection on the monotone segment theta in [0, pi/2].
inline std::vector<double> thetas_for_even_traces(int n, int count) {
    if (count < 2) throw std::invalid_argument("thetas_for_even_traces: count must be >= 2");
    const double lo_trace = std::pow(2.0, 1 - n), hi_trace = 1.0;
    std::vector<double> thetas;
    thetas.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double target = lo_trace + (hi_trace - lo_trace) * i / (count - 1);
        double lo = 0.0, hi = M_PI / 2;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double t = trace_oracle(mid, n);
            if (std::abs(t - target) <= 1e-9) {
                lo = hi = mid;
                break;
            }
            (t < target ? lo : hi) = mid;
        }
        thetas.push_back(0.5 * (lo + hi));
    }
    return thetas;
}

}  // namespace entspec
