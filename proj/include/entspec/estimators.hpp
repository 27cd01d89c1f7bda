#pragma once

// Classical post-processing: the ancilla statistic p0 - p1 for the
// Hadamard-test family, the Bell-basis parity sums for the two-copy-test
// family, Hoeffding 68% confidence intervals, and eigenvalue reconstruction
// from traces of powers via the Newton-Girard method.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "entspec/builders.hpp"
#include "entspec/counts.hpp"

namespace entspec {

struct SpectroscopyEstimate {
    double value = 0;      // estimate of Tr(rho_A^n), clamped to [0, 1]
    double ci_low = 0;     // 68% confidence interval endpoints in [0, 1]
    double ci_high = 0;
    double raw = 0;        // pre-transform statistic
    double halfwidth = 0;  // max one-sided interval width

    void finish_interval() { halfwidth = std::max(value - ci_low, ci_high - value); }
};

// Hoeffding 68% additive error for a +-1 sample mean: 2 sqrt(-ln(0.16)/(2S)).
inline double hoeffding_halfwidth(std::uint64_t shots) {
    if (shots == 0) throw std::invalid_argument("hoeffding_halfwidth: zero shots");
    return 2.0 * std::sqrt(-std::log(0.16) / (2.0 * static_cast<double>(shots)));
}

namespace est_detail {

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace est_detail

// Tr(rho_A^n) from the single ancilla bit: value = clamp(p0 - p1, 0, 1).
inline SpectroscopyEstimate estimate_ht(const Counts& counts, int ancilla_position = 0) {
    if (counts.total_shots == 0) throw std::invalid_argument("estimate_ht: empty counts");
    double sum = 0;
    for (const auto& [outcome, c] : counts.counts) {
        if (ancilla_position >= static_cast<int>(outcome.size()))
            throw std::invalid_argument("estimate_ht: outcome narrower than ancilla position");
        sum += (outcome[ancilla_position] == '0' ? 1.0 : -1.0) * static_cast<double>(c);
    }
    SpectroscopyEstimate e;
    e.raw = sum / static_cast<double>(counts.total_shots);
    e.value = est_detail::clamp01(e.raw);
    const double h = hoeffding_halfwidth(counts.total_shots);
    e.ci_low = est_detail::clamp01(e.raw - h);
    e.ci_high = est_detail::clamp01(e.raw + h);
    e.finish_interval();
    return e;
}

// Bell-basis overlap of two m-qubit states: sum over outcomes of
// (-1)^{r . s} p_{r,s}, computed as a per-shot parity average. The first m
// string positions hold r, the next m hold s.
inline double estimate_bell_overlap(const Counts& counts, int m) {
    if (counts.total_shots == 0) throw std::invalid_argument("estimate_bell_overlap: empty counts");
    double sum = 0;
    for (const auto& [outcome, c] : counts.counts) {
        if (static_cast<int>(outcome.size()) != 2 * m)
            throw std::invalid_argument("estimate_bell_overlap: bit-count mismatch");
        int parity = 0;
        for (int i = 0; i < m; ++i)
            parity ^= (outcome[i] == '1' && outcome[m + i] == '1') ? 1 : 0;
        sum += (parity ? -1.0 : 1.0) * static_cast<double>(c);
    }
    return sum / static_cast<double>(counts.total_shots);
}

// Tr(rho_A^n) from the 4kn Bell-measurement bits: the mean parity
// (-1)^{sum_l A_l . A'_{l-1} + B_l . B'_l} estimates Tr(rho_A^n)^2; the value
// is the square root of its nonnegative part, with the Hoeffding interval
// propagated through the square root.
inline SpectroscopyEstimate estimate_tct(const Counts& counts, int n, int k,
                                         const std::vector<TctBitInfo>& bit_map) {
    if (counts.total_shots == 0) throw std::invalid_argument("estimate_tct: empty counts");
    if (static_cast<int>(bit_map.size()) != 4 * k * n)
        throw std::invalid_argument("estimate_tct: bit map size mismatch");
    std::vector<int> position(4 * k * n, -1);  // (copy, primed, sub, pos) -> string index
    auto slot = [&](int copy, bool primed, bool sub_a, int pos) {
        return ((primed ? n : 0) + copy - 1) * 2 * k + (sub_a ? 0 : k) + pos;
    };
    for (const auto& b : bit_map) position[slot(b.copy, b.primed, b.subsystem_a, b.pos)] = b.cbit;
    std::vector<std::pair<int, int>> pairs;
    for (int l = 1; l <= n; ++l) {
        const int prev = l == 1 ? n : l - 1;  // A_l pairs with A'_{l-1 mod n}
        for (int q = 0; q < k; ++q) {
            pairs.push_back({position[slot(l, false, true, q)], position[slot(prev, true, true, q)]});
            pairs.push_back({position[slot(l, false, false, q)], position[slot(l, true, false, q)]});
        }
    }
    for (const auto& [x, y] : pairs)
        if (x < 0 || y < 0) throw std::invalid_argument("estimate_tct: incomplete bit map");

    double sum = 0;
    for (const auto& [outcome, c] : counts.counts) {
        if (outcome.size() != static_cast<size_t>(4 * k * n))
            throw std::invalid_argument("estimate_tct: bit map inconsistent with counts width");
        int parity = 0;
        for (const auto& [x, y] : pairs)
            parity ^= (outcome[x] == '1' && outcome[y] == '1') ? 1 : 0;
        sum += (parity ? -1.0 : 1.0) * static_cast<double>(c);
    }
    SpectroscopyEstimate e;
    e.raw = sum / static_cast<double>(counts.total_shots);
    e.value = std::sqrt(std::max(e.raw, 0.0));
    const double h = hoeffding_halfwidth(counts.total_shots);
    e.ci_low = std::sqrt(std::max(e.raw - h, 0.0));
    e.ci_high = std::min(1.0, std::sqrt(std::max(e.raw + h, 0.0)));
    e.finish_interval();
    return e;
}

inline SpectroscopyEstimate estimate_for(const EstimatorSpec& spec, const Counts& counts) {
    if (spec.family == EstimatorSpec::Family::HadamardAncilla)
        return estimate_ht(counts, spec.ancilla_cbit);
    return estimate_tct(counts, spec.n, spec.k, spec.bit_map);
}

// Newton-Girard reconstruction of the m largest eigenvalues from
// traces = {Tr(rho), Tr(rho^2), ..., Tr(rho^m)}. Power sums are converted to
// elementary symmetric polynomials, the degree-m characteristic polynomial is
// formed, and its roots are taken from companion-matrix eigenvalues with
// complex-pair artifacts projected to their real parts and clamped to [0, 1].
inline std::vector<double> newton_girard(const std::vector<double>& traces) {
    if (traces.empty()) throw std::invalid_argument("newton_girard: need at least Tr(rho)");
    if (std::abs(traces[0] - 1.0) > 1e-6)
        throw std::invalid_argument("newton_girard: Tr(rho) must be 1");
    const int m = static_cast<int>(traces.size());
    std::vector<double> e(m + 1, 0.0);
    e[0] = 1.0;
    for (int j = 1; j <= m; ++j) {
        double acc = 0.0;
        for (int i = 1; i <= j; ++i) acc += (i % 2 == 1 ? 1.0 : -1.0) * e[j - i] * traces[i - 1];
        e[j] = acc / j;
    }
    if (m == 1) return {est_detail::clamp01(traces[0])};

    // Characteristic polynomial x^m - e1 x^{m-1} + e2 x^{m-2} - ... as a
    // companion matrix: subdiagonal ones, last column -a_0..-a_{m-1} for
    // p(x) = x^m + a_{m-1} x^{m-1} + ... + a_0 with a_{m-j} = (-1)^j e_j.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    for (int row = 0; row < m; ++row) {
        const int j = m - row;  // coefficient index of x^{row}
        const double a = (j % 2 == 1 ? -1.0 : 1.0) * e[j];
        companion(row, m - 1) = -a;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    std::vector<double> roots;
    for (int i = 0; i < m; ++i) roots.push_back(est_detail::clamp01(solver.eigenvalues()[i].real()));
    std::sort(roots.rbegin(), roots.rend());
    return roots;
}

}  // namespace entspec
