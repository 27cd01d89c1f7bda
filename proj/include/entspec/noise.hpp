#pragma once

// Stochastic-error parameters: thermal relaxation, per-gate Pauli and
// depolarizing channels, readout misrecording, plus the gate-duration table.
//
// T1 == T2 is the only simulated regime (no separate dephasing branch).
// A T1 of zero encodes "thermal noise disabled" (the T1 -> infinity limit).

#include <cmath>
#include <stdexcept>
#include <string>

#include "entspec/gates.hpp"
#include "json.hpp"

namespace entspec {

struct NoiseProfile {
    double readout_flip_prob = 0.0;
    double t1 = 0.0;  // timesteps; 0 disables thermal noise
    double t2 = 0.0;  // kept equal to t1
    double excited_population = 0.0;  // T_pop
    double pauli_prob_1q = 0.0;       // per-axis X/Y/Z probability on 1q gates
    double depol_lambda_1q = 0.0;     // depolarizing lambda on 1q gates
    double cnot_error_multiplier = 1.0;
    DurationTable durations;

    bool thermal_enabled() const { return t1 > 0.0; }

    bool is_noiseless() const {
        return readout_flip_prob == 0.0 && !thermal_enabled() && pauli_prob_1q == 0.0 &&
               depol_lambda_1q == 0.0;
    }

    double relax_probability(long long duration) const {
        if (!thermal_enabled() || duration <= 0) return 0.0;
        return 1.0 - std::exp(-static_cast<double>(duration) / t1);
    }

    void validate() const {
        durations.validate();
        auto prob = [](double p, const char* name) {
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument(std::string("NoiseProfile: ") + name + " outside [0,1]");
        };
        prob(readout_flip_prob, "readout_flip_prob");
        prob(excited_population, "excited_population");
        prob(pauli_prob_1q, "pauli_prob_1q");
        prob(depol_lambda_1q, "depol_lambda_1q");
        if (t1 < 0.0 || t2 < 0.0) throw std::invalid_argument("NoiseProfile: negative T1/T2");
        if (t1 != t2) throw std::invalid_argument("NoiseProfile: only T1 == T2 is supported");
        if (cnot_error_multiplier < 0.0)
            throw std::invalid_argument("NoiseProfile: negative cnot_error_multiplier");
        if (3.0 * pauli_prob_1q * cnot_error_multiplier > 1.0 ||
            depol_lambda_1q * cnot_error_multiplier > 1.0)
            throw std::invalid_argument("NoiseProfile: combined per-gate error probability exceeds 1");
    }
};

inline NoiseProfile noiseless_profile() { return NoiseProfile{}; }

inline NoiseProfile paper_main_profile() {
    NoiseProfile p;
    p.readout_flip_prob = 0.02;
    p.t1 = 2000.0;
    p.t2 = 2000.0;
    p.excited_population = 1e-7;
    p.pauli_prob_1q = 0.001;
    p.depol_lambda_1q = 0.001;
    p.cnot_error_multiplier = 5.0;
    return p;
}

// Same as paper_main with both gate-noise parameters divided by ten.
inline NoiseProfile paper_reduced_profile() {
    NoiseProfile p = paper_main_profile();
    p.pauli_prob_1q /= 10.0;
    p.depol_lambda_1q /= 10.0;
    return p;
}

inline NoiseProfile noise_preset(const std::string& name) {
    if (name == "noiseless") return noiseless_profile();
    if (name == "paper-main") return paper_main_profile();
    if (name == "paper-reduced") return paper_reduced_profile();
    throw std::invalid_argument("unknown noise preset '" + name + "'");
}

inline NoiseProfile noise_from_json(const nlohmann::json& j) {
    NoiseProfile p;
    p.readout_flip_prob = j.value("readout_flip_prob", 0.0);
    p.t1 = j.value("t1", 0.0);
    p.t2 = j.value("t2", p.t1);
    p.excited_population = j.value("excited_population", 0.0);
    p.pauli_prob_1q = j.value("pauli_prob_1q", 0.0);
    p.depol_lambda_1q = j.value("depol_lambda_1q", 0.0);
    p.cnot_error_multiplier = j.value("cnot_error_multiplier", 1.0);
    if (j.contains("durations")) {
        const auto& d = j.at("durations");
        p.durations.single_qubit = d.value("single_qubit", 1);
        p.durations.cnot = d.value("cnot", 5);
        p.durations.measure = d.value("measure", 3);
        p.durations.reset = d.value("reset", 2);
    }
    p.validate();
    return p;
}

}  // namespace entspec
