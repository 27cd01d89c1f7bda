#pragma once

// A spectroscopy job ties an algorithm choice to (k, n, theta, shots, seed),
// builds the circuit, runs it and applies the matching estimator.

#include <optional>

#include "entspec/builders.hpp"
#include "entspec/engine.hpp"
#include "entspec/estimators.hpp"
#include "json.hpp"

namespace entspec {

struct SpectroscopyJob {
    Algorithm algorithm = Algorithm::HT;
    int k = 1;
    int n = 2;
    double theta = 0.0;
    std::optional<StatePrep> prep;  // required meaningfully for k > 1
    std::uint64_t shots = 100000;
    std::uint64_t master_seed = 0;

    void validate() const {
        if (n < 2) throw std::invalid_argument("SpectroscopyJob: n must be >= 2");
        if (k < 1) throw std::invalid_argument("SpectroscopyJob: k must be >= 1");
        if (theta < 0.0 || theta > M_PI)
            throw std::invalid_argument("SpectroscopyJob: theta outside [0, pi]");
        if (shots == 0) throw std::invalid_argument("SpectroscopyJob: shots must be positive");
    }

    StatePrep effective_prep() const {
        if (prep) return *prep;
        return k == 1 ? theta_prep(theta) : replicated_theta_prep(k, theta);
    }
};

inline BuiltCircuit build_job_circuit(const SpectroscopyJob& job, const DurationTable& durations) {
    job.validate();
    return build_algorithm(job.algorithm, job.n, job.k, job.effective_prep(), durations);
}

inline SpectroscopyEstimate run_job(const SpectroscopyJob& job, const NoiseProfile& noise,
                                    const RunOptions& opts = {}) {
    const BuiltCircuit built = build_job_circuit(job, noise.durations);
    const Counts counts = run(built.circuit, noise, job.shots, job.master_seed, opts);
    return estimate_for(built.estimator, counts);
}

inline nlohmann::json estimate_to_json(const SpectroscopyJob& job,
                                       const SpectroscopyEstimate& est) {
    nlohmann::json j;
    j["algorithm"] = algorithm_name(job.algorithm);
    j["k"] = job.k;
    j["n"] = job.n;
    j["theta"] = job.theta;
    j["shots"] = job.shots;
    j["value"] = est.value;
    j["ci_low"] = est.ci_low;
    j["ci_high"] = est.ci_high;
    j["raw"] = est.raw;
    return j;
}

}  // namespace entspec
