#pragma once

// Batch sweeps over the 20-state family: per (algorithm, n) run every theta,
// regress estimate on true trace, and emit figure-ready CSVs. Per-job seeds
// are derived from (master_seed, algorithm, n, theta index), so results are
// independent of execution order and thread count.

#include <boost/math/distributions/students_t.hpp>
#include <cstdio>
#include <future>
#include <string>
#include <vector>

#include "entspec/jobs.hpp"
#include "entspec/stateprep.hpp"

namespace entspec {

struct SweepRow {
    Algorithm algorithm;
    int n = 0;
    int k = 1;
    double theta = 0;
    double true_trace = 0;
    SpectroscopyEstimate estimate;
};

struct RegressionRow {
    Algorithm algorithm;
    int n = 0;
    double slope = 0;
    double intercept = 0;
    double slope_stderr = 0;  // 68% confidence half-width from a t-test
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<RegressionRow> regressions;
};

// Ordinary least squares of y on x with the t-based 68% slope error.
inline RegressionRow ols_regression(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    if (n < 3 || y.size() != x.size())
        throw std::invalid_argument("ols_regression: need at least 3 points");
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    RegressionRow r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ssr = 0;
    for (int i = 0; i < n; ++i) {
        const double res = y[i] - (r.intercept + r.slope * x[i]);
        ssr += res * res;
    }
    const double se = std::sqrt(ssr / (n - 2) / sxx);
    const boost::math::students_t_distribution<double> dist(n - 2);
    r.slope_stderr = se * boost::math::quantile(dist, 1.0 - 0.32 / 2.0);
    return r;
}

struct SweepConfig {
    std::vector<Algorithm> algorithms;
    std::vector<int> n_values;
    int state_count = 20;
    std::uint64_t shots = 100000;
    std::uint64_t master_seed = 1;
    int k = 1;  // the theta family is defined at k = 1
    int threads = 1;
};

inline std::uint64_t sweep_job_seed(std::uint64_t master, Algorithm a, int n, int theta_idx) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ (static_cast<std::uint64_t>(a) + 1));
    h = splitmix64(h ^ static_cast<std::uint64_t>(n));
    return splitmix64(h ^ static_cast<std::uint64_t>(theta_idx + 1));
}

inline SweepResult run_sweep(const SweepConfig& cfg, const NoiseProfile& noise) {
    if (cfg.shots == 0) throw std::invalid_argument("run_sweep: shots must be positive");
    if (cfg.k != 1) throw std::invalid_argument("run_sweep: the theta family requires k = 1");
    SweepResult result;

    struct JobRef {
        Algorithm a;
        int n;
        int theta_idx;
        double theta, trace;
    };
    std::vector<JobRef> jobs;
    for (Algorithm a : cfg.algorithms) {
        for (int n : cfg.n_values) {
            const auto thetas = thetas_for_even_traces(n, cfg.state_count);
            for (int t = 0; t < cfg.state_count; ++t)
                jobs.push_back({a, n, t, thetas[t], trace_oracle(thetas[t], n)});
        }
    }

    auto run_one = [&](const JobRef& j) {
        SpectroscopyJob job;
        job.algorithm = j.a;
        job.k = cfg.k;
        job.n = j.n;
        job.theta = j.theta;
        job.shots = cfg.shots;
        job.master_seed = sweep_job_seed(cfg.master_seed, j.a, j.n, j.theta_idx);
        return run_job(job, noise);
    };

    std::vector<SpectroscopyEstimate> estimates(jobs.size());
    if (cfg.threads <= 1) {
        for (size_t i = 0; i < jobs.size(); ++i) estimates[i] = run_one(jobs[i]);
    } else {
        // std::async with a bounded window keeps at most `threads` jobs alive.
        size_t next = 0, done = 0;
        std::vector<std::pair<size_t, std::future<SpectroscopyEstimate>>> window;
        while (done < jobs.size()) {
            while (next < jobs.size() && window.size() < static_cast<size_t>(cfg.threads)) {
                window.emplace_back(next, std::async(std::launch::async, run_one, jobs[next]));
                ++next;
            }
            estimates[window.front().first] = window.front().second.get();
            window.erase(window.begin());
            ++done;
        }
    }

    for (size_t i = 0; i < jobs.size(); ++i)
        result.rows.push_back({jobs[i].a, jobs[i].n, cfg.k, jobs[i].theta, jobs[i].trace,
                               estimates[i]});

    for (Algorithm a : cfg.algorithms) {
        for (int n : cfg.n_values) {
            std::vector<double> x, y;
            for (const auto& row : result.rows)
                if (row.algorithm == a && row.n == n) {
                    x.push_back(row.true_trace);
                    y.push_back(row.estimate.value);
                }
            RegressionRow r = ols_regression(x, y);
            r.algorithm = a;
            r.n = n;
            result.regressions.push_back(r);
        }
    }
    return result;
}

namespace sweep_detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace sweep_detail

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "algorithm,n,k,theta,true_trace,estimate,ci_low,ci_high\n";
    for (const auto& r : rows) {
        out += algorithm_name(r.algorithm);
        out += ',' + std::to_string(r.n) + ',' + std::to_string(r.k) + ',' +
               sweep_detail::fmt(r.theta) + ',' + sweep_detail::fmt(r.true_trace) + ',' +
               sweep_detail::fmt(r.estimate.value) + ',' + sweep_detail::fmt(r.estimate.ci_low) +
               ',' + sweep_detail::fmt(r.estimate.ci_high) + '\n';
    }
    return out;
}

inline std::string regression_csv(const std::vector<RegressionRow>& rows) {
    std::string out = "algorithm,n,slope,intercept,slope_stderr\n";
    for (const auto& r : rows) {
        out += algorithm_name(r.algorithm);
        out += ',' + std::to_string(r.n) + ',' + sweep_detail::fmt(r.slope) + ',' +
               sweep_detail::fmt(r.intercept) + ',' + sweep_detail::fmt(r.slope_stderr) + '\n';
    }
    return out;
}

inline nlohmann::json sweep_to_json(const SweepResult& result) {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : result.rows) {
        j["rows"].push_back({{"algorithm", algorithm_name(r.algorithm)},
                             {"n", r.n},
                             {"k", r.k},
                             {"theta", r.theta},
                             {"true_trace", r.true_trace},
                             {"estimate", r.estimate.value},
                             {"ci_low", r.estimate.ci_low},
                             {"ci_high", r.estimate.ci_high}});
    }
    j["regressions"] = nlohmann::json::array();
    for (const auto& r : result.regressions) {
        j["regressions"].push_back({{"algorithm", algorithm_name(r.algorithm)},
                                    {"n", r.n},
                                    {"slope", r.slope},
                                    {"intercept", r.intercept},
                                    {"slope_stderr", r.slope_stderr}});
    }
    return j;
}

}  // namespace entspec
