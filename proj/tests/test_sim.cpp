#include <catch2/catch_amalgamated.hpp>

#include "entspec/builders.hpp"
#include "entspec/engine.hpp"
#include "entspec/statevector.hpp"
#include "oracle.hpp"

using namespace entspec;

namespace {

const DurationTable kDefaults{};

double binom_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

Circuit compile(std::vector<Instruction> prog) {
    return pad_idle(schedule_asap(std::move(prog), kDefaults));
}

// Frequency of '1' for one string position of the counts.
double freq_one(const Counts& counts, int pos) {
    double ones = 0;
    for (const auto& [outcome, c] : counts.counts)
        if (outcome[pos] == '1') ones += static_cast<double>(c);
    return ones / static_cast<double>(counts.total_shots);
}

}  // namespace

TEST_CASE("apply_gate basics") {
    StateVector s(1);
    apply_gate(s, make1(Op::H, 0));
    REQUIRE(std::abs(s.amp[0] - 1.0 / std::sqrt(2.0)) < 1e-12);
    REQUIRE(std::abs(s.amp[1] - 1.0 / std::sqrt(2.0)) < 1e-12);

    StateVector t(2);
    sv::apply_x(t, 0);  // |10>
    apply_gate(t, make_cnot(0, 1));
    REQUIRE(std::abs(t.amp[3] - 1.0) < 1e-12);  // |11>
}

TEST_CASE("U2 matrix matches its defining form") {
    const double theta = 1.05;
    const auto m = single_qubit_matrix(Op::U2, theta - M_PI / 2, M_PI / 2);
    const double s = 1.0 / std::sqrt(2.0);
    REQUIRE(std::abs(m[0] - cd{s, 0}) < 1e-12);
    REQUIRE(std::abs(m[1] - (-s * std::polar(1.0, M_PI / 2))) < 1e-12);
    REQUIRE(std::abs(m[2] - s * std::polar(1.0, theta - M_PI / 2)) < 1e-12);
    REQUIRE(std::abs(m[3] - s * std::polar(1.0, theta)) < 1e-12);
}

TEST_CASE("apply_thermal leaves the state alone when disabled") {
    NoiseProfile off;  // noiseless: T1 = 0 encodes the T1 -> infinity limit
    ShotRng rng(7);
    StateVector s(1);
    apply_gate(s, make1(Op::H, 0));
    StateVector before = s;
    apply_thermal(s, 0, 100, off, rng);
    REQUIRE(s.amp == before.amp);

    NoiseProfile on = paper_main_profile();
    apply_thermal(s, 0, 0, on, rng);  // zero duration
    REQUIRE(s.amp == before.amp);
}

TEST_CASE("thermal relaxation frequency matches (1 - e^-1)(1 - T_pop)") {
    NoiseProfile noise = paper_main_profile();
    const int trials = 100000;
    int relaxed = 0;
    for (int i = 0; i < trials; ++i) {
        ShotRng rng(42, i);
        StateVector s(1);
        sv::apply_x(s, 0);  // |1>
        apply_thermal(s, 0, 2000, noise, rng);  // duration == T1
        if (std::norm(s.amp[0]) > 0.5) ++relaxed;
    }
    const double expected = (1.0 - std::exp(-1.0)) * (1.0 - 1e-7);
    const double freq = static_cast<double>(relaxed) / trials;
    REQUIRE(std::abs(freq - expected) < 3.0 * binom_sigma(expected, trials));
}

TEST_CASE("exclusive Pauli channel fires with total probability 3p") {
    // On |0>, X and Y flip the measured bit and Z does not, so the flip
    // frequency is exactly 2p.
    NoiseProfile noise;
    noise.pauli_prob_1q = 0.1;
    const int trials = 100000;
    int flipped = 0;
    for (int i = 0; i < trials; ++i) {
        ShotRng rng(9, i);
        StateVector s(1);
        const Instruction id_gate = make1(Op::U1, 0, 0.0, 0.0);
        apply_gate_noise(s, id_gate, noise, rng);
        if (std::norm(s.amp[1]) > 0.5) ++flipped;
    }
    const double expected = 2.0 * noise.pauli_prob_1q;
    REQUIRE(std::abs(flipped / double(trials) - expected) < 3.0 * binom_sigma(expected, trials));
}

TEST_CASE("single-qubit depolarizing channel fires with probability 3 lambda / 4") {
    // Fired Paulis are uniform over {X, Y, Z}; on |0> the flip frequency is
    // lambda/2. Use an enlarged lambda for statistical resolution.
    NoiseProfile noise;
    noise.depol_lambda_1q = 0.4;
    const int trials = 100000;
    int flipped = 0;
    for (int i = 0; i < trials; ++i) {
        ShotRng rng(11, i);
        StateVector s(1);
        apply_gate_noise(s, make1(Op::H, 0), noise, rng);  // state irrelevant, count flips
        if (std::norm(s.amp[1]) > 0.5) ++flipped;
    }
    const double expected = noise.depol_lambda_1q / 2.0;
    REQUIRE(std::abs(flipped / double(trials) - expected) < 3.0 * binom_sigma(expected, trials));
}

TEST_CASE("depolarizing shot average matches (1 - lambda) rho + lambda I/2") {
    // <X> on |+> decays to (1 - lambda): estimate via X-basis statistics.
    NoiseProfile noise;
    noise.depol_lambda_1q = 0.4;
    const int trials = 100000;
    int plus = 0;
    for (int i = 0; i < trials; ++i) {
        ShotRng rng(13, i);
        StateVector s(1);
        apply_gate(s, make1(Op::H, 0));
        apply_gate_noise(s, make1(Op::U1, 0, 0.0, 0.0), noise, rng);
        apply_gate(s, make1(Op::H, 0));
        if (std::norm(s.amp[0]) > 0.5) ++plus;
    }
    const double expected = (1.0 + (1.0 - noise.depol_lambda_1q)) / 2.0;
    REQUIRE(std::abs(plus / double(trials) - expected) < 3.0 * binom_sigma(expected, trials));
}

TEST_CASE("cnot uses the multiplied error rates") {
    NoiseProfile noise;
    noise.pauli_prob_1q = 0.02;
    noise.cnot_error_multiplier = 5.0;
    const int trials = 100000;
    int flipped = 0;
    for (int i = 0; i < trials; ++i) {
        ShotRng rng(17, i);
        StateVector s(2);
        apply_gate_noise(s, make_cnot(0, 1), noise, rng);
        if (std::norm(s.amp[0]) < 0.5) ++flipped;  // any X/Y on either qubit
    }
    // Each qubit flips with 2 * 5p; independent draws.
    const double pq = 2.0 * 0.02 * 5.0;
    const double expected = 1.0 - (1.0 - pq) * (1.0 - pq);
    REQUIRE(std::abs(flipped / double(trials) - expected) < 3.0 * binom_sigma(expected, trials));
}

TEST_CASE("measurement records readout flips but collapses on the raw bit") {
    NoiseProfile noise;
    noise.readout_flip_prob = 0.02;
    const int trials = 100000;
    int recorded_ones = 0;
    for (int i = 0; i < trials; ++i) {
        ShotRng rng(23, i);
        StateVector s(1);
        const auto out = measure(s, 0, noise, rng);
        REQUIRE(out.raw_bit == 0);
        REQUIRE(std::norm(s.amp[0]) > 1.0 - 1e-12);  // state follows the raw bit
        recorded_ones += out.recorded_bit;
    }
    REQUIRE(std::abs(recorded_ones / double(trials) - 0.02) < 3.0 * binom_sigma(0.02, trials));
}

TEST_CASE("Born statistics of |+>") {
    NoiseProfile off;
    const int trials = 100000;
    int zeros = 0;
    for (int i = 0; i < trials; ++i) {
        ShotRng rng(29, i);
        StateVector s(1);
        apply_gate(s, make1(Op::H, 0));
        zeros += measure(s, 0, off, rng).raw_bit == 0;
    }
    REQUIRE(std::abs(zeros / double(trials) - 0.5) < 3.0 * binom_sigma(0.5, trials));
}

TEST_CASE("reset forces |0> and leaves the partner in a classical mixture") {
    StateVector s(1);
    sv::apply_x(s, 0);
    ShotRng rng(31);
    reset(s, 0, rng);
    REQUIRE(std::norm(s.amp[0]) > 1.0 - 1e-12);

    // Bell pair: resetting qubit 1 leaves qubit 0 measuring 0/1 evenly.
    const int trials = 100000;
    int ones = 0;
    NoiseProfile off;
    for (int i = 0; i < trials; ++i) {
        ShotRng r(37, i);
        StateVector b(2);
        apply_gate(b, make1(Op::H, 0));
        apply_gate(b, make_cnot(0, 1));
        reset(b, 1, r);
        ones += measure(b, 0, off, r).raw_bit;
    }
    REQUIRE(std::abs(ones / double(trials) - 0.5) < 3.0 * binom_sigma(0.5, trials));
}

TEST_CASE("run reproduces H-measure statistics and is deterministic") {
    auto c = compile({make1(Op::H, 0), make_measure(0, 0)});
    NoiseProfile off;
    const std::uint64_t shots = 100000;
    const Counts counts = run(c, off, shots, 12345);
    REQUIRE(counts.total_shots == shots);
    const double p0 = static_cast<double>(counts.counts.at("0")) / shots;
    REQUIRE(std::abs(p0 - 0.5) < 3.0 * binom_sigma(0.5, shots));

    const Counts again = run(c, off, shots, 12345);
    REQUIRE(again.counts == counts.counts);
}

TEST_CASE("run is independent of thread count") {
    auto built = build_qe_tct_4k(2, 1, theta_prep(1.1), kDefaults);
    NoiseProfile noise = paper_main_profile();
    RunOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const Counts a = run(built.circuit, noise, 4000, 99, one);
    const Counts b = run(built.circuit, noise, 4000, 99, four);
    REQUIRE(a.counts == b.counts);
}

TEST_CASE("noiseless Bell circuit yields only 00 and 11") {
    auto c = compile({make1(Op::H, 0), make_cnot(0, 1), make_measure(0, 0), make_measure(1, 1)});
    const Counts counts = run(c, NoiseProfile{}, 100000, 5);
    REQUIRE(counts.counts.size() == 2);
    const double p00 = static_cast<double>(counts.counts.at("00")) / 100000.0;
    REQUIRE(std::abs(p00 - 0.5) < 3.0 * binom_sigma(0.5, 100000));
}

TEST_CASE("noiseless run matches the exact branch-enumeration oracle") {
    std::vector<Circuit> circuits;
    circuits.push_back(compile({make1(Op::H, 0), make_cnot(0, 1), make_measure(0, 0),
                                make_measure(1, 1)}));
    // Mid-circuit measurement and reset with reuse.
    circuits.push_back(compile({make1(Op::H, 0), make_cnot(0, 1), make_measure(1, 0),
                                make_reset(1), make1(Op::H, 1), make_cnot(1, 2),
                                make_measure(0, 1), make_measure(1, 2), make_measure(2, 3)}));
    circuits.push_back(build_qe_tct_4k(2, 1, theta_prep(0.7), kDefaults).circuit);
    circuits.push_back(build_qe_tct_6k(2, 1, theta_prep(1.0), kDefaults).circuit);
    circuits.push_back(build_ht(2, 1, theta_prep(1.2), kDefaults).circuit);
    circuits.push_back(build_ht(3, 1, theta_prep(0.5), kDefaults).circuit);

    const std::uint64_t shots = 60000;
    for (const auto& c : circuits) {
        const auto dist = oracle::exact_distribution(c);
        const Counts counts = run(c, NoiseProfile{}, shots, 2024);
        for (const auto& [outcome, cnt] : counts.counts) {
            REQUIRE(dist.count(outcome) == 1);  // impossible outcomes never appear
        }
        for (const auto& [outcome, p] : dist) {
            const double f =
                counts.counts.count(outcome)
                    ? static_cast<double>(counts.counts.at(outcome)) / static_cast<double>(shots)
                    : 0.0;
            REQUIRE(std::abs(f - p) < 3.0 * binom_sigma(p, double(shots)) + 1e-9);
        }
    }
}

TEST_CASE("greedy execution order matches literal start-time order in distribution") {
    auto built = build_qe_tct_6k(3, 1, theta_prep(0.9), kDefaults);
    NoiseProfile noise = paper_main_profile();
    RunOptions literal;
    literal.literal_order = true;
    const std::uint64_t shots = 40000;
    const Counts a = run(built.circuit, noise, shots, 7);
    const Counts b = run(built.circuit, noise, shots, 7, literal);
    // Compare a coarse functional of the two distributions: per-bit one-rates.
    const int width = static_cast<int>(a.counts.begin()->first.size());
    for (int pos = 0; pos < width; ++pos) {
        const double fa = freq_one(a, pos), fb = freq_one(b, pos);
        const double sigma = binom_sigma(0.5, double(shots));
        REQUIRE(std::abs(fa - fb) < 4.0 * sigma);
    }
}

TEST_CASE("statevector norm stays 1 through a noisy trajectory") {
    NoiseProfile noise = paper_main_profile();
    ShotRng rng(3);
    StateVector s(3);
    std::vector<Instruction> gates{make1(Op::H, 0),  make_cnot(0, 1), make1(Op::T, 1),
                                   make_cnot(1, 2),  make1(Op::U2, 2, 0.3, 0.9),
                                   make_cnot(2, 0)};
    for (const auto& g : gates) {
        apply_gate(s, g);
        apply_gate_noise(s, g, noise, rng);
        for (int i = 0; i < g.num_qubits; ++i)
            apply_thermal(s, g.qubits[i], kDefaults.of(g.op), noise, rng);
        REQUIRE(std::abs(s.norm2() - 1.0) < 1e-9);
    }
}

TEST_CASE("run rejects unscheduled and unpadded circuits") {
    std::vector<Instruction> prog{make1(Op::H, 0), make1(Op::H, 1), make1(Op::T, 0),
                                  make_cnot(0, 1), make_measure(1, 0)};
    Circuit unscheduled;
    unscheduled.num_qubits = 2;
    unscheduled.instructions = prog;
    REQUIRE_THROWS_AS(run(unscheduled, NoiseProfile{}, 1, 0), std::invalid_argument);

    Circuit gappy = schedule_asap(prog, kDefaults);  // q1 idles before the CNOT
    REQUIRE_THROWS_AS(run(gappy, NoiseProfile{}, 1, 0), std::invalid_argument);
    REQUIRE_NOTHROW(run(pad_idle(gappy), NoiseProfile{}, 1, 0));
}

TEST_CASE("run rejects duplicate classical bits") {
    auto c = compile({make1(Op::H, 0), make_measure(0, 0), make_reset(0), make1(Op::H, 0),
                      make_measure(0, 0)});
    REQUIRE_THROWS_AS(run(c, NoiseProfile{}, 1, 0), std::invalid_argument);
}

TEST_CASE("counts serialize to the documented JSON shape") {
    Counts c;
    c.add("01");
    c.add("01");
    c.add("10");
    const auto j = c.to_json();
    REQUIRE(j["shots"] == 3);
    REQUIRE(j["counts"]["01"] == 2);
    const Counts back = Counts::from_json(j);
    REQUIRE(back.counts == c.counts);
}
