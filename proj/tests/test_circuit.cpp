#include <catch2/catch_amalgamated.hpp>

#include "entspec/builders.hpp"
#include "entspec/circuit.hpp"
#include "entspec/circuit_io.hpp"
#include "oracle.hpp"

using namespace entspec;

namespace {

const DurationTable kDefaults{};

Instruction find_only(const Circuit& c, Op op) {
    const Instruction* found = nullptr;
    for (const auto& in : c.instructions)
        if (in.op == op) {
            REQUIRE(found == nullptr);
            found = &in;
        }
    REQUIRE(found != nullptr);
    return *found;
}

}  // namespace

TEST_CASE("schedule_asap serializes reuses of one qubit") {
    auto c = schedule_asap({make1(Op::H, 0), make1(Op::H, 0)}, kDefaults);
    REQUIRE(c.instructions[0].start == 0);
    REQUIRE(c.instructions[1].start == 1);
}

TEST_CASE("schedule_asap parallelizes disjoint qubits") {
    auto c = schedule_asap({make1(Op::H, 0), make1(Op::H, 1)}, kDefaults);
    REQUIRE(c.instructions[0].start == 0);
    REQUIRE(c.instructions[1].start == 0);
}

TEST_CASE("schedule_asap chains through a CNOT") {
    auto c = schedule_asap({make1(Op::H, 0), make_cnot(0, 1), make1(Op::H, 1)}, kDefaults);
    // Hand trace with the default durations: H [0,1), CNOT [1,6), H [6,7).
    std::vector<long long> starts;
    for (const auto& in : c.instructions) starts.push_back(in.start);
    REQUIRE(starts == std::vector<long long>{0, 1, 6});
    REQUIRE(c.makespan() == 7);
}

TEST_CASE("schedule_asap is idempotent") {
    std::vector<Instruction> prog{make1(Op::H, 0),    make_cnot(0, 2), make1(Op::T, 1),
                                  make_cnot(1, 2),    make1(Op::U1, 0, 0.0, 0.3),
                                  make_measure(2, 0), make_reset(2),   make1(Op::H, 2)};
    auto c1 = schedule_asap(prog, kDefaults);
    auto c2 = schedule_asap(c1.instructions, kDefaults, c1.num_qubits, c1.num_cbits);
    REQUIRE(c1.instructions.size() == c2.instructions.size());
    for (size_t i = 0; i < c1.instructions.size(); ++i) {
        REQUIRE(c1.instructions[i].start == c2.instructions[i].start);
        REQUIRE(c1.instructions[i].op == c2.instructions[i].op);
    }
}

TEST_CASE("instructions reject repeated qubits") {
    REQUIRE_THROWS_AS(make_cnot(3, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(cswap_decomposed(0, 1, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(cswap_decomposed(2, 2, 1), std::invalid_argument);
}

TEST_CASE("durations must be positive") {
    DurationTable bad;
    bad.measure = 0;
    REQUIRE_THROWS_AS(schedule_asap({make1(Op::H, 0)}, bad), std::invalid_argument);
}

TEST_CASE("pad_idle leaves gapless circuits unchanged") {
    auto c = schedule_asap({make1(Op::H, 0), make1(Op::T, 0)}, kDefaults);
    auto padded = pad_idle(c);
    REQUIRE(padded.instructions.size() == c.instructions.size());
}

TEST_CASE("pad_idle fills the idle window before a CNOT") {
    // q1 idles [0,1) while q0 runs H; exactly one identity should appear.
    auto c = pad_idle(schedule_asap({make1(Op::H, 0), make1(Op::H, 1), make1(Op::T, 0),
                                     make_cnot(0, 1)},
                                    kDefaults));
    int pads = 0;
    for (const auto& in : c.instructions)
        if (in.padding) {
            ++pads;
            REQUIRE(in.op == Op::Identity);
            REQUIRE(in.qubits[0] == 1);
            REQUIRE(in.start == 1);
        }
    REQUIRE(pads == 1);
}

TEST_CASE("pad_idle tiles every qubit of a built circuit contiguously") {
    auto built = build_ht(2, 1, theta_prep(0.9), kDefaults);
    const Circuit& c = built.circuit;
    validate_non_overlap(c);
    std::vector<std::vector<std::pair<long long, long long>>> perq(c.num_qubits);
    for (const auto& in : c.instructions)
        for (int i = 0; i < in.num_qubits; ++i)
            perq[in.qubits[i]].push_back({in.start, in.end()});
    for (auto& iv : perq) {
        std::sort(iv.begin(), iv.end());
        for (size_t i = 1; i < iv.size(); ++i) REQUIRE(iv[i].first == iv[i - 1].second);
    }
    // Some qubit is alive start to end (here the first A register, which the
    // final CSWAP gate still touches); its covered time equals the makespan.
    bool spanning_found = false;
    for (int q = 0; q < c.num_qubits; ++q) {
        long long first = c.makespan(), last = 0, cover = 0;
        for (const auto& in : c.instructions)
            if (in.acts_on(q)) {
                first = std::min(first, in.start);
                last = std::max(last, in.end());
                cover += in.duration;
            }
        REQUIRE(cover == last - first);  // contiguous tiling per qubit
        if (first == 0 && last == c.makespan()) {
            spanning_found = true;
            REQUIRE(cover == c.makespan());
        }
    }
    REQUIRE(spanning_found);
}

TEST_CASE("non-measure kinds are unitary within 1e-12") {
    for (const auto& in : {make1(Op::H, 0), make1(Op::T, 0), make1(Op::Tdg, 0),
                           make1(Op::U1, 0, 0.0, 0.7), make1(Op::U2, 0, 0.4, 1.3),
                           make1(Op::Identity, 0)}) {
        const auto m = single_qubit_matrix(in.op, in.phi, in.lambda);
        // U^dagger U = I entrywise.
        const cd d00 = std::conj(m[0]) * m[0] + std::conj(m[2]) * m[2];
        const cd d01 = std::conj(m[0]) * m[1] + std::conj(m[2]) * m[3];
        const cd d11 = std::conj(m[1]) * m[1] + std::conj(m[3]) * m[3];
        REQUIRE(std::abs(d00 - 1.0) < 1e-12);
        REQUIRE(std::abs(d01) < 1e-12);
        REQUIRE(std::abs(d11 - 1.0) < 1e-12);
    }
}

TEST_CASE("H equals U2(0, pi) and T equals U1(pi/4)") {
    const auto h = single_qubit_matrix(Op::H, 0, 0);
    const auto u2 = single_qubit_matrix(Op::U2, 0.0, M_PI);
    const auto t = single_qubit_matrix(Op::T, 0, 0);
    const auto u1 = single_qubit_matrix(Op::U1, 0.0, M_PI / 4);
    for (int i = 0; i < 4; ++i) {
        REQUIRE(std::abs(h[i] - u2[i]) < 1e-12);
        REQUIRE(std::abs(t[i] - u1[i]) < 1e-12);
    }
}

TEST_CASE("cswap decomposition composes to the CSWAP matrix") {
    const auto gates = cswap_decomposed(0, 1, 2);
    const auto u = oracle::compose(gates, 3);
    REQUIRE(oracle::max_abs_diff(u, oracle::cswap_matrix()) < 1e-10);

    // Defining action on basis states: control 1 swaps, control 0 is inert.
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const int in1 = 4 | (x << 1) | y, out1 = 4 | (y << 1) | x;
            REQUIRE(std::abs(u[out1][in1] - 1.0) < 1e-10);
            const int in0 = (x << 1) | y;
            REQUIRE(std::abs(u[in0][in0] - 1.0) < 1e-10);
        }
}

TEST_CASE("width and makespan of the empty circuit") {
    Circuit c;
    c.num_qubits = 4;
    REQUIRE(c.width() == 4);
    REQUIRE(c.makespan() == 0);
}

TEST_CASE("builder widths match the paper formulas at k=1") {
    REQUIRE(build_ht(2, 1, theta_prep(0.8), kDefaults).circuit.width() == 5);
    REQUIRE(build_tct(3, 1, theta_prep(0.8), kDefaults).circuit.width() == 12);
}

TEST_CASE("circuit text round-trips") {
    const std::string text =
        "# demo circuit\n"
        "h q0\n"
        "u2 q1 0.25 1.5707963267948966\n"
        "cx q0 q1\n"
        "u1 q1 0.78539816339744828\n"
        "t q0\n"
        "tdg q1\n"
        "id q0\n"
        "measure q0 c0  # ancilla\n"
        "reset q1\n";
    const auto prog = parse_circuit_text(text);
    REQUIRE(prog.size() == 9);
    const std::string once = serialize_circuit_text(prog);
    const std::string twice = serialize_circuit_text(parse_circuit_text(once));
    REQUIRE(once == twice);
    auto c = schedule_asap(prog, kDefaults);
    REQUIRE(c.num_qubits == 2);
    REQUIRE(c.num_cbits == 1);
}

TEST_CASE("parser reports the offending line") {
    try {
        parse_circuit_text("h q0\ncx q1 q1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.line == 2);
    }
    try {
        parse_circuit_text("h q0\n\nfoo q1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.line == 3);
        REQUIRE(std::string(e.what()).find("foo") != std::string::npos);
    }
    REQUIRE_THROWS_AS(parse_circuit_text("measure q0 q1\n"), ParseError);
    REQUIRE_THROWS_AS(parse_circuit_text("u2 q0 1.0\n"), ParseError);
}

TEST_CASE("serializer emits the documented mnemonics") {
    REQUIRE(instruction_text(make_cnot(2, 5)) == "cx q2 q5");
    REQUIRE(instruction_text(make_measure(1, 3)) == "measure q1 c3");
    REQUIRE(instruction_text(make1(Op::U1, 0, 0.0, 0.5)) == "u1 q0 0.5");
}
