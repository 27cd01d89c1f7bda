#pragma once

// Classical results: per-shot bit assignments and their aggregated
// frequencies. Counts keys are bitstrings over the recorded (non-discarded)
// classical bits, index ascending left-to-right.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace entspec {

struct ShotRecord {
    std::vector<std::int8_t> bits;  // -1 = unwritten
    std::uint64_t seed = 0;

    explicit ShotRecord(int num_cbits = 0) : bits(num_cbits, -1) {}

    void write(int cbit, int value) {
        if (cbit < 0 || cbit >= static_cast<int>(bits.size()))
            throw std::out_of_range("ShotRecord: classical bit out of range");
        if (bits[cbit] != -1)
            throw std::runtime_error("ShotRecord: classical bit written twice");
        bits[cbit] = static_cast<std::int8_t>(value);
    }
};

struct Counts {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total_shots = 0;

    void add(const std::string& outcome) {
        ++counts[outcome];
        ++total_shots;
    }

    void merge(const Counts& other) {
        for (const auto& [k, v] : other.counts) counts[k] += v;
        total_shots += other.total_shots;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["shots"] = total_shots;
        j["counts"] = nlohmann::json::object();
        for (const auto& [k, v] : counts) j["counts"][k] = v;
        return j;
    }

    static Counts from_json(const nlohmann::json& j) {
        Counts c;
        c.total_shots = j.at("shots").get<std::uint64_t>();
        for (const auto& [k, v] : j.at("counts").items())
            c.counts[k] = v.get<std::uint64_t>();
        return c;
    }
};

}  // namespace entspec
