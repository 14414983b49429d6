#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "lll/stats.hpp"

namespace lll {

using Json = nlohmann::ordered_json;

struct Check {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double bound = 0.0;
    double sigma = 0.0;
    std::string note;
};

/// One experiment's output. The JSON layout is pinned by a golden schema test.
struct Report {
    std::string experiment;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    unsigned jobs = 1;
    Json instance = Json::object();
    Json parameters = Json::object();
    std::vector<StatSummary> stats;
    Json bounds = Json::object();
    std::vector<Check> checks;
    double seconds = 0.0;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    const Check& check(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return c;
        fail(ErrorKind::InvalidArgument, "no check named " + name);
    }

    const StatSummary& stat(const std::string& name) const {
        for (const auto& s : stats)
            if (s.name == name) return s;
        fail(ErrorKind::InvalidArgument, "no statistic named " + name);
    }

    Json to_json() const {
        Json j;
        j["schema"] = "lll-report/1";
        j["experiment"] = experiment;
        j["seeds"] = {{"base", seed}, {"trials", trials}, {"streams", {0, trials ? trials - 1 : 0}}};
        j["jobs"] = jobs;
        j["instance"] = instance;
        j["parameters"] = parameters;
        Json st = Json::array();
        for (const auto& s : stats)
            st.push_back({{"name", s.name},
                          {"n", s.n},
                          {"mean", s.mean},
                          {"variance", s.variance},
                          {"sem", s.sem},
                          {"ci3", s.ci3},
                          {"hoeffding", s.hoeffding},
                          {"min", s.min},
                          {"max", s.max}});
        j["statistics"] = st;
        j["bounds"] = bounds;
        Json ch = Json::array();
        for (const auto& c : checks)
            ch.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"observed", c.observed},
                          {"bound", c.bound},
                          {"sigma", c.sigma},
                          {"note", c.note}});
        j["checks"] = ch;
        j["timings"] = {{"wall_seconds", seconds}};
        j["pass"] = passed();
        return j;
    }
};

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string digest(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace lll
