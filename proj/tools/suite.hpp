#pragma once

#include "hartree/lab.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hartree::suite {

// One checked property. margin is the signed slack (>= 0 passes) in the units of the tolerance.
struct Case {
    std::string name;
    std::string paper_ref;
    bool passed = false;
    double value = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    std::string detail;
    nlohmann::json inputs = nlohmann::json::object(); // reproduces the case when it fails
    std::string inputs_path;
    const char* status() const { return passed ? "pass" : "fail"; }
};

struct Criterion {
    int id = 0;
    std::string key;
    std::string title;
    std::vector<Case> cases;
    double seconds = 0.0;
    bool passed() const;
    std::string summary() const; // worst case, one line
};

struct Settings {
    LabConfig lab;
    LabConfig coarse; // grid-stability partner
    std::uint64_t seed = 1;
    int coercivity_trials = 500;
    int pohozaev_trials = 100;
    int shoot_samples = 64;
    double shoot_T = -100.0;
};
Settings default_settings(int N);

// Lazily built labs shared by every criterion of one run.
class Context {
public:
    explicit Context(Settings s);
    const Settings& settings() const { return s_; }
    const Lab& lab();
    const Lab& coarse();
    bool lab_ready() const { return lab_ != nullptr; }

private:
    Settings s_;
    std::unique_ptr<Lab> lab_, coarse_;
};

struct CriterionInfo {
    int id;
    const char* key;
    const char* title;
};
const std::vector<CriterionInfo>& criteria();
// "all" or a criterion key; throws std::invalid_argument for unknown names.
std::vector<int> select(const std::string& suite);

Criterion run(int id, Context& ctx);

// {suite, cases:[{name, paper_ref, status, margin, tolerance, ...}]}
nlohmann::json report(const std::string& suite, const std::vector<Criterion>& results);

// Writes inputs of failing cases under dir/failures and records the paths.
void persist_failures(std::vector<Criterion>& results, const std::string& dir);

} // namespace hartree::suite
