#pragma once

#include "hartree/bubble.hpp"
#include "hartree/lab.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace hartree::io {

// %.17g; non-finite values print as nan, inf, -inf
std::string num(double x);

// JSON text with every floating-point number at 17 significant digits (non-finite as null).
std::string dump(const nlohmann::json& j, int indent = 2);

class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);
    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);

private:
    std::ostream* os_;
    std::size_t cols_;
};

// Settings shared by every subcommand; the flat key=value form round-trips exactly.
struct RunConfig {
    int N = 7;
    double r_min = 1e-4;
    double r_max = 1e3;
    int points = 2048;
    std::uint64_t seed = 1;
    int threads = 0; // 0: HARTREE_LAB_THREADS or hardware
    std::string out = "hartree_out";

    LabConfig lab() const;
    std::string to_kv() const;
    bool operator==(const RunConfig&) const = default;
};

// All files of a run go through here; creation failures surface as std::runtime_error.
class Writer {
public:
    explicit Writer(std::filesystem::path dir);
    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path path(const std::string& name) const { return dir_ / name; }
    std::filesystem::path text(const std::string& name, const std::string& body) const;
    std::filesystem::path json(const std::string& name, const nlohmann::json& j) const;

private:
    std::filesystem::path dir_;
};

nlohmann::json to_json(const Constants& c);
Constants constants_from_json(const nlohmann::json& j);

} // namespace hartree::io
