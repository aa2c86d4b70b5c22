#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hartree::io {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void emit(std::ostringstream& os, const nlohmann::json& j, int indent, int depth) {
    const auto pad = [&](int d) {
        if (indent >= 0) os << '\n' << std::string(std::size_t(indent * d), ' ');
    };
    switch (j.type()) {
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ',';
            first = false;
            pad(depth + 1);
            os << nlohmann::json(it.key()).dump() << (indent >= 0 ? ": " : ":");
            emit(os, it.value(), indent, depth + 1);
        }
        pad(depth);
        os << '}';
        return;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << '[';
        bool first = true;
        for (const auto& v : j) {
            if (!first) os << ',';
            first = false;
            pad(depth + 1);
            emit(os, v, indent, depth + 1);
        }
        pad(depth);
        os << ']';
        return;
    }
    case nlohmann::json::value_t::number_float: {
        const double x = j.get<double>();
        os << (std::isfinite(x) ? num(x) : "null");
        return;
    }
    default:
        os << j.dump();
    }
}

} // namespace

std::string dump(const nlohmann::json& j, int indent) {
    std::ostringstream os;
    emit(os, j, indent, 0);
    return os.str();
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(&os), cols_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) *os_ << (i ? "," : "") << header[i];
    *os_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != cols_) throw std::invalid_argument("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) *os_ << (i ? "," : "") << num(values[i]);
    *os_ << '\n';
}

LabConfig RunConfig::lab() const {
    LabConfig c;
    c.N = N;
    c.r_min = r_min;
    c.r_max = r_max;
    c.points = points;
    return c;
}

std::string RunConfig::to_kv() const {
    std::ostringstream os;
    os << "N=" << N << '\n'
       << "r-min=" << num(r_min) << '\n'
       << "r-max=" << num(r_max) << '\n'
       << "points=" << points << '\n'
       << "seed=" << seed << '\n'
       << "threads=" << threads << '\n'
       << "out=\"" << out << "\"\n";
    return os.str();
}

Writer::Writer(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
        throw std::runtime_error("cannot create output directory " + dir_.string() + (ec ? ": " + ec.message() : ""));
}

std::filesystem::path Writer::text(const std::string& name, const std::string& body) const {
    const std::filesystem::path p = dir_ / name;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << body;
    if (!os) throw std::runtime_error("write failed for " + p.string());
    return p;
}

std::filesystem::path Writer::json(const std::string& name, const nlohmann::json& j) const {
    return text(name, dump(j) + "\n");
}

nlohmann::json to_json(const Constants& c) {
    return {{"N", c.N},
            {"c0", c.c0},
            {"C1", c.C1},
            {"C2", c.C2},
            {"C3", c.C3},
            {"normW2", c.normW2},
            {"kappa", c.kappa},
            {"nu", c.nu},
            {"M", c.M},
            {"rhoY", c.rhoY},
            {"C1_beta", c.C1_beta},
            {"C2_flux", c.C2_flux},
            {"C3_flux", c.C3_flux},
            {"grad_W_sq", c.grad_W_sq},
            {"grad_W_sq_pot", c.grad_W_sq_pot},
            {"tail_bound", c.tail_bound},
            {"grid", {{"r_min", c.grid_r_min}, {"r_max", c.grid_r_max}, {"points", c.grid_points}}}};
}

Constants constants_from_json(const nlohmann::json& j) {
    Constants c;
    c.N = j.at("N").get<int>();
    c.c0 = j.at("c0").get<double>();
    c.C1 = j.at("C1").get<double>();
    c.C2 = j.at("C2").get<double>();
    c.C3 = j.at("C3").get<double>();
    c.normW2 = j.at("normW2").get<double>();
    c.kappa = j.at("kappa").get<double>();
    c.nu = j.at("nu").get<double>();
    c.M = j.at("M").get<double>();
    c.rhoY = j.at("rhoY").get<double>();
    c.C1_beta = j.at("C1_beta").get<double>();
    c.C2_flux = j.at("C2_flux").get<double>();
    c.C3_flux = j.at("C3_flux").get<double>();
    c.grad_W_sq = j.at("grad_W_sq").get<double>();
    c.grad_W_sq_pot = j.at("grad_W_sq_pot").get<double>();
    c.tail_bound = j.at("tail_bound").get<double>();
    const auto& g = j.at("grid");
    c.grid_r_min = g.at("r_min").get<double>();
    c.grid_r_max = g.at("r_max").get<double>();
    c.grid_points = g.at("points").get<long>();
    return c;
}

} // namespace hartree::io
