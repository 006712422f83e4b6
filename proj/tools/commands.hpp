#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace chebrb::cli {

struct OracleConfig {
    std::string model = "ngarch";
    std::string vars;                 // comma list; empty = all variables
    std::vector<std::string> sets;    // name=value pins
    std::string bounds;               // "min:max,..." per varied variable
    std::string degrees = "6";        // one value or one per varied variable
    std::size_t paths = 400000;
    std::uint64_t seed = 42;
    bool antithetic = true;
    std::size_t threads = 0;
};

struct BuildConfig {
    OracleConfig oracle;
    bool split = false;
    std::size_t split_axis = 0;
    std::uint64_t split_threshold = 1ULL << 30;
    std::filesystem::path out;
};

struct CompressConfig {
    std::filesystem::path in;
    std::filesystem::path out;
    double epsilon = 1e-8;
    bool allow_floor = false;
};

struct EvalConfig {
    std::filesystem::path poly;
    std::filesystem::path grid;
    std::filesystem::path out;
    std::size_t threads = 0;
};

struct CalibrateConfig {
    std::filesystem::path poly;
    std::filesystem::path quotes;
    std::filesystem::path out;
    std::string model = "ngarch";
    std::string vars;
    std::vector<std::string> sets;
    std::string strategy = "nelder-mead";
    std::size_t starts = 5;
    std::size_t threads = 0;
};

struct BenchConfig {
    OracleConfig oracle;
    std::vector<std::size_t> levels = {3, 6, 12};
    std::size_t control = 6;
};

int cmd_build(const BuildConfig& cfg, std::ostream& log);
int cmd_compress(const CompressConfig& cfg, std::ostream& log);
int cmd_eval(const EvalConfig& cfg, std::ostream& log);
int cmd_calibrate(const CalibrateConfig& cfg, std::ostream& log);
int cmd_bench(const BenchConfig& cfg, std::ostream& out);

}  // namespace chebrb::cli
