#pragma once

#include "loansynth/benchmark.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace testing_support {

inline std::string benchmark_path(const std::string& name)
{
    return std::string(LOANSYNTH_BENCHMARK_DIR) + "/" + name + ".toml";
}

inline std::string fixture_path(const std::string& rel) { return std::string(LOANSYNTH_FIXTURE_DIR) + "/" + rel; }

inline const loansynth::BenchmarkConfig& harvest()
{
    static const loansynth::BenchmarkConfig b = loansynth::load_benchmark(benchmark_path("harvest"));
    return b;
}

inline std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace testing_support
