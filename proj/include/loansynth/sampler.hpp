#pragma once

#include "loansynth/actionspec.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

namespace loansynth {

/// One observed transition of an action.
struct DataPoint {
    std::vector<Amount> prestates;
    std::vector<Amount> params;
    std::vector<Amount> poststates;
    std::vector<Amount> token_deltas;
    bool reverted = false;

    /// prestates ++ params as doubles.
    std::vector<double> inputs() const;
    /// poststates ++ token_deltas as doubles.
    std::vector<double> outputs() const;

    friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

/// Data points per action id.
using DataSet = std::map<std::string, std::vector<DataPoint>>;

struct SampleBudget {
    std::size_t initial_per_action = 200;
    std::uint64_t seed = 1;
    bool log_uniform = false;
    double predecessor_probability = 0.5;
    /// Attempts allowed per requested point before BudgetExhausted.
    std::size_t attempt_factor = 10;
};

class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExecPolicy { serial, parallel };

/// Draws a parameter in [lower, upper].
Amount sample_param(const SymbolicParam& p, std::mt19937_64& rng, bool log_uniform);

/// Independent stream for (seed, action, attempt).
std::mt19937_64 attempt_rng(std::uint64_t seed, const std::string& action, std::uint64_t attempt);

/// One sampling attempt for `target`: restores `base`, optionally runs a
/// predecessor, then runs producers of missing input tokens and writers of
/// zero-valued prestates (recursively, bounded depth) before the target.
/// Returns a reverted point when anything in the chain reverts.
DataPoint sample_once(const World& base, const std::vector<ActionSpec>& specs, std::size_t target,
                      const DependencyMap& raw, const SampleBudget& budget, const std::string& adversary,
                      std::uint64_t attempt);

/// Initial data collection for every approximated action. Attempts are
/// numbered per action and evaluated independently, so the serial and
/// parallel policies return identical sets.
DataSet collect_initial(const World& base, const std::vector<ActionSpec>& specs, const DependencyMap& raw,
                        const SampleBudget& budget, const std::string& adversary,
                        ExecPolicy policy = ExecPolicy::parallel);

/// JSON-lines, one point per line, integers as decimal strings.
void dump_points(const std::vector<DataPoint>& points, std::ostream& out);
std::vector<DataPoint> load_points(std::istream& in);

} // namespace loansynth
