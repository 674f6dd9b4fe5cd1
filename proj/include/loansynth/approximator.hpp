#pragma once

#include "loansynth/sampler.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

namespace loansynth {

enum class SurrogateKind { polynomial, nearest };

struct Prediction {
    double value = 0.0;
    /// Euclidean distance of the normalized query from the unit box spanned
    /// by the training inputs; 0 inside the data range.
    double extrapolation = 0.0;
};

struct FitReport {
    bool rank_deficient = false;
    std::size_t rank = 0;
    double residual = 0.0; // sum of squared errors on the training set
};

/// Fitted model of one scalar output.
///
/// Polynomial models hold one coefficient per monomial of total degree <= d
/// over standardized features z = (x - mean) / scale, in graded order
/// (1, z0, z1, ..., z0^2, z0 z1, ...). Nearest models hold the min-max
/// normalized training inputs and the raw outputs.
class SurrogateModel {
public:
    SurrogateKind kind = SurrogateKind::polynomial;
    std::size_t input_dim = 0;
    int degree = 0;
    std::vector<std::vector<int>> exponents;
    std::vector<double> coefficients;
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<double> train_x; // row-major, normalized
    std::vector<double> train_y;

    double eval(std::span<const double> x) const;
    Prediction predict(std::span<const double> x) const;
    double extrapolation(std::span<const double> x) const;

    /// Coefficients expanded back to raw-feature monomials (same order as
    /// `exponents`).
    std::vector<double> raw_coefficients() const;

    /// Index of the nearest training row (nearest models only); ties go to
    /// the lowest index.
    std::size_t nearest_index(std::span<const double> x) const;

    nlohmann::json to_json() const;
    static SurrogateModel from_json(const nlohmann::json& j);

    /// Polynomial model from explicit parts; exponents follow monomial_exponents.
    static SurrogateModel polynomial(std::size_t dim, int degree, std::vector<double> coefficients,
                                     std::vector<double> mean = {}, std::vector<double> scale = {});

private:
    std::vector<std::vector<int>> factors_; // monomials as variable index lists
    void build_factors();
    friend SurrogateModel fit_polynomial(const std::vector<std::vector<double>>&, const std::vector<double>&, int,
                                         FitReport*);
};

/// Exponent vectors of all monomials of total degree <= degree, graded order.
std::vector<std::vector<int>> monomial_exponents(std::size_t dim, int degree);
/// C(dim + degree, degree).
std::size_t monomial_count(std::size_t dim, int degree);

SurrogateModel fit_polynomial(const std::vector<std::vector<double>>& x, const std::vector<double>& y, int degree,
                              FitReport* report = nullptr);
SurrogateModel fit_nearest(const std::vector<std::vector<double>>& x, const std::vector<double>& y);

/// Output `output_index` indexes poststates ++ token deltas.
SurrogateModel fit_polynomial(const std::vector<DataPoint>& points, std::size_t output_index, int degree,
                              FitReport* report = nullptr);
SurrogateModel fit_nearest(const std::vector<DataPoint>& points, std::size_t output_index);

/// Batch evaluation kernels. The serial policy is the reference; both return
/// identical values.
std::vector<double> predict_batch(const SurrogateModel& model, const std::vector<std::vector<double>>& queries,
                                  ExecPolicy policy = ExecPolicy::parallel);

enum class ApproxMethod { poly, inter, exact };

std::string to_string(ApproxMethod method);
ApproxMethod parse_method(const std::string& text);

/// Models for every output of one action, or none when the action runs
/// with exact protocol math.
struct ActionSurrogates {
    std::string action;
    bool exact = false;
    std::vector<SurrogateModel> models;
    std::vector<FitReport> reports;
};

using SurrogateSet = std::map<std::string, ActionSurrogates>;

struct FitOptions {
    ApproxMethod method = ApproxMethod::poly;
    int degree = 2;
};

/// Fits every approximated action (specs with approximate=false, and every
/// action under ApproxMethod::exact, get exact summaries).
SurrogateSet fit_all(const std::vector<ActionSpec>& specs, const DataSet& data, const FitOptions& options);

/// Evaluates all output models of one approximated action on the same input.
struct ActionEstimate {
    std::vector<double> poststates;
    std::vector<double> deltas;
};
ActionEstimate estimate_action(const ActionSurrogates& surrogates, const ActionSpec& spec,
                               std::span<const double> prestates, std::span<const double> params);

nlohmann::json to_json(const SurrogateSet& set);
SurrogateSet surrogates_from_json(const nlohmann::json& j);

} // namespace loansynth
