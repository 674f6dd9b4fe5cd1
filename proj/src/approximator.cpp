#include "loansynth/approximator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace loansynth {

std::size_t monomial_count(std::size_t dim, int degree)
{
    // C(dim + degree, degree)
    std::size_t c = 1;
    for (int k = 1; k <= degree; ++k)
        c = c * (dim + static_cast<std::size_t>(k)) / static_cast<std::size_t>(k);
    return c;
}

namespace {

void gen(std::size_t dim, int remaining, std::size_t start, std::vector<int>& cur,
         std::vector<std::vector<int>>& out)
{
    if (remaining == 0) {
        out.push_back(cur);
        return;
    }
    for (std::size_t k = start; k < dim; ++k) {
        ++cur[k];
        gen(dim, remaining - 1, k, cur, out);
        --cur[k];
    }
}

double safe_range(double lo, double hi) { return hi > lo ? hi - lo : 1.0; }

} // namespace

std::vector<std::vector<int>> monomial_exponents(std::size_t dim, int degree)
{
    std::vector<std::vector<int>> out;
    for (int d = 0; d <= degree; ++d) {
        std::vector<int> cur(dim, 0);
        gen(dim, d, 0, cur, out);
    }
    return out;
}

void SurrogateModel::build_factors()
{
    factors_.clear();
    for (const auto& e : exponents) {
        std::vector<int> f;
        for (std::size_t k = 0; k < e.size(); ++k)
            for (int r = 0; r < e[k]; ++r)
                f.push_back(static_cast<int>(k));
        factors_.push_back(std::move(f));
    }
}

SurrogateModel SurrogateModel::polynomial(std::size_t dim, int degree, std::vector<double> coefficients,
                                          std::vector<double> mean, std::vector<double> scale)
{
    SurrogateModel m;
    m.kind = SurrogateKind::polynomial;
    m.input_dim = dim;
    m.degree = degree;
    m.exponents = monomial_exponents(dim, degree);
    if (coefficients.size() != m.exponents.size())
        throw std::invalid_argument("polynomial: coefficient count mismatch");
    m.coefficients = std::move(coefficients);
    m.mean = mean.empty() ? std::vector<double>(dim, 0.0) : std::move(mean);
    m.scale = scale.empty() ? std::vector<double>(dim, 1.0) : std::move(scale);
    m.lo.assign(dim, 0.0);
    m.hi.assign(dim, 1.0);
    m.build_factors();
    return m;
}

double SurrogateModel::eval(std::span<const double> x) const
{
    if (x.size() != input_dim)
        throw std::invalid_argument("surrogate input has wrong dimension");
    if (kind == SurrogateKind::nearest)
        return train_y[nearest_index(x)];
    double z[64];
    std::vector<double> heap;
    double* zp = z;
    if (input_dim > 64) {
        heap.resize(input_dim);
        zp = heap.data();
    }
    for (std::size_t k = 0; k < input_dim; ++k)
        zp[k] = (x[k] - mean[k]) / scale[k];
    double sum = 0.0;
    for (std::size_t m = 0; m < coefficients.size(); ++m) {
        double term = coefficients[m];
        for (int k : factors_[m])
            term *= zp[k];
        sum += term;
    }
    return sum;
}

double SurrogateModel::extrapolation(std::span<const double> x) const
{
    double d2 = 0.0;
    for (std::size_t k = 0; k < input_dim; ++k) {
        double u = (x[k] - lo[k]) / safe_range(lo[k], hi[k]);
        double out = u < 0 ? -u : (u > 1 ? u - 1 : 0.0);
        d2 += out * out;
    }
    return std::sqrt(d2);
}

Prediction SurrogateModel::predict(std::span<const double> x) const { return {eval(x), extrapolation(x)}; }

std::size_t SurrogateModel::nearest_index(std::span<const double> x) const
{
    std::vector<double> q(input_dim);
    for (std::size_t k = 0; k < input_dim; ++k)
        q[k] = (x[k] - lo[k]) / safe_range(lo[k], hi[k]);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    const std::size_t n = train_y.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = &train_x[i * input_dim];
        double d = 0.0;
        for (std::size_t k = 0; k < input_dim && d < best_d; ++k) {
            double t = row[k] - q[k];
            d += t * t;
        }
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<double> SurrogateModel::raw_coefficients() const
{
    if (kind != SurrogateKind::polynomial)
        throw std::logic_error("raw_coefficients on a nearest model");
    std::map<std::vector<int>, double> acc;
    for (std::size_t m = 0; m < exponents.size(); ++m) {
        // prod_k ((x_k - mean_k) / scale_k)^e_k, expanded binomially
        std::map<std::vector<int>, double> terms{{std::vector<int>(input_dim, 0), coefficients[m]}};
        for (std::size_t k = 0; k < input_dim; ++k) {
            int e = exponents[m][k];
            if (e == 0)
                continue;
            std::map<std::vector<int>, double> next;
            double inv = 1.0 / std::pow(scale[k], e);
            for (const auto& [mono, c] : terms) {
                double binom = 1.0;
                for (int j = 0; j <= e; ++j) {
                    if (j > 0)
                        binom = binom * (e - j + 1) / j;
                    auto mono2 = mono;
                    mono2[k] += j;
                    next[mono2] += c * binom * std::pow(-mean[k], e - j) * inv;
                }
            }
            terms = std::move(next);
        }
        for (const auto& [mono, c] : terms)
            acc[mono] += c;
    }
    std::vector<double> out;
    for (const auto& e : exponents)
        out.push_back(acc[e]);
    return out;
}

nlohmann::json SurrogateModel::to_json() const
{
    nlohmann::json j;
    j["kind"] = kind == SurrogateKind::polynomial ? "polynomial" : "nearest";
    j["inputDim"] = input_dim;
    j["lo"] = lo;
    j["hi"] = hi;
    if (kind == SurrogateKind::polynomial) {
        j["degree"] = degree;
        j["mean"] = mean;
        j["scale"] = scale;
        j["coefficients"] = coefficients;
    } else {
        j["trainX"] = train_x;
        j["trainY"] = train_y;
    }
    return j;
}

SurrogateModel SurrogateModel::from_json(const nlohmann::json& j)
{
    SurrogateModel m;
    m.kind = j.at("kind") == "polynomial" ? SurrogateKind::polynomial : SurrogateKind::nearest;
    m.input_dim = j.at("inputDim");
    m.lo = j.at("lo").get<std::vector<double>>();
    m.hi = j.at("hi").get<std::vector<double>>();
    if (m.kind == SurrogateKind::polynomial) {
        m.degree = j.at("degree");
        m.mean = j.at("mean").get<std::vector<double>>();
        m.scale = j.at("scale").get<std::vector<double>>();
        m.coefficients = j.at("coefficients").get<std::vector<double>>();
        m.exponents = monomial_exponents(m.input_dim, m.degree);
        if (m.coefficients.size() != m.exponents.size())
            throw std::invalid_argument("polynomial model: coefficient count mismatch");
        m.build_factors();
    } else {
        m.train_x = j.at("trainX").get<std::vector<double>>();
        m.train_y = j.at("trainY").get<std::vector<double>>();
        if (m.train_y.empty() || m.train_x.size() != m.train_y.size() * m.input_dim)
            throw std::invalid_argument("nearest model: bad training store");
    }
    return m;
}

namespace {

void set_box(SurrogateModel& m, const std::vector<std::vector<double>>& x)
{
    m.lo.assign(m.input_dim, std::numeric_limits<double>::infinity());
    m.hi.assign(m.input_dim, -std::numeric_limits<double>::infinity());
    for (const auto& row : x)
        for (std::size_t k = 0; k < m.input_dim; ++k) {
            m.lo[k] = std::min(m.lo[k], row[k]);
            m.hi[k] = std::max(m.hi[k], row[k]);
        }
}

void check_shape(const std::vector<std::vector<double>>& x, const std::vector<double>& y)
{
    if (x.empty() || x.size() != y.size())
        throw std::invalid_argument("fit: need matching, non-empty inputs and outputs");
    for (const auto& row : x)
        if (row.size() != x.front().size())
            throw std::invalid_argument("fit: ragged input rows");
}

} // namespace

SurrogateModel fit_polynomial(const std::vector<std::vector<double>>& x, const std::vector<double>& y, int degree,
                              FitReport* report)
{
    check_shape(x, y);
    if (degree < 1)
        throw std::invalid_argument("fit_polynomial: degree must be >= 1");
    SurrogateModel m;
    m.kind = SurrogateKind::polynomial;
    m.input_dim = x.front().size();
    m.degree = degree;
    m.exponents = monomial_exponents(m.input_dim, degree);
    m.build_factors();
    set_box(m, x);

    const std::size_t n = x.size();
    m.mean.assign(m.input_dim, 0.0);
    m.scale.assign(m.input_dim, 0.0);
    for (const auto& row : x)
        for (std::size_t k = 0; k < m.input_dim; ++k)
            m.mean[k] += row[k];
    for (auto& v : m.mean)
        v /= static_cast<double>(n);
    for (const auto& row : x)
        for (std::size_t k = 0; k < m.input_dim; ++k)
            m.scale[k] += (row[k] - m.mean[k]) * (row[k] - m.mean[k]);
    for (auto& v : m.scale) {
        v = std::sqrt(v / static_cast<double>(n));
        if (!(v > 0))
            v = 1.0;
    }

    const std::size_t cols = m.exponents.size();
    Eigen::MatrixXd A(n, cols);
    Eigen::VectorXd b(n);
    std::vector<double> z(m.input_dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m.input_dim; ++k)
            z[k] = (x[i][k] - m.mean[k]) / m.scale[k];
        for (std::size_t c = 0; c < cols; ++c) {
            double t = 1.0;
            for (int k : m.factors_[c])
                t *= z[k];
            A(i, c) = t;
        }
        b(i) = y[i];
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    Eigen::VectorXd coef = cod.solve(b);
    m.coefficients.assign(coef.data(), coef.data() + cols);
    if (report) {
        report->rank = static_cast<std::size_t>(cod.rank());
        report->rank_deficient = report->rank < cols;
        report->residual = (A * coef - b).squaredNorm();
    }
    return m;
}

SurrogateModel fit_nearest(const std::vector<std::vector<double>>& x, const std::vector<double>& y)
{
    check_shape(x, y);
    SurrogateModel m;
    m.kind = SurrogateKind::nearest;
    m.input_dim = x.front().size();
    set_box(m, x);
    m.train_y = y;
    m.train_x.reserve(x.size() * m.input_dim);
    for (const auto& row : x)
        for (std::size_t k = 0; k < m.input_dim; ++k)
            m.train_x.push_back((row[k] - m.lo[k]) / safe_range(m.lo[k], m.hi[k]));
    return m;
}

namespace {

void columns(const std::vector<DataPoint>& points, std::size_t output_index, std::vector<std::vector<double>>& x,
             std::vector<double>& y)
{
    for (const auto& p : points) {
        if (p.reverted)
            continue;
        auto out = p.outputs();
        if (output_index >= out.size())
            throw std::out_of_range("output index beyond the point's outputs");
        x.push_back(p.inputs());
        y.push_back(out[output_index]);
    }
}

} // namespace

SurrogateModel fit_polynomial(const std::vector<DataPoint>& points, std::size_t output_index, int degree,
                              FitReport* report)
{
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    columns(points, output_index, x, y);
    return fit_polynomial(x, y, degree, report);
}

SurrogateModel fit_nearest(const std::vector<DataPoint>& points, std::size_t output_index)
{
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    columns(points, output_index, x, y);
    return fit_nearest(x, y);
}

std::vector<double> predict_batch(const SurrogateModel& model, const std::vector<std::vector<double>>& queries,
                                  ExecPolicy policy)
{
    std::vector<double> out(queries.size());
    const long n = static_cast<long>(queries.size());
    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i)
            out[i] = model.eval(queries[i]);
    } else {
        for (long i = 0; i < n; ++i)
            out[i] = model.eval(queries[i]);
    }
    return out;
}

std::string to_string(ApproxMethod method)
{
    switch (method) {
    case ApproxMethod::poly: return "poly";
    case ApproxMethod::inter: return "inter";
    case ApproxMethod::exact: return "exact";
    }
    return "?";
}

ApproxMethod parse_method(const std::string& text)
{
    if (text == "poly")
        return ApproxMethod::poly;
    if (text == "inter")
        return ApproxMethod::inter;
    if (text == "exact")
        return ApproxMethod::exact;
    throw std::invalid_argument("unknown method '" + text + "' (expected poly, inter or exact)");
}

SurrogateSet fit_all(const std::vector<ActionSpec>& specs, const DataSet& data, const FitOptions& options)
{
    SurrogateSet set;
    for (const auto& spec : specs) {
        ActionSurrogates s;
        s.action = spec.id;
        s.exact = !spec.approximate || options.method == ApproxMethod::exact;
        if (!s.exact) {
            auto it = data.find(spec.id);
            if (it == data.end() || it->second.empty())
                throw std::invalid_argument("no data points for approximated action " + spec.id);
            const auto& points = it->second;
            const long outputs = static_cast<long>(spec.output_count());
            s.models.resize(outputs);
            s.reports.resize(outputs);
#pragma omp parallel for schedule(dynamic)
            for (long o = 0; o < outputs; ++o) {
                if (options.method == ApproxMethod::poly)
                    s.models[o] = fit_polynomial(points, static_cast<std::size_t>(o), options.degree, &s.reports[o]);
                else
                    s.models[o] = fit_nearest(points, static_cast<std::size_t>(o));
            }
        }
        set[spec.id] = std::move(s);
    }
    return set;
}

ActionEstimate estimate_action(const ActionSurrogates& surrogates, const ActionSpec& spec,
                               std::span<const double> prestates, std::span<const double> params)
{
    if (surrogates.exact)
        throw std::logic_error("estimate_action: " + spec.id + " uses exact summaries; evaluate it on a world");
    if (prestates.size() != spec.prestates.size() || params.size() != spec.params.size())
        throw std::invalid_argument("estimate_action: dimension mismatch for " + spec.id);
    std::vector<double> in(prestates.begin(), prestates.end());
    in.insert(in.end(), params.begin(), params.end());
    ActionEstimate e;
    for (std::size_t o = 0; o < surrogates.models.size(); ++o) {
        double v = surrogates.models[o].eval(in);
        (o < spec.poststates.size() ? e.poststates : e.deltas).push_back(v);
    }
    return e;
}

nlohmann::json to_json(const SurrogateSet& set)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [id, s] : set) {
        nlohmann::json a;
        a["exact"] = s.exact;
        a["models"] = nlohmann::json::array();
        for (const auto& m : s.models)
            a["models"].push_back(m.to_json());
        j[id] = std::move(a);
    }
    return j;
}

SurrogateSet surrogates_from_json(const nlohmann::json& j)
{
    SurrogateSet set;
    for (const auto& [id, a] : j.items()) {
        ActionSurrogates s;
        s.action = id;
        s.exact = a.at("exact");
        for (const auto& m : a.at("models"))
            s.models.push_back(SurrogateModel::from_json(m));
        s.reports.resize(s.models.size());
        set[id] = std::move(s);
    }
    return set;
}

} // namespace loansynth
