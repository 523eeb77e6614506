#include "fieldsim/regression.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "fieldsim/errors.hpp"
#include "fieldsim/rng.hpp"

namespace fieldsim {

namespace {

using Matrix = Eigen::Matrix<double, static_cast<int>(kBasisSize), static_cast<int>(kBasisSize)>;
using Vector = Eigen::Matrix<double, static_cast<int>(kBasisSize), 1>;

Vector to_vector(const Basis& b) { return Eigen::Map<const Vector>(b.data()); }

void accumulate_normal_equations(std::span<const RegressionSample> samples, const Standardization& st, Matrix& gram,
                                 Vector& rhs)
{
    gram.setZero();
    rhs.setZero();
    for (const RegressionSample& s : samples) {
        const Vector row = to_vector(design_row(s.x, s.y, s.z, st));
        gram.noalias() += row * row.transpose();
        rhs.noalias() += s.f * row;
    }
}

Matrix penalty(double lambda)
{
    Matrix p = Matrix::Identity() * lambda;
    p(0, 0) = 0.0;
    return p;
}

}  // namespace

Standardization Standardization::fit(std::span<const RegressionSample> samples)
{
    Standardization st;
    if (samples.empty()) {
        return st;
    }
    const double n = static_cast<double>(samples.size());
    std::array<double, 3> sum{};
    for (const RegressionSample& s : samples) {
        sum[0] += s.x;
        sum[1] += s.y;
        sum[2] += s.z;
    }
    for (int k = 0; k < 3; ++k) {
        st.shift[k] = sum[k] / n;
    }
    std::array<double, 3> sq{};
    for (const RegressionSample& s : samples) {
        const std::array<double, 3> v{s.x, s.y, s.z};
        for (int k = 0; k < 3; ++k) {
            sq[k] += (v[k] - st.shift[k]) * (v[k] - st.shift[k]);
        }
    }
    for (int k = 0; k < 3; ++k) {
        const double sd = std::sqrt(sq[k] / n);
        st.scale[k] = sd > 0.0 ? sd : 1.0;
    }
    return st;
}

Basis design_row(double x, double y, double z) { return {1.0, x, y, z, x * x, y * y, z * z, x * y, x * z, y * z}; }

Basis design_row(double x, double y, double z, const Standardization& st)
{
    return design_row((x - st.shift[0]) / st.scale[0], (y - st.shift[1]) / st.scale[1], (z - st.shift[2]) / st.scale[2]);
}

std::string RegressionModel::serialize() const
{
    std::ostringstream out;
    char buf[32];
    auto put = [&](double v, bool last = false) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << (last ? "\n" : " ");
    };
    for (const double c : coefficients) {
        put(c);
    }
    put(lambda);
    for (const double v : standardization.shift) {
        put(v);
    }
    for (int k = 0; k < 3; ++k) {
        put(standardization.scale[k], k == 2);
    }
    return out.str();
}

RegressionModel RegressionModel::deserialize(const std::string& text)
{
    std::istringstream in(text);
    std::vector<double> values;
    double v = 0.0;
    while (in >> v) {
        values.push_back(v);
    }
    if (!in.eof() || values.size() != kBasisSize + 7) {
        throw InvalidParameter("model record must hold 17 numbers");
    }
    RegressionModel model;
    std::copy_n(values.begin(), kBasisSize, model.coefficients.begin());
    model.lambda = values[kBasisSize];
    for (int k = 0; k < 3; ++k) {
        model.standardization.shift[k] = values[kBasisSize + 1 + k];
        model.standardization.scale[k] = values[kBasisSize + 4 + k];
    }
    return model;
}

RegressionModel fit_ridge(std::span<const RegressionSample> samples, double lambda, Standardize standardize)
{
    if (samples.size() < kBasisSize) {
        throw InvalidParameter("ridge fit needs at least 10 samples, got " + std::to_string(samples.size()));
    }
    if (!(lambda >= 0.0)) {
        throw InvalidParameter("lambda must be non-negative");
    }
    RegressionModel model;
    model.lambda = lambda;
    model.standardization =
        standardize == Standardize::Yes ? Standardization::fit(samples) : Standardization::identity();

    Matrix gram;
    Vector rhs;
    accumulate_normal_equations(samples, model.standardization, gram, rhs);
    const Matrix system = gram + penalty(lambda);
    const Eigen::LDLT<Matrix> ldlt(system);
    const auto pivots = ldlt.vectorD().cwiseAbs();
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || pivots.minCoeff() <= 1e-13 * pivots.maxCoeff()) {
        throw SingularSystem("normal equations are numerically singular; increase lambda or widen the sampling");
    }
    const Vector solution = ldlt.solve(rhs);
    Eigen::Map<Vector>(model.coefficients.data()) = solution;
    return model;
}

double predict(const RegressionModel& model, double x, double y, double z)
{
    const Basis row = design_row(x, y, z, model.standardization);
    double sum = 0.0;
    for (std::size_t k = 0; k < kBasisSize; ++k) {
        sum += model.coefficients[k] * row[k];
    }
    return sum;
}

double r_squared(const RegressionModel& model, std::span<const RegressionSample> samples)
{
    if (samples.size() < 2) {
        throw InvalidParameter("R^2 needs at least 2 samples");
    }
    double mean = 0.0;
    for (const RegressionSample& s : samples) {
        mean += s.f;
    }
    mean /= static_cast<double>(samples.size());
    double ss_tot = 0.0;
    double ss_res = 0.0;
    for (const RegressionSample& s : samples) {
        const double r = s.f - predict(model, s.x, s.y, s.z);
        ss_res += r * r;
        ss_tot += (s.f - mean) * (s.f - mean);
    }
    if (ss_tot == 0.0) {
        throw ZeroVariance("test targets have zero variance");
    }
    return 1.0 - ss_res / ss_tot;
}

Basis ridge_gradient(const RegressionModel& model, std::span<const RegressionSample> samples)
{
    Matrix gram;
    Vector rhs;
    accumulate_normal_equations(samples, model.standardization, gram, rhs);
    const Vector c = to_vector(model.coefficients);
    const Vector grad = 2.0 * ((gram + penalty(model.lambda)) * c - rhs);
    Basis out{};
    Eigen::Map<Vector>(out.data()) = grad;
    return out;
}

Split train_test_split(std::span<const RegressionSample> samples, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidParameter("train fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng() % i]);
    }
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(samples.size())));
    Split split;
    for (std::size_t k = 0; k < order.size(); ++k) {
        (k < n_train ? split.train : split.test).push_back(samples[order[k]]);
    }
    return split;
}

}  // namespace fieldsim
