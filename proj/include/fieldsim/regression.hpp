#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fieldsim {

// One observation: arm length x (mm), arm ratio y, pitch z (mm), collision rate f.
struct RegressionSample {
    double x;
    double y;
    double z;
    double f;
};

inline constexpr std::size_t kBasisSize = 10;
using Basis = std::array<double, kBasisSize>;

// Per-variable z-score parameters; identity when shift = 0 and scale = 1.
struct Standardization {
    std::array<double, 3> shift{0.0, 0.0, 0.0};
    std::array<double, 3> scale{1.0, 1.0, 1.0};

    static Standardization identity() { return {}; }
    static Standardization fit(std::span<const RegressionSample> samples);
};

// Quadratic surrogate with coefficients in the fixed basis order
// [1, x, y, z, x^2, y^2, z^2, xy, xz, yz], evaluated on standardized inputs.
struct RegressionModel {
    Basis coefficients{};
    double lambda = 0.0;
    Standardization standardization;

    // 17 whitespace-separated numbers: coefficients, lambda, shifts, scales.
    std::string serialize() const;
    // Throws InvalidParameter for malformed records.
    static RegressionModel deserialize(const std::string& text);
};

Basis design_row(double x, double y, double z);
Basis design_row(double x, double y, double z, const Standardization& standardization);

enum class Standardize { Yes, No };

// Minimizes sum (f - model)^2 + lambda * |coefficients without intercept|^2 via
// the regularized normal equations. Throws InvalidParameter for fewer than 10
// samples or lambda < 0, SingularSystem when the system is numerically singular.
RegressionModel fit_ridge(std::span<const RegressionSample> samples, double lambda,
                          Standardize standardize = Standardize::Yes);

double predict(const RegressionModel& model, double x, double y, double z);

// 1 - SS_res / SS_tot. Throws ZeroVariance when all f are equal.
double r_squared(const RegressionModel& model, std::span<const RegressionSample> samples);

// Gradient of the ridge objective at the model's coefficients (standardized space).
Basis ridge_gradient(const RegressionModel& model, std::span<const RegressionSample> samples);

struct Split {
    std::vector<RegressionSample> train;
    std::vector<RegressionSample> test;
};

// Seeded shuffle, then the first round(train_fraction * n) samples train.
Split train_test_split(std::span<const RegressionSample> samples, double train_fraction, std::uint64_t seed);

// Reference coefficient set in units of 1e-3, basis order; a realistic surface for examples.
inline constexpr Basis kReferenceCoefficientsMilli{18.6635, 4.61227, 15.9225, -15.0398, 1.07078,
                                                   2.67496, 2.87948, 2.23372, -3.19570, -8.26024};

}  // namespace fieldsim
