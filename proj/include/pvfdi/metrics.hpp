#pragma once

#include <span>
#include <vector>

namespace pvfdi {

/// Paired ground truth and forecasts. Equal, non-zero lengths; all finite.
struct EvaluationSeries {
    std::vector<double> actual;
    std::vector<double> predicted;

    bool operator==(const EvaluationSeries&) const = default;
};

struct MetricTriple {
    double rmse = 0.0;
    double mse = 0.0;
    double mae = 0.0;

    bool operator==(const MetricTriple&) const = default;
};

// All sums use Neumaier compensated summation.
double rmse(std::span<const double> actual, std::span<const double> predicted);
double mse(std::span<const double> actual, std::span<const double> predicted);
double mae(std::span<const double> actual, std::span<const double> predicted);

double rmse(const EvaluationSeries& s);
double mse(const EvaluationSeries& s);
double mae(const EvaluationSeries& s);

/// rmse is sqrt of the mse computed here, so rmse^2 == mse up to one rounding.
MetricTriple evaluate(const EvaluationSeries& s);

/// 100 * (value - baseline) / baseline. Throws ZeroBaseline unless baseline > 0.
double percent_change(double baseline, double value);

} // namespace pvfdi
