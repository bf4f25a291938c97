#include "pvfdi/metrics.hpp"

#include <cmath>

#include "pvfdi/error.hpp"

namespace pvfdi {

namespace {

class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

void validate(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) {
        throw LengthMismatch(actual.size(), predicted.size());
    }
    if (actual.empty()) {
        throw EmptySeries();
    }
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (!std::isfinite(actual[i]) || !std::isfinite(predicted[i])) {
            throw DataError("evaluation series holds a non-finite value at index " + std::to_string(i));
        }
    }
}

} // namespace

double mse(std::span<const double> actual, std::span<const double> predicted) {
    validate(actual, predicted);
    CompensatedSum sum;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        sum.add(e * e);
    }
    return sum.value() / static_cast<double>(actual.size());
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    return std::sqrt(mse(actual, predicted));
}

double mae(std::span<const double> actual, std::span<const double> predicted) {
    validate(actual, predicted);
    CompensatedSum sum;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        sum.add(std::abs(actual[i] - predicted[i]));
    }
    return sum.value() / static_cast<double>(actual.size());
}

double rmse(const EvaluationSeries& s) { return rmse(s.actual, s.predicted); }
double mse(const EvaluationSeries& s) { return mse(s.actual, s.predicted); }
double mae(const EvaluationSeries& s) { return mae(s.actual, s.predicted); }

MetricTriple evaluate(const EvaluationSeries& s) {
    MetricTriple m;
    m.mse = mse(s);
    m.rmse = std::sqrt(m.mse);
    m.mae = mae(s);
    return m;
}

double percent_change(double baseline, double value) {
    if (!(baseline > 0.0)) {
        throw ZeroBaseline();
    }
    return 100.0 * (value - baseline) / baseline;
}

} // namespace pvfdi
