#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pvfdi {

/// Broad failure class; the CLI maps each one to an exit code.
enum class ErrorCategory { Config, Data, Model, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorCategory::Data, what) {}
};

class ModelError : public Error {
public:
    explicit ModelError(const std::string& what) : Error(ErrorCategory::Model, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

// ---- data ----------------------------------------------------------------

class MissingColumn : public DataError {
public:
    explicit MissingColumn(std::string column)
        : DataError("missing column '" + column + "'"), column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

/// `row` is the 1-based data row (header and comment lines are not counted).
class NonNumericCell : public DataError {
public:
    NonNumericCell(std::size_t row, std::string column)
        : DataError("non-numeric cell at row " + std::to_string(row) + ", column '" + column + "'"),
          row_(row), column_(std::move(column)) {}
    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

class EmptyFile : public DataError {
public:
    explicit EmptyFile(const std::string& path) : DataError("empty file: " + path) {}
};

class DatasetTooSmall : public DataError {
public:
    using DataError::DataError;
};

class InvalidCount : public DataError {
public:
    using DataError::DataError;
};

// ---- metrics -------------------------------------------------------------

class LengthMismatch : public DataError {
public:
    LengthMismatch(std::size_t actual, std::size_t predicted)
        : DataError("length mismatch: " + std::to_string(actual) + " actual vs " +
                    std::to_string(predicted) + " predicted") {}
};

class EmptySeries : public DataError {
public:
    EmptySeries() : DataError("empty evaluation series") {}
};

class ZeroBaseline : public DataError {
public:
    ZeroBaseline() : DataError("percent change needs a positive baseline") {}
};

// ---- models --------------------------------------------------------------

class InvalidSpec : public ModelError {
public:
    using ModelError::ModelError;
};

class DimensionMismatch : public ModelError {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : ModelError("expected " + std::to_string(expected) + " features, got " + std::to_string(got)) {}
};

class KTooLarge : public ModelError {
public:
    KTooLarge(std::size_t k, std::size_t n)
        : ModelError("k=" + std::to_string(k) + " exceeds training size " + std::to_string(n)) {}
};

class NotPositiveDefinite : public ModelError {
public:
    using ModelError::ModelError;
};

class NonFiniteLoss : public ModelError {
public:
    using ModelError::ModelError;
};

} // namespace pvfdi
