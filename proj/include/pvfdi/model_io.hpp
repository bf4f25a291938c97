#pragma once

#include <filesystem>
#include <iosfwd>

#include "pvfdi/regressors.hpp"

namespace pvfdi {

inline constexpr int kModelFormatVersion = 1;

/**
 * Text serialization of a TrainedModel.
 *
 * One record per line, whitespace separated:
 *
 *     pvfdi-model 1
 *     kind GBRT
 *     name GBRT
 *     seed 42
 *     feature_count 12
 *     param learning_rate 0x1.999999999999ap-4
 *     scalar base_score 0x1.2p-2
 *     vector coefficients 3 0x1p+0 0x0p+0 0x1p-1
 *     matrix inputs 2 12 <24 values, row-major>
 *     tree 7                     (followed by 7 "node" lines)
 *     node <feature> <threshold> <left> <right> <value>
 *     end
 *
 * Every real number is written as a C99 hexadecimal float so a reload is
 * bit-exact. `param` lines carry the ModelSpec hyperparameters (integers in
 * decimal, the SVR kernel as rbf|linear). Scalars and arrays that only exist
 * for one kind (alpha, support_vectors, w1, ...) use that kind's field names.
 * Training histories are not stored.
 */
void save_model(const TrainedModel& model, std::ostream& out);
void save_model(const TrainedModel& model, const std::filesystem::path& path);

/// Throws IoError on a malformed or unsupported file.
TrainedModel load_model(std::istream& in);
TrainedModel load_model(const std::filesystem::path& path);

std::string hex_double(double x);

} // namespace pvfdi
