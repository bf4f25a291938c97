#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "pvfdi/models/spec.hpp"

namespace pvfdi {

// Named-field reflection over the hyperparameter records, shared by the
// config reader, the provenance writer and model serialization. `f` is
// called as f(name, member&) with member types double, int, std::size_t,
// bool or SvrKernel.

template <class F>
void for_each_field(LinearParams&, F&&) {}

template <class F>
void for_each_field(LassoParams& p, F&& f) {
    f("lambda", p.lambda);
    f("tolerance", p.tolerance);
    f("max_sweeps", p.max_sweeps);
}

template <class F>
void for_each_field(GprParams& p, F&& f) {
    f("length_scale", p.length_scale);
    f("noise_variance", p.noise_variance);
    f("subset_cap", p.subset_cap);
}

template <class F>
void for_each_field(KnnParams& p, F&& f) {
    f("k", p.k);
}

template <class F>
void for_each_field(TreeParams& p, F&& f) {
    f("max_depth", p.max_depth);
    f("min_samples_leaf", p.min_samples_leaf);
}

template <class F>
void for_each_field(GbrtParams& p, F&& f) {
    f("rounds", p.rounds);
    f("learning_rate", p.learning_rate);
    f("max_depth", p.max_depth);
    f("lambda", p.lambda);
    f("gamma", p.gamma);
    f("min_child_weight", p.min_child_weight);
}

template <class F>
void for_each_field(SvrParams& p, F&& f) {
    f("c", p.c);
    f("epsilon", p.epsilon);
    f("kernel", p.kernel);
    f("gamma", p.gamma);
    f("tolerance", p.tolerance);
    f("max_iterations", p.max_iterations);
    f("cache_mb", p.cache_mb);
}

template <class F>
void for_each_field(MlpParams& p, F&& f) {
    f("hidden_units", p.hidden_units);
    f("learning_rate", p.learning_rate);
    f("beta1", p.beta1);
    f("beta2", p.beta2);
    f("epsilon", p.epsilon);
    f("max_epochs", p.max_epochs);
    f("tolerance", p.tolerance);
    f("n_iter_no_change", p.n_iter_no_change);
    f("batch_size", p.batch_size);
}

/// Const overload: copies, so `f` sees values only.
template <class Params, class F>
void for_each_field_value(const Params& p, F&& f) {
    Params copy = p;
    for_each_field(copy, [&](const char* name, auto& value) { f(name, std::as_const(value)); });
}

// Text conversion of field values. Doubles accept decimal or hexadecimal
// notation; format_field writes shortest round-trip decimal.
bool parse_field(std::string_view text, double& out);
bool parse_field(std::string_view text, int& out);
bool parse_field(std::string_view text, std::size_t& out);
bool parse_field(std::string_view text, bool& out);
bool parse_field(std::string_view text, SvrKernel& out);

std::string format_field(double v);
std::string format_field(int v);
std::string format_field(std::size_t v);
std::string format_field(bool v);
std::string format_field(SvrKernel v);

} // namespace pvfdi
