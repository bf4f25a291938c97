#include "pvfdi/config.hpp"

#include <fstream>
#include <istream>
#include <map>

#include "pvfdi/error.hpp"
#include "pvfdi/models/fields.hpp"
#include "pvfdi/rng.hpp"

namespace pvfdi {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& source, const ConfigEntry& e, const std::string& what) {
    throw ConfigError(source + ":" + std::to_string(e.line) + ": [" + e.section + "] " + e.key + ": " + what);
}

template <class T>
T parse_as(const std::string& source, const ConfigEntry& e) {
    T value{};
    if (!parse_field(e.value, value)) {
        fail(source, e, "invalid value '" + e.value + "'");
    }
    return value;
}

std::uint64_t parse_u64(const std::string& source, const ConfigEntry& e) {
    std::size_t v = 0;
    static_assert(sizeof(std::size_t) == sizeof(std::uint64_t));
    if (!parse_field(e.value, v)) {
        fail(source, e, "expected an unsigned 64-bit integer, got '" + e.value + "'");
    }
    return v;
}

std::vector<ModelSpec> specs_for(const std::vector<std::string>& names) {
    std::vector<ModelSpec> out;
    for (const auto& n : names) {
        const auto kind = parse_model_kind(n);
        if (!kind) {
            throw ConfigError("unknown model '" + n + "' (expected LR, LASSO, GPR, KNN, DT, GBRT, SVR or MLPR)");
        }
        out.push_back(ModelSpec::defaults(*kind));
    }
    return out;
}

} // namespace

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!item.empty()) {
            out.push_back(item);
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::vector<double> parse_fraction_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        double v = 0.0;
        if (!parse_field(item, v)) {
            throw ConfigError("fractions: invalid number '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ConfigError("fractions: empty list");
    }
    return out;
}

std::vector<ConfigEntry> read_config_entries(std::istream& in, const std::string& source) {
    std::vector<ConfigEntry> entries;
    std::string section;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = trim(raw);
        if (text.empty() || text.front() == '#' || text.front() == ';') {
            continue;
        }
        if (text.front() == '[') {
            if (text.back() != ']' || text.size() < 3) {
                throw ConfigError(source + ":" + std::to_string(line) + ": malformed section header");
            }
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(line) + ": expected key = value");
        }
        if (section.empty()) {
            throw ConfigError(source + ":" + std::to_string(line) + ": key outside of any [section]");
        }
        entries.push_back({section, trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line});
    }
    return entries;
}

ExperimentConfig build_config(const std::vector<ConfigEntry>& entries, const std::string& source,
                              const ConfigOverrides& overrides) {
    // Root seed and model list first: they shape everything else.
    std::uint64_t root = 42;
    std::optional<std::vector<std::string>> model_names;
    for (const auto& e : entries) {
        if (e.section == "experiment" && e.key == "seed") {
            root = parse_u64(source, e);
        } else if (e.section == "experiment" && e.key == "models") {
            model_names = split_list(e.value);
        }
    }
    if (overrides.seed) {
        root = *overrides.seed;
    }
    if (overrides.models) {
        model_names = overrides.models;
    }

    ExperimentConfig cfg = ExperimentConfig::defaults(root);
    if (model_names) {
        cfg.models = specs_for(*model_names);
        cfg.reseed(root);
    }

    for (const auto& e : entries) {
        if (e.section == "experiment") {
            if (e.key == "seed" || e.key == "models") {
                continue;
            }
            if (e.key == "clamp_predictions") {
                cfg.clamp_predictions = parse_as<bool>(source, e);
            } else if (e.key == "jobs") {
                cfg.jobs = parse_as<std::size_t>(source, e);
            } else if (e.key == "out") {
                cfg.output_dir = e.value;
            } else {
                fail(source, e, "unknown key");
            }
        } else if (e.section == "data") {
            if (e.key == "path") {
                cfg.data.path = e.value;
            } else if (e.key == "synth_n") {
                cfg.data.synth_n = parse_as<std::size_t>(source, e);
            } else if (e.key == "synth_seed") {
                cfg.data.synth_seed = parse_u64(source, e);
            } else if (e.key == "synth_residual_std") {
                cfg.data.synth_residual_std = parse_as<double>(source, e);
            } else {
                fail(source, e, "unknown key");
            }
        } else if (e.section == "split") {
            if (e.key == "train_ratio") {
                cfg.split.train_ratio = parse_as<double>(source, e);
            } else if (e.key == "seed") {
                cfg.split.seed = parse_u64(source, e);
            } else {
                fail(source, e, "unknown key");
            }
        } else if (e.section == "noise") {
            if (e.key == "mean") {
                cfg.noise.mean = parse_as<double>(source, e);
            } else if (e.key == "std") {
                cfg.noise.std = parse_as<double>(source, e);
            } else if (e.key == "target") {
                const auto t = parse_noise_target(e.value);
                if (!t) {
                    fail(source, e, "expected features, power or both");
                }
                cfg.noise.target = *t;
            } else if (e.key == "columns") {
                cfg.noise.columns = split_list(e.value);
                for (const auto& c : cfg.noise.columns) {
                    if (!feature_index(c)) {
                        fail(source, e, "unknown feature column '" + c + "'");
                    }
                }
            } else if (e.key == "seed") {
                cfg.noise.seed = parse_u64(source, e);
            } else if (e.key == "space") {
                const auto s = parse_noise_space(e.value);
                if (!s) {
                    fail(source, e, "expected normalized or raw");
                }
                cfg.noise_space = *s;
            } else if (e.key == "fractions") {
                try {
                    cfg.fractions = parse_fraction_list(e.value);
                } catch (const ConfigError& err) {
                    fail(source, e, err.what());
                }
            } else if (e.key == "repeats") {
                cfg.repeats = parse_as<std::size_t>(source, e);
            } else {
                fail(source, e, "unknown key");
            }
        } else if (const auto kind = parse_model_kind(e.section)) {
            bool any = false;
            for (auto& spec : cfg.models) {
                if (spec.kind != *kind) {
                    continue;
                }
                any = true;
                if (e.key == "seed") {
                    spec.seed = parse_u64(source, e);
                    continue;
                }
                bool found = false;
                std::visit(
                    [&](auto& params) {
                        for_each_field(params, [&](const char* name, auto& field) {
                            if (e.key == name) {
                                found = true;
                                if (!parse_field(e.value, field)) {
                                    fail(source, e, "invalid value '" + e.value + "'");
                                }
                            }
                        });
                    },
                    spec.params);
                if (!found) {
                    fail(source, e, "unknown hyperparameter");
                }
            }
            if (!any) {
                // Section for a model that is not selected: still check the key.
                ModelSpec probe = ModelSpec::defaults(*kind);
                bool found = e.key == "seed";
                std::visit(
                    [&](auto& params) {
                        for_each_field(params, [&](const char* name, auto&) { found = found || e.key == name; });
                    },
                    probe.params);
                if (!found) {
                    fail(source, e, "unknown hyperparameter");
                }
            }
        } else {
            fail(source, e, "unknown section");
        }
    }

    if (overrides.data) {
        cfg.data.path = overrides.data;
    }
    if (overrides.out) {
        cfg.output_dir = *overrides.out;
    }
    if (overrides.fractions) {
        cfg.fractions = *overrides.fractions;
    }
    if (overrides.noise_target) {
        cfg.noise.target = *overrides.noise_target;
    }
    if (overrides.noise_std) {
        cfg.noise.std = *overrides.noise_std;
    }
    if (overrides.clamp_predictions) {
        cfg.clamp_predictions = *overrides.clamp_predictions;
    }
    if (overrides.jobs) {
        cfg.jobs = *overrides.jobs;
    }
    if (overrides.repeats) {
        cfg.repeats = *overrides.repeats;
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path, const ConfigOverrides& overrides) {
    if (!path) {
        return build_config({}, "<defaults>", overrides);
    }
    std::ifstream in(*path);
    if (!in) {
        throw ConfigError("cannot open config " + path->string());
    }
    return build_config(read_config_entries(in, path->string()), path->string(), overrides);
}

} // namespace pvfdi
