// pvfdi: command-line driver for the PV forecasting robustness experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pvfdi/config.hpp"
#include "pvfdi/error.hpp"
#include "pvfdi/experiment.hpp"
#include "pvfdi/noise.hpp"

namespace {

using namespace pvfdi;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitModel = 3;

int exit_code_for(const Error& e) {
    switch (e.category()) {
    case ErrorCategory::Config:
        return kExitConfig;
    case ErrorCategory::Data:
    case ErrorCategory::Io:
        return kExitData;
    case ErrorCategory::Model:
        return kExitModel;
    }
    return kExitModel;
}

/// Raw flag values shared by bench and sweep.
struct ExperimentFlags {
    std::optional<std::string> config;
    std::optional<std::string> data;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> fractions;
    std::optional<std::string> models;
    std::optional<std::string> noise_target;
    std::optional<double> noise_std;
    bool clamp = false;
    std::optional<std::size_t> jobs;
    std::optional<std::size_t> repeats;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f, bool sweep) {
    cmd->add_option("--config", f.config, "experiment configuration file");
    cmd->add_option("--data", f.data, "input CSV (default: synthetic data)");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "root seed");
    cmd->add_option("--models", f.models, "comma-separated model list, run order");
    cmd->add_flag("--clamp-predictions", f.clamp, "clamp predictions to [0,1]");
    cmd->add_option("--jobs", f.jobs, "maximum concurrent model fits")->check(CLI::PositiveNumber);
    if (sweep) {
        cmd->add_option("--fractions", f.fractions, "comma-separated injected fractions, starting with 0");
        cmd->add_option("--noise-target", f.noise_target, "features|power|both");
        cmd->add_option("--noise-std", f.noise_std, "noise standard deviation");
        cmd->add_option("--repeats", f.repeats, "noise draws per fraction (mean is reported)")
            ->check(CLI::PositiveNumber);
    }
}

ExperimentConfig resolve(const ExperimentFlags& f) {
    ConfigOverrides o;
    o.seed = f.seed;
    if (f.data) {
        o.data = *f.data;
    }
    if (f.out) {
        o.out = *f.out;
    }
    if (f.fractions) {
        o.fractions = parse_fraction_list(*f.fractions);
    }
    if (f.models) {
        o.models = split_list(*f.models);
    }
    if (f.noise_target) {
        o.noise_target = parse_noise_target(*f.noise_target);
        if (!o.noise_target) {
            throw ConfigError("--noise-target: expected features, power or both, got '" + *f.noise_target + "'");
        }
    }
    o.noise_std = f.noise_std;
    if (f.clamp) {
        o.clamp_predictions = true;
    }
    o.jobs = f.jobs;
    o.repeats = f.repeats;
    std::optional<std::filesystem::path> config_path;
    if (f.config) {
        config_path = *f.config;
    }
    return load_config(config_path, o);
}

int finish(const ExperimentReport& report, const ExperimentConfig& cfg) {
    auto files = emit_report(report, cfg.output_dir);
    const auto series = emit_plot_series(report, cfg.output_dir);
    files.files.insert(files.files.end(), series.files.begin(), series.files.end());
    for (const auto& n : files.notices) {
        std::cerr << "note: " << n << '\n';
    }
    std::cout << render_text_report(report);
    std::cout << "wrote " << files.files.size() << " files to " << cfg.output_dir.string() << '\n';
    return report.any_model_failed() ? kExitModel : kExitOk;
}

int cmd_synth(std::size_t n, std::uint64_t seed, double residual_std, const std::string& out) {
    const auto d = synth_generate(n, seed, SynthOptions{residual_std});
    if (out == "-") {
        write_csv(d, std::cout);
    } else {
        write_csv(d, std::filesystem::path(out));
    }
    return kExitOk;
}

struct InjectFlags {
    std::string data;
    std::string out;
    std::optional<std::string> index;
    double fraction = 0.0;
    double mean = 0.0;
    double std = 1.0;
    std::string target = "features";
    std::optional<std::string> columns;
    std::uint64_t seed = 42;
};

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) {
            return out;
        }
        start = pos + 1;
    }
}

bool skippable(const std::string& line) {
    const auto b = line.find_first_not_of(" \t\r");
    return b == std::string::npos || line[b] == '#';
}

// Rewrites only the cells the injection touched; every other byte of the
// input is carried over, so untouched columns stay byte-identical.
int cmd_inject(const InjectFlags& f) {
    const std::string text = read_text(f.data);
    std::istringstream parse_in(text);
    const Dataset raw = parse_csv(parse_in, f.data);

    NoiseConfig cfg;
    cfg.fraction = f.fraction;
    cfg.mean = f.mean;
    cfg.std = f.std;
    const auto target = parse_noise_target(f.target);
    if (!target) {
        throw ConfigError("--target: expected features, power or both, got '" + f.target + "'");
    }
    cfg.target = *target;
    if (f.columns) {
        cfg.columns = split_list(*f.columns);
    }
    cfg.seed = f.seed;
    cfg.validate();
    const Injection inj = inject(raw, cfg);

    auto lines = split_on(text, '\n');
    std::size_t header_line = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!skippable(lines[i])) {
            header_line = i;
            break;
        }
    }
    // Map file column -> (feature index | power).
    std::vector<std::optional<std::size_t>> feature_at;
    std::optional<std::size_t> power_col;
    {
        auto header = lines[header_line];
        if (!header.empty() && header.back() == '\r') {
            header.pop_back();
        }
        const auto names = split_on(header, ',');
        feature_at.resize(names.size());
        for (std::size_t c = 0; c < names.size(); ++c) {
            auto name = names[c];
            const auto b = name.find_first_not_of(" \t\"");
            const auto e = name.find_last_not_of(" \t\"");
            name = b == std::string::npos ? std::string() : name.substr(b, e - b + 1);
            const auto canonical = canonical_column_name(name);
            if (canonical == kPowerColumn && !power_col) {
                power_col = c;
            } else if (const auto j = feature_index(canonical)) {
                feature_at[c] = *j;
            }
        }
    }

    std::size_t row = 0;
    std::size_t next_affected = 0;
    for (std::size_t i = header_line + 1; i < lines.size(); ++i) {
        if (skippable(lines[i])) {
            continue;
        }
        const std::size_t r = row++;
        if (next_affected >= inj.affected_rows.size() || inj.affected_rows[next_affected] != r) {
            continue;
        }
        ++next_affected;
        std::string body = lines[i];
        const bool cr = !body.empty() && body.back() == '\r';
        if (cr) {
            body.pop_back();
        }
        auto cells = split_on(body, ',');
        const Sample& before = raw[r];
        const Sample& after = inj.noisy[r];
        for (std::size_t c = 0; c < cells.size() && c < feature_at.size(); ++c) {
            if (feature_at[c] && after.features[*feature_at[c]] != before.features[*feature_at[c]]) {
                cells[c] = format_double(after.features[*feature_at[c]]);
            } else if (power_col && c == *power_col && after.power != before.power) {
                cells[c] = format_double(after.power);
            }
        }
        std::string rebuilt;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            rebuilt += (c ? "," : "") + cells[c];
        }
        lines[i] = rebuilt + (cr ? "\r" : "");
    }

    std::ostringstream os;
    os << "# pvfdi " << PVFDI_VERSION << " inject: source=" << f.data << " checksum=" << dataset_checksum(raw)
       << " fraction=" << format_double(cfg.fraction) << " mean=" << format_double(cfg.mean)
       << " std=" << format_double(cfg.std) << " target=" << to_string(cfg.target) << " seed=" << cfg.seed;
    if (!cfg.columns.empty()) {
        os << " columns=";
        for (std::size_t c = 0; c < cfg.columns.size(); ++c) {
            os << (c ? ";" : "") << cfg.columns[c];
        }
    }
    os << '\n';
    for (std::size_t i = 0; i < lines.size(); ++i) {
        os << lines[i] << (i + 1 < lines.size() ? "\n" : "");
    }

    const std::filesystem::path out_path = f.out;
    {
        std::ofstream out(out_path, std::ios::binary);
        if (!out || !(out << os.str()) || !out.flush()) {
            throw IoError("cannot write " + out_path.string());
        }
    }
    const std::filesystem::path index_path = f.index ? std::filesystem::path(*f.index)
                                                     : std::filesystem::path(out_path.string() + ".rows");
    {
        std::ofstream idx(index_path, std::ios::binary);
        for (const auto r : inj.affected_rows) {
            idx << r << '\n';
        }
        if (!idx.flush()) {
            throw IoError("cannot write " + index_path.string());
        }
    }
    std::cerr << inj.affected_rows.size() << " of " << raw.size() << " rows perturbed; index in "
              << index_path.string() << '\n';
    return kExitOk;
}

int cmd_report(const std::string& in_dir, const std::optional<std::string>& out_dir) {
    const std::filesystem::path in = in_dir;
    const std::filesystem::path out = out_dir ? std::filesystem::path(*out_dir) : in;
    ExperimentReport report;
    report.clean_table = read_clean_csv(in / "clean_metrics.csv");
    if (std::filesystem::exists(in / "noise_rmse.csv")) {
        report.noise_table = read_noise_csv(in / "noise_rmse.csv");
        report.sensitivity_table = compute_sensitivity(*report.noise_table);
    }
    const std::string text = render_text_report(report);
    std::filesystem::create_directories(out);
    if (report.sensitivity_table) {
        // Re-emit only the derived files; inputs are left untouched.
        const auto& t = *report.sensitivity_table;
        std::ofstream s(out / "sensitivity.csv", std::ios::binary);
        s << "model";
        for (const auto& l : t.labels()) {
            s << ',' << l;
        }
        s << '\n';
        for (std::size_t m = 0; m < t.models.size(); ++m) {
            s << t.models[m];
            for (const double v : t.percent[m]) {
                s << ',' << (std::isnan(v) ? std::string() : format_double(v));
            }
            s << '\n';
        }
        if (!s.flush()) {
            throw IoError("cannot write " + (out / "sensitivity.csv").string());
        }
    }
    std::ofstream r(out / "report.txt", std::ios::binary);
    r << text;
    if (!r.flush()) {
        throw IoError("cannot write " + (out / "report.txt").string());
    }
    std::cout << text;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian data-injection robustness study for PV power regressors"};
    app.set_version_flag("--version", std::string(PVFDI_VERSION));
    app.require_subcommand(1);

    std::size_t synth_n = 10000;
    std::uint64_t synth_seed = 42;
    double synth_residual = SynthOptions{}.residual_std;
    std::string synth_out = "-";
    auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
    synth->add_option("--n", synth_n, "number of samples");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--residual-std", synth_residual, "std of the power residual");
    synth->add_option("--out", synth_out, "output CSV, '-' for stdout");

    ExperimentFlags bench_flags;
    auto* bench = app.add_subcommand("bench", "clean train/test benchmark");
    add_experiment_flags(bench, bench_flags, false);

    ExperimentFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "clean benchmark plus the noise sweep");
    add_experiment_flags(sweep, sweep_flags, true);

    InjectFlags inj;
    auto* inject_cmd = app.add_subcommand("inject", "perturb a dataset with Gaussian noise");
    inject_cmd->add_option("--data", inj.data, "input CSV")->required();
    inject_cmd->add_option("--out", inj.out, "output CSV")->required();
    inject_cmd->add_option("--index", inj.index, "affected-row index file (default: <out>.rows)");
    inject_cmd->add_option("--fraction", inj.fraction, "fraction of rows to perturb")->required();
    inject_cmd->add_option("--noise-mean", inj.mean, "noise mean");
    inject_cmd->add_option("--noise-std", inj.std, "noise standard deviation");
    inject_cmd->add_option("--target,--noise-target", inj.target, "features|power|both");
    inject_cmd->add_option("--columns", inj.columns, "comma-separated feature columns (default: all)");
    inject_cmd->add_option("--seed", inj.seed, "noise seed");

    std::string report_in;
    std::optional<std::string> report_out;
    auto* report = app.add_subcommand("report", "rebuild sensitivity.csv and report.txt from emitted tables");
    report->add_option("--in", report_in, "directory holding clean_metrics.csv and noise_rmse.csv")->required();
    report->add_option("--out", report_out, "output directory (default: --in)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(synth_n, synth_seed, synth_residual, synth_out);
        }
        if (bench->parsed()) {
            const auto cfg = resolve(bench_flags);
            return finish(run_clean_benchmark(cfg), cfg);
        }
        if (sweep->parsed()) {
            const auto cfg = resolve(sweep_flags);
            return finish(run_noise_sweep(cfg), cfg);
        }
        if (inject_cmd->parsed()) {
            return cmd_inject(inj);
        }
        if (report->parsed()) {
            return cmd_report(report_in, report_out);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitModel;
    }
    return kExitConfig;
}
