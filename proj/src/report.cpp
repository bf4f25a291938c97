#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "pvfdi/error.hpp"
#include "pvfdi/experiment.hpp"

namespace pvfdi {

namespace {

std::string cell(double v) {
    return std::isnan(v) ? std::string() : format_double(v);
}

std::string sanitize(std::string s) {
    for (auto& c : s) {
        if (c == ',' || c == '\n' || c == '\r') {
            c = ';';
        }
    }
    return s;
}

std::string file_stem(const std::string& model) {
    std::string out;
    for (const char c : model) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content, EmitResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << content;
    out.close();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
    result.files.push_back(path);
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
}

std::string clean_csv(const std::vector<CleanRow>& rows) {
    std::ostringstream os;
    os << "model,rmse,mse,mae,status\n";
    for (const auto& r : rows) {
        os << r.model << ',';
        if (r.metrics) {
            os << format_double(r.metrics->rmse) << ',' << format_double(r.metrics->mse) << ','
               << format_double(r.metrics->mae) << ",ok\n";
        } else {
            os << ",,,error: " << sanitize(r.error) << '\n';
        }
    }
    return os.str();
}

std::string grid_csv(const std::vector<std::string>& labels, const std::vector<std::string>& models,
                     const std::vector<std::vector<double>>& values) {
    std::ostringstream os;
    os << "model";
    for (const auto& l : labels) {
        os << ',' << l;
    }
    os << '\n';
    for (std::size_t m = 0; m < models.size(); ++m) {
        os << models[m];
        for (const double v : values[m]) {
            os << ',' << cell(v);
        }
        os << '\n';
    }
    return os.str();
}

std::vector<std::string> noise_labels(const NoiseTable& t) {
    std::vector<std::string> out;
    for (const double f : t.fractions) {
        out.push_back(percent_label(f));
    }
    return out;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') {
            field.pop_back();
        }
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            rows.push_back(split_line(line));
        }
    }
    if (rows.empty()) {
        throw EmptyFile(path.string());
    }
    return rows;
}

double parse_cell(const std::string& s, const std::filesystem::path& path) {
    if (s.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw DataError("bad number '" + s + "' in " + path.string());
}

/// Reads a model x label grid; returns the header labels after "model".
std::vector<std::string> read_grid(const std::filesystem::path& path, std::vector<std::string>& models,
                                   std::vector<std::vector<double>>& values) {
    const auto rows = read_rows(path);
    const std::vector<std::string> labels(rows.front().begin() + 1, rows.front().end());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != labels.size() + 1) {
            throw DataError(path.string() + ": row " + std::to_string(r) + " has the wrong number of cells");
        }
        models.push_back(rows[r][0]);
        std::vector<double> v;
        for (std::size_t c = 1; c < rows[r].size(); ++c) {
            v.push_back(parse_cell(rows[r][c], path));
        }
        values.push_back(std::move(v));
    }
    return labels;
}

double parse_percent_label(std::string label, const std::filesystem::path& path) {
    const auto vs = label.find("vs.");
    if (vs != std::string::npos) {
        label = label.substr(vs + 3);
    }
    while (!label.empty() && label.front() == ' ') {
        label.erase(label.begin());
    }
    if (label.empty() || label.back() != '%') {
        throw DataError("bad column label '" + label + "' in " + path.string());
    }
    label.pop_back();
    return parse_cell(label, path) / 100.0;
}

std::string fixed(double v, int digits) {
    if (std::isnan(v)) {
        return "n/a";
    }
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

void text_table(std::ostringstream& os, const std::string& title, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size(), 0);
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& r : rows) {
            width[c] = std::max(width[c], r[c].size());
        }
    }
    os << title << '\n';
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == 0) {
                os << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
            } else {
                os << "  " << std::right << std::setw(static_cast<int>(width[c])) << cells[c];
            }
        }
        os << '\n';
    };
    line(header);
    std::size_t total = 0;
    for (const auto w : width) {
        total += w + 2;
    }
    os << std::string(total - 2, '-') << '\n';
    for (const auto& r : rows) {
        line(r);
    }
    os << '\n';
}

} // namespace

std::string render_text_report(const ExperimentReport& report) {
    std::ostringstream os;
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : report.clean_table) {
            if (r.metrics) {
                rows.push_back({r.model, fixed(r.metrics->rmse, 4), fixed(r.metrics->mse, 4), fixed(r.metrics->mae, 4)});
            } else {
                rows.push_back({r.model, "error", "error", "error"});
            }
        }
        text_table(os, "Clean test-set performance", {"model", "RMSE", "MSE", "MAE"}, rows);
    }
    if (report.noise_table) {
        const auto& t = *report.noise_table;
        std::vector<std::string> header{"model"};
        for (const auto& l : noise_labels(t)) {
            header.push_back(l);
        }
        std::vector<std::vector<std::string>> rows;
        for (std::size_t m = 0; m < t.models.size(); ++m) {
            std::vector<std::string> row{t.models[m]};
            for (const double v : t.rmse[m]) {
                row.push_back(fixed(v, 4));
            }
            rows.push_back(std::move(row));
        }
        text_table(os, "RMSE under Gaussian injection (fraction of test rows)", header, rows);
    }
    if (report.sensitivity_table) {
        const auto& t = *report.sensitivity_table;
        std::vector<std::string> header{"model"};
        for (const auto& l : t.labels()) {
            header.push_back(l);
        }
        std::vector<std::vector<std::string>> rows;
        for (std::size_t m = 0; m < t.models.size(); ++m) {
            std::vector<std::string> row{t.models[m]};
            for (const double v : t.percent[m]) {
                row.push_back(std::isnan(v) ? "n/a" : fixed(v, 2) + "%");
            }
            rows.push_back(std::move(row));
        }
        text_table(os, "Relative RMSE change", header, rows);
    }
    for (const auto& r : report.clean_table) {
        if (!r.metrics) {
            os << "model " << r.model << " failed: " << r.error << '\n';
        }
    }
    return os.str();
}

EmitResult emit_report(const ExperimentReport& report, const std::filesystem::path& dir) {
    ensure_dir(dir);
    EmitResult result;
    write_file(dir / "clean_metrics.csv", clean_csv(report.clean_table), result);
    if (report.noise_table) {
        const auto& t = *report.noise_table;
        write_file(dir / "noise_rmse.csv", grid_csv(noise_labels(t), t.models, t.rmse), result);
    } else {
        result.notices.push_back("no noise table in report; skipped noise_rmse.csv");
    }
    if (report.sensitivity_table) {
        const auto& t = *report.sensitivity_table;
        write_file(dir / "sensitivity.csv", grid_csv(t.labels(), t.models, t.percent), result);
    } else {
        result.notices.push_back("no sensitivity table in report; skipped sensitivity.csv");
    }
    write_file(dir / "provenance.json", report.provenance.dump(2) + "\n", result);
    write_file(dir / "report.txt", render_text_report(report), result);
    return result;
}

EmitResult emit_plot_series(const ExperimentReport& report, const std::filesystem::path& dir) {
    const auto series_dir = dir / "series";
    ensure_dir(series_dir);
    EmitResult result;
    auto series_csv = [](const EvaluationSeries& s) {
        std::ostringstream os;
        os << "index,actual,predicted\n";
        for (std::size_t i = 0; i < s.actual.size(); ++i) {
            os << i << ',' << format_double(s.actual[i]) << ',' << format_double(s.predicted[i]) << '\n';
        }
        return os.str();
    };
    for (const auto& p : report.prediction_series) {
        const auto stem = file_stem(p.model);
        write_file(series_dir / (stem + "_clean.csv"), series_csv(p.clean), result);
        if (p.noisy) {
            write_file(series_dir / (stem + "_noisy.csv"), series_csv(*p.noisy), result);
        }
    }
    return result;
}

std::vector<CleanRow> read_clean_csv(const std::filesystem::path& path) {
    const auto rows = read_rows(path);
    std::vector<CleanRow> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != 5) {
            throw DataError(path.string() + ": row " + std::to_string(r) + " has the wrong number of cells");
        }
        CleanRow c;
        c.model = row[0];
        if (row[4] == "ok") {
            c.metrics = MetricTriple{parse_cell(row[1], path), parse_cell(row[2], path), parse_cell(row[3], path)};
        } else {
            c.error = row[4].rfind("error: ", 0) == 0 ? row[4].substr(7) : row[4];
        }
        out.push_back(std::move(c));
    }
    return out;
}

NoiseTable read_noise_csv(const std::filesystem::path& path) {
    NoiseTable t;
    for (const auto& label : read_grid(path, t.models, t.rmse)) {
        t.fractions.push_back(parse_percent_label(label, path));
    }
    return t;
}

SensitivityTable read_sensitivity_csv(const std::filesystem::path& path) {
    SensitivityTable t;
    for (const auto& label : read_grid(path, t.models, t.percent)) {
        t.fractions.push_back(parse_percent_label(label, path));
    }
    return t;
}

} // namespace pvfdi
