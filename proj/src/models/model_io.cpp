#include "pvfdi/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "pvfdi/error.hpp"
#include "pvfdi/models/fields.hpp"

namespace pvfdi {

std::string hex_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", x);
    return buf;
}

namespace {

constexpr std::string_view kMagic = "pvfdi-model";

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void scalar(std::string_view key, double v) { out_ << "scalar " << key << ' ' << hex_double(v) << '\n'; }

    template <class Vec>
    void vector(std::string_view key, const Vec& v) {
        out_ << "vector " << key << ' ' << v.size();
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(v.size()); ++i) {
            out_ << ' ' << hex_double(v(i));
        }
        out_ << '\n';
    }

    template <class Mat>
    void matrix(std::string_view key, const Mat& m) {
        out_ << "matrix " << key << ' ' << m.rows() << ' ' << m.cols();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                out_ << ' ' << hex_double(m(r, c));
            }
        }
        out_ << '\n';
    }

    void tree(const RegressionTree& t) {
        out_ << "tree " << t.nodes.size() << '\n';
        for (const auto& n : t.nodes) {
            out_ << "node " << n.feature << ' ' << hex_double(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
                 << hex_double(n.value) << '\n';
        }
    }

    void operator()(const LinearModel& m) {
        vector("coefficients", m.coefficients);
        scalar("bias", m.bias);
    }
    void operator()(const GprModel& m) {
        scalar("length_scale", m.length_scale);
        scalar("noise_variance", m.noise_variance);
        scalar("jitter", m.jitter);
        matrix("inputs", m.inputs);
        vector("alpha", m.alpha);
    }
    void operator()(const KnnModel& m) {
        scalar("k", static_cast<double>(m.k));
        matrix("inputs", m.inputs);
        vector("targets", m.targets);
    }
    void operator()(const RegressionTree& m) { tree(m); }
    void operator()(const GbrtModel& m) {
        scalar("base_score", m.base_score);
        scalar("learning_rate", m.learning_rate);
        scalar("tree_count", static_cast<double>(m.trees.size()));
        for (const auto& t : m.trees) {
            tree(t);
        }
    }
    void operator()(const SvrModel& m) {
        scalar("kernel_linear", m.kernel == SvrKernel::Linear ? 1.0 : 0.0);
        scalar("gamma", m.gamma);
        scalar("bias", m.bias);
        scalar("converged", m.converged ? 1.0 : 0.0);
        scalar("iterations", static_cast<double>(m.iterations));
        scalar("kkt_violation", m.kkt_violation);
        matrix("support_vectors", m.support_vectors);
        vector("coefficients", m.coefficients);
    }
    void operator()(const MlpModel& m) {
        matrix("w1", m.w1);
        vector("b1", m.b1);
        vector("w2", m.w2);
        scalar("b2", m.b2);
    }

private:
    std::ostream& out_;
};

[[noreturn]] void malformed(const std::string& what) {
    throw IoError("malformed model file: " + what);
}

double read_hex(std::istream& in) {
    std::string token;
    double v = 0.0;
    if (!(in >> token) || !parse_field(token, v)) {
        malformed("expected a number, got '" + token + "'");
    }
    return v;
}

/// Everything after the header, keyed by record name.
struct Records {
    std::map<std::string, double> scalars;
    std::map<std::string, Eigen::VectorXd> vectors;
    std::map<std::string, Eigen::MatrixXd> matrices;
    std::vector<RegressionTree> trees;

    double scalar(const std::string& key) const {
        const auto it = scalars.find(key);
        if (it == scalars.end()) {
            malformed("missing scalar " + key);
        }
        return it->second;
    }
    const Eigen::VectorXd& vector(const std::string& key) const {
        const auto it = vectors.find(key);
        if (it == vectors.end()) {
            malformed("missing vector " + key);
        }
        return it->second;
    }
    const Eigen::MatrixXd& matrix(const std::string& key) const {
        const auto it = matrices.find(key);
        if (it == matrices.end()) {
            malformed("missing matrix " + key);
        }
        return it->second;
    }
};

RegressionTree read_tree(std::istream& in, std::size_t count) {
    RegressionTree t;
    t.nodes.resize(count);
    for (auto& n : t.nodes) {
        std::string tag;
        if (!(in >> tag) || tag != "node") {
            malformed("expected node record");
        }
        in >> n.feature;
        n.threshold = read_hex(in);
        in >> n.left >> n.right;
        n.value = read_hex(in);
        if (!in) {
            malformed("truncated node record");
        }
    }
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const auto& n = t.nodes[i];
        const auto size = static_cast<int>(t.nodes.size());
        if (!n.is_leaf() && (n.left <= static_cast<int>(i) || n.right <= static_cast<int>(i) || n.left >= size ||
                             n.right >= size)) {
            malformed("tree node " + std::to_string(i) + " has invalid children");
        }
    }
    if (t.nodes.empty()) {
        malformed("empty tree");
    }
    return t;
}

template <class Params>
void read_param(Params& params, const std::string& key, const std::string& value) {
    bool found = false;
    for_each_field(params, [&](const char* name, auto& field) {
        if (key == name) {
            found = true;
            if (!parse_field(value, field)) {
                malformed("bad value for param " + key);
            }
        }
    });
    if (!found) {
        malformed("unknown param " + key);
    }
}

} // namespace

void save_model(const TrainedModel& model, std::ostream& out) {
    const auto& spec = model.spec();
    out << kMagic << ' ' << kModelFormatVersion << '\n';
    out << "kind " << to_string(spec.kind) << '\n';
    out << "name " << spec.display_name() << '\n';
    out << "seed " << spec.seed << '\n';
    out << "feature_count " << model.feature_count() << '\n';
    std::visit(
        [&](const auto& params) {
            for_each_field_value(params, [&](const char* name, const auto& value) {
                using T = std::decay_t<decltype(value)>;
                if constexpr (std::is_same_v<T, double>) {
                    out << "param " << name << ' ' << hex_double(value) << '\n';
                } else {
                    out << "param " << name << ' ' << format_field(value) << '\n';
                }
            });
        },
        spec.params);
    Writer writer(out);
    std::visit(writer, model.fitted());
    out << "end\n";
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    save_model(model, out);
}

TrainedModel load_model(std::istream& in) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kMagic) {
        malformed("missing header");
    }
    if (version != kModelFormatVersion) {
        throw IoError("unsupported model format version " + std::to_string(version));
    }

    ModelSpec spec;
    bool have_kind = false;
    std::size_t feature_count = 0;
    Records rec;
    std::string tag;
    while (in >> tag) {
        if (tag == "end") {
            break;
        }
        if (tag == "kind") {
            std::string kind;
            in >> kind;
            const auto parsed = parse_model_kind(kind);
            if (!parsed) {
                malformed("unknown kind " + kind);
            }
            spec = ModelSpec::defaults(*parsed);
            have_kind = true;
        } else if (tag == "name") {
            std::getline(in >> std::ws, spec.name);
        } else if (tag == "seed") {
            in >> spec.seed;
        } else if (tag == "feature_count") {
            in >> feature_count;
        } else if (tag == "param") {
            if (!have_kind) {
                malformed("param before kind");
            }
            std::string key;
            std::string value;
            in >> key >> value;
            std::visit([&](auto& params) { read_param(params, key, value); }, spec.params);
        } else if (tag == "scalar") {
            std::string key;
            in >> key;
            rec.scalars[key] = read_hex(in);
        } else if (tag == "vector") {
            std::string key;
            Eigen::Index size = 0;
            in >> key >> size;
            if (!in || size < 0) {
                malformed("bad vector header");
            }
            Eigen::VectorXd v(size);
            for (Eigen::Index i = 0; i < size; ++i) {
                v(i) = read_hex(in);
            }
            rec.vectors[key] = std::move(v);
        } else if (tag == "matrix") {
            std::string key;
            Eigen::Index rows = 0;
            Eigen::Index cols = 0;
            in >> key >> rows >> cols;
            if (!in || rows < 0 || cols < 0) {
                malformed("bad matrix header");
            }
            Eigen::MatrixXd m(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) {
                    m(r, c) = read_hex(in);
                }
            }
            rec.matrices[key] = std::move(m);
        } else if (tag == "tree") {
            std::size_t count = 0;
            in >> count;
            rec.trees.push_back(read_tree(in, count));
        } else {
            malformed("unknown record '" + tag + "'");
        }
        if (!in) {
            malformed("truncated record '" + tag + "'");
        }
    }
    if (tag != "end") {
        malformed("missing end marker");
    }
    if (!have_kind || feature_count == 0) {
        malformed("missing kind or feature_count");
    }
    if (spec.name == to_string(spec.kind)) {
        spec.name.clear();
    }

    FittedParameters fitted;
    switch (spec.kind) {
    case ModelKind::LR:
    case ModelKind::LASSO:
        fitted = LinearModel{rec.vector("coefficients"), rec.scalar("bias"), {}};
        break;
    case ModelKind::GPR: {
        GprModel m;
        m.length_scale = rec.scalar("length_scale");
        m.noise_variance = rec.scalar("noise_variance");
        m.jitter = rec.scalar("jitter");
        m.inputs = rec.matrix("inputs");
        m.alpha = rec.vector("alpha");
        fitted = std::move(m);
        break;
    }
    case ModelKind::KNN:
        fitted = KnnModel{static_cast<std::size_t>(rec.scalar("k")), rec.matrix("inputs"), rec.vector("targets")};
        break;
    case ModelKind::DT:
        if (rec.trees.size() != 1) {
            malformed("DT needs exactly one tree");
        }
        fitted = rec.trees.front();
        break;
    case ModelKind::GBRT: {
        GbrtModel m;
        m.base_score = rec.scalar("base_score");
        m.learning_rate = rec.scalar("learning_rate");
        m.trees = std::move(rec.trees);
        if (m.trees.size() != static_cast<std::size_t>(rec.scalar("tree_count"))) {
            malformed("GBRT tree count mismatch");
        }
        fitted = std::move(m);
        break;
    }
    case ModelKind::SVR: {
        SvrModel m;
        m.kernel = rec.scalar("kernel_linear") != 0.0 ? SvrKernel::Linear : SvrKernel::Rbf;
        m.gamma = rec.scalar("gamma");
        m.bias = rec.scalar("bias");
        m.converged = rec.scalar("converged") != 0.0;
        m.iterations = static_cast<std::size_t>(rec.scalar("iterations"));
        m.kkt_violation = rec.scalar("kkt_violation");
        m.support_vectors = rec.matrix("support_vectors");
        m.coefficients = rec.vector("coefficients");
        fitted = std::move(m);
        break;
    }
    case ModelKind::MLPR: {
        MlpModel m;
        m.w1 = rec.matrix("w1");
        m.b1 = rec.vector("b1");
        m.w2 = rec.vector("w2");
        m.b2 = rec.scalar("b2");
        fitted = std::move(m);
        break;
    }
    }
    return TrainedModel(std::move(spec), std::move(fitted), feature_count);
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return load_model(in);
}

} // namespace pvfdi
