#include "numprep/model_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <vector>

#include "numprep/errors.hpp"

namespace numprep {

namespace {

constexpr char kMagic[4] = {'N', 'P', 'M', 'L'};
constexpr std::uint16_t kVersion = 1;

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void u16(std::uint16_t v) { bytes(v, 2); }
    void u32(std::uint32_t v) { bytes(v, 4); }
    void i32(std::int32_t v) { bytes((std::uint32_t)v, 4); }
    void f64(double v) { bytes(std::bit_cast<std::uint64_t>(v), 8); }
    void raw(const char* p, std::size_t n) { out_.write(p, (std::streamsize)n); }

    void doubles(const std::vector<double>& v) {
        u32((std::uint32_t)v.size());
        for (double x : v) f64(x);
    }
    void ints(const std::vector<int>& v) {
        u32((std::uint32_t)v.size());
        for (int x : v) i32(x);
    }

private:
    void bytes(std::uint64_t v, int n) {
        char b[8];
        for (int i = 0; i < n; ++i) b[i] = (char)((v >> (8 * i)) & 0xff);
        out_.write(b, n);
    }
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in, std::string path)
        : in_(in), path_(std::move(path)) {}

    std::uint16_t u16() { return (std::uint16_t)bytes(2); }
    std::uint32_t u32() { return (std::uint32_t)bytes(4); }
    std::int32_t i32() { return (std::int32_t)bytes(4); }
    double f64() { return std::bit_cast<double>(bytes(8)); }

    void raw(char* p, std::size_t n) {
        in_.read(p, (std::streamsize)n);
        if (in_.gcount() != (std::streamsize)n)
            throw Truncated("model file ends early: " + path_);
    }
    std::vector<double> doubles(std::size_t expect = SIZE_MAX) {
        std::size_t n = u32();
        check_count(n, expect);
        std::vector<double> v(n);
        for (double& x : v) x = f64();
        return v;
    }
    std::vector<int> ints(std::size_t expect = SIZE_MAX) {
        std::size_t n = u32();
        check_count(n, expect);
        std::vector<int> v(n);
        for (int& x : v) x = i32();
        return v;
    }

private:
    void check_count(std::size_t n, std::size_t expect) {
        if (n > (1u << 28) || (expect != SIZE_MAX && n != expect))
            throw FormatError("implausible element count in " + path_);
    }
    std::uint64_t bytes(int n) {
        char b[8];
        in_.read(b, n);
        if (in_.gcount() != n) throw Truncated("model file ends early: " + path_);
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= (std::uint64_t)(std::uint8_t)b[i] << (8 * i);
        return v;
    }
    std::istream& in_;
    std::string path_;
};

void write_matrix(Writer& w, const FeatureMatrix& m) {
    w.u32((std::uint32_t)m.n_samples);
    w.u32((std::uint32_t)m.n_features);
    for (double x : m.values) w.f64(x);
}

FeatureMatrix read_matrix(Reader& r) {
    FeatureMatrix m;
    m.n_samples = (int)r.u32();
    m.n_features = (int)r.u32();
    if (m.n_samples < 0 || m.n_features < 0 ||
        (std::uint64_t)m.n_samples * m.n_features > (1u << 28))
        throw FormatError("implausible matrix shape");
    m.values.resize((std::size_t)m.n_samples * m.n_features);
    for (double& x : m.values) x = r.f64();
    return m;
}

void write_knn(Writer& w, const KnnModel& m) {
    w.u32((std::uint32_t)m.k);
    w.ints(m.labels);
    write_matrix(w, m.train);
}

KnnModel read_knn(Reader& r) {
    KnnModel m;
    m.k = (int)r.u32();
    m.labels = r.ints();
    m.train = read_matrix(r);
    if (m.labels.size() != (std::size_t)m.train.n_samples || m.k < 1 ||
        m.k > m.train.n_samples)
        throw FormatError("inconsistent knn payload");
    return m;
}

void write_logreg(Writer& w, const LogRegModel& m) {
    w.u32((std::uint32_t)m.n_features);
    w.ints(m.class_ids);
    w.doubles(m.weights);
}

LogRegModel read_logreg(Reader& r) {
    LogRegModel m;
    m.n_features = (int)r.u32();
    m.class_ids = r.ints();
    m.weights = r.doubles((std::size_t)m.class_ids.size() * (m.n_features + 1));
    if (m.class_ids.size() < 2 || m.n_features < 1)
        throw FormatError("inconsistent logreg payload");
    return m;
}

void write_tree(Writer& w, const TreeModel& m) {
    w.u32((std::uint32_t)m.n_features);
    w.u32((std::uint32_t)m.nodes.size());
    for (const TreeNode& n : m.nodes) {
        w.i32(n.feature);
        w.f64(n.threshold);
        w.i32(n.left);
        w.i32(n.right);
        w.i32(n.label);
    }
}

TreeModel read_tree(Reader& r) {
    TreeModel m;
    m.n_features = (int)r.u32();
    std::size_t n = r.u32();
    if (n == 0 || n > (1u << 26)) throw FormatError("implausible tree size");
    m.nodes.resize(n);
    for (TreeNode& node : m.nodes) {
        node.feature = r.i32();
        node.threshold = r.f64();
        node.left = r.i32();
        node.right = r.i32();
        node.label = r.i32();
        if (!node.is_leaf() &&
            (node.left < 0 || node.right < 0 || node.left >= (int)n ||
             node.right >= (int)n))
            throw FormatError("tree child index out of range");
    }
    return m;
}

void write_pca(Writer& w, const PcaModel& m) {
    w.u32((std::uint32_t)m.n_features);
    w.u32((std::uint32_t)m.n_components);
    w.u16(m.rank_deficient ? 1 : 0);
    w.doubles(m.mean);
    w.doubles(m.components);
    w.doubles(m.explained_variances);
}

PcaModel read_pca(Reader& r) {
    PcaModel m;
    m.n_features = (int)r.u32();
    m.n_components = (int)r.u32();
    m.rank_deficient = r.u16() != 0;
    m.mean = r.doubles((std::size_t)m.n_features);
    m.components = r.doubles((std::size_t)m.n_components * m.n_features);
    m.explained_variances = r.doubles((std::size_t)m.n_components);
    return m;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileNotFound("cannot write: " + path);
    Writer w(out);
    w.raw(kMagic, 4);
    w.u16(kVersion);
    w.u16((std::uint16_t)model.kind);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, KnnModel>) {
                write_knn(w, m);
            } else if constexpr (std::is_same_v<T, LogRegModel>) {
                write_logreg(w, m);
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                write_tree(w, m);
            } else if constexpr (std::is_same_v<T, KnnPcaModel>) {
                write_pca(w, m.pca);
                write_knn(w, m.knn);
            } else {
                write_pca(w, m.pca);
                write_logreg(w, m.logreg);
            }
        },
        model.impl);
    if (!out) throw FileNotFound("write failed: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound("cannot open: " + path);
    Reader r(in, path);
    char magic[4];
    r.raw(magic, 4);
    if (std::string(magic, 4) != std::string(kMagic, 4))
        throw FormatError("not a model file (bad magic): " + path);
    std::uint16_t version = r.u16();
    if (version != kVersion)
        throw FormatError("unsupported model version " + std::to_string(version) +
                          ": " + path);
    std::uint16_t kind = r.u16();

    Model model;
    model.kind = (ModelKind)kind;
    switch (model.kind) {
        case ModelKind::knn: model.impl = read_knn(r); break;
        case ModelKind::logreg: model.impl = read_logreg(r); break;
        case ModelKind::tree: model.impl = read_tree(r); break;
        case ModelKind::knn_pca: {
            KnnPcaModel m;
            m.pca = read_pca(r);
            m.knn = read_knn(r);
            model.impl = std::move(m);
            break;
        }
        case ModelKind::logreg_pca: {
            LogRegPcaModel m;
            m.pca = read_pca(r);
            m.logreg = read_logreg(r);
            model.impl = std::move(m);
            break;
        }
        default:
            throw FormatError("unknown model kind " + std::to_string(kind) + ": " +
                              path);
    }
    return model;
}

}  // namespace numprep
