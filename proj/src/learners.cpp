#include "numprep/learners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "numprep/errors.hpp"

namespace numprep {

namespace {

void require_xy(const FeatureMatrix& X, const std::vector<int>& y) {
    if ((std::size_t)X.n_samples != y.size())
        throw std::invalid_argument("label count does not match sample count");
    if (X.values.size() != (std::size_t)X.n_samples * X.n_features)
        throw std::invalid_argument("feature matrix shape mismatch");
}

void require_features(int expected, const FeatureMatrix& X) {
    if (X.n_features != expected)
        throw std::invalid_argument("query feature width does not match model");
}

double now_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace

FeatureMatrix features_of(const std::vector<GrayImage>& imgs) {
    FeatureMatrix m;
    m.n_samples = (int)imgs.size();
    if (imgs.empty()) return m;
    m.n_features = imgs[0].width * imgs[0].height;
    m.values.reserve((std::size_t)m.n_samples * m.n_features);
    for (const GrayImage& im : imgs) {
        if (im.width != imgs[0].width || im.height != imgs[0].height)
            throw std::invalid_argument("images differ in size");
        for (std::uint8_t v : im.data) m.values.push_back(v / 255.0);
    }
    return m;
}

// ------------------------------------------------------------------- KNN

KnnModel knn_fit(const FeatureMatrix& X, const std::vector<int>& y, int k) {
    require_xy(X, y);
    if (X.n_samples == 0) throw EmptyTrainingSet("knn needs training rows");
    if (k < 1 || k > X.n_samples)
        throw std::invalid_argument("k must be in [1, n_train]");
    return KnnModel{X, y, k};
}

std::vector<int> knn_predict(const KnnModel& model, const FeatureMatrix& queries) {
    require_features(model.train.n_features, queries);
    const int n = model.train.n_samples;
    const int f = model.train.n_features;
    std::vector<int> out;
    out.reserve(queries.n_samples);
    std::vector<std::pair<double, int>> cand(n);  // (squared distance, label)

    for (int q = 0; q < queries.n_samples; ++q) {
        const double* qv = queries.row(q);
        for (int i = 0; i < n; ++i) {
            const double* tv = model.train.row(i);
            double d2 = 0;
            for (int j = 0; j < f; ++j) {
                double d = qv[j] - tv[j];
                d2 += d * d;
            }
            cand[i] = {d2, model.labels[i]};
        }
        std::partial_sort(cand.begin(), cand.begin() + model.k, cand.end());

        // vote among the k nearest; ties by summed distance, then label
        double votes[10] = {};
        double dist_sum[10] = {};
        bool seen[10] = {};
        for (int i = 0; i < model.k; ++i) {
            int lab = cand[i].second;
            votes[lab] += 1;
            dist_sum[lab] += std::sqrt(cand[i].first);
            seen[lab] = true;
        }
        int best = -1;
        for (int lab = 0; lab < 10; ++lab) {
            if (!seen[lab]) continue;
            if (best < 0 || votes[lab] > votes[best] ||
                (votes[lab] == votes[best] && dist_sum[lab] < dist_sum[best]))
                best = lab;
        }
        out.push_back(best);
    }
    return out;
}

// ------------------------------------------------------------------- PCA

namespace {

// C = cov(X) with 1/(n-1); row-major symmetric f x f.
std::vector<double> covariance(const FeatureMatrix& X,
                               const std::vector<double>& mean) {
    const int n = X.n_samples, f = X.n_features;
    std::vector<double> C((std::size_t)f * f, 0.0);
    std::vector<double> c(f);
    for (int i = 0; i < n; ++i) {
        const double* r = X.row(i);
        for (int a = 0; a < f; ++a) c[a] = r[a] - mean[a];
        for (int a = 0; a < f; ++a) {
            double va = c[a];
            if (va == 0.0) continue;
            double* Ca = C.data() + (std::size_t)a * f;
            for (int b = a; b < f; ++b) Ca[b] += va * c[b];
        }
    }
    double scale = 1.0 / std::max(n - 1, 1);
    for (int a = 0; a < f; ++a)
        for (int b = a; b < f; ++b) {
            double v = C[(std::size_t)a * f + b] * scale;
            C[(std::size_t)a * f + b] = v;
            C[(std::size_t)b * f + a] = v;
        }
    return C;
}

void matvec(const std::vector<double>& C, int f, const std::vector<double>& v,
            std::vector<double>& out) {
    for (int a = 0; a < f; ++a) {
        const double* Ca = C.data() + (std::size_t)a * f;
        double s = 0;
        for (int b = 0; b < f; ++b) s += Ca[b] * v[b];
        out[a] = s;
    }
}

// Removes the span of the first d rows of `comps` from v.
void project_out(const std::vector<double>& comps, int d, int f,
                 std::vector<double>& v) {
    for (int c = 0; c < d; ++c) {
        const double* pc = comps.data() + (std::size_t)c * f;
        double dot = 0;
        for (int a = 0; a < f; ++a) dot += pc[a] * v[a];
        for (int a = 0; a < f; ++a) v[a] -= dot * pc[a];
    }
}

double norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

PcaModel pca_fit(const FeatureMatrix& X, int d) {
    require_xy(X, std::vector<int>(X.n_samples));
    const int n = X.n_samples, f = X.n_features;
    if (n == 0) throw EmptyTrainingSet("pca needs samples");
    // Asking for more components than the samples can span is not an error:
    // the fit stops at the data's rank and flags the model instead.
    if (d < 1 || d > f)
        throw std::invalid_argument("d must be in [1, n_features]");

    PcaModel model;
    model.n_features = f;
    model.mean.assign(f, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* r = X.row(i);
        for (int a = 0; a < f; ++a) model.mean[a] += r[a];
    }
    for (double& m : model.mean) m /= n;

    std::vector<double> C = covariance(X, model.mean);

    // start vectors: basis directions in order of descending diagonal variance
    std::vector<int> starts(f);
    for (int a = 0; a < f; ++a) starts[a] = a;
    std::sort(starts.begin(), starts.end(), [&](int a, int b) {
        double da = C[(std::size_t)a * f + a], db = C[(std::size_t)b * f + b];
        return da != db ? da > db : a < b;
    });

    constexpr double kTol = 1e-10;
    constexpr int kMaxIters = 20000;
    std::vector<double> v(f), Cv(f);
    double lambda1 = 0;

    for (int comp = 0; comp < d; ++comp) {
        double lambda = 0;
        bool found = false;
        for (int s = 0; s < f && !found; ++s) {
            std::fill(v.begin(), v.end(), 0.0);
            v[starts[s]] = 1.0;
            project_out(model.components, comp, f, v);
            double nv = norm(v);
            if (nv < 1e-12) continue;  // start lies in the found span
            for (double& x : v) x /= nv;

            for (int it = 0; it < kMaxIters; ++it) {
                matvec(C, f, v, Cv);
                lambda = 0;
                for (int a = 0; a < f; ++a) lambda += v[a] * Cv[a];
                double res = 0;
                for (int a = 0; a < f; ++a) {
                    double r = Cv[a] - lambda * v[a];
                    res += r * r;
                }
                if (std::sqrt(res) <= kTol * std::max(1.0, lambda)) {
                    found = true;
                    break;
                }
                project_out(model.components, comp, f, Cv);
                double nn = norm(Cv);
                if (nn < 1e-300) break;  // collapsed into the found span
                for (int a = 0; a < f; ++a) v[a] = Cv[a] / nn;
                if (it == kMaxIters - 1) found = true;  // best effort
            }
        }
        if (comp == 0) lambda1 = std::max(lambda, 0.0);
        if (!found || lambda <= 0 || lambda <= lambda1 * 1e-12) {
            model.rank_deficient = true;
            break;
        }
        model.components.insert(model.components.end(), v.begin(), v.end());
        model.explained_variances.push_back(lambda);
        ++model.n_components;
    }
    if (model.n_components < d) model.rank_deficient = true;
    return model;
}

FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& X) {
    require_features(model.n_features, X);
    const int f = model.n_features, d = model.n_components;
    FeatureMatrix out;
    out.n_samples = X.n_samples;
    out.n_features = d;
    out.values.resize((std::size_t)X.n_samples * d);
    std::vector<double> c(f);
    for (int i = 0; i < X.n_samples; ++i) {
        const double* r = X.row(i);
        for (int a = 0; a < f; ++a) c[a] = r[a] - model.mean[a];
        for (int j = 0; j < d; ++j) {
            const double* pc = model.components.data() + (std::size_t)j * f;
            double s = 0;
            for (int a = 0; a < f; ++a) s += pc[a] * c[a];
            out.values[(std::size_t)i * d + j] = s;
        }
    }
    return out;
}

// ------------------------------------------- multinomial logistic regression

namespace {

// Softmax probabilities for every sample; returns mean cross-entropy + L2.
double forward(const LogRegModel& m, const FeatureMatrix& X,
               const std::vector<int>& y, double l2, std::vector<double>* probs) {
    const int n = X.n_samples, f = m.n_features, C = m.n_classes();
    if (probs) probs->resize((std::size_t)n * C);
    std::vector<int> class_index(10, -1);
    for (int c = 0; c < C; ++c) class_index[m.class_ids[c]] = c;

    double loss = 0;
    std::vector<double> z(C);
    for (int i = 0; i < n; ++i) {
        const double* r = X.row(i);
        for (int c = 0; c < C; ++c) {
            const double* w = m.weights.data() + (std::size_t)c * (f + 1);
            double s = w[f];  // bias
            for (int j = 0; j < f; ++j) s += w[j] * r[j];
            z[c] = s;
        }
        double zmax = *std::max_element(z.begin(), z.end());
        double sum = 0;
        for (int c = 0; c < C; ++c) {
            z[c] = std::exp(z[c] - zmax);
            sum += z[c];
        }
        int yc = class_index[y[i]];
        loss -= std::log(z[yc] / sum);
        if (probs)
            for (int c = 0; c < C; ++c) (*probs)[(std::size_t)i * C + c] = z[c] / sum;
    }
    loss /= n;
    double reg = 0;
    for (int c = 0; c < C; ++c) {
        const double* w = m.weights.data() + (std::size_t)c * (f + 1);
        for (int j = 0; j < f; ++j) reg += w[j] * w[j];
    }
    return loss + 0.5 * l2 * reg;
}

// Gradient given the probability matrix from forward().
std::vector<double> backward(const LogRegModel& m, const FeatureMatrix& X,
                             const std::vector<int>& y, double l2,
                             const std::vector<double>& probs) {
    const int n = X.n_samples, f = m.n_features, C = m.n_classes();
    std::vector<int> class_index(10, -1);
    for (int c = 0; c < C; ++c) class_index[m.class_ids[c]] = c;

    std::vector<double> g((std::size_t)C * (f + 1), 0.0);
    for (int i = 0; i < n; ++i) {
        const double* r = X.row(i);
        int yc = class_index[y[i]];
        for (int c = 0; c < C; ++c) {
            double delta = probs[(std::size_t)i * C + c] - (c == yc ? 1.0 : 0.0);
            if (delta == 0.0) continue;
            double* gc = g.data() + (std::size_t)c * (f + 1);
            for (int j = 0; j < f; ++j) gc[j] += delta * r[j];
            gc[f] += delta;
        }
    }
    for (double& x : g) x /= n;
    for (int c = 0; c < C; ++c) {
        const double* w = m.weights.data() + (std::size_t)c * (f + 1);
        double* gc = g.data() + (std::size_t)c * (f + 1);
        for (int j = 0; j < f; ++j) gc[j] += l2 * w[j];  // bias unregularized
    }
    return g;
}

}  // namespace

double logreg_loss(const LogRegModel& model, const FeatureMatrix& X,
                   const std::vector<int>& y, double l2) {
    require_xy(X, y);
    require_features(model.n_features, X);
    return forward(model, X, y, l2, nullptr);
}

std::vector<double> logreg_gradient(const LogRegModel& model,
                                    const FeatureMatrix& X,
                                    const std::vector<int>& y, double l2) {
    require_xy(X, y);
    require_features(model.n_features, X);
    std::vector<double> probs;
    forward(model, X, y, l2, &probs);
    return backward(model, X, y, l2, probs);
}

LogRegModel logreg_fit(const FeatureMatrix& X, const std::vector<int>& y,
                       const LogRegParams& params,
                       std::vector<double>* loss_curve) {
    require_xy(X, y);
    if (X.n_samples == 0) throw EmptyTrainingSet("logreg needs training rows");
    if (params.epochs < 0 || params.lr <= 0 || params.l2 < 0)
        throw std::invalid_argument("bad logreg parameters");
    std::set<int> classes(y.begin(), y.end());
    if (classes.size() < 2) throw SingleClass("logreg needs >= 2 classes");
    for (int c : classes)
        if (c < 0 || c > 9) throw std::invalid_argument("labels must be 0..9");

    LogRegModel m;
    m.class_ids.assign(classes.begin(), classes.end());
    m.n_features = X.n_features;
    m.weights.assign((std::size_t)m.n_classes() * (X.n_features + 1), 0.0);

    std::vector<double> probs;
    double loss = forward(m, X, y, params.l2, &probs);
    if (loss_curve) loss_curve->push_back(loss);

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        std::vector<double> g = backward(m, X, y, params.l2, probs);
        // backtracking keeps each epoch non-increasing; lr is the first try
        double step = params.lr;
        std::vector<double> saved = m.weights;
        for (;;) {
            for (std::size_t i = 0; i < m.weights.size(); ++i)
                m.weights[i] = saved[i] - step * g[i];
            double trial = forward(m, X, y, params.l2, &probs);
            if (trial <= loss) {
                loss = trial;
                break;
            }
            step *= 0.5;
            if (step < 1e-18) {  // no descent possible, keep the old weights
                m.weights = saved;
                forward(m, X, y, params.l2, &probs);
                break;
            }
        }
        if (loss_curve) loss_curve->push_back(loss);
    }
    return m;
}

std::vector<int> logreg_predict(const LogRegModel& model, const FeatureMatrix& X) {
    require_features(model.n_features, X);
    const int f = model.n_features, C = model.n_classes();
    std::vector<int> out;
    out.reserve(X.n_samples);
    for (int i = 0; i < X.n_samples; ++i) {
        const double* r = X.row(i);
        int best = 0;
        double best_z = -1e300;
        for (int c = 0; c < C; ++c) {
            const double* w = model.weights.data() + (std::size_t)c * (f + 1);
            double s = w[f];
            for (int j = 0; j < f; ++j) s += w[j] * r[j];
            if (s > best_z) {  // strict: ties keep the smaller class id
                best_z = s;
                best = c;
            }
        }
        out.push_back(model.class_ids[best]);
    }
    return out;
}

// ------------------------------------------------------------------ CART

namespace {

double gini(const std::array<int, 10>& counts, int total) {
    if (total == 0) return 0.0;
    double s = 0;
    for (int c : counts) {
        double p = (double)c / total;
        s += p * p;
    }
    return 1.0 - s;
}

int majority_label(const std::array<int, 10>& counts) {
    int best = 0;
    for (int lab = 1; lab < 10; ++lab)
        if (counts[lab] > counts[best]) best = lab;  // strict: smaller label wins ties
    return best;
}

struct TreeBuilder {
    const FeatureMatrix& X;
    const std::vector<int>& y;
    TreeParams p;
    std::vector<TreeNode> nodes;

    int build(std::vector<int> rows, int depth) {
        const int n = (int)rows.size();
        std::array<int, 10> counts{};
        for (int r : rows) ++counts[y[r]];
        int node_id = (int)nodes.size();
        nodes.push_back({});
        nodes[node_id].label = majority_label(counts);

        bool pure = false;
        for (int c : counts)
            if (c == n) pure = true;
        if (pure || depth >= p.max_depth || n < 2 * p.min_leaf) return node_id;

        // best (feature, threshold) by weighted child Gini; first wins ties
        int best_f = -1;
        double best_t = 0, best_imp = 1e300;
        std::vector<std::pair<double, int>> col(n);
        for (int f = 0; f < X.n_features; ++f) {
            for (int i = 0; i < n; ++i) col[i] = {X.at(rows[i], f), y[rows[i]]};
            std::sort(col.begin(), col.end());
            std::array<int, 10> left{};
            for (int i = 1; i < n; ++i) {
                ++left[col[i - 1].second];
                if (col[i].first == col[i - 1].first) continue;
                if (i < p.min_leaf || n - i < p.min_leaf) continue;
                std::array<int, 10> right{};
                for (int c = 0; c < 10; ++c) right[c] = counts[c] - left[c];
                double imp =
                    (i * gini(left, i) + (n - i) * gini(right, n - i)) / n;
                if (imp < best_imp - 1e-12) {
                    best_imp = imp;
                    best_f = f;
                    best_t = (col[i - 1].first + col[i].first) / 2.0;
                }
            }
        }
        if (best_f < 0) return node_id;  // no valid split (constant features)

        std::vector<int> lrows, rrows;
        for (int r : rows) (X.at(r, best_f) < best_t ? lrows : rrows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        nodes[node_id].feature = best_f;
        nodes[node_id].threshold = best_t;
        int l = build(std::move(lrows), depth + 1);
        int r = build(std::move(rrows), depth + 1);
        nodes[node_id].left = l;
        nodes[node_id].right = r;
        return node_id;
    }
};

}  // namespace

TreeModel tree_fit(const FeatureMatrix& X, const std::vector<int>& y,
                   const TreeParams& params) {
    require_xy(X, y);
    if (X.n_samples == 0) throw EmptyTrainingSet("tree needs training rows");
    if (params.max_depth < 0 || params.min_leaf < 1)
        throw std::invalid_argument("bad tree parameters");
    for (int c : y)
        if (c < 0 || c > 9) throw std::invalid_argument("labels must be 0..9");

    TreeBuilder b{X, y, params, {}};
    std::vector<int> rows(X.n_samples);
    for (int i = 0; i < X.n_samples; ++i) rows[i] = i;
    b.build(std::move(rows), 0);
    return TreeModel{std::move(b.nodes), X.n_features};
}

std::vector<int> tree_predict(const TreeModel& model, const FeatureMatrix& X) {
    require_features(model.n_features, X);
    std::vector<int> out;
    out.reserve(X.n_samples);
    for (int i = 0; i < X.n_samples; ++i) {
        const TreeNode* node = &model.nodes[0];
        while (!node->is_leaf())
            node = &model.nodes[X.at(i, node->feature) < node->threshold
                                    ? node->left
                                    : node->right];
        out.push_back(node->label);
    }
    return out;
}

// ------------------------------------------------------------- evaluation

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "knn") return ModelKind::knn;
    if (name == "logreg") return ModelKind::logreg;
    if (name == "tree") return ModelKind::tree;
    if (name == "knn_pca") return ModelKind::knn_pca;
    if (name == "logreg_pca") return ModelKind::logreg_pca;
    throw std::invalid_argument("unknown model: " + name);
}

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::knn: return "knn";
        case ModelKind::logreg: return "logreg";
        case ModelKind::tree: return "tree";
        case ModelKind::knn_pca: return "knn_pca";
        case ModelKind::logreg_pca: return "logreg_pca";
    }
    throw std::invalid_argument("unknown model kind");
}

Model fit_model(ModelKind kind, const FeatureMatrix& X, const std::vector<int>& y,
                const LearnerParams& params) {
    require_xy(X, y);
    if (X.n_samples == 0) throw EmptyTrainingSet("cannot fit on empty data");
    int pca_d = std::clamp(params.pca_components, 1,
                           std::max(1, std::min(X.n_samples, X.n_features)));
    Model model;
    model.kind = kind;
    double t0 = now_seconds();
    switch (kind) {
        case ModelKind::knn:
            model.impl = knn_fit(X, y, std::min(params.knn_k, X.n_samples));
            break;
        case ModelKind::logreg:
            model.impl = logreg_fit(X, y, params.logreg);
            break;
        case ModelKind::tree:
            model.impl = tree_fit(X, y, params.tree);
            break;
        case ModelKind::knn_pca: {
            KnnPcaModel m;
            m.pca = pca_fit(X, pca_d);
            m.knn = knn_fit(pca_transform(m.pca, X), y,
                            std::min(params.knn_k, X.n_samples));
            model.impl = std::move(m);
            break;
        }
        case ModelKind::logreg_pca: {
            LogRegPcaModel m;
            m.pca = pca_fit(X, pca_d);
            m.logreg = logreg_fit(pca_transform(m.pca, X), y, params.logreg);
            model.impl = std::move(m);
            break;
        }
    }
    model.fit_seconds = now_seconds() - t0;
    return model;
}

std::vector<int> predict(const Model& model, const FeatureMatrix& X) {
    return std::visit(
        [&](const auto& m) -> std::vector<int> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, KnnModel>) {
                return knn_predict(m, X);
            } else if constexpr (std::is_same_v<T, LogRegModel>) {
                return logreg_predict(m, X);
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                return tree_predict(m, X);
            } else if constexpr (std::is_same_v<T, KnnPcaModel>) {
                return knn_predict(m.knn, pca_transform(m.pca, X));
            } else {
                return logreg_predict(m.logreg, pca_transform(m.pca, X));
            }
        },
        model.impl);
}

Metrics evaluate(const Model& model, const FeatureMatrix& X_test,
                 const std::vector<int>& y_test) {
    require_xy(X_test, y_test);
    if (X_test.n_samples == 0) throw EmptyTestSet("cannot evaluate on empty data");
    for (int c : y_test)
        if (c < 0 || c > 9) throw std::invalid_argument("labels must be 0..9");

    Metrics m;
    m.fit_seconds = model.fit_seconds;
    double t0 = now_seconds();
    std::vector<int> pred = predict(model, X_test);
    m.predict_seconds = now_seconds() - t0;

    std::int64_t correct = 0;
    for (int i = 0; i < X_test.n_samples; ++i) {
        int p = std::clamp(pred[i], 0, 9);
        ++m.confusion[y_test[i]][p];
        if (pred[i] == y_test[i]) ++correct;
    }
    m.accuracy = (double)correct / X_test.n_samples;
    return m;
}

}  // namespace numprep
