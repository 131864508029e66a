#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "numprep/raster.hpp"

namespace numprep {

/**
 * @brief Row-major real-valued sample matrix.
 *
 * Image features are pixels scaled to [0,1] (divide by 255).
 */
struct FeatureMatrix {
    int n_samples = 0;
    int n_features = 0;
    std::vector<double> values;

    double at(int i, int j) const {
        return values[(std::size_t)i * n_features + j];
    }
    const double* row(int i) const {
        return values.data() + (std::size_t)i * n_features;
    }

    bool operator==(const FeatureMatrix&) const = default;
};

/// Flattens same-sized images into one row each, pixels scaled by 1/255.
FeatureMatrix features_of(const std::vector<GrayImage>& imgs);

// ------------------------------------------------------------------- KNN

struct KnnModel {
    FeatureMatrix train;
    std::vector<int> labels;
    int k = 5;
};

KnnModel knn_fit(const FeatureMatrix& X, const std::vector<int>& y, int k);

/**
 * @brief Majority vote over the k nearest training rows by Euclidean
 * distance.
 *
 * Neighbor selection orders by (distance, label); vote ties go to the label
 * with the smaller summed distance, then to the smaller label. Both rules
 * make the result invariant under permutations of the training rows.
 */
std::vector<int> knn_predict(const KnnModel& model, const FeatureMatrix& queries);

// ------------------------------------------------------------------- PCA

struct PcaModel {
    int n_features = 0;
    int n_components = 0;
    std::vector<double> mean;                 // n_features
    std::vector<double> components;           // n_components x n_features
    std::vector<double> explained_variances;  // non-increasing
    bool rank_deficient = false;  // fewer components than requested exist
};

/**
 * @brief Top-d principal components of the sample covariance (1/(n-1)).
 *
 * Deflated power iteration; each component is accepted at eigen-residual
 * ||Cv - lambda v|| <= 1e-10 * max(1, lambda). When the data has fewer than
 * d positive-variance directions the model carries fewer components and sets
 * rank_deficient instead of failing.
 */
PcaModel pca_fit(const FeatureMatrix& X, int d);

/// Projects mean-centered rows onto the components.
FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& X);

// ------------------------------------------- multinomial logistic regression

struct LogRegModel {
    std::vector<int> class_ids;  // sorted ascending
    int n_features = 0;
    std::vector<double> weights;  // n_classes x (n_features + 1), bias last

    int n_classes() const { return (int)class_ids.size(); }
};

struct LogRegParams {
    int epochs = 300;
    double lr = 0.5;
    double l2 = 1e-4;
};

/**
 * @brief Softmax regression by full-batch gradient descent.
 *
 * Weights start at zero, so the fit is deterministic. Each epoch starts from
 * step size `lr` and halves it until the mean cross-entropy (plus L2 on the
 * non-bias weights) does not increase, which makes the loss monotonically
 * non-increasing by construction. `loss_curve`, when given, receives the
 * initial loss followed by the loss after every epoch.
 */
LogRegModel logreg_fit(const FeatureMatrix& X, const std::vector<int>& y,
                       const LogRegParams& params = {},
                       std::vector<double>* loss_curve = nullptr);

std::vector<int> logreg_predict(const LogRegModel& model, const FeatureMatrix& X);

/// Mean cross-entropy + (l2/2)*sum(w^2) over non-bias weights.
double logreg_loss(const LogRegModel& model, const FeatureMatrix& X,
                   const std::vector<int>& y, double l2);

/// Analytic gradient of logreg_loss with respect to every weight, laid out
/// like LogRegModel::weights.
std::vector<double> logreg_gradient(const LogRegModel& model,
                                    const FeatureMatrix& X,
                                    const std::vector<int>& y, double l2);

// ------------------------------------------------------------------ CART

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = -1;  // leaf prediction

    bool is_leaf() const { return feature < 0; }
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    int n_features = 0;
};

struct TreeParams {
    int max_depth = 12;
    int min_leaf = 2;
};

/**
 * @brief CART with Gini impurity, thresholds at midpoints of sorted distinct
 * feature values.
 *
 * Best split by impurity decrease, ties to the lower feature index then the
 * lower threshold; rows with value < threshold go left. Impure nodes split
 * even at zero gain as long as a valid split exists. Leaves predict the
 * majority label, ties to the smaller label.
 */
TreeModel tree_fit(const FeatureMatrix& X, const std::vector<int>& y,
                   const TreeParams& params = {});

std::vector<int> tree_predict(const TreeModel& model, const FeatureMatrix& X);

// ------------------------------------------------------------- evaluation

struct Metrics {
    double accuracy = 0.0;
    std::array<std::array<std::int64_t, 10>, 10> confusion{};  // [actual][predicted]
    double fit_seconds = 0.0;
    double predict_seconds = 0.0;
};

enum class ModelKind : std::uint16_t {
    knn = 1,
    logreg = 2,
    tree = 3,
    knn_pca = 4,
    logreg_pca = 5,
};

/// Parses "knn", "logreg", "tree", "knn_pca", "logreg_pca"; throws
/// std::invalid_argument otherwise.
ModelKind model_kind_from_name(const std::string& name);
std::string model_kind_name(ModelKind kind);

struct KnnPcaModel {
    PcaModel pca;
    KnnModel knn;
};

struct LogRegPcaModel {
    PcaModel pca;
    LogRegModel logreg;
};

struct LearnerParams {
    int knn_k = 5;
    int pca_components = 50;
    LogRegParams logreg{};
    TreeParams tree{};
};

struct Model {
    ModelKind kind = ModelKind::knn;
    std::variant<KnnModel, LogRegModel, TreeModel, KnnPcaModel, LogRegPcaModel> impl;
    double fit_seconds = 0.0;  // captured at fit time, not serialized
};

/// Fits the requested model, recording wall-clock fit time. PCA component
/// counts are clamped to the data's limit min(n_samples, n_features).
Model fit_model(ModelKind kind, const FeatureMatrix& X, const std::vector<int>& y,
                const LearnerParams& params = {});

std::vector<int> predict(const Model& model, const FeatureMatrix& X);

/// Accuracy, 10x10 confusion (labels must be 0..9), and wall times. Fit time
/// is carried over from the model.
Metrics evaluate(const Model& model, const FeatureMatrix& X_test,
                 const std::vector<int>& y_test);

}  // namespace numprep
