#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edapp/cohort.hpp"
#include "edapp/optimizer.hpp"
#include "edapp/types.hpp"

namespace edapp {

struct FeatureVector {
    std::string subject_id;
    std::vector<double> values;
    std::vector<std::string> schema;
};

// Fixed schemas (documented in the README):
//   point-process: mu, a0, w_neg, w_rt, w_err, tau, n_events
//   SCR baseline:  tonic_mean, tonic_var, tonic_slope,
//                  scr_amp_mean, scr_amp_var, scr_rise_mean, scr_rise_var
const std::vector<std::string>& point_process_schema();
const std::vector<std::string>& summary_schema();

FeatureVector assemble_point_process_features(const FitReport& full_fit,
                                              const EventTrain& events,
                                              const std::string& subject_id);

FeatureVector assemble_summary_features(const SummaryAnnotations& annotations,
                                        const std::string& subject_id);

// Per-feature z-scaler fitted on training rows only; zero-variance features
// map to 0 (population standard deviation).
struct Scaler {
    std::vector<double> mean;
    std::vector<double> sd;
};

Scaler zscore_fit(const std::vector<std::vector<double>>& train);
std::vector<double> zscore_apply(const Scaler& scaler, std::span<const double> row);
std::vector<std::vector<double>> zscore_transform(const Scaler& scaler,
                                                  const std::vector<std::vector<double>>& rows);

struct SvmModel {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> coefficients;  // alpha_i * y_i per support vector
    double bias = 0.0;
    double gamma = 1.0;
    double C = 1.0;
    double kkt_residual = 0.0;  // max KKT violation on the training set
};

// gamma = 1 / (n_features * variance of all matrix entries); the usual
// "scale" default.
double gamma_scale(const std::vector<std::vector<double>>& rows);

// Soft-margin RBF SVM trained with sequential minimal optimization to KKT
// tolerance 1e-3. The seed only breaks ties in the working-set search.
SvmModel svm_train(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                   double C = 1.0, double gamma = 1.0, std::uint64_t seed = 0);

double svm_decision(const SvmModel& model, std::span<const double> x);

// Dual objective at the trained solution (for oracle cross-checks).
double svm_dual_objective(const SvmModel& model);

// Rank-based AUROC with midrank ties; labels are +-1.
double auroc(std::span<const double> scores, std::span<const int> labels);

enum class FeatureSet { kPointProcess, kScrBaseline, kCombined };

const char* featureset_name(FeatureSet f);
FeatureSet featureset_from_name(const std::string& name);

struct LosoOptions {
    FeatureSet featureset = FeatureSet::kPointProcess;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double C = 1.0;
    std::optional<double> gamma;  // absent: per-fold scale rule
    std::vector<std::string> positive_labels = {"D", "S"};
    std::vector<std::string> negative_labels = {"C"};
};

// Feature matrix + binary labels extracted from a fitted cohort. Subjects
// whose label is in neither class are skipped silently; subjects missing
// required annotations are excluded and counted.
struct LabeledFeatures {
    std::vector<std::string> subject_ids;
    std::vector<std::vector<double>> X;
    std::vector<int> y;  // +1 clinical, -1 control
    std::vector<std::string> schema;
    int n_excluded = 0;
};

LabeledFeatures assemble_features(const CohortDataset& cohort, const LosoOptions& opts);

struct FoldDecision {
    std::string subject_id;
    int label = 0;
    double score = 0.0;
    int predicted = 0;
};

struct EvalReport {
    std::vector<double> auroc_per_seed, sensitivity_per_seed, specificity_per_seed;
    double auroc_mean = 0.0, auroc_sd = 0.0;
    double sensitivity_mean = 0.0, sensitivity_sd = 0.0;
    double specificity_mean = 0.0, specificity_sd = 0.0;
    std::vector<FoldDecision> decisions;  // first seed
    double kkt_max = 0.0;                 // worst KKT residual over all folds/seeds
    int n_excluded = 0;
};

// Leave-one-subject-out evaluation: per fold the scaler and the SVM are fit
// on the remaining subjects only. Seeds shuffle the training-row order.
EvalReport loso_evaluate(const CohortDataset& cohort, const LosoOptions& opts);
EvalReport loso_evaluate(const LabeledFeatures& features, const LosoOptions& opts);

// Per-fold artifacts, exposed so tests can assert fold hygiene and so the
// permutation importance can re-score held-out rows without retraining.
struct TrainedFold {
    Scaler scaler;
    SvmModel model;
};

std::vector<TrainedFold> train_loso_folds(const LabeledFeatures& features,
                                          const LosoOptions& opts, std::uint64_t seed);
std::vector<double> score_heldout(const std::vector<TrainedFold>& folds,
                                  const std::vector<std::vector<double>>& rows);

struct AblationRow {
    std::string feature;
    double auroc_full_mean = 0.0;
    double auroc_without_mean = 0.0;
    double auroc_without_sd = 0.0;
    double delta = 0.0;  // auroc_without - auroc_full
    bool significant = false;
};

// Leave-one-feature-out re-evaluation.
std::vector<AblationRow> ablate(const CohortDataset& cohort, const LosoOptions& opts);

struct ImportanceRow {
    std::string feature;
    double importance_mean = 0.0;  // AUROC drop when the feature is shuffled
    double importance_sd = 0.0;    // Monte Carlo sd over shuffles
};

// Permutation importance on held-out predictions (feature-shuffle AUROC
// drop). This is a substitute for model-attribution methods, not SHAP.
std::vector<ImportanceRow> permutation_importance(const CohortDataset& cohort,
                                                  const LosoOptions& opts,
                                                  int n_shuffles = 20);

}  // namespace edapp
