#include "edapp/ml.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edapp/errors.hpp"
#include "edapp/rng.hpp"

namespace edapp {

const std::vector<std::string>& point_process_schema() {
    static const std::vector<std::string> schema = {"mu",   "a0",  "w_neg",   "w_rt",
                                                    "w_err", "tau", "n_events"};
    return schema;
}

const std::vector<std::string>& summary_schema() {
    static const std::vector<std::string> schema = {
        "tonic_mean",   "tonic_var",   "tonic_slope", "scr_amp_mean",
        "scr_amp_var",  "scr_rise_mean", "scr_rise_var"};
    return schema;
}

FeatureVector assemble_point_process_features(const FitReport& full_fit,
                                              const EventTrain& events,
                                              const std::string& subject_id) {
    if (full_fit.params.variant != Variant::kFull) {
        throw ValidationError("point-process features require a full-variant fit");
    }
    const ModelParams& p = full_fit.params;
    FeatureVector fv;
    fv.subject_id = subject_id;
    fv.schema = point_process_schema();
    fv.values = {p.mu,  p.a0, p.w_neg,
                 p.w_rt, p.w_err, p.tau,
                 static_cast<double>(events.size())};
    return fv;
}

namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double population_var(std::span<const double> v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

FeatureVector assemble_summary_features(const SummaryAnnotations& annotations,
                                        const std::string& subject_id) {
    if (annotations.tonic_samples.size() < 2) {
        throw FeatureUnavailableError("subject " + subject_id +
                                      ": needs at least 2 tonic samples");
    }
    if (annotations.scr_amplitudes.empty() || annotations.scr_rise_times_s.empty()) {
        throw FeatureUnavailableError("subject " + subject_id +
                                      ": needs at least 1 annotated SCR");
    }

    std::vector<double> times, levels;
    times.reserve(annotations.tonic_samples.size());
    for (const auto& [t, v] : annotations.tonic_samples) {
        times.push_back(t);
        levels.push_back(v);
    }
    const double t_mean = mean_of(times);
    const double l_mean = mean_of(levels);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        sxx += (times[i] - t_mean) * (times[i] - t_mean);
        sxy += (times[i] - t_mean) * (levels[i] - l_mean);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;

    FeatureVector fv;
    fv.subject_id = subject_id;
    fv.schema = summary_schema();
    fv.values = {l_mean,
                 population_var(levels),
                 slope,
                 mean_of(annotations.scr_amplitudes),
                 population_var(annotations.scr_amplitudes),
                 mean_of(annotations.scr_rise_times_s),
                 population_var(annotations.scr_rise_times_s)};
    return fv;
}

Scaler zscore_fit(const std::vector<std::vector<double>>& train) {
    if (train.size() < 2) throw ValidationError("z-scaler needs at least 2 training rows");
    const std::size_t d = train.front().size();
    Scaler scaler;
    scaler.mean.assign(d, 0.0);
    scaler.sd.assign(d, 0.0);
    for (const auto& row : train) {
        if (row.size() != d) throw ValidationError("ragged feature matrix");
        for (std::size_t j = 0; j < d; ++j) scaler.mean[j] += row[j];
    }
    for (double& m : scaler.mean) m /= static_cast<double>(train.size());
    for (const auto& row : train) {
        for (std::size_t j = 0; j < d; ++j) {
            const double delta = row[j] - scaler.mean[j];
            scaler.sd[j] += delta * delta;
        }
    }
    for (double& s : scaler.sd) s = std::sqrt(s / static_cast<double>(train.size()));
    return scaler;
}

std::vector<double> zscore_apply(const Scaler& scaler, std::span<const double> row) {
    if (row.size() != scaler.mean.size()) throw ValidationError("feature width mismatch");
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
        out[j] = scaler.sd[j] > 0.0 ? (row[j] - scaler.mean[j]) / scaler.sd[j] : 0.0;
    }
    return out;
}

std::vector<std::vector<double>> zscore_transform(const Scaler& scaler,
                                                  const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(zscore_apply(scaler, row));
    return out;
}

double gamma_scale(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) throw ValidationError("empty feature matrix");
    const double d = static_cast<double>(rows.front().size());
    std::vector<double> flat;
    flat.reserve(rows.size() * rows.front().size());
    for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
    const double var = population_var(flat);
    return var > 1e-12 ? 1.0 / (d * var) : 1.0 / d;
}

namespace {

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
    double dist = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double delta = a[i] - b[i];
        dist += delta * delta;
    }
    return std::exp(-gamma * dist);
}

// Platt-style SMO on the precomputed kernel matrix. Decision function
// convention: f(x) = sum_i alpha_i y_i k(x_i, x) + b.
class SmoSolver {
public:
    SmoSolver(const std::vector<std::vector<double>>& X, const std::vector<int>& y, double C,
              double gamma, std::uint64_t seed)
        : X_(X), y_(y), C_(C), n_(X.size()), rng_(seed) {
        kernel_.assign(n_, std::vector<double>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                kernel_[i][j] = kernel_[j][i] = rbf(X[i], X[j], gamma);
            }
        }
        alpha_.assign(n_, 0.0);
        errors_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) errors_[i] = -static_cast<double>(y_[i]);
    }

    void solve() {
        int num_changed = 0;
        bool examine_all = true;
        int sweeps = 0;
        while (num_changed > 0 || examine_all) {
            if (++sweeps > kMaxSweeps) {
                throw NumericError("SMO failed to converge within the sweep limit");
            }
            num_changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (examine_all || (alpha_[i] > 0.0 && alpha_[i] < C_)) {
                    num_changed += examine(i);
                }
            }
            if (examine_all) {
                examine_all = false;
            } else if (num_changed == 0) {
                examine_all = true;
            }
        }
    }

    double kkt_residual() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double margin = static_cast<double>(y_[i]) * (errors_[i] + y_[i]);
            double violation = 0.0;
            if (alpha_[i] <= 0.0) {
                violation = std::max(0.0, 1.0 - margin);
            } else if (alpha_[i] >= C_) {
                violation = std::max(0.0, margin - 1.0);
            } else {
                violation = std::abs(margin - 1.0);
            }
            worst = std::max(worst, violation);
        }
        return worst;
    }

    const std::vector<double>& alphas() const { return alpha_; }
    double bias() const { return b_; }

private:
    static constexpr double kTol = 1e-3;
    static constexpr double kEps = 1e-12;
    static constexpr int kMaxSweeps = 10000;

    int examine(std::size_t i2) {
        const double y2 = y_[i2];
        const double a2 = alpha_[i2];
        const double e2 = errors_[i2];
        const double r2 = e2 * y2;
        if (!((r2 < -kTol && a2 < C_) || (r2 > kTol && a2 > 0.0))) return 0;

        // best |E1 - E2| over non-bound candidates
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] > 0.0 && alpha_[i] < C_) {
                const double gap = std::abs(errors_[i] - e2);
                if (gap > best_gap) {
                    best_gap = gap;
                    best = i;
                }
            }
        }
        if (best < n_ && take_step(best, i2)) return 1;

        const std::size_t offset = static_cast<std::size_t>(rng_.next_u64() % n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i = (k + offset) % n_;
            if (alpha_[i] > 0.0 && alpha_[i] < C_ && take_step(i, i2)) return 1;
        }
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i = (k + offset) % n_;
            if (take_step(i, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1_old = alpha_[i1];
        const double a2_old = alpha_[i2];
        const double y1 = y_[i1];
        const double y2 = y_[i2];
        const double e1 = errors_[i1];
        const double e2 = errors_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2_old - a1_old);
            hi = std::min(C_, C_ + a2_old - a1_old);
        } else {
            lo = std::max(0.0, a1_old + a2_old - C_);
            hi = std::min(C_, a1_old + a2_old);
        }
        if (lo >= hi) return false;

        const double k11 = kernel_[i1][i1];
        const double k12 = kernel_[i1][i2];
        const double k22 = kernel_[i2][i2];
        const double eta = k11 + k22 - 2.0 * k12;
        if (eta <= 0.0) return false;  // duplicate inputs under an RBF kernel

        double a2_new = a2_old + y2 * (e1 - e2) / eta;
        a2_new = std::min(std::max(a2_new, lo), hi);
        if (std::abs(a2_new - a2_old) < kEps * (a2_new + a2_old + kEps)) return false;
        const double a1_new = a1_old + s * (a2_old - a2_new);

        const double d1 = y1 * (a1_new - a1_old);
        const double d2 = y2 * (a2_new - a2_old);
        const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
        double b_new;
        if (a1_new > 0.0 && a1_new < C_) {
            b_new = b1;
        } else if (a2_new > 0.0 && a2_new < C_) {
            b_new = b2;
        } else {
            b_new = 0.5 * (b1 + b2);
        }
        const double db = b_new - b_;

        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        b_ = b_new;
        for (std::size_t i = 0; i < n_; ++i) {
            errors_[i] += d1 * kernel_[i1][i] + d2 * kernel_[i2][i] + db;
        }
        return true;
    }

    const std::vector<std::vector<double>>& X_;
    const std::vector<int>& y_;
    double C_;
    std::size_t n_;
    Rng rng_;
    std::vector<std::vector<double>> kernel_;
    std::vector<double> alpha_;
    std::vector<double> errors_;  // E_i = f(x_i) - y_i
    double b_ = 0.0;
};

}  // namespace

SvmModel svm_train(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                   double C, double gamma, std::uint64_t seed) {
    if (rows.size() != labels.size() || rows.empty()) {
        throw ValidationError("SVM needs matching non-empty rows and labels");
    }
    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == 1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw ValidationError("SVM labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw ValidationError("SVM needs both classes present");
    if (!(C > 0.0) || !(gamma > 0.0)) throw ValidationError("C and gamma must be positive");
    for (const auto& row : rows) {
        for (double v : row) {
            if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
        }
    }

    SmoSolver solver(rows, labels, C, gamma, seed);
    solver.solve();

    SvmModel model;
    model.gamma = gamma;
    model.C = C;
    model.bias = solver.bias();
    model.kkt_residual = solver.kkt_residual();
    if (model.kkt_residual > 1e-3 * (1.0 + 1e-9)) {
        throw NumericError("SMO terminated with KKT residual above tolerance");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (solver.alphas()[i] > 1e-12) {
            model.support_vectors.push_back(rows[i]);
            model.coefficients.push_back(solver.alphas()[i] * labels[i]);
        }
    }
    return model;
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
    double score = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        score += model.coefficients[i] * rbf(model.support_vectors[i], x, model.gamma);
    }
    return score;
}

double svm_dual_objective(const SvmModel& model) {
    double linear = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        linear += std::abs(model.coefficients[i]);
        for (std::size_t j = 0; j < model.support_vectors.size(); ++j) {
            quad += model.coefficients[i] * model.coefficients[j] *
                    rbf(model.support_vectors[i], model.support_vectors[j], model.gamma);
        }
    }
    return linear - 0.5 * quad;
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw ValidationError("AUROC needs matching non-empty scores and labels");
    }
    std::size_t n_pos = 0, n_neg = 0;
    for (int y : labels) {
        if (y == 1) ++n_pos;
        else if (y == -1) ++n_neg;
        else throw ValidationError("AUROC labels must be +1 or -1");
    }
    if (n_pos == 0 || n_neg == 0) {
        throw ValidationError("AUROC undefined with a single class");
    }

    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (labels[k] == 1) rank_sum_pos += ranks[k];
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

const char* featureset_name(FeatureSet f) {
    switch (f) {
        case FeatureSet::kPointProcess: return "pp";
        case FeatureSet::kScrBaseline: return "scr";
        case FeatureSet::kCombined: return "combined";
    }
    return "unknown";
}

FeatureSet featureset_from_name(const std::string& name) {
    if (name == "pp") return FeatureSet::kPointProcess;
    if (name == "scr") return FeatureSet::kScrBaseline;
    if (name == "combined") return FeatureSet::kCombined;
    throw ValidationError("unknown featureset: " + name + " (expected pp|scr|combined)");
}

namespace {

bool label_in(const std::vector<std::string>& set, const std::string& label) {
    return std::find(set.begin(), set.end(), label) != set.end();
}

}  // namespace

LabeledFeatures assemble_features(const CohortDataset& cohort, const LosoOptions& opts) {
    LabeledFeatures out;
    const bool wants_pp = opts.featureset != FeatureSet::kScrBaseline;
    const bool wants_scr = opts.featureset != FeatureSet::kPointProcess;

    if (wants_pp) out.schema = point_process_schema();
    if (wants_scr) {
        out.schema.insert(out.schema.end(), summary_schema().begin(), summary_schema().end());
    }

    for (const auto& subject : cohort.subjects) {
        const bool positive = label_in(opts.positive_labels, subject.label);
        const bool negative = label_in(opts.negative_labels, subject.label);
        if (!positive && !negative) continue;
        if (positive && negative) {
            throw ConfigError("label '" + subject.label + "' assigned to both classes");
        }

        std::vector<double> row;
        if (wants_pp) {
            const auto it = subject.fits.find(Variant::kFull);
            if (it == subject.fits.end()) {
                throw ValidationError("subject " + subject.record.subject_id +
                                      " lacks a full-variant fit; run the fit stage first");
            }
            const auto fv = assemble_point_process_features(it->second, subject.record.events,
                                                            subject.record.subject_id);
            row.insert(row.end(), fv.values.begin(), fv.values.end());
        }
        if (wants_scr) {
            if (!subject.record.annotations.has_value()) {
                ++out.n_excluded;
                continue;
            }
            try {
                const auto fv = assemble_summary_features(*subject.record.annotations,
                                                          subject.record.subject_id);
                row.insert(row.end(), fv.values.begin(), fv.values.end());
            } catch (const FeatureUnavailableError&) {
                ++out.n_excluded;
                continue;
            }
        }
        out.subject_ids.push_back(subject.record.subject_id);
        out.X.push_back(std::move(row));
        out.y.push_back(positive ? 1 : -1);
    }
    return out;
}

std::vector<TrainedFold> train_loso_folds(const LabeledFeatures& features,
                                          const LosoOptions& opts, std::uint64_t seed) {
    const std::size_t n = features.X.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<TrainedFold> folds(n);
    for (std::size_t held = 0; held < n; ++held) {
        std::vector<std::vector<double>> train_rows;
        std::vector<int> train_labels;
        train_rows.reserve(n - 1);
        for (std::size_t idx : order) {
            if (idx == held) continue;
            train_rows.push_back(features.X[idx]);
            train_labels.push_back(features.y[idx]);
        }
        TrainedFold fold;
        fold.scaler = zscore_fit(train_rows);
        const auto scaled = zscore_transform(fold.scaler, train_rows);
        const double gamma = opts.gamma.has_value() ? *opts.gamma : gamma_scale(scaled);
        fold.model = svm_train(scaled, train_labels, opts.C, gamma,
                               derive_seed(seed, static_cast<std::uint64_t>(held)));
        folds[held] = std::move(fold);
    }
    return folds;
}

std::vector<double> score_heldout(const std::vector<TrainedFold>& folds,
                                  const std::vector<std::vector<double>>& rows) {
    if (folds.size() != rows.size()) throw ValidationError("fold/row count mismatch");
    std::vector<double> scores(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        scores[i] = svm_decision(folds[i].model, zscore_apply(folds[i].scaler, rows[i]));
    }
    return scores;
}

namespace {

void check_evaluable(const LabeledFeatures& features) {
    std::size_t n_pos = 0, n_neg = 0;
    for (int y : features.y) (y == 1 ? n_pos : n_neg) += 1;
    if (n_pos < 2 || n_neg < 2) {
        throw ValidationError("LOSO evaluation needs at least 2 subjects per class");
    }
}

struct SeedMetrics {
    double auroc_value = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    std::vector<double> scores;
    double kkt = 0.0;
};

SeedMetrics evaluate_seed(const LabeledFeatures& features, const LosoOptions& opts,
                          std::uint64_t seed) {
    const auto folds = train_loso_folds(features, opts, seed);
    SeedMetrics m;
    m.scores = score_heldout(folds, features.X);
    for (const auto& fold : folds) m.kkt = std::max(m.kkt, fold.model.kkt_residual);
    m.auroc_value = auroc(m.scores, features.y);
    std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
    for (std::size_t i = 0; i < m.scores.size(); ++i) {
        const bool predicted_positive = m.scores[i] > 0.0;
        if (features.y[i] == 1) {
            (predicted_positive ? tp : fn) += 1;
        } else {
            (predicted_positive ? fp : tn) += 1;
        }
    }
    m.sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
    return m;
}

}  // namespace

EvalReport loso_evaluate(const LabeledFeatures& features, const LosoOptions& opts) {
    if (opts.seeds.empty()) throw ConfigError("LOSO evaluation needs at least one seed");
    check_evaluable(features);

    EvalReport report;
    report.n_excluded = features.n_excluded;
    for (std::size_t s = 0; s < opts.seeds.size(); ++s) {
        const SeedMetrics m = evaluate_seed(features, opts, opts.seeds[s]);
        report.auroc_per_seed.push_back(m.auroc_value);
        report.sensitivity_per_seed.push_back(m.sensitivity);
        report.specificity_per_seed.push_back(m.specificity);
        report.kkt_max = std::max(report.kkt_max, m.kkt);
        if (s == 0) {
            report.decisions.reserve(features.X.size());
            for (std::size_t i = 0; i < features.X.size(); ++i) {
                FoldDecision d;
                d.subject_id = features.subject_ids[i];
                d.label = features.y[i];
                d.score = m.scores[i];
                d.predicted = m.scores[i] > 0.0 ? 1 : -1;
                report.decisions.push_back(std::move(d));
            }
        }
    }
    report.auroc_mean = mean_of(report.auroc_per_seed);
    report.auroc_sd = sample_sd(report.auroc_per_seed);
    report.sensitivity_mean = mean_of(report.sensitivity_per_seed);
    report.sensitivity_sd = sample_sd(report.sensitivity_per_seed);
    report.specificity_mean = mean_of(report.specificity_per_seed);
    report.specificity_sd = sample_sd(report.specificity_per_seed);
    return report;
}

EvalReport loso_evaluate(const CohortDataset& cohort, const LosoOptions& opts) {
    return loso_evaluate(assemble_features(cohort, opts), opts);
}

namespace {

// two-sided 97.5% Student t critical values, df = 1..30
constexpr double kT975[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                            2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                            2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                            2.060,  2.056, 2.052, 2.048, 2.045, 2.042};

double t_critical(std::size_t df) {
    if (df == 0) return 12.706;
    if (df <= 30) return kT975[df - 1];
    return 1.96;
}

LabeledFeatures drop_feature(const LabeledFeatures& features, std::size_t column) {
    LabeledFeatures out;
    out.subject_ids = features.subject_ids;
    out.y = features.y;
    out.n_excluded = features.n_excluded;
    for (std::size_t j = 0; j < features.schema.size(); ++j) {
        if (j != column) out.schema.push_back(features.schema[j]);
    }
    out.X.reserve(features.X.size());
    for (const auto& row : features.X) {
        std::vector<double> slim;
        slim.reserve(row.size() - 1);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j != column) slim.push_back(row[j]);
        }
        out.X.push_back(std::move(slim));
    }
    return out;
}

}  // namespace

std::vector<AblationRow> ablate(const CohortDataset& cohort, const LosoOptions& opts) {
    const LabeledFeatures features = assemble_features(cohort, opts);
    if (features.schema.size() < 2) {
        throw ValidationError("ablation needs at least 2 features");
    }
    const EvalReport full = loso_evaluate(features, opts);

    std::vector<AblationRow> rows;
    rows.reserve(features.schema.size());
    for (std::size_t j = 0; j < features.schema.size(); ++j) {
        const EvalReport without = loso_evaluate(drop_feature(features, j), opts);
        AblationRow row;
        row.feature = features.schema[j];
        row.auroc_full_mean = full.auroc_mean;
        row.auroc_without_mean = without.auroc_mean;
        row.auroc_without_sd = without.auroc_sd;
        row.delta = without.auroc_mean - full.auroc_mean;

        // paired comparison across seeds; with a fully deterministic solver
        // the seed spread may collapse, then a fixed 0.02 band applies
        std::vector<double> diffs(opts.seeds.size());
        for (std::size_t s = 0; s < opts.seeds.size(); ++s) {
            diffs[s] = without.auroc_per_seed[s] - full.auroc_per_seed[s];
        }
        const double d_mean = mean_of(diffs);
        const double d_sd = sample_sd(diffs);
        if (diffs.size() >= 2 && d_sd > 1e-12) {
            const double t = d_mean / (d_sd / std::sqrt(static_cast<double>(diffs.size())));
            row.significant = std::abs(t) > t_critical(diffs.size() - 1);
        } else {
            row.significant = std::abs(d_mean) > 0.02;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ImportanceRow> permutation_importance(const CohortDataset& cohort,
                                                  const LosoOptions& opts, int n_shuffles) {
    if (n_shuffles < 1) throw ConfigError("need at least one shuffle");
    const LabeledFeatures features = assemble_features(cohort, opts);
    check_evaluable(features);

    std::vector<ImportanceRow> rows;
    rows.reserve(features.schema.size());
    std::vector<std::vector<double>> drops(features.schema.size());

    for (std::uint64_t seed : opts.seeds) {
        const auto folds = train_loso_folds(features, opts, seed);
        const double base = auroc(score_heldout(folds, features.X), features.y);
        Rng rng(derive_seed(seed, "permutation-importance"));
        for (int shuffle = 0; shuffle < n_shuffles; ++shuffle) {
            std::vector<std::size_t> perm(features.X.size());
            std::iota(perm.begin(), perm.end(), 0);
            rng.shuffle(perm);
            for (std::size_t j = 0; j < features.schema.size(); ++j) {
                auto permuted = features.X;
                for (std::size_t i = 0; i < permuted.size(); ++i) {
                    permuted[i][j] = features.X[perm[i]][j];
                }
                const double shuffled = auroc(score_heldout(folds, permuted), features.y);
                drops[j].push_back(base - shuffled);
            }
        }
    }
    for (std::size_t j = 0; j < features.schema.size(); ++j) {
        ImportanceRow row;
        row.feature = features.schema[j];
        row.importance_mean = mean_of(drops[j]);
        row.importance_sd = sample_sd(drops[j]);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace edapp
