#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edapp/cohort.hpp"
#include "edapp/gof.hpp"
#include "edapp/ml.hpp"
#include "edapp/optimizer.hpp"
#include "edapp/simulator.hpp"
#include "edapp/stats.hpp"
#include "edapp/types.hpp"

namespace edapp {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Doubles are serialized with 17 significant digits so every written value
// parses back bit-exactly.
std::string format_double(double v);

// Run-wide configuration; every output echoes it so results are
// self-describing.
struct RunConfig {
    double dt = 1.0;
    std::uint64_t seed = 0;
    int jobs = 1;
    int n_starts = 5;
    int n_seeds = 10;
    RidgeConfig ridge;
    BoxBounds bounds;
    double svm_c = 1.0;
    std::optional<double> svm_gamma;  // absent: per-fold scale rule
    FeatureSet featureset = FeatureSet::kPointProcess;
    std::vector<std::string> positive_labels = {"D", "S"};
    std::vector<std::string> negative_labels = {"C"};
    double fdr_q = 0.05;

    std::string to_json_string() const;
    static RunConfig from_json_string(const std::string& text);
    static RunConfig from_json_file(const std::string& path);
};

// ---- input files ----------------------------------------------------------

struct EventsEntry {
    std::vector<double> onsets;
    std::vector<double> amplitudes;    // optional column
    std::vector<double> rise_times_s;  // optional column
};

// header: subject_id,onset_s[,amplitude,rise_time_s]
std::map<std::string, EventsEntry> parse_events_csv(const std::string& path);

// header: subject_id,trial_idx,stim_onset_s,response_time_s,valence,rt_s,correct
// valence is pos_neutral|negative; missed trials leave response_time_s and
// rt_s empty and must carry correct=0.
std::map<std::string, std::vector<RawTrial>> parse_trials_csv(const std::string& path);

// header: subject_id,time_s,conductance
std::map<std::string, std::vector<std::pair<double, double>>> parse_tonic_csv(
    const std::string& path);

// header: subject_id,group
std::map<std::string, std::string> parse_labels_csv(const std::string& path);

void write_events_csv(const CohortDataset& cohort, const std::string& path);
void write_trials_csv(const CohortDataset& cohort, const std::string& path);
void write_labels_csv(const CohortDataset& cohort, const std::string& path);

// Builds validated subject records from parsed files. Duration per subject:
// the explicit value when given, otherwise the largest time seen in the
// subject's trials and events.
CohortDataset assemble_cohort(const std::map<std::string, EventsEntry>& events,
                              const std::map<std::string, std::vector<RawTrial>>& trials,
                              const std::map<std::string, std::string>& labels,
                              const std::map<std::string, std::vector<std::pair<double, double>>>& tonic,
                              std::optional<double> duration_s,
                              const std::vector<std::string>& subject_allowlist);

// ---- fit archive ----------------------------------------------------------

struct ArchiveSubject {
    std::string subject_id;
    std::size_t n_events = 0;
    double duration_s = 0.0;
    std::map<Variant, FitReport> fits;
};

struct InputStamp {
    std::string path;
    std::string fnv1a64;
};

struct FitArchive {
    std::string version = kToolkitVersion;
    RunConfig config;
    std::map<std::string, InputStamp> inputs;  // role -> checksummed path
    std::vector<ArchiveSubject> subjects;      // sorted by subject_id
};

void save_fit_archive(const FitArchive& archive, const std::string& path);
FitArchive load_fit_archive(const std::string& path);

FitArchive make_fit_archive(const CohortDataset& cohort, const RunConfig& config,
                            const std::map<std::string, std::string>& inputs);

// Attaches archived fits (and archived durations) to cohort subjects.
void apply_archive(const FitArchive& archive, CohortDataset& cohort);

// ---- result files ---------------------------------------------------------

void write_gof_summary_csv(const std::array<VariantSummary, 3>& summary,
                           const RunConfig& config, const std::string& path);
void write_gof_subjects_csv(const CohortDataset& cohort, const RunConfig& config,
                            const std::string& path);
void write_eval_csv(const EvalReport& report, const RunConfig& config,
                    const std::string& comparison, const std::string& path);
void write_decisions_csv(const EvalReport& report, const std::string& path);
void write_ablation_csv(const std::vector<AblationRow>& rows, const RunConfig& config,
                        const std::string& path);
void write_importance_csv(const std::vector<ImportanceRow>& rows, const RunConfig& config,
                          const std::string& path);

struct GroupStatRow {
    std::string feature;
    std::string pair;  // e.g. "C_vs_D"
    std::size_t n_x = 0, n_y = 0;
    double u = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    bool reject = false;
    double d = 0.0;  // NaN when undefined
};

// Mann-Whitney U + BH correction (within each group pair, across features)
// + Cohen's d for every point-process feature and group pair; when labels
// C, D, and S are all present the pooled C vs D+S comparison is added.
std::vector<GroupStatRow> group_feature_stats(const CohortDataset& cohort, double fdr_q);
void write_stats_csv(const std::vector<GroupStatRow>& rows, const RunConfig& config,
                     const std::string& path);

void write_intensity_csv(const CohortDataset& cohort, Variant variant, double step_s,
                         const RunConfig& config, const std::string& path);

// ---- generic re-parse support ----------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Reads any toolkit-emitted CSV (comment lines starting with '#' are
// skipped); every row must match the header width.
CsvTable read_csv_table(const std::string& path);

std::string fnv1a64_file_hex(const std::string& path);

}  // namespace edapp
