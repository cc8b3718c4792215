#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "edapp/optimizer.hpp"
#include "edapp/types.hpp"

namespace edapp {

struct CohortSubject {
    SubjectRecord record;
    std::string label;                  // group label, e.g. C / D / S
    std::map<Variant, FitReport> fits;  // filled by fit_all_variants
    std::vector<RawTrial> raw_trials;   // retained for CSV serialization
};

struct CohortDataset {
    std::vector<CohortSubject> subjects;

    const CohortSubject* find(const std::string& subject_id) const;
};

// Fits all three model variants per subject. Per-subject seeds are derived
// from (opts.seed, subject_id), so results do not depend on worker count or
// subject order; jobs > 1 parallelizes across subjects.
void fit_all_variants(CohortDataset& cohort, const FitOptions& opts, int jobs = 1);

}  // namespace edapp
