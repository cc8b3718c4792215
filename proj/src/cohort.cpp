#include "edapp/cohort.hpp"

#include <atomic>
#include <thread>

#include "edapp/rng.hpp"

namespace edapp {

const CohortSubject* CohortDataset::find(const std::string& subject_id) const {
    for (const auto& s : subjects) {
        if (s.record.subject_id == subject_id) return &s;
    }
    return nullptr;
}

void fit_all_variants(CohortDataset& cohort, const FitOptions& opts, int jobs) {
    const auto n = cohort.subjects.size();
    auto fit_one = [&](std::size_t i) {
        CohortSubject& subject = cohort.subjects[i];
        FitOptions per = opts;
        per.seed = derive_seed(opts.seed, subject.record.subject_id);
        for (Variant v :
             {Variant::kHomogeneous, Variant::kTrialModulated, Variant::kFull}) {
            subject.fits[v] = fit(v, subject.record, per);
        }
    };

    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fit_one(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fit_one(i);
    };
    std::vector<std::thread> pool;
    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace edapp
