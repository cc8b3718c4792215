#include "edapp/types.hpp"

#include <cmath>
#include <string>

#include "edapp/errors.hpp"

namespace edapp {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::kHomogeneous: return "homogeneous";
        case Variant::kTrialModulated: return "trial_modulated";
        case Variant::kFull: return "full";
    }
    return "unknown";
}

Variant variant_from_name(const std::string& name) {
    if (name == "homogeneous") return Variant::kHomogeneous;
    if (name == "trial_modulated") return Variant::kTrialModulated;
    if (name == "full") return Variant::kFull;
    throw ValidationError("unknown model variant: " + name);
}

int variant_n_params(Variant v) {
    switch (v) {
        case Variant::kHomogeneous: return 1;
        case Variant::kTrialModulated: return 3;
        case Variant::kFull: return 6;
    }
    return 0;
}

void EventTrain::validate() const {
    if (!(duration_s > 0.0)) throw ValidationError("event train duration must be positive");
    for (std::size_t i = 0; i < onsets.size(); ++i) {
        if (!std::isfinite(onsets[i]) || onsets[i] < 0.0 || onsets[i] > duration_s) {
            throw ValidationError("event onset " + std::to_string(i) +
                                  " outside [0, duration]");
        }
        if (i > 0 && !(onsets[i] > onsets[i - 1])) {
            throw ValidationError("event onsets not strictly increasing at index " +
                                  std::to_string(i));
        }
    }
}

void ModelParams::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be positive");
    if (variant == Variant::kHomogeneous) return;
    if (!(a0 > 0.0) || !std::isfinite(a0)) throw ValidationError("a0 must be positive");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive");
    if (!std::isfinite(w_neg) || !std::isfinite(w_rt) || !std::isfinite(w_err)) {
        throw ValidationError("covariate weights must be finite");
    }
}

void SummaryAnnotations::validate(std::size_t n_events) const {
    for (std::size_t i = 1; i < tonic_samples.size(); ++i) {
        if (!(tonic_samples[i].first >= tonic_samples[i - 1].first)) {
            throw ValidationError("tonic samples not time-ordered");
        }
    }
    for (double a : scr_amplitudes) {
        if (!(a >= 0.0)) throw ValidationError("SCR amplitudes must be non-negative");
    }
    for (double r : scr_rise_times_s) {
        if (!(r >= 0.0)) throw ValidationError("SCR rise times must be non-negative");
    }
    if (!scr_amplitudes.empty() && scr_amplitudes.size() != n_events) {
        throw ValidationError("SCR amplitude list length does not match event count");
    }
    if (!scr_rise_times_s.empty() && scr_rise_times_s.size() != n_events) {
        throw ValidationError("SCR rise-time list length does not match event count");
    }
}

void SubjectRecord::validate() const {
    if (subject_id.empty()) throw ValidationError("subject_id must be non-empty");
    events.validate();
    for (std::size_t j = 0; j < trials.size(); ++j) {
        const auto& tr = trials[j];
        if (tr.x_neg != 0.0 && tr.x_neg != 1.0) {
            throw ValidationError("x_neg must be 0 or 1 (trial " + std::to_string(j) + ")");
        }
        if (tr.x_err != 0.0 && tr.x_err != 1.0) {
            throw ValidationError("x_err must be 0 or 1 (trial " + std::to_string(j) + ")");
        }
        if (!tr.raw_rt_s.has_value() && tr.x_err != 1.0) {
            throw ValidationError("missed trial must carry x_err = 1 (trial " +
                                  std::to_string(j) + ")");
        }
        if (tr.response_time_s.has_value() &&
            (*tr.response_time_s < 0.0 || *tr.response_time_s > events.duration_s)) {
            throw ValidationError("response time outside [0, duration] (trial " +
                                  std::to_string(j) + ")");
        }
    }
    if (annotations.has_value()) annotations->validate(events.size());
}

}  // namespace edapp
