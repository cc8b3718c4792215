#include "edapp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "edapp/errors.hpp"
#include "edapp/rng.hpp"

namespace edapp {

void BoxBounds::validate() const {
    if (!(mu_lo > 0.0 && mu_lo < mu_hi)) throw ConfigError("invalid mu bounds");
    if (!(a0_lo > 0.0 && a0_lo < a0_hi)) throw ConfigError("invalid a0 bounds");
    if (!(w_lo < w_hi)) throw ConfigError("invalid weight bounds");
    if (!(tau_lo > 0.0 && tau_lo < tau_hi)) throw ConfigError("invalid tau bounds");
}

namespace {
double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }
}  // namespace

ModelParams BoxBounds::clip(const ModelParams& p) const {
    ModelParams out = p;
    out.mu = clamp(p.mu, mu_lo, mu_hi);
    out.a0 = clamp(p.a0, a0_lo, a0_hi);
    out.w_neg = clamp(p.w_neg, w_lo, w_hi);
    out.w_rt = clamp(p.w_rt, w_lo, w_hi);
    out.w_err = clamp(p.w_err, w_lo, w_hi);
    out.tau = clamp(p.tau, tau_lo, tau_hi);
    return out;
}

bool BoxBounds::contains(const ModelParams& p) const {
    if (p.mu < mu_lo || p.mu > mu_hi) return false;
    if (p.variant == Variant::kHomogeneous) return true;
    if (p.a0 < a0_lo || p.a0 > a0_hi) return false;
    if (p.tau < tau_lo || p.tau > tau_hi) return false;
    if (p.variant == Variant::kTrialModulated) return true;
    return p.w_neg >= w_lo && p.w_neg <= w_hi && p.w_rt >= w_lo && p.w_rt <= w_hi &&
           p.w_err >= w_lo && p.w_err <= w_hi;
}

FitReport fit_homogeneous(const BinnedCounts& counts, const BoxBounds& bounds) {
    counts.validate();
    bounds.validate();
    long n = 0;
    for (int c : counts.counts) n += c;
    const double mu_hat = clamp(static_cast<double>(n) / counts.T, bounds.mu_lo, bounds.mu_hi);

    FitReport report;
    report.params = ModelParams{Variant::kHomogeneous, mu_hat, 0.0, 0.0, 0.0, 0.0, 1.0};
    const auto ev = eval_objective(report.params, {}, counts, RidgeConfig{0.0, 0.0, 0.0});
    report.nll = ev.nll;
    report.objective = ev.nll;
    report.converged = true;
    report.iterations = 0;
    report.n_restarts_used = 1;
    double g = ev.gradient[0];
    if ((mu_hat <= bounds.mu_lo && g > 0.0) || (mu_hat >= bounds.mu_hi && g < 0.0)) g = 0.0;
    report.grad_inf_norm = std::abs(g);
    return report;
}

std::vector<ModelParams> multi_start_points(const BoxBounds& bounds, int n_starts,
                                            std::uint64_t seed, const StartContext& ctx) {
    bounds.validate();
    if (n_starts < 1) throw ConfigError("n_starts must be at least 1");

    std::vector<ModelParams> starts;
    starts.reserve(static_cast<std::size_t>(n_starts));

    const double tau0 = 5.0;
    const double n = static_cast<double>(ctx.n_events);
    const double n_trials = static_cast<double>(std::max<std::size_t>(ctx.n_kernel_trials, 1));
    ModelParams heuristic;
    heuristic.variant = ctx.variant;
    heuristic.mu = 0.5 * n / ctx.T;
    heuristic.a0 = 0.5 * n / (n_trials * tau0);
    heuristic.tau = tau0;
    starts.push_back(bounds.clip(heuristic));

    Rng rng(seed);
    for (int i = 1; i < n_starts; ++i) {
        ModelParams p;
        p.variant = ctx.variant;
        p.mu = rng.log_uniform(bounds.mu_lo, bounds.mu_hi);
        p.a0 = rng.log_uniform(bounds.a0_lo, bounds.a0_hi);
        p.tau = rng.log_uniform(bounds.tau_lo, bounds.tau_hi);
        if (ctx.variant == Variant::kFull) {
            p.w_neg = rng.uniform(bounds.w_lo, bounds.w_hi);
            p.w_rt = rng.uniform(bounds.w_lo, bounds.w_hi);
            p.w_err = rng.uniform(bounds.w_lo, bounds.w_hi);
        }
        starts.push_back(p);
    }
    return starts;
}

namespace {

// Internal optimization coordinates: (mu, a0[, w_neg, w_rt, w_err], log tau).
struct Packing {
    Variant variant;
    int dim;
    std::vector<double> lo, hi;

    explicit Packing(Variant v, const BoxBounds& b) : variant(v) {
        dim = v == Variant::kFull ? 6 : 3;
        if (v == Variant::kFull) {
            lo = {b.mu_lo, b.a0_lo, b.w_lo, b.w_lo, b.w_lo, std::log(b.tau_lo)};
            hi = {b.mu_hi, b.a0_hi, b.w_hi, b.w_hi, b.w_hi, std::log(b.tau_hi)};
        } else {
            lo = {b.mu_lo, b.a0_lo, std::log(b.tau_lo)};
            hi = {b.mu_hi, b.a0_hi, std::log(b.tau_hi)};
        }
    }

    std::vector<double> pack(const ModelParams& p) const {
        if (variant == Variant::kFull) {
            return {p.mu, p.a0, p.w_neg, p.w_rt, p.w_err, std::log(p.tau)};
        }
        return {p.mu, p.a0, std::log(p.tau)};
    }

    ModelParams unpack(const std::vector<double>& x) const {
        ModelParams p;
        p.variant = variant;
        p.mu = x[0];
        p.a0 = x[1];
        if (variant == Variant::kFull) {
            p.w_neg = x[2];
            p.w_rt = x[3];
            p.w_err = x[4];
            p.tau = std::exp(x[5]);
        } else {
            p.tau = std::exp(x[2]);
        }
        return p;
    }
};

struct Objective {
    const Packing& packing;
    std::span<const TrialCovariates> trials;
    const BinnedCounts& counts;
    const RidgeConfig& ridge;

    double value(const std::vector<double>& x) const {
        return objective(packing.unpack(x), trials, counts, ridge);
    }

    double value_grad(const std::vector<double>& x, std::vector<double>& grad) const {
        const ModelParams p = packing.unpack(x);
        const auto ev = eval_objective(p, trials, counts, ridge);
        grad.assign(static_cast<std::size_t>(packing.dim), 0.0);
        grad[0] = ev.gradient[0];
        grad[1] = ev.gradient[1];
        if (packing.variant == Variant::kFull) {
            grad[2] = ev.gradient[2];
            grad[3] = ev.gradient[3];
            grad[4] = ev.gradient[4];
            grad[5] = ev.gradient[5] * p.tau;  // chain rule for log tau
        } else {
            grad[2] = ev.gradient[5] * p.tau;
        }
        return ev.objective;
    }
};

std::vector<double> project(const Packing& pk, std::vector<double> x) {
    for (int i = 0; i < pk.dim; ++i) {
        x[static_cast<std::size_t>(i)] =
            clamp(x[static_cast<std::size_t>(i)], pk.lo[static_cast<std::size_t>(i)],
                  pk.hi[static_cast<std::size_t>(i)]);
    }
    return x;
}

double projected_grad_inf(const Packing& pk, const std::vector<double>& x,
                          const std::vector<double>& g) {
    double worst = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(pk.dim); ++i) {
        double gi = g[i];
        if (x[i] <= pk.lo[i] && gi > 0.0) gi = 0.0;
        if (x[i] >= pk.hi[i] && gi < 0.0) gi = 0.0;
        worst = std::max(worst, std::abs(gi));
    }
    return worst;
}

struct SolveResult {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
    double pg_inf = 0.0;
};

// Projected limited-memory BFGS with Armijo backtracking on the projected
// path; falls back to steepest descent when the quasi-Newton direction is
// not a descent direction after projection.
SolveResult minimize(const Objective& obj, std::vector<double> x0, int max_iterations,
                     double tol_grad, double tol_obj) {
    const Packing& pk = obj.packing;
    constexpr double kArmijoC1 = 1e-4;
    constexpr int kHistory = 10;

    SolveResult res;
    res.x = project(pk, std::move(x0));
    std::vector<double> g;
    double f = obj.value_grad(res.x, g);

    std::deque<std::pair<std::vector<double>, std::vector<double>>> history;  // (s, y)
    const auto dims = static_cast<std::size_t>(pk.dim);

    auto dot = [dims](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < dims; ++i) s += a[i] * b[i];
        return s;
    };

    auto lbfgs_direction = [&](const std::vector<double>& grad) {
        std::vector<double> q = grad;
        std::vector<double> alphas(history.size());
        for (std::size_t i = history.size(); i-- > 0;) {
            const auto& [s, y] = history[i];
            const double rho = 1.0 / dot(y, s);
            alphas[i] = rho * dot(s, q);
            for (std::size_t k = 0; k < dims; ++k) q[k] -= alphas[i] * y[k];
        }
        if (!history.empty()) {
            const auto& [s, y] = history.back();
            const double gamma = dot(s, y) / dot(y, y);
            for (auto& v : q) v *= gamma;
        }
        for (std::size_t i = 0; i < history.size(); ++i) {
            const auto& [s, y] = history[i];
            const double rho = 1.0 / dot(y, s);
            const double beta = rho * dot(y, q);
            for (std::size_t k = 0; k < dims; ++k) q[k] += (alphas[i] - beta) * s[k];
        }
        for (auto& v : q) v = -v;
        return q;
    };

    for (int iter = 1; iter <= max_iterations; ++iter) {
        res.pg_inf = projected_grad_inf(pk, res.x, g);
        if (res.pg_inf < tol_grad) {
            res.converged = true;
            break;
        }

        bool accepted = false;
        std::vector<double> x_new;
        double f_new = f;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            std::vector<double> d;
            if (attempt == 0 && !history.empty()) {
                d = lbfgs_direction(g);
            } else {
                d.assign(dims, 0.0);
                for (std::size_t i = 0; i < dims; ++i) d[i] = -g[i];
            }
            double alpha = 1.0;
            for (int halving = 0; halving < 60; ++halving) {
                std::vector<double> cand(dims);
                for (std::size_t i = 0; i < dims; ++i) cand[i] = res.x[i] + alpha * d[i];
                cand = project(pk, std::move(cand));
                std::vector<double> step(dims);
                double step_norm = 0.0;
                for (std::size_t i = 0; i < dims; ++i) {
                    step[i] = cand[i] - res.x[i];
                    step_norm += step[i] * step[i];
                }
                if (step_norm == 0.0) break;
                const double slope = dot(g, step);
                if (slope < 0.0) {
                    const double f_cand = obj.value(cand);
                    if (std::isfinite(f_cand) && f_cand <= f + kArmijoC1 * slope) {
                        x_new = std::move(cand);
                        f_new = f_cand;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
        }
        if (!accepted) break;  // no descent step found; report current point

        std::vector<double> g_new;
        f_new = obj.value_grad(x_new, g_new);
        std::vector<double> s(dims), y(dims);
        for (std::size_t i = 0; i < dims; ++i) {
            s[i] = x_new[i] - res.x[i];
            y[i] = g_new[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s)) * std::sqrt(dot(y, y))) {
            history.emplace_back(std::move(s), std::move(y));
            if (history.size() > kHistory) history.pop_front();
        }

        const double rel_change = std::abs(f - f_new) / std::max(1.0, std::abs(f));
        res.x = std::move(x_new);
        g = std::move(g_new);
        f = f_new;
        res.iterations = iter;
        if (rel_change < tol_obj) {
            res.converged = true;
            res.pg_inf = projected_grad_inf(pk, res.x, g);
            break;
        }
        res.pg_inf = projected_grad_inf(pk, res.x, g);
    }
    res.f = f;
    return res;
}

FitReport degenerate_fit(Variant variant, const BinnedCounts& counts,
                         const FitOptions& opts) {
    ModelParams p;
    p.variant = variant;
    p.mu = opts.bounds.mu_lo;
    p.a0 = opts.bounds.a0_lo;
    p.tau = clamp(5.0, opts.bounds.tau_lo, opts.bounds.tau_hi);
    FitReport report;
    report.params = p;
    const auto ev = eval_objective(p, {}, counts, opts.ridge);
    report.nll = ev.nll;
    report.objective = ev.objective;
    report.converged = true;
    report.degenerate = true;
    return report;
}

}  // namespace

FitReport fit(Variant variant, const SubjectRecord& subject, const FitOptions& opts) {
    opts.bounds.validate();
    opts.ridge.validate();
    const BinnedCounts counts = bin_events(subject.events, opts.dt);

    if (variant == Variant::kHomogeneous) {
        return fit_homogeneous(counts, opts.bounds);
    }
    if (subject.events.onsets.empty()) {
        return degenerate_fit(variant, counts, opts);
    }

    StartContext ctx;
    ctx.variant = variant;
    ctx.n_events = subject.events.size();
    ctx.n_kernel_trials = 0;
    for (const auto& tr : subject.trials) {
        if (tr.response_time_s.has_value()) ++ctx.n_kernel_trials;
    }
    ctx.T = subject.events.duration_s;

    auto starts = multi_start_points(opts.bounds, opts.n_starts, opts.seed, ctx);

    // Nested warm start: the richer variant starts from the simpler one's
    // optimum so best-of-multistart NLLs are ordered across variants.
    if (variant == Variant::kTrialModulated) {
        const FitReport homog = fit_homogeneous(counts, opts.bounds);
        ModelParams warm;
        warm.variant = variant;
        warm.mu = homog.params.mu;
        warm.a0 = opts.bounds.a0_lo;
        warm.tau = clamp(5.0, opts.bounds.tau_lo, opts.bounds.tau_hi);
        starts.push_back(opts.bounds.clip(warm));
    } else {
        const FitReport tm = fit(Variant::kTrialModulated, subject, opts);
        ModelParams warm = tm.params;
        warm.variant = Variant::kFull;
        warm.w_neg = warm.w_rt = warm.w_err = 0.0;
        starts.push_back(warm);
    }

    const Packing packing(variant, opts.bounds);
    const Objective obj{packing, subject.trials, counts, opts.ridge};

    bool any_finite = false;
    SolveResult best;
    for (const auto& start : starts) {
        SolveResult run = minimize(obj, packing.pack(start), opts.max_iterations,
                                   opts.tol_grad, opts.tol_obj);
        if (!std::isfinite(run.f)) continue;
        any_finite = true;
        if (run.f < best.f) best = std::move(run);
    }
    if (!any_finite) {
        throw NumericError("optimization failed from every start for subject " +
                           subject.subject_id);
    }

    FitReport report;
    report.params = packing.unpack(best.x);
    const auto ev = eval_objective(report.params, subject.trials, counts, opts.ridge);
    report.nll = ev.nll;
    report.objective = ev.objective;
    report.converged = best.converged;
    report.iterations = best.iterations;
    report.grad_inf_norm = best.pg_inf;
    report.n_restarts_used = static_cast<int>(starts.size());
    return report;
}

}  // namespace edapp
