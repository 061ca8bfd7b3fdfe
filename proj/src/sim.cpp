#include "kefdr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kefdr/csv.hpp"
#include "kefdr/errors.hpp"
#include "kefdr/inference.hpp"
#include "kefdr/knockoff_filter.hpp"
#include "kefdr/procedures.hpp"
#include "kefdr/rng.hpp"

namespace kefdr {

const char* method_name(Method m) {
    switch (m) {
        case Method::M0: return "M0";
        case Method::M1: return "M1";
        case Method::M2: return "M2";
        case Method::M3: return "M3";
        case Method::M4: return "M4";
        case Method::M5: return "M5";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    for (int i = 0; i < kNumMethods; ++i)
        if (name == method_name(static_cast<Method>(i))) return static_cast<Method>(i);
    throw ConfigError("unknown method: " + name);
}

Matrix gen_design(int n, int m, double rho, std::uint64_t seed) {
    if (n < 1 || m < 1) throw DomainError("gen_design: n, m must be positive");
    if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("gen_design: rho must lie in [0,1)");
    Rng rng(seed);
    Matrix x(n, m);
    const double innov = std::sqrt(1.0 - rho * rho);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.gauss();
        for (int t = 1; t < m; ++t) x(i, t) = rho * x(i, t - 1) + innov * rng.gauss();
    }
    return x;
}

std::pair<Vector, std::vector<int>> gen_truth(int m, int k, double gamma, std::uint64_t seed,
                                              bool random_signs) {
    if (k < 0 || k > m) throw DomainError("gen_truth: k must lie in [0, m]");
    Rng rng(seed);
    std::vector<int> pool(m);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + rng.below(m - i);
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> support(pool.begin(), pool.begin() + k);
    std::sort(support.begin(), support.end());
    Vector beta(m, 0.0);
    for (int j : support) {
        double sign = 1.0;
        if (random_signs) sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
        beta[j] = sign * gamma;
    }
    return {std::move(beta), std::move(support)};
}

namespace {

void validate_setting(const SimSetting& s) {
    if (s.reps < 1) throw ConfigError("reps must be >= 1");
    if (s.n < 2 * s.m) throw ConfigError("setting requires n >= 2m");
    if (s.k > s.m) throw ConfigError("setting requires k <= m");
    if (!(s.rho >= 0.0 && s.rho < 1.0)) throw ConfigError("rho must lie in [0,1)");
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (!(s.lambda > 0.0 && s.lambda < 1.0)) throw ConfigError("lambda must lie in (0,1)");
    if (!(s.sigma >= 0.0)) throw ConfigError("sigma must be nonnegative");
    if (s.methods.empty()) throw ConfigError("at least one method required");
    if (!s.user_d.empty() && static_cast<int>(s.user_d.size()) != s.m)
        throw ConfigError("user-supplied D must have length m");
}

MethodCounts score(const DecisionReport& rep, const std::vector<int>& support) {
    MethodCounts c;
    c.ok = true;
    c.rejections = static_cast<int>(rep.rejected.size());
    for (int j : rep.rejected)
        if (std::binary_search(support.begin(), support.end(), j)) ++c.true_positives;
    c.false_rejections = c.rejections - c.true_positives;
    return c;
}

bool wants(const SimSetting& s, Method m) {
    return std::find(s.methods.begin(), s.methods.end(), m) != s.methods.end();
}

} // namespace

RepOutcome run_replication(const SimSetting& setting, int rep_index) {
    RepOutcome out;
    const std::uint64_t rep_seed = derive_seed(setting.master_seed, rep_index);
    const std::uint64_t design_seed = derive_seed(rep_seed, 0);
    const std::uint64_t truth_seed = derive_seed(rep_seed, 1);
    const std::uint64_t noise_seed = derive_seed(rep_seed, 2);

    std::optional<KnockoffModel> model;
    std::vector<int> support;
    Vector y;
    try {
        Matrix raw = gen_design(setting.n, setting.m, setting.rho, design_seed);
        Design design = standardize(raw);
        Vector d = setting.user_d.empty()
                       ? choose_equicorrelated(SymMatrix(gram(design.x), 1e-9))
                       : setting.user_d;
        model = build_knockoffs(design, d);

        auto [beta, supp] =
            gen_truth(setting.m, setting.k, setting.gamma, truth_seed, setting.random_signs);
        support = std::move(supp);
        y = matvec(model->design.x, beta);
        Rng noise(noise_seed);
        for (int i = 0; i < setting.n; ++i) y[i] += setting.sigma * noise.gauss();
        out.data_ok = true;
    } catch (const Error& e) {
        out.failure = e.what();
        return out;
    }

    PairedEvidence ev;
    bool have_ev = false;
    for (int mi = 0; mi < kNumMethods; ++mi) {
        const Method method = static_cast<Method>(mi);
        if (!wants(setting, method)) continue;
        MethodCounts& slot = out.per_method[mi];
        try {
            if (method == Method::M0) {
                LassoPath path = lasso_path(*model, y, setting.grid_size, setting.grid_ratio);
                slot = score(knockoff_select(knockoff_stats(path), setting.alpha), support);
                continue;
            }
            if (!have_ev) {
                ev = paired_pvalues(*model, y);
                have_ev = true;
            }
            switch (method) {
                case Method::M1:
                    slot = score(bon_bh(ev, setting.alpha), support);
                    break;
                case Method::M2:
                    slot = score(adaptive_bon_bh(ev, setting.alpha, setting.lambda), support);
                    break;
                case Method::M3:
                    slot = score(calibrated_ep_bh(ev, setting.calibrator, setting.alpha),
                                 support);
                    break;
                case Method::M4:
                    slot = score(calibrated_ep_storey(ev, setting.calibrator, setting.alpha,
                                                      setting.lambda),
                                 support);
                    break;
                case Method::M5:
                    slot = score(calibrated_weighted_bh(ev, setting.calibrator, setting.alpha,
                                                        setting.lambda),
                                 support);
                    break;
                default:
                    break;
            }
        } catch (const Error& e) {
            slot.ok = false;
            slot.failure = e.what();
        }
    }
    return out;
}

std::vector<RepOutcome> run_replications_serial(const SimSetting& setting) {
    validate_setting(setting);
    std::vector<RepOutcome> slots(setting.reps);
    for (int r = 0; r < setting.reps; ++r) slots[r] = run_replication(setting, r);
    return slots;
}

std::vector<RepOutcome> run_replications_parallel(const SimSetting& setting, int threads) {
    validate_setting(setting);
    std::vector<RepOutcome> slots(setting.reps);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
#endif
    for (int r = 0; r < setting.reps; ++r) slots[r] = run_replication(setting, r);
    return slots;
}

SimResult aggregate(const std::vector<RepOutcome>& reps, const SimSetting& setting) {
    if (reps.empty()) throw NoData("aggregate: no replications");
    SimResult result;
    result.setting = setting;
    for (int mi = 0; mi < kNumMethods; ++mi) {
        const Method method = static_cast<Method>(mi);
        if (!wants(setting, method)) continue;
        double fdp_sum = 0.0, power_sum = 0.0;
        int completed = 0;
        for (const RepOutcome& rep : reps) {
            const MethodCounts& c = rep.per_method[mi];
            if (!rep.data_ok || !c.ok) continue;
            ++completed;
            fdp_sum += c.rejections > 0
                           ? static_cast<double>(c.false_rejections) / c.rejections
                           : 0.0;
            if (setting.k > 0)
                power_sum += static_cast<double>(c.true_positives) / setting.k;
        }
        MethodStats& stats = result.per_method[mi];
        stats.reps_completed = completed;
        if (completed == 0) throw NoData(std::string("aggregate: no completed replications for ") +
                                         method_name(method));
        stats.fdr_hat = fdp_sum / completed;
        stats.power_hat = setting.k > 0 ? power_sum / completed : 0.0;
        stats.se_fdr = std::sqrt(stats.fdr_hat * (1.0 - stats.fdr_hat) / completed);
        stats.se_power = std::sqrt(stats.power_hat * (1.0 - stats.power_hat) / completed);
    }
    return result;
}

SimResult run_setting(const SimSetting& setting, int threads) {
    if (threads <= 1) return aggregate(run_replications_serial(setting), setting);
    return aggregate(run_replications_parallel(setting, threads), setting);
}

std::vector<std::string> sim_csv_header() {
    return {"n",      "m",        "k",         "rho",    "sigma",   "alpha",
            "lambda", "method",   "gamma",     "fdr_hat", "power_hat", "se_fdr",
            "se_power", "reps_completed"};
}

std::vector<std::string> sim_csv_row(const SimResult& result, Method method) {
    const SimSetting& s = result.setting;
    const MethodStats& st = result.per_method[static_cast<int>(method)];
    return {std::to_string(s.n),   std::to_string(s.m), std::to_string(s.k),
            csv::fmt(s.rho),       csv::fmt(s.sigma),   csv::fmt(s.alpha),
            csv::fmt(s.lambda),    method_name(method), csv::fmt(s.gamma),
            csv::fmt(st.fdr_hat),  csv::fmt(st.power_hat), csv::fmt(st.se_fdr),
            csv::fmt(st.se_power), std::to_string(st.reps_completed)};
}

} // namespace kefdr
