#include "kefdr/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "kefdr/csv.hpp"
#include "kefdr/errors.hpp"

namespace kefdr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_level(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw BadTuning("level must lie in (0,1)");
}

void check_extended(const Vector& v) {
    if (v.empty()) throw EmptyInput("empty p-value vector");
    for (size_t j = 0; j < v.size(); ++j) {
        if (std::isnan(v[j]) || v[j] < 0.0)
            throw DomainError("adjusted p-value " + std::to_string(j) + " outside [0, +inf]");
    }
}

void check_probs(const Vector& v) {
    if (v.empty()) throw EmptyInput("empty p-value vector");
    for (size_t j = 0; j < v.size(); ++j)
        if (!(v[j] >= 0.0 && v[j] <= 1.0))
            throw DomainError("p-value " + std::to_string(j) + " outside [0,1]");
}

// Largest j with v_(j) <= thr(j); rejects the hypotheses attached to the j
// smallest entries, ties broken by original index.
std::vector<int> step_up(const Vector& v, const std::function<double(int)>& thr) {
    const int m = static_cast<int>(v.size());
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return v[a] < v[b]; });
    int j0 = 0;
    for (int j = m; j >= 1; --j) {
        if (v[order[j - 1]] <= thr(j)) {
            j0 = j;
            break;
        }
    }
    std::vector<int> rejected(order.begin(), order.begin() + j0);
    std::sort(rejected.begin(), rejected.end());
    return rejected;
}

} // namespace

DecisionReport bh(const Vector& p, double alpha) {
    check_level(alpha);
    check_extended(p);
    const int m = static_cast<int>(p.size());
    DecisionReport rep;
    rep.procedure = "bh";
    rep.alpha = alpha;
    rep.adjusted = p;
    rep.rejected = step_up(p, [&](int j) { return alpha * j / m; });
    return rep;
}

double storey_pi0(const Vector& p, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw BadTuning("storey_pi0: lambda must lie in (0,1)");
    check_probs(p);
    const int m = static_cast<int>(p.size());
    int exceed = 0;
    for (double v : p)
        if (v > lambda) ++exceed;
    return (1.0 + exceed) / (m * (1.0 - lambda));
}

DecisionReport bon_bh(const PairedEvidence& ev, double alpha) {
    check_level(alpha);
    const double root_alpha = std::sqrt(alpha);
    Vector q(ev.m);
    for (int j = 0; j < ev.m; ++j) q[j] = ev.p1[j] > root_alpha ? 1.0 : ev.p2[j];
    DecisionReport rep = bh(q, root_alpha);
    rep.procedure = "bon_bh";
    rep.alpha = alpha;
    return rep;
}

DecisionReport adaptive_bon_bh(const PairedEvidence& ev, double alpha, double lambda,
                               std::optional<double> forced_pi0) {
    check_level(alpha);
    const double root_alpha = std::sqrt(alpha);
    if (!(lambda > root_alpha && lambda < 1.0))
        throw BadTuning("adaptive_bon_bh: lambda must lie in (sqrt(alpha), 1)");
    const double pi0 = forced_pi0 ? *forced_pi0 : storey_pi0(ev.p2, lambda);
    Vector q(ev.m);
    for (int j = 0; j < ev.m; ++j) q[j] = ev.p1[j] > root_alpha ? 1.0 : pi0 * ev.p2[j];
    DecisionReport rep = bh(q, root_alpha);
    rep.procedure = "adaptive_bon_bh";
    rep.alpha = alpha;
    rep.lambda = lambda;
    rep.null_prop = pi0;
    return rep;
}

DecisionReport calibrated_ep_bh(const PairedEvidence& ev, const Calibrator& cal,
                                double alpha) {
    check_level(alpha);
    const Calibrator g = cal.resolved(alpha);
    Vector s = calibrate_vector(g, ev.p1);
    Vector adj(ev.m);
    for (int j = 0; j < ev.m; ++j) {
        if (s[j] <= 0.0)
            adj[j] = kInf;
        else if (std::isinf(s[j]))
            adj[j] = 0.0;
        else
            adj[j] = ev.p2[j] / s[j];
    }
    DecisionReport rep = bh(adj, alpha);
    rep.procedure = "ep_bh";
    rep.calibrator = g.describe();
    return rep;
}

DecisionReport calibrated_ep_storey(const PairedEvidence& ev, const Calibrator& cal,
                                    double alpha, double lambda,
                                    std::optional<double> forced_pi0) {
    check_level(alpha);
    if (!(lambda > 0.0 && lambda < 1.0))
        throw BadTuning("calibrated_ep_storey: lambda must lie in (0,1)");
    const Calibrator g = cal.resolved(alpha);
    const double pi0 = forced_pi0 ? *forced_pi0 : storey_pi0(ev.p2, lambda);
    Vector s = calibrate_vector(g, ev.p1);
    Vector adj(ev.m);
    for (int j = 0; j < ev.m; ++j) {
        if (ev.p2[j] > lambda || s[j] <= 0.0)
            adj[j] = kInf;
        else if (std::isinf(s[j]))
            adj[j] = 0.0;
        else
            adj[j] = pi0 * ev.p2[j] / s[j];
    }
    DecisionReport rep = bh(adj, alpha);
    rep.procedure = "ep_storey";
    rep.lambda = lambda;
    rep.null_prop = pi0;
    rep.calibrator = g.describe();
    return rep;
}

DecisionReport calibrated_weighted_bh(const PairedEvidence& ev, const Calibrator& cal,
                                      double alpha, double lambda) {
    check_level(alpha);
    if (!(lambda > 0.0 && lambda < 1.0))
        throw BadTuning("calibrated_weighted_bh: lambda must lie in (0,1)");
    const Calibrator g = cal.resolved(alpha);
    const int m = ev.m;
    Vector s = calibrate_vector(g, ev.p1);

    std::vector<std::string> flags;
    Vector w;
    try {
        w = normalize_weights(s);
    } catch (const ZeroEvidence&) {
        w.assign(m, 1.0);
        flags.push_back("zero_evidence_uniform_weights");
    }
    for (double v : s)
        if (std::isinf(v)) {
            flags.push_back("infinite_evalue_degenerate_weights");
            break;
        }

    double wmax = 0.0, wsum_exceed = 0.0;
    for (int j = 0; j < m; ++j) {
        wmax = std::max(wmax, w[j]);
        if (ev.p2[j] > lambda) wsum_exceed += w[j];
    }
    const double delta0 = (wmax + wsum_exceed) / (m * (1.0 - lambda));

    Vector adj(m);
    for (int j = 0; j < m; ++j)
        adj[j] = w[j] > 0.0 ? delta0 * ev.p2[j] / w[j] : kInf;

    const double cap = delta0 * lambda;
    DecisionReport rep;
    rep.procedure = "adaptive_weighted_bh";
    rep.alpha = alpha;
    rep.lambda = lambda;
    rep.null_prop = delta0;
    rep.adjusted = adj;
    rep.calibrator = g.describe();
    rep.fallback_flags = std::move(flags);
    check_extended(adj);
    rep.rejected = step_up(adj, [&](int j) { return std::min(cap, alpha * j / m); });
    return rep;
}

DecisionReport ep_bh(const Vector& p, const Vector& evalues, double alpha) {
    check_level(alpha);
    check_probs(p);
    if (p.size() != evalues.size()) throw DomainError("ep_bh: length mismatch");
    const int m = static_cast<int>(p.size());
    Vector adj(m);
    for (int j = 0; j < m; ++j) {
        if (!(evalues[j] >= 0.0)) throw DomainError("ep_bh: negative e-value");
        if (evalues[j] <= 0.0)
            adj[j] = kInf;
        else if (std::isinf(evalues[j]))
            adj[j] = 0.0;
        else
            adj[j] = p[j] / evalues[j];
    }
    DecisionReport rep = bh(adj, alpha);
    rep.procedure = "ep_bh";
    return rep;
}

void write_report_csv(const DecisionReport& report, const std::string& path) {
    std::vector<std::vector<std::string>> rows(report.adjusted.size());
    std::vector<bool> rej(report.adjusted.size(), false);
    for (int j : report.rejected) rej[j] = true;
    for (size_t j = 0; j < report.adjusted.size(); ++j)
        rows[j] = {std::to_string(j + 1), csv::fmt(report.adjusted[j]), rej[j] ? "1" : "0"};
    csv::write(path, {"index", "adjusted", "rejected"}, rows,
               {"procedure=" + report.procedure, "alpha=" + csv::fmt(report.alpha)});
}

std::string report_summary_json(const DecisionReport& report) {
    std::ostringstream os;
    os << "{";
    os << "\"procedure\":\"" << report.procedure << "\"";
    os << ",\"alpha\":" << csv::fmt(report.alpha);
    if (report.lambda) os << ",\"lambda\":" << csv::fmt(*report.lambda);
    if (report.null_prop) os << ",\"null_proportion\":" << csv::fmt(*report.null_prop);
    os << ",\"n_rejected\":" << report.rejected.size();
    if (!report.calibrator.empty()) os << ",\"calibrator\":\"" << report.calibrator << "\"";
    if (!report.fallback_flags.empty()) {
        os << ",\"fallback_flags\":[";
        for (size_t i = 0; i < report.fallback_flags.size(); ++i) {
            if (i) os << ",";
            os << "\"" << report.fallback_flags[i] << "\"";
        }
        os << "]";
    }
    os << "}";
    return os.str();
}

} // namespace kefdr
