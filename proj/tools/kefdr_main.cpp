// Command-line front end: simulate | analyze | calibrator-check | knockoff-check.
// Configuration lives in a single JSON file; a few flags override config keys.
// Every run writes a manifest.json next to its outputs for provenance.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kefdr/csv.hpp"
#include "kefdr/dataio.hpp"
#include "kefdr/errors.hpp"
#include "kefdr/inference.hpp"
#include "kefdr/knockoff.hpp"
#include "kefdr/knockoff_filter.hpp"
#include "kefdr/lasso.hpp"
#include "kefdr/procedures.hpp"
#include "kefdr/sim.hpp"
#include "kefdr/svg.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw kefdr::ConfigError("unknown key '" + it.key() + "' in " + where);
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw kefdr::ConfigError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw kefdr::ConfigError(std::string("config parse error: ") + e.what());
    }
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const json& config) {
    json manifest;
    manifest["subcommand"] = subcommand;
    manifest["config"] = config;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.dump())));
    manifest["config_hash"] = hash;
    if (config.contains("seed")) manifest["seed"] = config["seed"];
    manifest["version"] = kVersion;
    std::ofstream out(out_dir + "/manifest.json", std::ios::binary);
    if (!out) throw kefdr::Error("cannot write manifest in " + out_dir);
    out << manifest.dump(2) << "\n";
}

kefdr::Calibrator parse_calibrator(const json& spec) {
    if (!spec.is_object()) throw kefdr::ConfigError("calibrator spec must be an object");
    const std::string kind = spec.value("kind", "");
    if (kind == "bounded_poly") {
        reject_unknown_keys(spec, {"kind", "C"}, "calibrator");
        if (spec.contains("C")) return kefdr::Calibrator::bounded_poly(spec["C"].get<double>());
        return kefdr::Calibrator::bounded_poly_at_level();
    }
    if (kind == "all_or_nothing") {
        reject_unknown_keys(spec, {"kind", "r"}, "calibrator");
        return kefdr::Calibrator::all_or_nothing(spec.value("r", 0.5));
    }
    if (kind == "power") {
        reject_unknown_keys(spec, {"kind", "kappa"}, "calibrator");
        return kefdr::Calibrator::power(spec.value("kappa", 0.5));
    }
    if (kind == "power_mixture") {
        reject_unknown_keys(spec, {"kind"}, "calibrator");
        return kefdr::Calibrator::power_mixture();
    }
    if (kind == "inverse_sqrt") {
        reject_unknown_keys(spec, {"kind"}, "calibrator");
        return kefdr::Calibrator::inverse_sqrt();
    }
    if (kind == "constant") {
        reject_unknown_keys(spec, {"kind", "value"}, "calibrator");
        return kefdr::Calibrator::constant(spec.value("value", 1.0));
    }
    throw kefdr::ConfigError("unknown calibrator kind: '" + kind + "'");
}

std::vector<kefdr::Method> parse_methods(const json& cfg) {
    std::vector<kefdr::Method> methods;
    if (cfg.contains("methods")) {
        for (const auto& name : cfg["methods"])
            methods.push_back(kefdr::method_from_name(name.get<std::string>()));
    } else {
        for (int i = 0; i < kefdr::kNumMethods; ++i)
            methods.push_back(static_cast<kefdr::Method>(i));
    }
    if (methods.empty()) throw kefdr::ConfigError("methods list is empty");
    return methods;
}

int cmd_simulate(const json& cfg) {
    reject_unknown_keys(cfg,
                        {"seed", "out_dir", "threads", "settings", "rho", "gammas", "sigma",
                         "alpha", "lambda", "methods", "reps", "random_signs", "calibrator",
                         "svg", "grid_size", "grid_ratio", "user_d"},
                        "simulate config");
    if (!cfg.contains("settings") || !cfg["settings"].is_array() || cfg["settings"].empty())
        throw kefdr::ConfigError("simulate: 'settings' must be a non-empty array");
    const int reps = cfg.value("reps", 0);
    if (reps < 1) throw kefdr::ConfigError("reps must be >= 1");
    const std::string out_dir = cfg.value("out_dir", "out");
    const int threads = cfg.value("threads", 1);

    kefdr::SimSetting base;
    base.rho = cfg.value("rho", 0.5);
    base.sigma = cfg.value("sigma", 1.0);
    base.alpha = cfg.value("alpha", 0.05);
    base.lambda = cfg.value("lambda", 0.5);
    base.reps = reps;
    base.master_seed = cfg.value("seed", 20260801ULL);
    base.random_signs = cfg.value("random_signs", false);
    base.methods = parse_methods(cfg);
    base.grid_size = cfg.value("grid_size", 100);
    base.grid_ratio = cfg.value("grid_ratio", 1e-3);
    if (cfg.contains("calibrator")) base.calibrator = parse_calibrator(cfg["calibrator"]);
    if (cfg.contains("user_d")) base.user_d = cfg["user_d"].get<std::vector<double>>();

    std::vector<double> gammas = cfg.value("gammas", std::vector<double>{2, 4, 6, 8, 10});
    if (gammas.empty()) throw kefdr::ConfigError("gammas must be non-empty");

    fs::create_directories(out_dir);
    write_manifest(out_dir, "simulate", cfg);

    std::vector<std::vector<std::string>> rows;
    for (const auto& sj : cfg["settings"]) {
        reject_unknown_keys(sj, {"n", "m", "k"}, "settings entry");
        kefdr::SimSetting s = base;
        s.n = sj.value("n", 0);
        s.m = sj.value("m", 0);
        s.k = sj.value("k", 0);

        std::vector<double> xs;
        std::vector<kefdr::svg::Series> fdr_series, power_series;
        for (const kefdr::Method method : s.methods) {
            fdr_series.push_back({kefdr::method_name(method), {}});
            power_series.push_back({kefdr::method_name(method), {}});
        }

        for (double gamma : gammas) {
            s.gamma = gamma;
            kefdr::SimResult result = kefdr::run_setting(s, threads);
            xs.push_back(gamma);
            for (size_t mi = 0; mi < s.methods.size(); ++mi) {
                const auto& st = result.per_method[static_cast<int>(s.methods[mi])];
                fdr_series[mi].y.push_back(st.fdr_hat);
                power_series[mi].y.push_back(st.power_hat);
                rows.push_back(kefdr::sim_csv_row(result, s.methods[mi]));
            }
            std::cout << "setting n=" << s.n << " m=" << s.m << " k=" << s.k
                      << " gamma=" << gamma << ": done (" << reps << " reps)\n";
        }

        if (cfg.value("svg", true)) {
            char name[96];
            std::snprintf(name, sizeof(name), "%s/setting_%d_%d_%d.svg", out_dir.c_str(), s.n,
                          s.m, s.k);
            char title[96];
            std::snprintf(title, sizeof(title), "n=%d m=%d k=%d rho=%g alpha=%g", s.n, s.m, s.k,
                          s.rho, s.alpha);
            kefdr::svg::write_fdr_power_chart(name, title, xs, fdr_series, power_series,
                                              s.alpha);
        }
    }
    kefdr::csv::write(out_dir + "/results.csv", kefdr::sim_csv_header(), rows);
    std::cout << "wrote " << out_dir << "/results.csv\n";
    return 0;
}

int cmd_analyze(const json& cfg) {
    reject_unknown_keys(cfg,
                        {"resistance_csv", "mutation_csv", "drugs", "panel_csv", "alpha",
                         "lambda", "methods", "calibrator", "log_transform", "out_dir", "svg",
                         "grid_size", "grid_ratio"},
                        "analyze config");
    for (const char* key : {"resistance_csv", "mutation_csv"})
        if (!cfg.contains(key)) throw kefdr::ConfigError(std::string("analyze: missing '") + key + "'");
    const std::string res_path = cfg["resistance_csv"].get<std::string>();
    const std::string mut_path = cfg["mutation_csv"].get<std::string>();
    for (const std::string& p : {res_path, mut_path})
        if (!fs::exists(p)) throw kefdr::ConfigError("analyze: file not found: " + p);
    if (!cfg.contains("drugs") || cfg["drugs"].empty())
        throw kefdr::ConfigError("analyze: 'drugs' must be a non-empty array");

    const double alpha = cfg.value("alpha", 0.05);
    const double lambda = cfg.value("lambda", 0.5);
    const bool log_transform = cfg.value("log_transform", false);
    const std::string out_dir = cfg.value("out_dir", "out");
    kefdr::Calibrator cal = cfg.contains("calibrator")
                                ? parse_calibrator(cfg["calibrator"])
                                : kefdr::Calibrator::bounded_poly_at_level();
    std::vector<kefdr::Method> methods = parse_methods(cfg);

    std::set<int> panel;
    if (cfg.contains("panel_csv")) {
        const std::string panel_path = cfg["panel_csv"].get<std::string>();
        if (!fs::exists(panel_path))
            throw kefdr::ConfigError("analyze: file not found: " + panel_path);
        panel = kefdr::load_panel(panel_path);
    }

    fs::create_directories(out_dir);
    write_manifest(out_dir, "analyze", cfg);

    for (const auto& dj : cfg["drugs"]) {
        const std::string drug = dj.get<std::string>();
        kefdr::Dataset ds =
            kefdr::preprocess(kefdr::load_dataset(res_path, mut_path, drug, log_transform));
        kefdr::Design design = kefdr::standardize(ds.covariates);
        kefdr::Vector d =
            kefdr::choose_equicorrelated(kefdr::SymMatrix(kefdr::gram(design.x), 1e-9));
        kefdr::KnockoffModel model = kefdr::build_knockoffs(design, d);
        kefdr::PairedEvidence ev = kefdr::paired_pvalues(model, ds.response);
        kefdr::write_evidence_csv(ev, out_dir + "/" + drug + "_evidence.csv");

        std::vector<std::vector<std::string>> sel_rows;
        std::vector<std::string> bar_methods;
        std::vector<int> bar_panel, bar_novel;
        for (const kefdr::Method method : methods) {
            kefdr::DecisionReport report;
            switch (method) {
                case kefdr::Method::M0: {
                    kefdr::LassoPath path =
                        kefdr::lasso_path(model, ds.response, cfg.value("grid_size", 100),
                                          cfg.value("grid_ratio", 1e-3));
                    kefdr::KnockoffStats stats = kefdr::knockoff_stats(path);
                    report = kefdr::knockoff_select(stats, alpha);
                    kefdr::write_filter_csv(out_dir + "/" + drug + "_M0_filter.csv", path,
                                            stats, kefdr::knockoff_threshold(stats, alpha));
                    break;
                }
                case kefdr::Method::M1:
                    report = kefdr::bon_bh(ev, alpha);
                    break;
                case kefdr::Method::M2:
                    report = kefdr::adaptive_bon_bh(ev, alpha, lambda);
                    break;
                case kefdr::Method::M3:
                    report = kefdr::calibrated_ep_bh(ev, cal, alpha);
                    break;
                case kefdr::Method::M4:
                    report = kefdr::calibrated_ep_storey(ev, cal, alpha, lambda);
                    break;
                case kefdr::Method::M5:
                    report = kefdr::calibrated_weighted_bh(ev, cal, alpha, lambda);
                    break;
            }
            const std::string stem = out_dir + "/" + drug + "_" + kefdr::method_name(method);
            kefdr::write_report_csv(report, stem + "_report.csv");
            {
                std::ofstream summary(stem + "_summary.json", std::ios::binary);
                summary << kefdr::report_summary_json(report) << "\n";
            }
            kefdr::PanelComparison cmp = kefdr::compare_panel(report, ds.labels, panel);
            sel_rows.push_back({kefdr::method_name(method),
                                std::to_string(cmp.selected_positions.size()),
                                std::to_string(cmp.in_panel), std::to_string(cmp.novel)});
            bar_methods.push_back(kefdr::method_name(method));
            bar_panel.push_back(cmp.in_panel);
            bar_novel.push_back(cmp.novel);
            std::cout << drug << " " << kefdr::method_name(method) << ": "
                      << report.rejected.size() << " mutations, "
                      << cmp.selected_positions.size() << " positions (" << cmp.in_panel
                      << " in panel, " << cmp.novel << " novel)\n";
        }
        kefdr::csv::write(out_dir + "/" + drug + "_selection.csv",
                          {"method", "n_selected", "in_panel", "novel"}, sel_rows);
        if (cfg.value("svg", true))
            kefdr::svg::write_selection_bars(out_dir + "/" + drug + "_selection.svg",
                                             drug + " (alpha=" + kefdr::csv::fmt(alpha) + ")",
                                             bar_methods, bar_panel, bar_novel);
    }
    return 0;
}

int cmd_calibrator_check(const json& cfg) {
    reject_unknown_keys(cfg, {"calibrator", "alpha", "tol"}, "calibrator-check config");
    if (!cfg.contains("calibrator"))
        throw kefdr::ConfigError("calibrator-check: missing 'calibrator'");
    kefdr::Calibrator cal = parse_calibrator(cfg["calibrator"]);
    const double alpha = cfg.value("alpha", 0.05);
    cal = cal.resolved(alpha);
    kefdr::CalibratorCheck chk = kefdr::check_calibrator(cal);
    std::cout << "calibrator: " << cal.describe() << "\n";
    std::cout << "integral:   " << kefdr::csv::fmt(chk.integral) << "\n";
    std::cout << "bound:      "
              << (std::isinf(chk.bound) ? std::string("inf") : kefdr::csv::fmt(chk.bound))
              << "\n";
    std::cout << "monotone:   " << (chk.monotone ? "yes" : "no") << "\n";
    std::cout << "admissible: " << (chk.admissible ? "yes" : "no") << "\n";
    return chk.admissible ? 0 : 1;
}

int cmd_knockoff_check(const json& cfg) {
    reject_unknown_keys(cfg,
                        {"n", "m", "rho", "seed", "resistance_csv", "mutation_csv", "drug",
                         "log_transform", "user_d", "corrupt", "tol", "out_dir"},
                        "knockoff-check config");
    const double tol = cfg.value("tol", 1e-8);

    kefdr::Matrix raw;
    if (cfg.contains("resistance_csv")) {
        kefdr::Dataset ds = kefdr::preprocess(
            kefdr::load_dataset(cfg["resistance_csv"].get<std::string>(),
                                cfg["mutation_csv"].get<std::string>(),
                                cfg["drug"].get<std::string>(), cfg.value("log_transform", false)));
        raw = ds.covariates;
    } else {
        const int n = cfg.value("n", 0), m = cfg.value("m", 0);
        if (n < 1 || m < 1)
            throw kefdr::ConfigError("knockoff-check: provide a dataset or n and m");
        raw = kefdr::gen_design(n, m, cfg.value("rho", 0.5), cfg.value("seed", 1ULL));
    }

    kefdr::Design design = kefdr::standardize(raw);
    kefdr::Vector d = cfg.contains("user_d")
                          ? cfg["user_d"].get<std::vector<double>>()
                          : kefdr::choose_equicorrelated(
                                kefdr::SymMatrix(kefdr::gram(design.x), 1e-9));
    kefdr::KnockoffModel model = kefdr::build_knockoffs(design, d);
    if (cfg.value("corrupt", false)) model.xtilde(0, 0) += 0.1;
    if (cfg.contains("out_dir")) {
        const std::string out_dir = cfg["out_dir"].get<std::string>();
        kefdr::write_model_csv(model, out_dir);
        write_manifest(out_dir, "knockoff-check", cfg);
        std::cout << "wrote model bundle to " << out_dir << "\n";
    }

    kefdr::GramResiduals res = kefdr::verify_gram(model);
    std::cout << "max |Xt'Xt - Sigma|:        " << kefdr::csv::fmt(res.knock_gram) << "\n";
    std::cout << "max |X'Xt - (Sigma - D)|:   " << kefdr::csv::fmt(res.cross_gram) << "\n";
    std::cout << "max |(X+Xt)'(X-Xt)|:        " << kefdr::csv::fmt(res.twin_orth) << "\n";
    std::cout << "lambda_min(2 Sigma - D):    " << kefdr::csv::fmt(res.min_eig_2sd) << "\n";
    std::cout << "min D_jj:                   " << kefdr::csv::fmt(res.d_min) << "\n";
    const bool ok = res.pass(tol);
    std::cout << (ok ? "PASS" : "FAIL") << " (tol " << kefdr::csv::fmt(tol) << ")\n";
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knockoff-assisted e-value weighted FDR procedures"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> reps_override, threads_override;
    std::optional<std::string> out_override;
    std::optional<double> alpha_override;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed_override, "override config seed");
        sub->add_option("--reps", reps_override, "override replication count");
        sub->add_option("--threads", threads_override, "override worker thread cap");
        sub->add_option("--out", out_override, "override output directory");
        sub->add_option("--alpha", alpha_override, "override target FDR level");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run the Monte Carlo study");
    CLI::App* analyze = app.add_subcommand("analyze", "run the dataset pipeline");
    CLI::App* calcheck = app.add_subcommand("calibrator-check", "certify a calibrator");
    CLI::App* kcheck = app.add_subcommand("knockoff-check", "verify the Gram identities");
    for (CLI::App* sub : {simulate, analyze, calcheck, kcheck}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = load_config(config_path);
        if (!cfg.is_object()) throw kefdr::ConfigError("config root must be a JSON object");
        if (seed_override) cfg["seed"] = *seed_override;
        if (reps_override) cfg["reps"] = *reps_override;
        if (threads_override) cfg["threads"] = *threads_override;
        if (out_override) cfg["out_dir"] = *out_override;
        if (alpha_override) cfg["alpha"] = *alpha_override;

        if (simulate->parsed()) return cmd_simulate(cfg);
        if (analyze->parsed()) return cmd_analyze(cfg);
        if (calcheck->parsed()) return cmd_calibrator_check(cfg);
        if (kcheck->parsed()) return cmd_knockoff_check(cfg);
        return 2;
    } catch (const kefdr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const kefdr::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const kefdr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
