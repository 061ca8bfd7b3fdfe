#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(KEFDR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

struct Workdir {
    fs::path dir;
    explicit Workdir(const std::string& name) {
        dir = fs::temp_directory_path() / name;
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    std::string write(const std::string& name, const std::string& content) const {
        const fs::path p = dir / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmokeConfig = R"({
  "seed": 4242,
  "out_dir": "OUTDIR",
  "threads": 2,
  "settings": [{"n": 60, "m": 12, "k": 3}],
  "rho": 0.5,
  "gammas": [4, 8],
  "alpha": 0.1,
  "lambda": 0.5,
  "methods": ["M0", "M1", "M2", "M3", "M4", "M5"],
  "reps": 20,
  "svg": true
})";

std::string smoke_config(const Workdir& wd, const std::string& out_name) {
    std::string cfg = kSmokeConfig;
    cfg.replace(cfg.find("OUTDIR"), 6, wd.path(out_name));
    return cfg;
}

} // namespace

TEST_CASE("simulate smoke run writes the expected artifacts") {
    Workdir wd("kefdr_cli_smoke");
    const std::string cfg = wd.write("sim.json", smoke_config(wd, "out1"));
    REQUIRE(run_cli("simulate --config " + cfg) == 0);

    CHECK(fs::exists(wd.path("out1/manifest.json")));
    CHECK(fs::exists(wd.path("out1/setting_60_12_3.svg")));
    const std::string body = slurp(wd.path("out1/results.csv"));
    // header + 2 gammas x 6 methods
    int lines = 0;
    for (char c : body)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 12);
    CHECK(body.find("M0") != std::string::npos);
    CHECK(body.find("M5") != std::string::npos);
}

TEST_CASE("simulate is bit-identical across runs and thread counts") {
    Workdir wd("kefdr_cli_det");
    const std::string cfg = wd.write("sim.json", smoke_config(wd, "outA"));
    REQUIRE(run_cli("simulate --config " + cfg) == 0);
    const std::string a = slurp(wd.path("outA/results.csv"));

    REQUIRE(run_cli("simulate --config " + cfg + " --out " + wd.path("outB")) == 0);
    CHECK(a == slurp(wd.path("outB/results.csv")));

    REQUIRE(run_cli("simulate --config " + cfg + " --out " + wd.path("outC") + " --threads 1") ==
            0);
    CHECK(a == slurp(wd.path("outC/results.csv")));
}

TEST_CASE("simulate validates its configuration") {
    Workdir wd("kefdr_cli_val");
    std::string zero_reps = smoke_config(wd, "outz");
    zero_reps.replace(zero_reps.find("\"reps\": 20"), 10, "\"reps\": 0");
    const std::string cfg = wd.write("bad.json", zero_reps);
    CHECK(run_cli("simulate --config " + cfg) == 2);

    std::string unknown = smoke_config(wd, "outu");
    unknown.insert(unknown.rfind('}'), ", \"reppps\": 3");
    const std::string cfg2 = wd.write("unknown.json", unknown);
    CHECK(run_cli("simulate --config " + cfg2) == 2);

    CHECK(run_cli("simulate --config " + wd.path("missing.json")) == 2);
}

TEST_CASE("analyze pipeline on a synthetic fixture") {
    Workdir wd("kefdr_cli_analyze");
    // 16 samples, 4 mutations; design kept full rank and frequent enough
    std::ostringstream res, mut;
    res << "id,DRGA\n";
    mut << "id,10A,20B,30C,46I\n";
    const int cells[16][4] = {{1, 0, 0, 1}, {0, 1, 0, 0}, {1, 1, 1, 0}, {0, 0, 1, 1},
                              {1, 0, 1, 0}, {0, 1, 1, 1}, {1, 1, 0, 0}, {0, 0, 0, 1},
                              {1, 0, 1, 1}, {0, 1, 0, 1}, {1, 1, 1, 1}, {0, 0, 1, 0},
                              {1, 0, 0, 0}, {0, 1, 1, 0}, {1, 1, 0, 1}, {0, 0, 0, 0}};
    for (int i = 0; i < 16; ++i) {
        const double y = 2.0 * cells[i][0] - 1.0 * cells[i][3] + 0.1 * ((i * 7) % 5 - 2);
        res << "s" << i << "," << y << "\n";
        mut << "s" << i;
        for (int j = 0; j < 4; ++j) mut << "," << cells[i][j];
        mut << "\n";
    }
    const std::string res_path = wd.write("res.csv", res.str());
    const std::string mut_path = wd.write("mut.csv", mut.str());
    const std::string panel_path = wd.write("panel.csv", "position\n10\n46\n");

    std::ostringstream cfg;
    cfg << "{\"resistance_csv\": \"" << res_path << "\", \"mutation_csv\": \"" << mut_path
        << "\", \"panel_csv\": \"" << panel_path
        << "\", \"drugs\": [\"DRGA\"], \"alpha\": 0.1, \"out_dir\": \"" << wd.path("out")
        << "\", \"methods\": [\"M1\", \"M3\", \"M5\"]}";
    const std::string cfg_path = wd.write("analyze.json", cfg.str());

    REQUIRE(run_cli("analyze --config " + cfg_path) == 0);
    CHECK(fs::exists(wd.path("out/DRGA_selection.csv")));
    CHECK(fs::exists(wd.path("out/DRGA_M3_report.csv")));
    CHECK(fs::exists(wd.path("out/DRGA_M3_summary.json")));
    CHECK(fs::exists(wd.path("out/DRGA_evidence.csv")));
    CHECK(fs::exists(wd.path("out/DRGA_selection.svg")));

    // deterministic output
    const std::string first = slurp(wd.path("out/DRGA_selection.csv"));
    REQUIRE(run_cli("analyze --config " + cfg_path + " --out " + wd.path("out2")) == 0);
    CHECK(first == slurp(wd.path("out2/DRGA_selection.csv")));

    // a different level changes only the alpha metadata and the decisions
    REQUIRE(run_cli("analyze --config " + cfg_path + " --out " + wd.path("out3") +
                    " --alpha 0.05") == 0);
    const std::string report_a = slurp(wd.path("out/DRGA_M3_report.csv"));
    const std::string report_b = slurp(wd.path("out3/DRGA_M3_report.csv"));
    CHECK(report_a.find("alpha=0.1") != std::string::npos);
    CHECK(report_b.find("alpha=0.05") != std::string::npos);

    // missing file
    std::string broken = cfg.str();
    const std::string gone = wd.path("gone.csv");
    broken.replace(broken.find(res_path), res_path.size(), gone);
    const std::string bad_cfg = wd.write("bad.json", broken);
    CHECK(run_cli("analyze --config " + bad_cfg) == 2);
}

TEST_CASE("calibrator-check certifies and rejects") {
    Workdir wd("kefdr_cli_cal");
    const std::string good =
        wd.write("g2.json", R"({"calibrator": {"kind": "bounded_poly", "C": 20}})");
    CHECK(run_cli("calibrator-check --config " + good) == 0);

    const std::string power =
        wd.write("pow.json", R"({"calibrator": {"kind": "power", "kappa": 0.3}})");
    CHECK(run_cli("calibrator-check --config " + power) == 0);

    const std::string bad =
        wd.write("c2.json", R"({"calibrator": {"kind": "constant", "value": 2.0}})");
    CHECK(run_cli("calibrator-check --config " + bad) == 1);

    const std::string typo =
        wd.write("typo.json", R"({"calibrator": {"kind": "boundedpoly"}})");
    CHECK(run_cli("calibrator-check --config " + typo) == 2);
}

TEST_CASE("knockoff-check verifies and detects corruption") {
    Workdir wd("kefdr_cli_knock");
    const std::string ok =
        wd.write("ok.json", R"({"n": 60, "m": 10, "rho": 0.5, "seed": 7})");
    CHECK(run_cli("knockoff-check --config " + ok) == 0);

    const std::string bad =
        wd.write("bad.json", R"({"n": 60, "m": 10, "rho": 0.5, "seed": 7, "corrupt": true})");
    CHECK(run_cli("knockoff-check --config " + bad) == 1);

    const std::string dump = wd.write(
        "dump.json", "{\"n\": 40, \"m\": 8, \"seed\": 3, \"out_dir\": \"" +
                         wd.path("bundle") + "\"}");
    CHECK(run_cli("knockoff-check --config " + dump) == 0);
    CHECK(fs::exists(wd.path("bundle/X.csv")));
    CHECK(fs::exists(wd.path("bundle/Xtilde.csv")));
    CHECK(fs::exists(wd.path("bundle/D.csv")));
}
