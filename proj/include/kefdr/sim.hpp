#ifndef KEFDR_SIM_HPP
#define KEFDR_SIM_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kefdr/calibrators.hpp"
#include "kefdr/knockoff.hpp"
#include "kefdr/matrix.hpp"

namespace kefdr {

enum class Method { M0, M1, M2, M3, M4, M5 };
constexpr int kNumMethods = 6;

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct SimSetting {
    int n = 0, m = 0, k = 0;
    double rho = 0.5;
    double gamma = 0.0;
    double sigma = 1.0;
    double alpha = 0.05;
    double lambda = 0.5;
    std::vector<Method> methods;
    int reps = 0;
    std::uint64_t master_seed = 0;
    bool random_signs = false;
    Calibrator calibrator = Calibrator::bounded_poly_at_level();
    int grid_size = 100;
    double grid_ratio = 1e-3;
    std::vector<double> user_d;  // empty: equicorrelated rule
};

// Per-replication, per-method rejection counts against the known support.
struct MethodCounts {
    bool ok = false;
    std::string failure;
    int false_rejections = 0;
    int rejections = 0;
    int true_positives = 0;
};

struct RepOutcome {
    bool data_ok = false;
    std::string failure;
    std::array<MethodCounts, kNumMethods> per_method;
};

struct MethodStats {
    double fdr_hat = 0.0;
    double power_hat = 0.0;
    double se_fdr = 0.0;
    double se_power = 0.0;
    int reps_completed = 0;
};

struct SimResult {
    SimSetting setting;
    std::array<MethodStats, kNumMethods> per_method;
};

// Rows i.i.d. N(0, Omega) with Omega_ij = rho^|i-j| via the AR(1) recursion
// x_1 = z_1, x_t = rho x_{t-1} + sqrt(1-rho^2) z_t.
Matrix gen_design(int n, int m, double rho, std::uint64_t seed);

// Support of size k drawn uniformly without replacement; nonzero entries are
// +gamma (or random signs when requested).
std::pair<Vector, std::vector<int>> gen_truth(int m, int k, double gamma, std::uint64_t seed,
                                              bool random_signs = false);

// One replication: design -> standardize -> knockoffs -> response -> methods.
// The replication seed is derive_seed(master_seed, rep_index); the data do
// not depend on the method list, the signal strength enters magnitudes only.
RepOutcome run_replication(const SimSetting& setting, int rep_index);

// Serial reference loop over replications.
std::vector<RepOutcome> run_replications_serial(const SimSetting& setting);
// OpenMP loop writing into per-replication slots; bit-identical to the
// serial runner for any thread count.
std::vector<RepOutcome> run_replications_parallel(const SimSetting& setting, int threads);

SimResult aggregate(const std::vector<RepOutcome>& reps, const SimSetting& setting);

// threads <= 1 selects the serial reference path.
SimResult run_setting(const SimSetting& setting, int threads = 1);

std::vector<std::string> sim_csv_header();
std::vector<std::string> sim_csv_row(const SimResult& result, Method method);

} // namespace kefdr

#endif
