#pragma once

#include "stlsbb/gbb.hpp"
#include "stlsbb/quadratic.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace stlsbb {

// ---------------------------------------------------------------------------
// Dolan-More performance profiles

inline constexpr double failed_cost = std::numeric_limits<double>::infinity();

/// ratios(p, s) = cost(p, s) / min_s cost(p, .) with +inf for failures.
class ProfileTable {
public:
    ProfileTable(std::vector<std::string> solvers, std::vector<std::vector<double>> ratios);

    std::size_t problems() const noexcept { return ratios_.size(); }
    const std::vector<std::string>& solvers() const noexcept { return solvers_; }
    const std::vector<std::vector<double>>& ratios() const noexcept { return ratios_; }

    /// Fraction of problems with ratio <= theta for solver s.
    double rho(std::size_t solver, double theta) const;

    /// Sorted distinct finite ratios over all solvers: the points where
    /// some rho steps.
    std::vector<double> breakpoints() const;

private:
    std::vector<std::string> solvers_;
    std::vector<std::vector<double>> ratios_;
};

/// costs[p][s]; failures are encoded as failed_cost (or any non-finite or
/// nonpositive value).
ProfileTable performance_profile(const std::vector<std::vector<double>>& costs,
                                 std::vector<std::string> solver_names = {});

void write_profile_csv(std::ostream& os, const ProfileTable& table);

/// Wide cost matrix: header `problem,<solver>...`, one row per problem,
/// failures written as `fail`.
struct CostMatrix {
    std::vector<std::string> solvers;
    std::vector<std::string> problems;
    std::vector<std::vector<double>> costs;
};

CostMatrix read_costs_csv(std::istream& is);
void write_costs_csv(std::ostream& os, const CostMatrix& costs);

// ---------------------------------------------------------------------------
// Quadratic sweeps

struct ExperimentGrid {
    std::vector<int> settings{1};
    std::vector<double> kappas{1e4};
    std::vector<double> epsilons{1e-6};
    std::vector<std::uint64_t> seeds;
    Eigen::Index n = 100;
    std::vector<std::string> policies{"bb1", "bb2", "gamma:1", "gamma:20"};
    std::size_t max_iter = 20000;
    /// Run the nonmonotone line-search solver instead of the plain iteration.
    bool line_search = false;
    unsigned threads = 0; ///< 0: hardware concurrency

    void validate() const;
};

struct SweepCell {
    int setting = 0;
    double kappa = 0.0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::string policy;
    std::size_t iterations = 0;
    bool failed = false;
    std::string error;
};

struct SweepSummary {
    int setting = 0;
    double kappa = 0.0;
    double epsilon = 0.0;
    std::string policy;
    double mean_iterations = 0.0;
    double median_iterations = 0.0;
    std::size_t runs = 0;
    std::size_t failures = 0;
};

struct SweepResult {
    ExperimentGrid grid;
    std::vector<SweepCell> cells; ///< grid order: setting, kappa, eps, seed, policy
    std::vector<SweepSummary> summary;

    /// Problems = (setting, kappa, eps, seed), solvers = policies; capped or
    /// errored runs become failures.
    CostMatrix costs() const;
};

SweepResult run_quadratic_sweep(const ExperimentGrid& grid);

void write_sweep_csv(std::ostream& os, const SweepResult& result);
void write_sweep_json(std::ostream& os, const SweepResult& result);
void write_summary_csv(std::ostream& os, const SweepResult& result);

double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Planar Rosenbrock table

struct RosenbrockTable {
    std::vector<double> epsilons;
    std::vector<std::string> policies;
    /// counts[e][p]; empty when the iteration cap was hit.
    std::vector<std::vector<std::optional<std::size_t>>> counts;
};

/// Nonmonotone line-search settings used throughout the experiments:
/// M=10, beta=0.1, eta=0.001, delta=0.1, sigma=0.8.
SolverConfig experiment_config();

RosenbrockTable run_rosenbrock_table(std::vector<double> epsilons = {1e-1, 1e-2, 1e-4, 1e-8},
                                     std::vector<std::string> policies = {"bb1", "bb2", "gamma:1", "gamma:1.5"},
                                     std::size_t max_iter = 5000);

void write_rosenbrock_table(std::ostream& os, const RosenbrockTable& table, bool csv);

} // namespace stlsbb
