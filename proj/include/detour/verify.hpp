#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "detour/mechanisms.hpp"
#include "detour/model.hpp"

namespace detour {

enum class Objective { SC, MC };

// Deterministic uniform doubles; avoids std::uniform_real_distribution, whose
// output is implementation-defined, so results are reproducible everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t below(std::uint64_t n) { return eng_() % n; }

private:
    std::mt19937_64 eng_;
};

struct SampleOptions {
    std::optional<double> fixed_k;   // default: uniform in [0,1)
    std::optional<double> fixed_L;   // default: 0 or uniform in [0,(1-o)/2]
    bool two_sided = false;          // require >= 1 agent per side
    int max_agents = 8;
};

Instance random_instance(Rng& rng, const SampleOptions& opts = {});

struct Violation {
    Instance instance;
    std::vector<std::pair<Side, int>> coalition;
    std::vector<double> misreports;
    std::vector<double> gains;  // truthful cost - misreport cost, per member
    std::string to_csv_row(std::string_view mechanism) const;
};

struct RatioReport {
    std::string mechanism;
    Objective objective = Objective::MC;
    double k = 0.0, L = 0.0;
    double worst_ratio = 0.0;
    double mech_value = 0.0, opt_value = 0.0;
    std::optional<Instance> witness;
    std::string to_csv_row() const;
};

inline constexpr const char* kViolationCsvHeader =
    "mechanism,k,o,L,coalition,misreports,gains,instance";
inline constexpr const char* kRatioCsvHeader =
    "mechanism,objective,k,L,worst_ratio,mech_value,opt_value,witness";

// Brute-force objective minimization over the (resolution+1)^2 grid on
// [0,o] x [o+L,1].
std::pair<Edge, double> grid_opt(const Instance& inst, Objective objective,
                                 int resolution);

// Coalition incentive search. Tries every coalition of the given size; sizes
// 1-2 sweep the full product of uniform misreport grids (`grid` points per
// region), size 3 samples `budget3` random joint misreports per coalition.
// Returns the violation with the largest minimum member gain, so documented
// witnesses surface with their full gain rather than a grid-edge sliver.
// cross_region additionally allows misreports into the opposite region.
std::optional<Violation> check_incentives(MechKind kind, const Instance& inst,
                                          int coalition_size, int grid,
                                          double tol = 1e-9,
                                          bool cross_region = false,
                                          int budget3 = 2000,
                                          std::uint64_t seed = 42);

// Output-invariance fuzz: an agent moving within its region on one side of
// its output coordinate (never crossing it) must not move the output.
// Deterministic mechanisms only.
std::optional<Violation> check_monotone(MechKind kind, const Instance& inst,
                                        int moves, double tol,
                                        std::uint64_t seed = 42);

struct DominanceCounterexample {
    Side side = Side::Left;
    int index = 0;
    Edge alpha, beta;
    double cost_alpha = 0.0, cost_beta = 0.0;
};

// Samples outcome pairs (alpha, beta) with alpha between beta and the agent's
// peak on both axes; the cost must weakly improve toward the peak.
std::optional<DominanceCounterexample> check_single_peaked(const Instance& inst,
                                                           int outcome_samples,
                                                           std::uint64_t seed = 42);

// Per-instance approximation ratio; optimum via opt_max_cost / opt_soc_cost.
// Throws std::domain_error when the optimum is <= 1e-12.
double ratio(MechKind kind, const Instance& inst, Objective objective);

// Maximizes ratio over `budget` random two-sided instances (n <= 8) plus the
// built-in structured adversarial families at the given k.
RatioReport worst_ratio_search(MechKind kind, Objective objective, double k,
                               double L, int budget, std::uint64_t seed);

struct Witness {
    std::string name;
    Instance instance;
    std::string note;
    // For incentive witnesses: the deviating agent and its misreport.
    std::optional<std::pair<Side, int>> agent;
    std::optional<double> misreport;
};

// Catalog of documented adversarial fixtures:
//   "optmc-nonsp"          k-parametric single-agent manipulation of opt_max_cost
//   "twoextreme-tight"     ratio -> 2/(1+k) family for the inner variant
//   "median-sc-hard"       social-cost family that is hard for median_mechanism
//   "outerpair-tight"      ratio -> 2 family for the outer and left-pair variants
//   "rightpair-tight"      mirrored family for the right-pair variant
Witness named_witness(const std::string& name, double k = 0.5, double eps = 1e-4);

}  // namespace detour
