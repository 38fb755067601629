#pragma once

#include <array>
#include <string>
#include <vector>

#include "detour/model.hpp"

namespace detour {

enum class Curve { TwoExtreme, Restrict, RandMc, RandUb };
enum class LbKind { Deterministic, Randomized };
enum class OMode { Fixed05, Sweep };

Curve curve_by_name(std::string_view name);  // two_extreme|restrict|randmc|randub
std::string_view o_mode_name(OMode mode);

// Proven worst-case ratio of the named mechanism.
//   two_extreme: (2-2(1-k)L)/(1+k-(1-k)L)           (any L)
//   restrict:    2*max(R1,R2,R3,R4) at c(k); continuous extension 2 at k=0
//   randmc:      max((4-2k)/(3-k), (1+k)/(1+k^2))
//   randub:      (4-2k)/(3-k) for k <= kappa=(9-sqrt(73))/4,
//                else (11+2k^3-9k^2)/(9+k^2-6k)
// All curves except two_extreme require L = 0.
double upper_curve(Curve curve, double k, double L);

// The four terms of the restrict bound evaluated at c = restrict_c(k).
std::array<double, 4> restrict_terms(double k);

// Proven lower bound on any strategyproof mechanism's ratio.
//   deterministic: g_m evaluated at a = min(a0, (1-L)/2); 2/(1+sqrt(k)) at L=0
//   randomized:    (6+6k)/(5+7k)  (stated for L=0; L ignored)
double analytic_lb(LbKind kind, double k, double L = 0.0);

// The 16 four-agent profiles pinned to a candidate output (a0, b0): extremes
// chosen independently from x_l in {0,a0}, x_r in {a0,o-eps}, y_l in
// {o+eps,b0}, y_r in {b0,1}. Faithful to the reference search: no ordering
// guard, so x_l > x_r profiles can occur when a0 > o-eps. Instances carry k=0;
// the ratio functional applies its own k.
struct SixteenProfiles {
    double o, a0, b0, eps;
    std::vector<Instance> profiles;
};
SixteenProfiles profiles16(double o, double a0, double b0, double eps = 1e-6);

// Worst ratio over the 16 profiles of the cost at (a0,b0) against each
// profile's closed-form maximum-cost optimum; profiles with optimum below
// eps_skip are skipped.
double f_k(double o, double a0, double b0, double k, double eps = 1e-6,
           double eps_skip = 1e-8);

// Minimum of f_k over the grid a0 = o*i/N, b0 = o+(1-o)*j/N, i,j in 0..N-1.
// degenerate_cells (optional) counts grid cells with a0 > o-eps, where the
// unguarded profile construction inverts x_l/x_r.
double inner_min(double k, double o, int grid_n, long* degenerate_cells = nullptr);

struct LowerBoundRecord {
    double k = 0.0;
    int grid_n = 0;
    OMode o_mode = OMode::Fixed05;
    std::vector<double> o_values;
    double raw = 0.0;      // grid value, clamped to >= analytic
    double safe = 0.0;     // max(analytic, raw - 0.003)
    double analytic = 0.0; // 2/(1+sqrt(k))
};
LowerBoundRecord b_of_k(double k, int grid_n, OMode o_mode = OMode::Fixed05);

struct GapStats {
    double det_gap = 0.0, det_argk = 0.0;
    double rand_gap = 0.0, rand_argk = 0.0;
};
// det sweep runs at det_k_step (grid-backed, expensive); rand sweep at k_step.
GapStats gap_stats(double k_step, double det_k_step = 0.01, int grid_n = 1000,
                   int workers = 1);

// CSV writers (6-decimal fixed point, deterministic across worker counts).
// header: k,raw,safe,analytic,grid_n,o_mode
std::string lower_bound_table_csv(double k_start, double k_end, double k_step,
                                  int grid_n, OMode o_mode, int workers = 1);
// header: k,two_extreme,restrict,det_lb[,computer_lb_safe],rand_upper,rand_lb
std::string curves_csv(double k_step, bool with_computer_lb = false,
                       int grid_n = 1000, int workers = 1);

}  // namespace detour
