#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "detour/model.hpp"

namespace detour {

enum class TwoExtremeVariant { Inner, Outer, LeftPair, RightPair };

// Raised when a mechanism or curve is asked for outside the regime it is
// defined in (e.g. the L = 0 mechanisms on an instance with L > 0).
struct UnsupportedRegime : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// n+1 extended-real phantom values per axis; +-infinity entries select
// extremes through sort order.
struct PhantomProfile {
    std::vector<double> xs;
    std::vector<double> ys;
};

// --- deterministic mechanisms ---

// Social-cost optimum. a* = sup of the cut points where moving the left
// endpoint further right still pays off, i.e. where
// (n1l(x) + n2)(1-k) < n1r(x)(1+k); b* symmetric. The condition is
// piecewise-constant between agent locations and monotone, so a breakpoint
// scan suffices.
Edge opt_soc_cost(const Instance& inst);

// Maximum-cost optimum:
//   if 1 - y_r >= x_l: ((x_l+x_r)/2, (y_l-x_l)/2 + 1/2)
//   else:              ((x_r-y_r)/2 + 1/2, (y_l+y_r)/2)
// Optimal for two-sided instances; one-sided instances use the empty-side
// conventions and the formula is only a convention there.
Edge opt_max_cost(const Instance& inst);

Edge two_extreme(const Instance& inst, TwoExtremeVariant variant);

// The restriction constant of the distance-keeping mechanism, evaluated in
// the cancellation-free form (1-k) / (1 + k^2 + sqrt(k^4 - k^3 + 3k^2 + k)).
double restrict_c(double k);

// (min(x_r, o(1-c)), max(y_l, o + c(1-o))). Requires L = 0.
Edge two_extreme_restrict(const Instance& inst);

Edge median_mechanism(const Instance& inst);

// Per-coordinate median of the n agent peaks -- (x_i, 1) for left agents,
// (0, x_j) for right agents -- plus the n+1 phantoms of each axis.
Edge generalized_median(const Instance& inst, const PhantomProfile& ph);

// Phantom profiles reproducing the named mechanisms (n = total agent count).
PhantomProfile phantoms_two_extreme_inner(std::size_t n);
PhantomProfile phantoms_median(std::size_t n);
PhantomProfile phantoms_restrict(std::size_t n1, std::size_t n2, double k, double o);

// --- randomized mechanisms (L = 0 only) ---

// {(x_r, y_l): p, (x_r/2, (y_l+1)/2): 1-p}, p = max((1+k)/(3-k), (k+k^2)/(1+k^2)).
Lottery rand_max_cost(const Instance& inst);

// Product lottery over {x_r, x_r/2} x {y_l, (1+y_l)/2}; the first choice on
// each axis has probability (1+k)/(3-k).
Lottery rand_unbound(const Instance& inst);

double rand_max_cost_p(double k);
double rand_unbound_p(double k);

Edge sample(const Lottery& lot, std::uint64_t seed);

// --- registry ---

enum class MechKind {
    OptSocCost,
    OptMaxCost,
    TwoExtremeInner,
    TwoExtremeOuter,
    TwoExtremeLeftPair,
    TwoExtremeRightPair,
    Restrict,
    RandMaxCost,
    RandUnbound,
    Median,
};

struct MechInfo {
    MechKind kind;
    std::string_view name;   // CLI name
    bool randomized;
    bool requires_l0;
};

// Throws std::invalid_argument for unknown names. Accepts: optsc, optmc,
// twoextreme (alias of twoextreme:inner), twoextreme:{inner,outer,left,right},
// restrict, randmc, randub, median.
const MechInfo& mechanism_by_name(std::string_view name);
const std::vector<MechInfo>& all_mechanisms();

// Runs any registry mechanism; deterministic ones come back as point masses.
Lottery run_mechanism(MechKind kind, const Instance& inst);

// --- raw cores (hot paths; spans must be sorted ascending) ---

struct SmallLottery {
    int m = 0;
    Edge e[4];
    double p[4];
};

Extremes extremes_of(std::span<const double> left, std::span<const double> right);
Edge opt_soc_core(std::span<const double> left, std::span<const double> right, double k);
Edge opt_max_core(const Extremes& ext);
Edge median_core(std::span<const double> left, std::span<const double> right);
SmallLottery run_mechanism_core(MechKind kind, std::span<const double> left,
                                std::span<const double> right, double k, double o);

}  // namespace detour
