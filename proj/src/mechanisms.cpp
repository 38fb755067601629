#include "detour/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace detour {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_l0(const Instance& inst, const char* name) {
    if (inst.L() > 0.0)
        throw UnsupportedRegime(std::string(name) + " is defined only for L = 0");
}

}  // namespace

Extremes extremes_of(std::span<const double> left, std::span<const double> right) {
    Extremes ext;
    if (!left.empty()) {
        ext.x_l = left.front();
        ext.x_r = left.back();
    }
    if (!right.empty()) {
        ext.y_l = right.front();
        ext.y_r = right.back();
    }
    return ext;
}

Edge opt_soc_core(std::span<const double> left, std::span<const double> right, double k) {
    const int n1 = static_cast<int>(left.size());
    const int n2 = static_cast<int>(right.size());
    Edge out{0.0, 1.0};

    // Left scan: for x in the open interval before breakpoint u, moving a past
    // u is worthwhile while (n1l(x) + n2)(1-k) < n1r(x)(1+k). The condition is
    // monotone (false stays false as x grows), so keep the last breakpoint
    // whose preceding interval satisfies it.
    double prev = 0.0;
    int at_or_before = 0;  // agents <= current interval
    for (int i = 0; i < n1;) {
        double u = left[i];
        if (u > prev) {
            int n1l = at_or_before;  // all counted agents are <= prev < any
                                     // point of the open interval (prev, u)
            int n1r = n1 - n1l;
            if ((n1l + n2) * (1.0 - k) < n1r * (1.0 + k)) out.a = u;
        }
        // absorb duplicates of u
        while (i < n1 && left[i] == u) {
            ++i;
            ++at_or_before;
        }
        prev = u;
    }

    // Right scan, mirrored: b* = inf of the cut points where pulling b left
    // still pays. For x in the open interval after breakpoint v the condition
    // is (n2r(x) + n1)(1-k) < n2l(x)(1+k); it is monotone in the other
    // direction, so the smallest qualifying breakpoint wins.
    for (int j = 0; j < n2;) {
        double v = right[j];
        while (j < n2 && right[j] == v) ++j;  // j = count of agents <= v
        double next = (j < n2) ? right[j] : 1.0;
        if (next > v) {
            int below = j;        // agents strictly left of any x in (v, next)
            int above = n2 - j;   // agents at or right of such x
            if ((above + n1) * (1.0 - k) < below * (1.0 + k)) {
                out.b = v;
                break;
            }
        }
    }
    return out;
}

Edge opt_max_core(const Extremes& ext) {
    if (1.0 - ext.y_r >= ext.x_l)
        return {0.5 * (ext.x_l + ext.x_r), 0.5 * (ext.y_l - ext.x_l) + 0.5};
    return {0.5 * (ext.x_r - ext.y_r) + 0.5, 0.5 * (ext.y_l + ext.y_r)};
}

Edge median_core(std::span<const double> left, std::span<const double> right) {
    // Per-coordinate median of the n peaks with ceil(n/2) phantoms at -inf and
    // the rest at +inf: the median lands on the floor(n/2)-th finite value.
    // x peaks sorted: one 0 per right agent, then the left positions.
    // y peaks sorted: the right positions, then one 1 per left agent.
    const std::size_t n1 = left.size(), n2 = right.size(), n = n1 + n2;
    const std::size_t idx = n / 2;
    double a = (idx < n2) ? 0.0 : left[idx - n2];
    double b = (idx < n2) ? right[idx] : 1.0;
    return {a, b};
}

Edge opt_soc_cost(const Instance& inst) {
    return opt_soc_core(inst.left(), inst.right(), inst.k());
}

Edge opt_max_cost(const Instance& inst) { return opt_max_core(extremes(inst)); }

Edge two_extreme(const Instance& inst, TwoExtremeVariant variant) {
    Extremes ext = extremes(inst);
    switch (variant) {
        case TwoExtremeVariant::Inner: return {ext.x_r, ext.y_l};
        case TwoExtremeVariant::Outer: return {ext.x_l, ext.y_r};
        case TwoExtremeVariant::LeftPair: return {ext.x_l, ext.y_l};
        case TwoExtremeVariant::RightPair: return {ext.x_r, ext.y_r};
    }
    throw std::logic_error("unreachable");
}

double restrict_c(double k) {
    if (!(k >= 0.0 && k < 1.0)) throw std::domain_error("restrict_c requires k in [0,1)");
    double radicand = ((k - 1.0) * k + 3.0) * k * k + k;  // k^4 - k^3 + 3k^2 + k
    return (1.0 - k) / (1.0 + k * k + std::sqrt(radicand));
}

Edge two_extreme_restrict(const Instance& inst) {
    require_l0(inst, "twoextreme-restrict");
    Extremes ext = extremes(inst);
    double c = restrict_c(inst.k());
    double o = inst.o();
    return {std::min(ext.x_r, o * (1.0 - c)), std::max(ext.y_l, o + c * (1.0 - o))};
}

Edge median_mechanism(const Instance& inst) {
    return median_core(inst.left(), inst.right());
}

Edge generalized_median(const Instance& inst, const PhantomProfile& ph) {
    const std::size_t n = inst.size();
    if (ph.xs.size() != n + 1 || ph.ys.size() != n + 1)
        throw std::invalid_argument("phantom profile arity: need n+1 values per axis");
    std::vector<double> xs, ys;
    xs.reserve(2 * n + 1);
    ys.reserve(2 * n + 1);
    for (double x : inst.left()) {
        xs.push_back(x);
        ys.push_back(1.0);
    }
    for (double y : inst.right()) {
        xs.push_back(0.0);
        ys.push_back(y);
    }
    xs.insert(xs.end(), ph.xs.begin(), ph.xs.end());
    ys.insert(ys.end(), ph.ys.begin(), ph.ys.end());
    std::nth_element(xs.begin(), xs.begin() + n, xs.end());
    std::nth_element(ys.begin(), ys.begin() + n, ys.end());
    Edge e{xs[n], ys[n]};
    if (!(e.a >= 0.0 && e.a <= inst.o() && e.b >= inst.o() + inst.L() && e.b <= 1.0))
        throw std::runtime_error("generalized median output is infeasible for this instance");
    return e;
}

PhantomProfile phantoms_two_extreme_inner(std::size_t n) {
    PhantomProfile ph;
    ph.xs.assign(n + 1, kInf);
    ph.xs[0] = -kInf;
    ph.ys.assign(n + 1, -kInf);
    ph.ys[n] = kInf;
    return ph;
}

PhantomProfile phantoms_median(std::size_t n) {
    PhantomProfile ph;
    std::size_t low = (n + 1) / 2;  // ceil(n/2) at -inf
    ph.xs.assign(n + 1, kInf);
    std::fill(ph.xs.begin(), ph.xs.begin() + low, -kInf);
    ph.ys = ph.xs;
    return ph;
}

PhantomProfile phantoms_restrict(std::size_t n1, std::size_t n2, double k, double o) {
    double c = restrict_c(k);
    PhantomProfile ph;
    ph.xs.reserve(n1 + n2 + 1);
    ph.ys.reserve(n1 + n2 + 1);
    // n1 phantoms at (o(1-c), 0), n2 at (1, o+c(1-o)), one at (0, 1).
    ph.xs.insert(ph.xs.end(), n1, o * (1.0 - c));
    ph.xs.insert(ph.xs.end(), n2, 1.0);
    ph.xs.push_back(0.0);
    ph.ys.insert(ph.ys.end(), n1, 0.0);
    ph.ys.insert(ph.ys.end(), n2, o + c * (1.0 - o));
    ph.ys.push_back(1.0);
    return ph;
}

double rand_max_cost_p(double k) {
    return std::max((1.0 + k) / (3.0 - k), (k + k * k) / (1.0 + k * k));
}

double rand_unbound_p(double k) { return (1.0 + k) / (3.0 - k); }

Lottery rand_max_cost(const Instance& inst) {
    require_l0(inst, "rand-max-cost");
    Extremes ext = extremes(inst);
    double p = rand_max_cost_p(inst.k());
    return Lottery({{{ext.x_r, ext.y_l}, p},
                    {{0.5 * ext.x_r, 0.5 * (ext.y_l + 1.0)}, 1.0 - p}});
}

Lottery rand_unbound(const Instance& inst) {
    require_l0(inst, "rand-unbound");
    Extremes ext = extremes(inst);
    double q = rand_unbound_p(inst.k());
    double a1 = ext.x_r, a2 = 0.5 * ext.x_r;
    double b1 = ext.y_l, b2 = 0.5 * (1.0 + ext.y_l);
    return Lottery({{{a1, b1}, q * q},
                    {{a1, b2}, q * (1.0 - q)},
                    {{a2, b1}, (1.0 - q) * q},
                    {{a2, b2}, (1.0 - q) * (1.0 - q)}});
}

Edge sample(const Lottery& lot, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    double acc = 0.0;
    for (const auto& [e, p] : lot.support()) {
        acc += p;
        if (u < acc) return e;
    }
    return lot.support().back().first;
}

namespace {

const std::vector<MechInfo> kRegistry = {
    {MechKind::OptSocCost, "optsc", false, false},
    {MechKind::OptMaxCost, "optmc", false, false},
    {MechKind::TwoExtremeInner, "twoextreme:inner", false, false},
    {MechKind::TwoExtremeOuter, "twoextreme:outer", false, false},
    {MechKind::TwoExtremeLeftPair, "twoextreme:left", false, false},
    {MechKind::TwoExtremeRightPair, "twoextreme:right", false, false},
    {MechKind::Restrict, "restrict", false, true},
    {MechKind::RandMaxCost, "randmc", true, true},
    {MechKind::RandUnbound, "randub", true, true},
    {MechKind::Median, "median", false, false},
};

}  // namespace

const std::vector<MechInfo>& all_mechanisms() { return kRegistry; }

const MechInfo& mechanism_by_name(std::string_view name) {
    std::string_view canonical = (name == "twoextreme") ? "twoextreme:inner" : name;
    for (const auto& info : kRegistry)
        if (info.name == canonical) return info;
    throw std::invalid_argument("unknown mechanism '" + std::string(name) + "'");
}

Lottery run_mechanism(MechKind kind, const Instance& inst) {
    switch (kind) {
        case MechKind::OptSocCost: return Lottery::point(opt_soc_cost(inst));
        case MechKind::OptMaxCost: return Lottery::point(opt_max_cost(inst));
        case MechKind::TwoExtremeInner:
            return Lottery::point(two_extreme(inst, TwoExtremeVariant::Inner));
        case MechKind::TwoExtremeOuter:
            return Lottery::point(two_extreme(inst, TwoExtremeVariant::Outer));
        case MechKind::TwoExtremeLeftPair:
            return Lottery::point(two_extreme(inst, TwoExtremeVariant::LeftPair));
        case MechKind::TwoExtremeRightPair:
            return Lottery::point(two_extreme(inst, TwoExtremeVariant::RightPair));
        case MechKind::Restrict: return Lottery::point(two_extreme_restrict(inst));
        case MechKind::RandMaxCost: return rand_max_cost(inst);
        case MechKind::RandUnbound: return rand_unbound(inst);
        case MechKind::Median: return Lottery::point(median_mechanism(inst));
    }
    throw std::logic_error("unreachable");
}

SmallLottery run_mechanism_core(MechKind kind, std::span<const double> left,
                                std::span<const double> right, double k, double o) {
    SmallLottery out;
    auto point = [&out](Edge e) {
        out.m = 1;
        out.e[0] = e;
        out.p[0] = 1.0;
    };
    switch (kind) {
        case MechKind::OptSocCost:
            point(opt_soc_core(left, right, k));
            return out;
        case MechKind::Median:
            point(median_core(left, right));
            return out;
        default: break;
    }
    Extremes ext = extremes_of(left, right);
    switch (kind) {
        case MechKind::OptMaxCost:
            point(opt_max_core(ext));
            break;
        case MechKind::TwoExtremeInner:
            point({ext.x_r, ext.y_l});
            break;
        case MechKind::TwoExtremeOuter:
            point({ext.x_l, ext.y_r});
            break;
        case MechKind::TwoExtremeLeftPair:
            point({ext.x_l, ext.y_l});
            break;
        case MechKind::TwoExtremeRightPair:
            point({ext.x_r, ext.y_r});
            break;
        case MechKind::Restrict: {
            double c = restrict_c(k);
            point({std::min(ext.x_r, o * (1.0 - c)),
                   std::max(ext.y_l, o + c * (1.0 - o))});
            break;
        }
        case MechKind::RandMaxCost: {
            double p = rand_max_cost_p(k);
            out.m = 2;
            out.e[0] = {ext.x_r, ext.y_l};
            out.p[0] = p;
            out.e[1] = {0.5 * ext.x_r, 0.5 * (ext.y_l + 1.0)};
            out.p[1] = 1.0 - p;
            break;
        }
        case MechKind::RandUnbound: {
            double q = rand_unbound_p(k);
            double a1 = ext.x_r, a2 = 0.5 * ext.x_r;
            double b1 = ext.y_l, b2 = 0.5 * (1.0 + ext.y_l);
            out.m = 4;
            out.e[0] = {a1, b1};
            out.p[0] = q * q;
            out.e[1] = {a1, b2};
            out.p[1] = q * (1.0 - q);
            out.e[2] = {a2, b1};
            out.p[2] = (1.0 - q) * q;
            out.e[3] = {a2, b2};
            out.p[3] = (1.0 - q) * (1.0 - q);
            break;
        }
        default:
            throw std::logic_error("unreachable");
    }
    return out;
}

}  // namespace detour
