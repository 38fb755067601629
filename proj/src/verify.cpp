#include "detour/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "detour/fmt.hpp"

namespace detour {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxAgents = 16;

bool extremes_only(MechKind kind) {
    return kind != MechKind::OptSocCost && kind != MechKind::Median;
}

bool is_randomized(MechKind kind) {
    return kind == MechKind::RandMaxCost || kind == MechKind::RandUnbound;
}

std::string inline_instance(const Instance& inst) {
    std::string s = serialize_instance(inst);
    while (!s.empty() && s.back() == '\n') s.pop_back();
    std::string out;
    for (char c : s) {
        if (c == '\n')
            out += " / ";
        else
            out += c;
    }
    return out;
}

}  // namespace

std::string Violation::to_csv_row(std::string_view mechanism) const {
    std::string row(mechanism);
    row += "," + fmt6(instance.k()) + "," + fmt6(instance.o()) + "," +
           fmt6(instance.L()) + ",";
    for (std::size_t i = 0; i < coalition.size(); ++i) {
        if (i) row += ";";
        row += (coalition[i].first == Side::Left ? "L" : "R") +
               std::to_string(coalition[i].second);
    }
    row += ",";
    for (std::size_t i = 0; i < misreports.size(); ++i) {
        if (i) row += ";";
        row += fmt6(misreports[i]);
    }
    row += ",";
    for (std::size_t i = 0; i < gains.size(); ++i) {
        if (i) row += ";";
        row += fmt6(gains[i]);
    }
    row += ",\"" + inline_instance(instance) + "\"";
    return row;
}

std::string RatioReport::to_csv_row() const {
    std::string row = mechanism;
    row += std::string(",") + (objective == Objective::SC ? "sc" : "mc");
    row += "," + fmt6(k) + "," + fmt6(L);
    row += "," + fmt6(worst_ratio) + "," + fmt6(mech_value) + "," + fmt6(opt_value);
    row += ",\"" + (witness ? inline_instance(*witness) : std::string()) + "\"";
    return row;
}

Instance random_instance(Rng& rng, const SampleOptions& opts) {
    double o = rng.uniform(0.1, 0.9);
    double L;
    if (opts.fixed_L)
        L = *opts.fixed_L;
    else
        L = (rng.uniform() < 0.5) ? 0.0 : rng.uniform(0.0, 0.5 * (1.0 - o));
    double k = opts.fixed_k ? *opts.fixed_k : rng.uniform();
    int n, nl;
    if (opts.two_sided) {
        n = 2 + static_cast<int>(rng.below(opts.max_agents - 1));
        nl = 1 + static_cast<int>(rng.below(n - 1));
    } else {
        n = 1 + static_cast<int>(rng.below(opts.max_agents));
        // position-proportional split: sample each agent uniformly over the
        // union of the two regions
        nl = -1;
    }
    std::vector<double> left, right;
    double free_len = 1.0 - L;
    for (int i = 0; i < n; ++i) {
        if (nl >= 0) {
            if (i < nl)
                left.push_back(rng.uniform(0.0, o));
            else
                right.push_back(rng.uniform(o + L, 1.0));
        } else {
            double u = rng.uniform(0.0, free_len);
            if (u < o)
                left.push_back(u);
            else
                right.push_back(u + L);
        }
    }
    if (left.empty() && right.empty()) right.push_back(rng.uniform(o + L, 1.0));
    // region-open endpoints: uniform() never returns its upper bound, and the
    // right-region draw is > o+L with probability 1; nudge the measure-zero hit
    for (double& y : right)
        if (y <= o + L) y = o + L + 1e-12;
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    return Instance::unchecked(k, o, L, std::move(left), std::move(right));
}

std::pair<Edge, double> grid_opt(const Instance& inst, Objective objective,
                                 int resolution) {
    if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
    if (inst.size() == 0) throw std::invalid_argument("no agents");
    const double k = inst.k(), o = inst.o(), L = inst.L();
    const int res = resolution;
    const double bl = o + L;
    // Both objectives split into an a-part and a b-part:
    //   left cost  = |x-a| - k a + (k-1) b + 1
    //   right cost = |y-b| + k b + (1-k) a
    // so precompute the per-endpoint aggregates and scan the grid in O(1)
    // per cell.
    std::vector<double> fa(res + 1), gb(res + 1);   // SC aggregates
    std::vector<double> la(res + 1), rb(res + 1);   // MC aggregates
    const double n1 = static_cast<double>(inst.left().size());
    const double n2 = static_cast<double>(inst.right().size());
    for (int i = 0; i <= res; ++i) {
        double a = o * i / res;
        double s = 0.0, m = -kInf;
        for (double x : inst.left()) {
            double d = std::fabs(x - a);
            s += d;
            m = std::max(m, d);
        }
        fa[i] = s - n1 * k * a + n2 * (1.0 - k) * a;
        la[i] = m - k * a;
    }
    for (int j = 0; j <= res; ++j) {
        double b = bl + (1.0 - bl) * j / res;
        double s = 0.0, m = -kInf;
        for (double y : inst.right()) {
            double d = std::fabs(y - b);
            s += d;
            m = std::max(m, d);
        }
        gb[j] = s + n2 * k * b + n1 * ((k - 1.0) * b + 1.0);
        rb[j] = m + k * b;
    }
    Edge best_edge{0.0, 1.0};
    double best = kInf;
    for (int i = 0; i <= res; ++i) {
        double a = o * i / res;
        for (int j = 0; j <= res; ++j) {
            double b = bl + (1.0 - bl) * j / res;
            double v;
            if (objective == Objective::SC) {
                v = fa[i] + gb[j];
            } else {
                double lv = inst.left().empty() ? -kInf : la[i] + (k - 1.0) * b + 1.0;
                double rv = inst.right().empty() ? -kInf : rb[j] + (1.0 - k) * a;
                v = std::max(lv, rv);
            }
            if (v < best) {
                best = v;
                best_edge = {a, b};
            }
        }
    }
    return {best_edge, best};
}

namespace {

// Scratch state for one coalition of an incentive search.
struct CoalitionCtx {
    MechKind kind;
    double k, o, L;
    bool ext_only;
    // members: true position/side
    int m = 0;
    std::array<double, 3> truth_pos;
    std::array<Side, 3> truth_side;
    std::array<double, 3> truth_cost;
    // non-members, sorted
    std::array<double, kMaxAgents> oth_left, oth_right;
    int oth_nl = 0, oth_nr = 0;
    double oth_lmn = 0, oth_lmx = 0, oth_rmn = 0, oth_rmx = 0;

    double member_cost(const SmallLottery& lot, int i) const {
        double t = 0.0;
        for (int j = 0; j < lot.m; ++j)
            t += lot.p[j] * agent_cost(lot.e[j], truth_pos[i], truth_side[i], k);
        return t;
    }

    SmallLottery eval(const double* reps) const {
        if (ext_only) {
            double lmn = oth_lmn, lmx = oth_lmx, rmn = oth_rmn, rmx = oth_rmx;
            int lc = oth_nl, rc = oth_nr;
            for (int i = 0; i < m; ++i) {
                double r = reps[i];
                if (r < o) {
                    if (lc == 0) {
                        lmn = lmx = r;
                    } else {
                        lmn = std::min(lmn, r);
                        lmx = std::max(lmx, r);
                    }
                    ++lc;
                } else {
                    if (rc == 0) {
                        rmn = rmx = r;
                    } else {
                        rmn = std::min(rmn, r);
                        rmx = std::max(rmx, r);
                    }
                    ++rc;
                }
            }
            double lbuf[2] = {lmn, lmx}, rbuf[2] = {rmn, rmx};
            std::span<const double> ls = lc ? std::span<const double>(lbuf, 2)
                                            : std::span<const double>();
            std::span<const double> rs = rc ? std::span<const double>(rbuf, 2)
                                            : std::span<const double>();
            return run_mechanism_core(kind, ls, rs, k, o);
        }
        double lbuf[kMaxAgents + 3], rbuf[kMaxAgents + 3];
        int nl = oth_nl, nr = oth_nr;
        std::copy(oth_left.begin(), oth_left.begin() + nl, lbuf);
        std::copy(oth_right.begin(), oth_right.begin() + nr, rbuf);
        for (int i = 0; i < m; ++i) {
            double r = reps[i];
            double* buf = (r < o) ? lbuf : rbuf;
            int& cnt = (r < o) ? nl : nr;
            int pos = cnt;
            while (pos > 0 && buf[pos - 1] > r) {
                buf[pos] = buf[pos - 1];
                --pos;
            }
            buf[pos] = r;
            ++cnt;
        }
        return run_mechanism_core(kind, std::span<const double>(lbuf, nl),
                                  std::span<const double>(rbuf, nr), k, o);
    }
};

}  // namespace

std::optional<Violation> check_incentives(MechKind kind, const Instance& inst,
                                          int coalition_size, int grid, double tol,
                                          bool cross_region, int budget3,
                                          std::uint64_t seed) {
    if (coalition_size < 1 || coalition_size > 3)
        throw std::invalid_argument("coalition_size must be in 1..3");
    if (grid < 2) throw std::invalid_argument("grid must be >= 2");
    const int n1 = static_cast<int>(inst.left().size());
    const int n2 = static_cast<int>(inst.right().size());
    const int n = n1 + n2;
    if (n > kMaxAgents)
        throw std::invalid_argument("incentive search supports at most 16 agents");
    if (coalition_size > n) return std::nullopt;
    const double k = inst.k(), o = inst.o(), L = inst.L();
    for (const auto& info : all_mechanisms())
        if (info.kind == kind && info.requires_l0 && L > 0.0)
            throw UnsupportedRegime(std::string(info.name) +
                                    " is defined only for L = 0");

    // Misreport grids: the left grid covers [0, o) inclusive of 0, the right
    // grid covers (o+L, 1] inclusive of 1; each has exactly `grid` points.
    std::vector<double> left_grid(grid), right_grid(grid);
    for (int t = 0; t < grid; ++t) left_grid[t] = o * t / grid;
    for (int t = 1; t <= grid; ++t)
        right_grid[t - 1] = (o + L) + (1.0 - o - L) * t / grid;

    auto side_of = [&](int idx) { return idx < n1 ? Side::Left : Side::Right; };
    auto pos_of = [&](int idx) {
        return idx < n1 ? inst.left()[idx] : inst.right()[idx - n1];
    };

    SmallLottery truthful = run_mechanism_core(
        kind, inst.left(), inst.right(), k, o);

    std::optional<Violation> best;
    double best_gain = tol;

    Rng rng(seed);

    std::array<int, 3> members{};
    auto run_coalition = [&](int msize) {
        CoalitionCtx ctx;
        ctx.kind = kind;
        ctx.k = k;
        ctx.o = o;
        ctx.L = L;
        ctx.ext_only = extremes_only(kind);
        ctx.m = msize;
        ctx.oth_nl = ctx.oth_nr = 0;
        for (int idx = 0; idx < n; ++idx) {
            bool member = false;
            for (int i = 0; i < msize; ++i) member |= (members[i] == idx);
            if (member) continue;
            if (side_of(idx) == Side::Left)
                ctx.oth_left[ctx.oth_nl++] = pos_of(idx);
            else
                ctx.oth_right[ctx.oth_nr++] = pos_of(idx);
        }
        if (ctx.oth_nl) {
            ctx.oth_lmn = ctx.oth_left[0];
            ctx.oth_lmx = ctx.oth_left[ctx.oth_nl - 1];
        }
        if (ctx.oth_nr) {
            ctx.oth_rmn = ctx.oth_right[0];
            ctx.oth_rmx = ctx.oth_right[ctx.oth_nr - 1];
        }
        for (int i = 0; i < msize; ++i) {
            ctx.truth_pos[i] = pos_of(members[i]);
            ctx.truth_side[i] = side_of(members[i]);
            ctx.truth_cost[i] = ctx.member_cost(truthful, i);
        }

        // candidate misreports per member
        std::vector<double> cand[3];
        for (int i = 0; i < msize; ++i) {
            const auto& home =
                (ctx.truth_side[i] == Side::Left) ? left_grid : right_grid;
            cand[i] = home;
            if (cross_region) {
                const auto& away =
                    (ctx.truth_side[i] == Side::Left) ? right_grid : left_grid;
                cand[i].insert(cand[i].end(), away.begin(), away.end());
            }
        }

        // For mechanisms that read only the side extremes, any report strictly
        // inside the non-members' span of its side produces the same output;
        // keep one representative per side. This is exact (jointly as well:
        // the combined min/max is unchanged by in-span reports), it only
        // prunes duplicates of identical outcomes.
        if (ctx.ext_only) {
            for (int i = 0; i < msize; ++i) {
                std::vector<double> filt;
                filt.reserve(cand[i].size());
                bool left_rep = false, right_rep = false;
                for (double r : cand[i]) {
                    bool is_left = r < o;
                    int cnt = is_left ? ctx.oth_nl : ctx.oth_nr;
                    double mn = is_left ? ctx.oth_lmn : ctx.oth_rmn;
                    double mx = is_left ? ctx.oth_lmx : ctx.oth_rmx;
                    if (cnt == 0 || r < mn || r > mx) {
                        filt.push_back(r);
                        continue;
                    }
                    bool& rep = is_left ? left_rep : right_rep;
                    if (!rep) {
                        rep = true;
                        filt.push_back(r);
                    }
                }
                cand[i] = std::move(filt);
            }
        }

        auto consider = [&](const double* reps) {
            SmallLottery lot = ctx.eval(reps);
            double mingain = kInf;
            for (int i = 0; i < msize; ++i) {
                double g = ctx.truth_cost[i] - ctx.member_cost(lot, i);
                mingain = std::min(mingain, g);
                if (mingain <= best_gain) return;
            }
            best_gain = mingain;
            Violation v{inst, {}, {}, {}};
            for (int i = 0; i < msize; ++i) {
                int idx = members[i];
                v.coalition.emplace_back(side_of(idx),
                                         idx < n1 ? idx : idx - n1);
                v.misreports.push_back(reps[i]);
            }
            for (int i = 0; i < msize; ++i)
                v.gains.push_back(ctx.truth_cost[i] - ctx.member_cost(lot, i));
            best = std::move(v);
        };

        double reps[3];
        if (msize == 1) {
            for (double r0 : cand[0]) {
                reps[0] = r0;
                consider(reps);
            }
        } else if (msize == 2) {
            for (double r0 : cand[0]) {
                reps[0] = r0;
                for (double r1 : cand[1]) {
                    reps[1] = r1;
                    consider(reps);
                }
            }
        } else {
            for (int b = 0; b < budget3; ++b) {
                for (int i = 0; i < 3; ++i)
                    reps[i] = cand[i][rng.below(cand[i].size())];
                consider(reps);
            }
        }
    };

    // enumerate coalitions of exactly coalition_size agents
    if (coalition_size == 1) {
        for (int i = 0; i < n; ++i) {
            members[0] = i;
            run_coalition(1);
        }
    } else if (coalition_size == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                members = {i, j, 0};
                run_coalition(2);
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int l = j + 1; l < n; ++l) {
                    members = {i, j, l};
                    run_coalition(3);
                }
    }
    return best;
}

std::optional<Violation> check_monotone(MechKind kind, const Instance& inst,
                                        int moves, double tol, std::uint64_t seed) {
    if (is_randomized(kind))
        throw std::invalid_argument("check_monotone requires a deterministic mechanism");
    const int n1 = static_cast<int>(inst.left().size());
    const int n2 = static_cast<int>(inst.right().size());
    const int n = n1 + n2;
    Edge base = run_mechanism(kind, inst).edge();
    Rng rng(seed);
    for (int t = 0; t < moves; ++t) {
        int idx = static_cast<int>(rng.below(n));
        Side side = idx < n1 ? Side::Left : Side::Right;
        double x = (side == Side::Left) ? inst.left()[idx] : inst.right()[idx - n1];
        double coord = (side == Side::Left) ? base.a : base.b;
        double moved;
        if (side == Side::Left) {
            if (x == coord) continue;  // pivot agent: moving off the output coordinate may move it
            moved = (x < coord) ? rng.uniform(0.0, std::min(coord, inst.o()))
                                : rng.uniform(std::max(coord, 0.0), inst.o());
        } else {
            if (x == coord) continue;
            double lo = inst.o() + inst.L();
            moved = (x < coord) ? rng.uniform(lo, std::min(coord, 1.0))
                                : rng.uniform(std::max(coord, lo), 1.0);
            if (moved <= lo) continue;
        }
        std::vector<double> left = inst.left(), right = inst.right();
        if (side == Side::Left)
            left[idx] = moved;
        else
            right[idx - n1] = moved;
        std::sort(left.begin(), left.end());
        std::sort(right.begin(), right.end());
        Instance dev = Instance::unchecked(inst.k(), inst.o(), inst.L(),
                                           std::move(left), std::move(right));
        Edge out = run_mechanism(kind, dev).edge();
        if (std::fabs(out.a - base.a) > tol || std::fabs(out.b - base.b) > tol) {
            Violation v{inst, {}, {}, {}};
            v.coalition.emplace_back(side, side == Side::Left ? idx : idx - n1);
            v.misreports.push_back(moved);
            v.gains.push_back(std::max(std::fabs(out.a - base.a),
                                       std::fabs(out.b - base.b)));
            return v;
        }
    }
    return std::nullopt;
}

std::optional<DominanceCounterexample> check_single_peaked(const Instance& inst,
                                                           int outcome_samples,
                                                           std::uint64_t seed) {
    Rng rng(seed);
    const double o = inst.o(), bl = inst.o() + inst.L(), k = inst.k();
    const int n1 = static_cast<int>(inst.left().size());
    const int n = static_cast<int>(inst.size());
    for (int idx = 0; idx < n; ++idx) {
        Side side = idx < n1 ? Side::Left : Side::Right;
        double x = (side == Side::Left) ? inst.left()[idx] : inst.right()[idx - n1];
        double px = (side == Side::Left) ? x : 0.0;
        double py = (side == Side::Left) ? 1.0 : x;
        for (int t = 0; t < outcome_samples; ++t) {
            Edge beta{rng.uniform(0.0, o), rng.uniform(bl, 1.0)};
            Edge alpha{beta.a + rng.uniform() * (px - beta.a),
                       beta.b + rng.uniform() * (py - beta.b)};
            double ca = agent_cost(alpha, x, side, k);
            double cb = agent_cost(beta, x, side, k);
            if (ca > cb + 1e-12) {
                return DominanceCounterexample{side,
                                               side == Side::Left ? idx : idx - n1,
                                               alpha, beta, ca, cb};
            }
        }
    }
    return std::nullopt;
}

double ratio(MechKind kind, const Instance& inst, Objective objective) {
    Lottery lot = run_mechanism(kind, inst);
    double val, opt;
    if (objective == Objective::MC) {
        val = lottery_max_cost(lot, inst);
        opt = max_cost(opt_max_cost(inst), inst);
    } else {
        val = lottery_social_cost(lot, inst);
        opt = social_cost(opt_soc_cost(inst), inst);
    }
    if (opt <= 1e-12) throw std::domain_error("degenerate instance: optimum is 0");
    return val / opt;
}

Witness named_witness(const std::string& name, double k, double eps) {
    if (name == "optmc-nonsp") {
        Witness w{name,
                  Instance(k, 0.5, 0.0, {0.0, 0.2}, {0.8, 1.0}),
                  "maximum-cost optimum is manipulable: the agent at 0.2 gains "
                  "0.1+0.1k by reporting 0.4",
                  std::pair<Side, int>{Side::Left, 1}, 0.4};
        return w;
    }
    if (name == "twoextreme-tight") {
        double t = 0.5;
        return {name,
                Instance(k, t + 0.5 * eps, 0.0, {0.0, t}, {t + eps, t + eps}),
                "drives the inner two-extreme ratio to 2/(1+k) as eps -> 0",
                std::nullopt, std::nullopt};
    }
    if (name == "median-sc-hard") {
        return {name,
                Instance(k, 1.0 - 0.5 * eps, 0.0, {0.0, eps, 1.0 - eps}, {1.0}),
                "median output sticks near the small cluster; ratio -> 2",
                std::nullopt, std::nullopt};
    }
    if (name == "outerpair-tight") {
        return {name,
                Instance(k, 1.0 - 0.5 * eps, 0.0, {0.0, 1.0 - eps}, {1.0}),
                "drives the outer and left-pair variants to ratio 2",
                std::nullopt, std::nullopt};
    }
    if (name == "rightpair-tight") {
        return {name,
                Instance(k, 0.5 * eps, 0.0, {0.0}, {eps, 1.0}),
                "mirrored family driving the right-pair variant to ratio 2",
                std::nullopt, std::nullopt};
    }
    throw std::invalid_argument("unknown witness '" + name + "'");
}

RatioReport worst_ratio_search(MechKind kind, Objective objective, double k,
                               double L, int budget, std::uint64_t seed) {
    if (budget < 1) throw std::invalid_argument("budget must be >= 1");
    RatioReport report;
    for (const auto& info : all_mechanisms())
        if (info.kind == kind) report.mechanism = info.name;
    report.objective = objective;
    report.k = k;
    report.L = L;

    auto try_instance = [&](const Instance& inst) {
        double r;
        try {
            r = ratio(kind, inst, objective);
        } catch (const std::domain_error&) {
            return;  // degenerate optimum
        }
        if (r > report.worst_ratio) {
            Lottery lot = run_mechanism(kind, inst);
            report.worst_ratio = r;
            report.mech_value = (objective == Objective::MC)
                                    ? lottery_max_cost(lot, inst)
                                    : lottery_social_cost(lot, inst);
            report.opt_value = report.mech_value / r;
            report.witness = inst;
        }
    };

    if (L == 0.0) {
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            for (const char* name : {"twoextreme-tight", "median-sc-hard",
                                     "outerpair-tight", "rightpair-tight"})
                try_instance(named_witness(name, k, eps).instance);
        }
        try_instance(named_witness("optmc-nonsp", k).instance);
    }

    Rng rng(seed);
    SampleOptions opts;
    opts.fixed_k = k;
    opts.fixed_L = L;
    opts.two_sided = true;
    for (int b = 0; b < budget; ++b) try_instance(random_instance(rng, opts));
    return report;
}

}  // namespace detour
