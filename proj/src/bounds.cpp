#include "detour/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "detour/fmt.hpp"
#include "detour/mechanisms.hpp"
#include "detour/parallel.hpp"

namespace detour {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_k(double k) {
    if (!(k >= 0.0 && k < 1.0)) throw std::invalid_argument("k must lie in [0,1)");
}

// max cost of the 4-extreme profile (xl, xr | yl, yr) at edge (a, b)
inline double mc4(double xl, double xr, double yl, double yr, double a, double b,
                  double k) {
    double left = std::max(std::fabs(xl - a), std::fabs(xr - a)) +
                  k * (b - a) + 1.0 - b;
    double right = std::max(std::fabs(yl - b), std::fabs(yr - b)) +
                   k * (b - a) + a;
    return std::max(left, right);
}

// closed-form maximum-cost optimum for a 4-extreme profile
inline void opt_edge4(double xl, double xr, double yl, double yr, double& a,
                      double& b) {
    if (1.0 - yr >= xl) {
        a = 0.5 * (xl + xr);
        b = 0.5 * (yl - xl) + 0.5;
    } else {
        a = 0.5 * (xr - yr) + 0.5;
        b = 0.5 * (yl + yr);
    }
}

// f_k with an early exit: once the running max reaches `stop` the caller's
// grid minimum cannot improve, so the exact value no longer matters.
double f_k_impl(double o, double a0, double b0, double k, double eps,
                double eps_skip, double stop) {
    const double xls[2] = {0.0, a0};
    const double xrs[2] = {a0, o - eps};
    const double yls[2] = {o + eps, b0};
    const double yrs[2] = {b0, 1.0};
    double worst = 0.0;
    for (double xl : xls)
        for (double xr : xrs)
            for (double yl : yls)
                for (double yr : yrs) {
                    double oa, ob;
                    opt_edge4(xl, xr, yl, yr, oa, ob);
                    double opt = mc4(xl, xr, yl, yr, oa, ob, k);
                    if (opt < eps_skip) continue;
                    double r = mc4(xl, xr, yl, yr, a0, b0, k) / opt;
                    if (r > worst) {
                        worst = r;
                        if (worst >= stop) return worst;
                    }
                }
    return worst;
}

}  // namespace

Curve curve_by_name(std::string_view name) {
    if (name == "two_extreme" || name == "twoextreme") return Curve::TwoExtreme;
    if (name == "restrict") return Curve::Restrict;
    if (name == "randmc") return Curve::RandMc;
    if (name == "randub") return Curve::RandUb;
    throw std::invalid_argument("unknown curve '" + std::string(name) + "'");
}

std::string_view o_mode_name(OMode mode) {
    return mode == OMode::Fixed05 ? "fixed05" : "sweep";
}

std::array<double, 4> restrict_terms(double k) {
    require_k(k);
    double c = restrict_c(k);
    return {(1.0 - (1.0 - k) * c) / (1.0 + k - (1.0 - k) * c),
            (k * (2.0 * c - c * c) + 1.0 - c * c) / (2.0 - 2.0 * c + 2.0 * c * k),
            (1.0 + 2.0 * c * k) / (2.0 - (1.0 - k) * c),
            c};
}

double upper_curve(Curve curve, double k, double L) {
    require_k(k);
    if (!(L >= 0.0 && L < 1.0)) throw std::invalid_argument("L must lie in [0,1)");
    if (curve != Curve::TwoExtreme && L > 0.0)
        throw UnsupportedRegime("this curve is defined only for L = 0");
    switch (curve) {
        case Curve::TwoExtreme:
            return (2.0 - 2.0 * (1.0 - k) * L) / (1.0 + k - (1.0 - k) * L);
        case Curve::Restrict: {
            if (k == 0.0) return 2.0;  // continuous extension; c(0)=1 makes R1,R2 0/0
            auto r = restrict_terms(k);
            return 2.0 * std::max(std::max(r[0], r[1]), std::max(r[2], r[3]));
        }
        case Curve::RandMc:
            return std::max((4.0 - 2.0 * k) / (3.0 - k),
                            (1.0 + k) / (1.0 + k * k));
        case Curve::RandUb: {
            double kappa = (9.0 - std::sqrt(73.0)) / 4.0;
            if (k <= kappa) return (4.0 - 2.0 * k) / (3.0 - k);
            return (11.0 + 2.0 * k * k * k - 9.0 * k * k) /
                   (9.0 + k * k - 6.0 * k);
        }
    }
    throw std::logic_error("unreachable");
}

double analytic_lb(LbKind kind, double k, double L) {
    require_k(k);
    if (kind == LbKind::Randomized) return (6.0 + 6.0 * k) / (5.0 + 7.0 * k);
    if (!(L >= 0.0 && L < 1.0)) throw std::invalid_argument("L must lie in [0,1)");
    if (k == 0.0) return 2.0;  // both ratio expressions tend to 2 at a=a0=0
    double B = (1.0 - k) * L + 2.0 * (1.0 + k);
    double disc = k * k * B * B +
                  4.0 * (1.0 + k) * (1.0 - k) * k * (1.0 + k) * (1.0 - L);
    double a0 = (-k * B + std::sqrt(disc)) / (2.0 * (1.0 + k) * (1.0 - k));
    double a = std::min(a0, 0.5 * (1.0 - L));
    double e1 = (a + k * (1.0 - a)) / (0.5 * a + k * (1.0 - 0.5 * a));
    double e2 = 2.0 * (std::max(a, 1.0 - L - a) + k * (1.0 - a)) /
                (1.0 - L + k * (1.0 + L));
    return std::max(e1, e2);
}

SixteenProfiles profiles16(double o, double a0, double b0, double eps) {
    if (!(a0 >= 0.0 && a0 <= o && o <= b0 && b0 <= 1.0))
        throw std::invalid_argument("need 0 <= a0 <= o <= b0 <= 1");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    SixteenProfiles out{o, a0, b0, eps, {}};
    out.profiles.reserve(16);
    const double xls[2] = {0.0, a0};
    const double xrs[2] = {a0, o - eps};
    const double yls[2] = {o + eps, b0};
    const double yrs[2] = {b0, 1.0};
    for (double xl : xls)
        for (double xr : xrs)
            for (double yl : yls)
                for (double yr : yrs)
                    out.profiles.push_back(
                        Instance::unchecked(0.0, o, 0.0, {xl, xr}, {yl, yr}));
    return out;
}

double f_k(double o, double a0, double b0, double k, double eps, double eps_skip) {
    return f_k_impl(o, a0, b0, k, eps, eps_skip, kInf);
}

double inner_min(double k, double o, int grid_n, long* degenerate_cells) {
    if (grid_n < 2) throw std::invalid_argument("grid_n must be >= 2");
    const double eps = 1e-6;
    double best = kInf;
    long degenerate = 0;
    for (int i = 0; i < grid_n; ++i) {
        double a0 = o * i / grid_n;
        if (a0 > o - eps) degenerate += grid_n;
        for (int j = 0; j < grid_n; ++j) {
            double b0 = o + (1.0 - o) * j / grid_n;
            double v = f_k_impl(o, a0, b0, k, eps, 1e-8, best);
            if (v < best) best = v;
        }
    }
    if (degenerate_cells) *degenerate_cells = degenerate;
    return best;
}

LowerBoundRecord b_of_k(double k, int grid_n, OMode o_mode) {
    require_k(k);
    LowerBoundRecord rec;
    rec.k = k;
    rec.grid_n = grid_n;
    rec.o_mode = o_mode;
    rec.analytic = 2.0 / (1.0 + std::sqrt(k));
    if (o_mode == OMode::Fixed05) {
        rec.o_values = {0.5};
    } else {
        for (int i = 0; i <= 20; ++i) rec.o_values.push_back(0.5 + i / 40.0);
    }
    double raw = -kInf;
    for (double o : rec.o_values)
        raw = std::max(raw, std::max(inner_min(k, o, grid_n), rec.analytic));
    rec.raw = raw;
    rec.safe = std::max(rec.analytic, rec.raw - 0.003);
    return rec;
}

GapStats gap_stats(double k_step, double det_k_step, int grid_n, int workers) {
    if (!(k_step > 0.0 && k_step <= 1e-3))
        throw std::invalid_argument("k_step must be in (0, 1e-3]");
    if (!(det_k_step > 0.0 && det_k_step < 1.0))
        throw std::invalid_argument("det_k_step must be in (0,1)");
    GapStats stats;
    for (double k = 0.0; k < 1.0 - 1e-12; k += k_step) {
        double g = upper_curve(Curve::RandMc, k, 0.0) -
                   analytic_lb(LbKind::Randomized, k);
        if (g > stats.rand_gap) {
            stats.rand_gap = g;
            stats.rand_argk = k;
        }
    }
    int m = static_cast<int>(std::floor((1.0 - 1e-12) / det_k_step)) + 1;
    std::vector<double> gaps(m);
    parallel_for(m, workers, [&](int i) {
        double k = i * det_k_step;
        gaps[i] = upper_curve(Curve::Restrict, k, 0.0) -
                  b_of_k(k, grid_n, OMode::Fixed05).safe;
    });
    for (int i = 0; i < m; ++i) {
        if (gaps[i] > stats.det_gap) {
            stats.det_gap = gaps[i];
            stats.det_argk = i * det_k_step;
        }
    }
    return stats;
}

std::string lower_bound_table_csv(double k_start, double k_end, double k_step,
                                  int grid_n, OMode o_mode, int workers) {
    if (!(k_step > 0.0) || k_end < k_start || k_start < 0.0 || k_end >= 1.0)
        throw std::invalid_argument("invalid k range");
    std::vector<double> ks;
    for (double k = k_start; k <= k_end + 1e-12; k += k_step)
        ks.push_back(std::min(k, k_end));
    int m = static_cast<int>(ks.size());
    std::vector<std::string> rows(m);
    parallel_for(m, workers, [&](int i) {
        LowerBoundRecord rec = b_of_k(ks[i], grid_n, o_mode);
        rows[i] = fmt6(rec.k) + "," + fmt6(rec.raw) + "," + fmt6(rec.safe) + "," +
                  fmt6(rec.analytic) + "," + std::to_string(rec.grid_n) + "," +
                  std::string(o_mode_name(rec.o_mode));
    });
    std::string out = "k,raw,safe,analytic,grid_n,o_mode\n";
    for (const auto& row : rows) out += row + "\n";
    return out;
}

std::string curves_csv(double k_step, bool with_computer_lb, int grid_n,
                       int workers) {
    if (!(k_step > 0.0 && k_step < 1.0))
        throw std::invalid_argument("invalid k step");
    std::vector<double> ks;
    for (double k = 0.0; k < 1.0 - 1e-12; k += k_step) ks.push_back(k);
    int m = static_cast<int>(ks.size());
    std::vector<std::string> rows(m);
    parallel_for(m, workers, [&](int i) {
        double k = ks[i];
        std::string row = fmt6(k);
        row += "," + fmt6(upper_curve(Curve::TwoExtreme, k, 0.0));
        row += "," + fmt6(upper_curve(Curve::Restrict, k, 0.0));
        row += "," + fmt6(analytic_lb(LbKind::Deterministic, k, 0.0));
        if (with_computer_lb)
            row += "," + fmt6(b_of_k(k, grid_n, OMode::Fixed05).safe);
        row += "," + fmt6(upper_curve(Curve::RandMc, k, 0.0));
        row += "," + fmt6(analytic_lb(LbKind::Randomized, k));
        rows[i] = row;
    });
    std::string out = with_computer_lb
                          ? "k,two_extreme,restrict,det_lb,computer_lb_safe,"
                            "rand_upper,rand_lb\n"
                          : "k,two_extreme,restrict,det_lb,rand_upper,rand_lb\n";
    for (const auto& row : rows) out += row + "\n";
    return out;
}

}  // namespace detour
