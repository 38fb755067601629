#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <string>

#include "detour/bounds.hpp"
#include "detour/mechanisms.hpp"
#include "detour/model.hpp"
#include "doctest.h"

using namespace detour;

namespace {

// Independent evaluation of the deterministic bound: scan the adversary
// parameter a over [0, 1-L] instead of trusting the closed-form argmin.
double det_lb_numeric(double k, double L) {
    auto g = [&](double a) {
        double e1 = (a + k * (1.0 - a)) / (0.5 * a + k * (1.0 - 0.5 * a));
        double e2 = 2.0 * (std::max(a, 1.0 - L - a) + k * (1.0 - a)) /
                    (1.0 - L + k * (1.0 + L));
        return std::max(e1, e2);
    };
    double lo = 1e-12, hi = 1.0 - L;
    double best_a = lo, best = g(lo);
    for (int stage = 0; stage < 3; ++stage) {
        const int n = 4000;
        double step = (hi - lo) / n;
        for (int i = 0; i <= n; ++i) {
            double a = lo + step * i;
            double v = g(a);
            if (v < best) {
                best = v;
                best_a = a;
            }
        }
        lo = std::max(1e-12, best_a - 2.0 * step);
        hi = std::min(1.0 - L, best_a + 2.0 * step);
    }
    return best;
}

}  // namespace

TEST_CASE("curve endpoints are exact") {
    CHECK(std::fabs(upper_curve(Curve::TwoExtreme, 0.0, 0.0) - 2.0) <= 1e-12);
    CHECK(std::fabs(upper_curve(Curve::Restrict, 0.0, 0.0) - 2.0) <= 1e-12);
    CHECK(std::fabs(analytic_lb(LbKind::Deterministic, 0.0, 0.0) - 2.0) <= 1e-12);
    CHECK(std::fabs(analytic_lb(LbKind::Randomized, 0.0) - 1.2) <= 1e-12);
    CHECK(std::fabs(upper_curve(Curve::RandMc, 0.0, 0.0) - 4.0 / 3.0) <= 1e-12);
}

TEST_CASE("two_extreme curve") {
    // (2-2(1-k)L)/(1+k-(1-k)L); for k > 0 it tends to 1 as L -> 1
    // (at k = 0 the expression is identically 2 along L)
    for (double k : {0.1, 0.3, 0.7})
        CHECK(upper_curve(Curve::TwoExtreme, k, 0.999) == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(upper_curve(Curve::TwoExtreme, 0.5, 0.0) == doctest::Approx(2.0 / 1.5).epsilon(1e-15));
    CHECK_THROWS_AS(upper_curve(Curve::Restrict, 0.5, 0.1), UnsupportedRegime);
    CHECK_THROWS_AS(upper_curve(Curve::RandMc, 0.5, 0.1), UnsupportedRegime);
}

TEST_CASE("restrict terms meet at the optimal c") {
    for (double k = 0.01; k < 1.0; k += 0.01) {
        auto r = restrict_terms(k);
        CHECK(std::fabs(r[0] - r[1]) <= 1e-9);
        CHECK(std::fabs(r[0] - r[2]) <= 1e-9);
        CHECK(r[0] >= r[3] - 1e-15);  // R1 >= c
    }
    auto r5 = restrict_terms(0.5);
    CHECK(r5[0] == doctest::Approx(0.641101056).epsilon(1e-8));
    CHECK(r5[3] == doctest::Approx(restrict_c(0.5)).epsilon(1e-15));
    // continuous extension at k=0: the curve approaches 2 from nearby k
    CHECK(upper_curve(Curve::Restrict, 1e-9, 0.0) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("restrict improves on two_extreme everywhere") {
    for (double k = 0.0; k < 1.0; k += 0.001)
        CHECK(upper_curve(Curve::Restrict, k, 0.0) <=
              upper_curve(Curve::TwoExtreme, k, 0.0) + 1e-9);
}

TEST_CASE("randmc crossover and randub peak") {
    // both branch formulas agree at k=0.5
    CHECK(upper_curve(Curve::RandMc, 0.5, 0.0) == doctest::Approx(1.2).epsilon(1e-15));

    double peak = 0.0, argk = 0.0;
    for (double k = 0.0; k < 1.0 - 1e-12; k += 1e-3) {
        double v = upper_curve(Curve::RandUb, k, 0.0);
        if (v > peak) {
            peak = v;
            argk = k;
        }
    }
    CHECK(std::fabs(peak - (9.0 - 6.0 * std::cbrt(2.0))) <= 1e-4);
    CHECK(std::fabs(argk - (3.0 - 2.0 * std::cbrt(2.0))) <= 1e-3);
    // randub is continuous at kappa
    double kappa = (9.0 - std::sqrt(73.0)) / 4.0;
    CHECK(upper_curve(Curve::RandUb, kappa - 1e-9, 0.0) ==
          doctest::Approx(upper_curve(Curve::RandUb, kappa + 1e-9, 0.0)).epsilon(1e-6));
}

TEST_CASE("analytic_lb matches numeric minimization") {
    CHECK(analytic_lb(LbKind::Deterministic, 0.25, 0.0) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    for (int i = 0; i < 20; ++i) {
        double k = (i + 1) / 21.0;
        for (int j = 0; j < 20; ++j) {
            double L = j / 21.0;
            CHECK(analytic_lb(LbKind::Deterministic, k, L) ==
                  doctest::Approx(det_lb_numeric(k, L)).epsilon(1e-6));
        }
    }
    // L=0 closed form 2/(1+sqrt(k))
    for (double k : {0.04, 0.25, 0.49, 0.81})
        CHECK(analytic_lb(LbKind::Deterministic, k, 0.0) ==
              doctest::Approx(2.0 / (1.0 + std::sqrt(k))).epsilon(1e-12));
}

TEST_CASE("profiles16") {
    SixteenProfiles sp = profiles16(0.5, 0.25, 0.75);
    REQUIRE(sp.profiles.size() == 16);
    std::set<std::string> distinct;
    for (const Instance& p : sp.profiles) {
        CHECK(p.left().size() == 2);
        CHECK(p.right().size() == 2);
        CHECK(p.o() == 0.5);
        CHECK(p.k() == 0.0);
        distinct.insert(serialize_instance(p));
    }
    CHECK(distinct.size() == 16);

    // boundary choice collapses to duplicates
    SixteenProfiles bd = profiles16(0.5, 0.0, 1.0);
    REQUIRE(bd.profiles.size() == 16);
    std::set<std::string> bd_distinct;
    for (const Instance& p : bd.profiles) bd_distinct.insert(serialize_instance(p));
    CHECK(bd_distinct.size() < 16);

    CHECK_THROWS_AS(profiles16(0.5, 0.6, 0.75), std::invalid_argument);
    CHECK_THROWS_AS(profiles16(0.5, 0.25, 0.75, 0.0), std::invalid_argument);
}

TEST_CASE("f_k frozen goldens") {
    // frozen from an independent straight-line reference implementation
    CHECK(std::fabs(f_k(0.5, 0.25, 0.75, 0.0) - 2.0) <= 1e-12);
    CHECK(std::fabs(f_k(0.5, 0.25, 0.75, 0.3) - 1.368421052631579) <= 1e-12);
    CHECK(std::fabs(f_k(0.5, 0.2, 0.9, 0.5) - 1.519999007999603) <= 1e-12);
    CHECK(std::fabs(f_k(0.7, 0.1, 0.8, 0.25) - 1.733332711110696) <= 1e-12);
}

TEST_CASE("inner_min frozen goldens and structure") {
    CHECK(std::fabs(inner_min(0.2, 0.5, 50) - 1.431818181818182) <= 1e-9);
    CHECK(std::fabs(inner_min(0.5, 0.5, 40) - 1.245283018867924) <= 1e-9);
    CHECK(std::fabs(inner_min(0.0, 0.5, 30) - 2.0) <= 1e-9);

    // f_k at any grid point dominates the grid minimum
    double m = inner_min(0.2, 0.5, 50);
    for (int i : {0, 10, 25, 49})
        for (int j : {0, 10, 25, 49})
            CHECK(f_k(0.5, 0.5 * i / 50.0, 0.5 + 0.5 * j / 50.0, 0.2) >= m - 1e-12);

    // deterministic across repeated runs
    CHECK(inner_min(0.2, 0.5, 50) == m);

    // degenerate-cell counting: rows whose a0 exceeds o - eps
    long deg = -1;
    inner_min(0.2, 1e-5, 20, &deg);
    CHECK(deg == 20);
    deg = -1;
    inner_min(0.2, 0.5, 50, &deg);
    CHECK(deg == 0);
}

TEST_CASE("b_of_k") {
    LowerBoundRecord rec = b_of_k(0.5, 40);
    CHECK(rec.analytic == doctest::Approx(2.0 / (1.0 + std::sqrt(0.5))).epsilon(1e-15));
    CHECK(rec.raw == doctest::Approx(1.245283018867924).epsilon(1e-9));
    CHECK(rec.raw >= rec.analytic);
    CHECK(rec.safe == std::max(rec.analytic, rec.raw - 0.003));
    CHECK(rec.o_values == std::vector<double>{0.5});

    LowerBoundRecord sw = b_of_k(0.5, 20, OMode::Sweep);
    CHECK(sw.o_values.size() == 21);
    CHECK(sw.o_values.front() == 0.5);
    CHECK(sw.o_values.back() == 1.0);
    CHECK(sw.raw >= sw.analytic);
}

TEST_CASE("B(k) is non-increasing at the reference grid") {
    double prev = 1e300;
    for (int i = 0; i < 100; ++i) {
        double k = i / 100.0;
        double raw = b_of_k(k, 1000).raw;
        CHECK(raw <= prev + 1e-6);
        CHECK(upper_curve(Curve::Restrict, k, 0.0) >= b_of_k(k, 200).safe - 1e-9);
        prev = raw;
    }
}

TEST_CASE("gap_stats at reduced resolution") {
    GapStats g = gap_stats(1e-3, 0.05, 200, 2);
    CHECK(std::fabs(g.rand_gap - 0.162) <= 0.005);
    CHECK(std::fabs(g.rand_argk - 0.249) <= 0.01);
    CHECK(g.det_gap > 0.04);
    CHECK(g.det_gap < 0.11);
    CHECK(g.det_argk > 0.05);
    CHECK(g.det_argk < 0.35);
    CHECK_THROWS_AS(gap_stats(0.01), std::invalid_argument);
}

TEST_CASE("csv writers") {
    std::string table = lower_bound_table_csv(0.2, 0.3, 0.05, 50, OMode::Fixed05, 1);
    CHECK(table.rfind("k,raw,safe,analytic,grid_n,o_mode\n", 0) == 0);
    CHECK(table.find("0.200000,") != std::string::npos);
    CHECK(table.find(",50,fixed05") != std::string::npos);
    // byte-identical across worker counts
    CHECK(lower_bound_table_csv(0.2, 0.3, 0.05, 50, OMode::Fixed05, 3) == table);
    CHECK(lower_bound_table_csv(0.2, 0.3, 0.05, 50, OMode::Fixed05, 1) == table);

    std::string curves = curves_csv(0.01, false, 50, 2);
    CHECK(curves.rfind("k,two_extreme,restrict,det_lb,rand_upper,rand_lb\n", 0) == 0);
    CHECK(curves.find("0.000000,2.000000,2.000000,2.000000,1.333333,1.200000\n") !=
          std::string::npos);
    CHECK(curves_csv(0.01, false, 50, 1) == curves);

    std::string with_lb = curves_csv(0.25, true, 40, 1);
    CHECK(with_lb.rfind("k,two_extreme,restrict,det_lb,computer_lb_safe,rand_upper,rand_lb\n",
                        0) == 0);
}

TEST_CASE("curve_by_name") {
    CHECK(curve_by_name("two_extreme") == Curve::TwoExtreme);
    CHECK(curve_by_name("twoextreme") == Curve::TwoExtreme);
    CHECK(curve_by_name("restrict") == Curve::Restrict);
    CHECK(curve_by_name("randmc") == Curve::RandMc);
    CHECK(curve_by_name("randub") == Curve::RandUb);
    CHECK_THROWS_AS(curve_by_name("nope"), std::invalid_argument);
    CHECK(o_mode_name(OMode::Fixed05) == "fixed05");
    CHECK(o_mode_name(OMode::Sweep) == "sweep");
}
