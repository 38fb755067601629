#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "detour/model.hpp"
#include "detour/verify.hpp"
#include "doctest.h"

using namespace detour;

namespace {
Instance four_agents(double k) {
    return Instance(k, 0.5, 0.0, {0.0, 0.2}, {0.8, 1.0});
}
}  // namespace

TEST_CASE("agent_cost formulas") {
    CHECK(agent_cost({0.1, 0.9}, 0.2, Side::Left, 0.5) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(agent_cost({0.3, 1.0}, 0.3, Side::Left, 0.0) == doctest::Approx(0.0));
    CHECK(agent_cost({0.1, 0.9}, 1.0, Side::Right, 0.0) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("social_cost") {
    Instance sym(0.0, 0.5, 0.0, {0.2}, {0.8});
    CHECK(social_cost({0.0, 1.0}, sym) == doctest::Approx(0.4).epsilon(1e-12));
    Instance one(0.3, 0.5, 0.0, {}, {1.0});
    CHECK(social_cost({0.0, 1.0}, one) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK_THROWS_AS(Instance(0.0, 0.5, 0.0, {}, {}), std::invalid_argument);
}

TEST_CASE("max_cost") {
    // all four agents cost 0.2 at the midpoint edge with k=0
    Instance inst = four_agents(0.0);
    CHECK(max_cost({0.1, 0.9}, inst) == doctest::Approx(0.2).epsilon(1e-12));
    double x = 0.3, k = 0.25;
    Instance single(k, 0.5, 0.0, {x}, {});
    CHECK(max_cost({x, 1.0}, single) == doctest::Approx(k * (1.0 - x)).epsilon(1e-12));
    CHECK(max_cost({0.2, 0.8}, inst) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(max_cost({0.1, 0.9}, Instance::unchecked(0, 0.5, 0, {}, {})),
                         "no agents", std::invalid_argument);
}

TEST_CASE("lottery_cost") {
    Lottery point = Lottery::point({0.2, 0.8});
    CHECK(lottery_cost(point, 0.0, Side::Left, 0.0) == doctest::Approx(0.4));
    Lottery mix({{{0.2, 0.8}, 1.0 / 3.0}, {{0.1, 0.9}, 2.0 / 3.0}});
    CHECK(lottery_cost(mix, 0.0, Side::Left, 0.0) ==
          doctest::Approx(1.0 / 3.0 * 0.4 + 2.0 / 3.0 * 0.2).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(Lottery({{{0.2, 0.8}, 0.5}, {{0.1, 0.9}, 0.4}}),
                         "probabilities do not sum to 1", std::invalid_argument);
}

TEST_CASE("lottery_max_cost is the expectation of per-realization maxima") {
    Instance inst = four_agents(0.0);
    Lottery point = Lottery::point({0.1, 0.9});
    CHECK(lottery_max_cost(point, inst) == max_cost({0.1, 0.9}, inst));
    Lottery mix({{{0.2, 0.8}, 1.0 / 3.0}, {{0.1, 0.9}, 2.0 / 3.0}});
    // realizations cost 0.4 and 0.2
    CHECK(lottery_max_cost(mix, inst) ==
          doctest::Approx(1.0 / 3.0 * 0.4 + 2.0 / 3.0 * 0.2).epsilon(1e-12));
    // it upper-bounds the max over agents of expected cost
    double worst_expected = 0.0;
    for (double x : inst.left())
        worst_expected = std::max(worst_expected, lottery_cost(mix, x, Side::Left, 0.0));
    for (double y : inst.right())
        worst_expected = std::max(worst_expected, lottery_cost(mix, y, Side::Right, 0.0));
    CHECK(lottery_max_cost(mix, inst) >= worst_expected - 1e-12);
}

TEST_CASE("extremes and conventions") {
    Extremes e = extremes(four_agents(0.0));
    CHECK(e.x_l == 0.0);
    CHECK(e.x_r == 0.2);
    CHECK(e.y_l == 0.8);
    CHECK(e.y_r == 1.0);
    Extremes r = extremes(Instance(0.0, 0.5, 0.0, {}, {0.8}));
    CHECK(r.x_l == 0.0);
    CHECK(r.x_r == 0.0);
    CHECK(r.y_l == 0.8);
    CHECK(r.y_r == 0.8);
    Extremes l = extremes(Instance(0.0, 0.5, 0.0, {0.3}, {}));
    CHECK(l.x_l == 0.3);
    CHECK(l.x_r == 0.3);
    CHECK(l.y_l == 1.0);
    CHECK(l.y_r == 1.0);
}

TEST_CASE("cut_counts") {
    Instance inst = four_agents(0.0);
    CutCounts c = cut_counts(inst, 0.2);
    CHECK(c.n1l == 2);
    CHECK(c.n1r == 0);
    CHECK(c.n2l == 0);
    CHECK(c.n2r == 2);
    CHECK(c.n1l + c.n1r == (int)inst.left().size());
    CHECK(c.n2l + c.n2r == (int)inst.right().size());
}

TEST_CASE("instance validation") {
    CHECK_THROWS_AS(Instance(1.0, 0.5, 0.0, {0.1}, {}), std::invalid_argument);
    CHECK_THROWS_AS(Instance(0.0, 0.5, 0.6, {0.1}, {}), std::invalid_argument);
    CHECK_THROWS_AS(Instance(0.0, 0.5, 0.0, {0.6}, {}), std::invalid_argument);
    CHECK_THROWS_AS(Instance(0.0, 0.5, 0.1, {}, {0.55}), std::invalid_argument);
    CHECK_THROWS_AS(Instance(0.0, 0.5, 0.0, {0.3, 0.1}, {}), std::invalid_argument);
    // right agents must sit strictly beyond the obstacle
    CHECK_THROWS_AS(Instance(0.0, 0.5, 0.0, {0.1}, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Instance(-0.1, 0.5, 0.0, {0.1}, {}), std::invalid_argument);
}

TEST_CASE("parse and serialize") {
    Instance inst = parse_instance("k 0.5\no 0.5\nL 0\nleft 0 0.2\nright 0.8 1\n");
    CHECK(inst.k() == 0.5);
    CHECK(inst.left() == std::vector<double>{0.0, 0.2});
    CHECK(inst.right() == std::vector<double>{0.8, 1.0});

    CHECK_THROWS_AS(parse_instance("k 0.5\no 0.5\nleft 0.6\nright 1\n"), ParseError);
    try {
        parse_instance("k 0.5\no 0.5\nleft 0.6\nright 1\n");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("inside or beyond obstacle") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_instance("k 1.5\no 0.5\nleft 0.1\n"), ParseError);
    CHECK_THROWS_AS(parse_instance("k 0.5\no 0.5\nleft 0.2 0.1\n"), ParseError);
    CHECK_THROWS_AS(parse_instance("k abc\no 0.5\nleft 0.1\n"), ParseError);
    CHECK_THROWS_AS(parse_instance("o 0.5\nleft 0.1\n"), ParseError);
    CHECK_THROWS_AS(parse_instance("k 0.5\no 0.5\nbogus 1\nleft 0.1\n"), ParseError);

    // comments and default L
    Instance c = parse_instance("# header\nk 0.25\no 0.5 # trailing\nleft 0.1\nright\n");
    CHECK(c.L() == 0.0);

    // round trip
    std::string s = serialize_instance(inst);
    Instance back = parse_instance(s);
    CHECK(back.k() == inst.k());
    CHECK(back.o() == inst.o());
    CHECK(back.L() == inst.L());
    CHECK(back.left() == inst.left());
    CHECK(back.right() == inst.right());
    CHECK(serialize_instance(back) == s);
}

TEST_CASE("property: round trip on random instances") {
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        Instance inst = random_instance(rng);
        Instance back = parse_instance(serialize_instance(inst));
        CHECK(back.k() == inst.k());
        CHECK(back.o() == inst.o());
        CHECK(back.L() == inst.L());
        CHECK(back.left() == inst.left());
        CHECK(back.right() == inst.right());
    }
}

TEST_CASE("property: cost slopes off the kink") {
    Rng rng(11);
    const double h = 1e-7;
    for (int t = 0; t < 500; ++t) {
        double k = rng.uniform();
        double x = rng.uniform();
        Side side = rng.uniform() < 0.5 ? Side::Left : Side::Right;
        double a = rng.uniform(0.0, 0.45), b = rng.uniform(0.55, 1.0);
        auto near_kink = [&](double p, double q) { return std::fabs(p - q) < 10 * h; };
        if ((side == Side::Left && near_kink(x, a)) ||
            (side == Side::Right && near_kink(x, b)))
            continue;
        double da = (agent_cost({a + h, b}, x, side, k) -
                     agent_cost({a - h, b}, x, side, k)) / (2 * h);
        double db = (agent_cost({a, b + h}, x, side, k) -
                     agent_cost({a, b - h}, x, side, k)) / (2 * h);
        auto is_expected = [&](double s) {
            for (double v : {1.0 + k, 1.0 - k, -1.0 - k, -1.0 + k, k, -k})
                if (std::fabs(s - v) < 1e-5) return true;
            return false;
        };
        CHECK(is_expected(da));
        CHECK(is_expected(db));
        CHECK(agent_cost({a, b}, x, side, k) >= 0.0);
    }
}

TEST_CASE("property: max_cost attained at an extreme agent") {
    Rng rng(13);
    for (int t = 0; t < 300; ++t) {
        Instance inst = random_instance(rng);
        Edge e{rng.uniform(0.0, inst.o()),
               rng.uniform(inst.o() + inst.L(), 1.0)};
        double mc = max_cost(e, inst);
        Extremes ext = extremes(inst);
        double at_ext = 0.0;
        if (!inst.left().empty()) {
            at_ext = std::max(at_ext, agent_cost(e, ext.x_l, Side::Left, inst.k()));
            at_ext = std::max(at_ext, agent_cost(e, ext.x_r, Side::Left, inst.k()));
        }
        if (!inst.right().empty()) {
            at_ext = std::max(at_ext, agent_cost(e, ext.y_l, Side::Right, inst.k()));
            at_ext = std::max(at_ext, agent_cost(e, ext.y_r, Side::Right, inst.k()));
        }
        CHECK(mc == doctest::Approx(at_ext).epsilon(1e-12));
    }
}

TEST_CASE("edge_feasible") {
    Instance inst(0.0, 0.5, 0.1, {0.2}, {0.8});
    CHECK(edge_feasible({0.5, 0.6}, inst));   // closed box includes endpoints
    CHECK(edge_feasible({0.0, 1.0}, inst));
    CHECK_FALSE(edge_feasible({0.55, 1.0}, inst));
    CHECK_FALSE(edge_feasible({0.0, 0.55}, inst));
}
