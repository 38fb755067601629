#include "detour/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace detour {

namespace {

void validate(double k, double o, double L,
              const std::vector<double>& left, const std::vector<double>& right) {
    if (!(k >= 0.0 && k < 1.0))
        throw std::invalid_argument(
            "k must lie in [0,1); for k >= 1 the trivial edge (o-eps, o+L+eps) is optimal");
    if (!(o > 0.0 && o < 1.0))
        throw std::invalid_argument("o must lie in (0,1)");
    if (!(L >= 0.0 && L < 1.0 - o))
        throw std::invalid_argument("L must lie in [0, 1-o)");
    if (left.empty() && right.empty())
        throw std::invalid_argument("instance needs at least one agent");
    if (!std::is_sorted(left.begin(), left.end()))
        throw std::invalid_argument("left positions must be sorted ascending");
    if (!std::is_sorted(right.begin(), right.end()))
        throw std::invalid_argument("right positions must be sorted ascending");
    for (double x : left)
        if (!(x >= 0.0 && x < o))
            throw std::invalid_argument("agent inside or beyond obstacle (left side)");
    for (double y : right)
        if (!(y > o + L && y <= 1.0))
            throw std::invalid_argument("agent inside or beyond obstacle (right side)");
}

}  // namespace

Instance::Instance(double k, double o, double L,
                   std::vector<double> left, std::vector<double> right)
    : k_(k), o_(o), L_(L), left_(std::move(left)), right_(std::move(right)) {
    validate(k_, o_, L_, left_, right_);
}

Instance Instance::unchecked(double k, double o, double L,
                             std::vector<double> left, std::vector<double> right) {
    Instance inst;
    inst.k_ = k;
    inst.o_ = o;
    inst.L_ = L;
    inst.left_ = std::move(left);
    inst.right_ = std::move(right);
    return inst;
}

Lottery::Lottery(std::vector<std::pair<Edge, double>> support)
    : support_(std::move(support)) {
    if (support_.empty()) throw std::invalid_argument("lottery support is empty");
    double total = 0.0;
    for (const auto& [e, p] : support_) {
        (void)e;
        if (p < 0.0) throw std::invalid_argument("negative probability in lottery");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("probabilities do not sum to 1");
}

Lottery Lottery::point(Edge e) { return Lottery({{e, 1.0}}); }

Edge Lottery::edge() const {
    if (!is_point()) throw std::logic_error("lottery is not a point mass");
    return support_.front().first;
}

double agent_cost(Edge edge, double x, Side side, double k) {
    if (side == Side::Left)
        return std::fabs(x - edge.a) + k * (edge.b - edge.a) + (1.0 - edge.b);
    return std::fabs(x - edge.b) + k * (edge.b - edge.a) + edge.a;
}

double social_cost(Edge edge, const Instance& inst) {
    double total = 0.0;
    for (double x : inst.left()) total += agent_cost(edge, x, Side::Left, inst.k());
    for (double y : inst.right()) total += agent_cost(edge, y, Side::Right, inst.k());
    return total;
}

double max_cost(Edge edge, const Instance& inst) {
    if (inst.size() == 0) throw std::invalid_argument("no agents");
    double worst = 0.0;
    for (double x : inst.left())
        worst = std::max(worst, agent_cost(edge, x, Side::Left, inst.k()));
    for (double y : inst.right())
        worst = std::max(worst, agent_cost(edge, y, Side::Right, inst.k()));
    return worst;
}

double lottery_cost(const Lottery& lot, double x, Side side, double k) {
    double total = 0.0;
    for (const auto& [e, p] : lot.support()) total += p * agent_cost(e, x, side, k);
    return total;
}

double lottery_social_cost(const Lottery& lot, const Instance& inst) {
    double total = 0.0;
    for (const auto& [e, p] : lot.support()) total += p * social_cost(e, inst);
    return total;
}

double lottery_max_cost(const Lottery& lot, const Instance& inst) {
    double total = 0.0;
    for (const auto& [e, p] : lot.support()) total += p * max_cost(e, inst);
    return total;
}

Extremes extremes(const Instance& inst) {
    Extremes ext;
    if (!inst.left().empty()) {
        ext.x_l = inst.left().front();
        ext.x_r = inst.left().back();
    }
    if (!inst.right().empty()) {
        ext.y_l = inst.right().front();
        ext.y_r = inst.right().back();
    }
    return ext;
}

CutCounts cut_counts(const Instance& inst, double x) {
    CutCounts c;
    for (double v : inst.left()) (v <= x ? c.n1l : c.n1r)++;
    for (double v : inst.right()) (v < x ? c.n2l : c.n2r)++;
    return c;
}

bool edge_feasible(Edge edge, const Instance& inst) {
    return edge.a >= 0.0 && edge.a <= inst.o() &&
           edge.b >= inst.o() + inst.L() && edge.b <= 1.0;
}

namespace {

double parse_float(const std::string& tok, int lineno) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("malformed line " + std::to_string(lineno) +
                         ": expected a number, got '" + tok + "'");
    }
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Instance parse_instance(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::optional<double> k, o;
    double L = 0.0;
    std::vector<double> left, right;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        if (key == "k" || key == "o" || key == "L") {
            if (toks.size() != 1)
                throw ParseError("malformed line " + std::to_string(lineno) +
                                 ": '" + key + "' takes exactly one value");
            double v = parse_float(toks[0], lineno);
            if (key == "k") k = v;
            else if (key == "o") o = v;
            else L = v;
        } else if (key == "left" || key == "right") {
            auto& dst = (key == "left") ? left : right;
            for (const auto& t : toks) dst.push_back(parse_float(t, lineno));
        } else {
            throw ParseError("malformed line " + std::to_string(lineno) +
                             ": unknown directive '" + key + "'");
        }
    }
    if (!k) throw ParseError("missing required directive 'k'");
    if (!o) throw ParseError("missing required directive 'o'");
    if (!(*k >= 0.0 && *k < 1.0))
        throw ParseError("out-of-range value: k must lie in [0,1)");
    if (!(*o > 0.0 && *o < 1.0))
        throw ParseError("out-of-range value: o must lie in (0,1)");
    if (!(L >= 0.0 && L < 1.0 - *o))
        throw ParseError("out-of-range value: L must lie in [0, 1-o)");
    if (!std::is_sorted(left.begin(), left.end()) ||
        !std::is_sorted(right.begin(), right.end()))
        throw ParseError("unsorted list: agent positions must be ascending");
    for (double x : left)
        if (!(x >= 0.0 && x < *o))
            throw ParseError("agent inside or beyond obstacle: left position " + fmt_full(x));
    for (double y : right)
        if (!(y > *o + L && y <= 1.0))
            throw ParseError("agent inside or beyond obstacle: right position " + fmt_full(y));
    if (left.empty() && right.empty())
        throw ParseError("instance needs at least one agent");
    return Instance(*k, *o, L, std::move(left), std::move(right));
}

std::string serialize_instance(const Instance& inst) {
    std::string out;
    out += "k " + fmt_full(inst.k()) + "\n";
    out += "o " + fmt_full(inst.o()) + "\n";
    out += "L " + fmt_full(inst.L()) + "\n";
    out += "left";
    for (double x : inst.left()) out += " " + fmt_full(x);
    out += "\nright";
    for (double y : inst.right()) out += " " + fmt_full(y);
    out += "\n";
    return out;
}

}  // namespace detour
