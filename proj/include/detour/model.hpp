#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core types for the obstacle-pathway problem: agents on [0,1] split by a
// blocked interval [o, o+L], connected again by an edge (a,b) with traversal
// cost k*(b-a).
namespace detour {

enum class Side { Left, Right };

// A candidate pathway. Valid edges live on the closed box [0,o] x [o+L,1];
// instances that need the open-interval limit use an explicit epsilon offset.
struct Edge {
    double a = 0.0;
    double b = 1.0;
};

// The four boundary agent locations. When a side is empty the region endpoint
// stands in: x_l = x_r = 0, y_l = y_r = 1.
struct Extremes {
    double x_l = 0.0;
    double x_r = 0.0;
    double y_l = 1.0;
    double y_r = 1.0;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An agent profile around one obstacle. Immutable after construction; all
// operations on it are pure.
class Instance {
public:
    // Validating constructor: throws std::invalid_argument on any violated
    // invariant (k outside [0,1), o outside (0,1), L outside [0,1-o),
    // unsorted sides, agents inside or beyond the obstacle, no agents).
    Instance(double k, double o, double L,
             std::vector<double> left, std::vector<double> right);

    // Skips validation; for internal hot paths that construct many profiles
    // from already-checked data.
    static Instance unchecked(double k, double o, double L,
                              std::vector<double> left, std::vector<double> right);

    double k() const { return k_; }
    double o() const { return o_; }
    double L() const { return L_; }
    const std::vector<double>& left() const { return left_; }
    const std::vector<double>& right() const { return right_; }
    std::size_t size() const { return left_.size() + right_.size(); }

private:
    Instance() = default;
    double k_ = 0.0, o_ = 0.5, L_ = 0.0;
    std::vector<double> left_, right_;
};

// A discrete distribution over edges. Probabilities must be nonnegative and
// sum to 1 within 1e-12; the support must be nonempty.
class Lottery {
public:
    explicit Lottery(std::vector<std::pair<Edge, double>> support);
    static Lottery point(Edge e);

    const std::vector<std::pair<Edge, double>>& support() const { return support_; }
    bool is_point() const { return support_.size() == 1; }
    Edge edge() const;  // throws if not a point mass

private:
    std::vector<std::pair<Edge, double>> support_;
};

// Agent counts split at a cut point, used by the social-cost optimum scan.
struct CutCounts {
    int n1l = 0, n1r = 0, n2l = 0, n2r = 0;
};

// Cost of an agent at x on the given side: the distance to the far endpoint
// of the other region through the edge.
//   left:  |x-a| + k(b-a) + (1-b)
//   right: |x-b| + k(b-a) + a
double agent_cost(Edge edge, double x, Side side, double k);

double social_cost(Edge edge, const Instance& inst);

// Maximum agent cost; throws std::invalid_argument on an empty instance.
double max_cost(Edge edge, const Instance& inst);

// Expected cost of an agent under a lottery.
double lottery_cost(const Lottery& lot, double x, Side side, double k);

// Expected social cost under a lottery.
double lottery_social_cost(const Lottery& lot, const Instance& inst);

// Expectation over realizations of the per-realization maximum cost
// (not the max over agents of expected costs).
double lottery_max_cost(const Lottery& lot, const Instance& inst);

Extremes extremes(const Instance& inst);

// Counts at a cut point x: agents of N1 at or left of x / right of x, and
// agents of N2 strictly left of x / at or right of x.
CutCounts cut_counts(const Instance& inst, double x);

// True when the edge lies on the closed box [0,o] x [o+L,1].
bool edge_feasible(Edge edge, const Instance& inst);

// Line-oriented instance text:
//   k <float>   (required)
//   o <float>   (required)
//   L <float>   (default 0)
//   left <float>*
//   right <float>*
// '#' starts a comment; tokens are whitespace-separated.
Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& inst);

}  // namespace detour
