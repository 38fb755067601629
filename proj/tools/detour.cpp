#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "detour/bounds.hpp"
#include "detour/fmt.hpp"
#include "detour/mechanisms.hpp"
#include "detour/model.hpp"
#include "detour/verify.hpp"

namespace {

using namespace detour;

constexpr int kExitViolations = 1;
constexpr int kExitBadArgs = 2;
constexpr int kExitParse = 3;
constexpr int kExitUnsupported = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& output_path, const std::string& text) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path);
    if (!out) throw std::runtime_error("cannot open output file '" + output_path + "'");
    out << text;
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

double parse_extended(const std::string& tok) {
    if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    return std::stod(tok);
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_extended(tok));
    return out;
}

// Proven worst-case bound for the mechanism/objective pair, if one exists.
std::optional<double> proven_bound(const MechInfo& info, Objective obj, double k,
                                    double L) {
    if (obj == Objective::MC) {
        switch (info.kind) {
            case MechKind::OptMaxCost: return 1.0;
            case MechKind::TwoExtremeInner:
                return upper_curve(Curve::TwoExtreme, k, L);
            case MechKind::TwoExtremeOuter:
            case MechKind::TwoExtremeLeftPair:
            case MechKind::TwoExtremeRightPair:
                if (L == 0.0) return 2.0;
                return std::nullopt;
            case MechKind::Restrict: return upper_curve(Curve::Restrict, k, L);
            case MechKind::RandMaxCost: return upper_curve(Curve::RandMc, k, L);
            case MechKind::RandUnbound: return upper_curve(Curve::RandUb, k, L);
            default: return std::nullopt;
        }
    }
    if (info.kind == MechKind::OptSocCost) return 1.0;
    return std::nullopt;
}

int workers_from_env(int cli_value) {
    if (const char* env = std::getenv("DETOUR_WORKERS")) {
        int w = std::atoi(env);
        if (w >= 1) return w;
    }
    return cli_value;
}

struct SolveArgs {
    std::string mech, input, objective = "mc";
    std::string phantom_x, phantom_y;
};

int cmd_solve(const SolveArgs& args, const std::string& output) {
    Instance inst = parse_instance(read_file(args.input));
    Objective obj = (args.objective == "sc") ? Objective::SC : Objective::MC;
    Lottery lot = [&] {
        if (args.mech == "genmedian") {
            PhantomProfile ph{parse_list(args.phantom_x), parse_list(args.phantom_y)};
            return Lottery::point(generalized_median(inst, ph));
        }
        return run_mechanism(mechanism_by_name(args.mech).kind, inst);
    }();
    std::string out;
    if (lot.is_point()) {
        Edge e = lot.edge();
        out += "edge " + fmt6(e.a) + " " + fmt6(e.b) + "\n";
    } else {
        out += "lottery";
        for (const auto& [e, p] : lot.support())
            out += " (" + fmt6(e.a) + "," + fmt6(e.b) + ")@" + fmt6(p);
        out += "\n";
    }
    double val, opt;
    if (obj == Objective::MC) {
        val = lottery_max_cost(lot, inst);
        opt = max_cost(opt_max_cost(inst), inst);
    } else {
        val = lottery_social_cost(lot, inst);
        opt = social_cost(opt_soc_cost(inst), inst);
    }
    out += std::string(obj == Objective::MC ? "mc " : "sc ") + fmt6(val) + "\n";
    out += "opt " + fmt6(opt) + "\n";
    if (opt > 1e-12) out += "ratio " + fmt6(val / opt) + "\n";
    emit(output, out);
    return 0;
}

struct VerifyArgs {
    std::string mode, mech, input;
    int trials = 100, grid = 200, coalition = 2, moves = 50, samples = 200;
    std::uint64_t seed = 42;
    double tol = 1e-9;
    bool cross_region = false;
};

int cmd_verify(const VerifyArgs& args, const std::string& output) {
    std::string out;
    int violations = 0;

    std::vector<Instance> corpus;
    if (!args.input.empty()) {
        corpus.push_back(parse_instance(read_file(args.input)));
    }

    if (args.mode == "peaked") {
        Rng rng(args.seed);
        for (int t = 0; t < args.trials && args.input.empty(); ++t)
            corpus.push_back(random_instance(rng));
        out += "instance,side,index,alpha,beta,cost_alpha,cost_beta\n";
        std::uint64_t s = args.seed;
        for (const auto& inst : corpus) {
            auto c = check_single_peaked(inst, args.samples, ++s);
            if (c) {
                ++violations;
                out += "\"" + inline_instance(inst) + "\"," +
                       (c->side == Side::Left ? "L" : "R") + "," +
                       std::to_string(c->index) + ",(" + fmt6(c->alpha.a) + ";" +
                       fmt6(c->alpha.b) + "),(" + fmt6(c->beta.a) + ";" +
                       fmt6(c->beta.b) + ")," + fmt6(c->cost_alpha) + "," +
                       fmt6(c->cost_beta) + "\n";
            }
        }
        emit(output, out);
        return violations ? kExitViolations : 0;
    }

    const MechInfo& info = mechanism_by_name(args.mech);
    if (corpus.empty()) {
        Rng rng(args.seed);
        SampleOptions opts;
        if (info.requires_l0) opts.fixed_L = 0.0;
        for (int t = 0; t < args.trials; ++t)
            corpus.push_back(random_instance(rng, opts));
    }

    out += std::string(kViolationCsvHeader) + "\n";
    std::uint64_t s = args.seed;
    for (const auto& inst : corpus) {
        std::optional<Violation> v;
        if (args.mode == "sp") {
            v = check_incentives(info.kind, inst, 1, args.grid, args.tol,
                                 args.cross_region, 2000, ++s);
        } else if (args.mode == "gsp") {
            v = check_incentives(info.kind, inst, args.coalition, args.grid,
                                 args.tol, args.cross_region, 2000, ++s);
        } else if (args.mode == "mono") {
            v = check_monotone(info.kind, inst, args.moves, args.tol, ++s);
        } else {
            throw std::invalid_argument("unknown verify mode '" + args.mode + "'");
        }
        if (v) {
            ++violations;
            out += v->to_csv_row(info.name) + "\n";
        }
    }
    emit(output, out);
    return violations ? kExitViolations : 0;
}

struct BoundsArgs {
    std::string mode;
    double k_start = 0.0, k_end = 0.99, k_step = 0.01;
    double curve_step = 0.001, gaps_step = 0.001, det_k_step = 0.01;
    int grid = 1000;
    std::string o_mode = "fixed05";
    bool with_computer_lb = false;
    bool verbose = false;
    int workers = 1;
};

int cmd_bounds(const BoundsArgs& args, const std::string& output) {
    int workers = workers_from_env(args.workers);
    OMode mode = (args.o_mode == "sweep") ? OMode::Sweep : OMode::Fixed05;
    if (args.o_mode != "sweep" && args.o_mode != "fixed05")
        throw std::invalid_argument("o-mode must be fixed05 or sweep");
    if (args.mode == "table") {
        if (args.verbose) {
            // cells where the unguarded 16-profile construction inverts
            // x_l/x_r (a0 > o - eps); count is k-independent
            std::vector<double> os = (mode == OMode::Sweep)
                ? [] { std::vector<double> v; for (int i = 0; i <= 20; ++i)
                           v.push_back(0.5 + i / 40.0); return v; }()
                : std::vector<double>{0.5};
            for (double o : os) {
                long rows = 0;
                for (int i = 0; i < args.grid; ++i)
                    if (o * i / args.grid > o - 1e-6) ++rows;
                std::cerr << "# o=" << fmt6(o) << ": " << rows * args.grid
                          << " grid cells have a0 > o-eps (inverted x_l/x_r in "
                             "the unguarded profiles)\n";
            }
        }
        emit(output, lower_bound_table_csv(args.k_start, args.k_end, args.k_step,
                                           args.grid, mode, workers));
        return 0;
    }
    if (args.mode == "curves") {
        emit(output, curves_csv(args.curve_step, args.with_computer_lb, args.grid,
                                workers));
        return 0;
    }
    if (args.mode == "gaps") {
        GapStats g = gap_stats(args.gaps_step, args.det_k_step, args.grid, workers);
        std::string out;
        out += "det_gap " + fmt6(g.det_gap) + "\n";
        out += "det_argk " + fmt6(g.det_argk) + "\n";
        out += "rand_gap " + fmt6(g.rand_gap) + "\n";
        out += "rand_argk " + fmt6(g.rand_argk) + "\n";
        emit(output, out);
        return 0;
    }
    throw std::invalid_argument("unknown bounds mode '" + args.mode + "'");
}

struct RatioArgs {
    std::string mech, objective = "mc";
    double k = 0.0, L = 0.0;
    int budget = 10000;
    std::uint64_t seed = 42;
};

int cmd_ratio(const RatioArgs& args, const std::string& output) {
    const MechInfo& info = mechanism_by_name(args.mech);
    Objective obj = (args.objective == "sc") ? Objective::SC : Objective::MC;
    RatioReport rep =
        worst_ratio_search(info.kind, obj, args.k, args.L, args.budget, args.seed);
    std::string out;
    out += "worst_ratio " + fmt6(rep.worst_ratio) + "\n";
    out += "mech_value " + fmt6(rep.mech_value) + "\n";
    out += "opt_value " + fmt6(rep.opt_value) + "\n";
    auto bound = proven_bound(info, obj, args.k, args.L);
    out += "bound " + (bound ? fmt6(*bound) : std::string("n/a")) + "\n";
    if (rep.witness) out += "witness " + inline_instance(*rep.witness) + "\n";
    emit(output, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"workbench for pathway placement around a blocked interval"};
    app.require_subcommand(1);
    std::string output_path;
    app.add_option("--output", output_path, "write the report here instead of stdout");

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "run a mechanism on an instance file");
    solve->add_option("-m,--mechanism", solve_args.mech)->required();
    solve->add_option("-i,--input", solve_args.input)->required();
    solve->add_option("--objective", solve_args.objective)
        ->check(CLI::IsMember({"sc", "mc"}));
    solve->add_option("--phantom-x", solve_args.phantom_x,
                      "comma-separated phantoms for genmedian (inf/-inf allowed)");
    solve->add_option("--phantom-y", solve_args.phantom_y);

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "fuzz incentive/structure properties");
    verify->add_option("mode", verify_args.mode)
        ->required()
        ->check(CLI::IsMember({"sp", "gsp", "mono", "peaked"}));
    verify->add_option("-m,--mechanism", verify_args.mech);
    verify->add_option("-i,--input", verify_args.input);
    verify->add_option("--trials", verify_args.trials);
    verify->add_option("--grid", verify_args.grid);
    verify->add_option("--coalition", verify_args.coalition)->check(CLI::Range(1, 3));
    verify->add_option("--moves", verify_args.moves);
    verify->add_option("--samples", verify_args.samples);
    verify->add_option("--seed", verify_args.seed);
    verify->add_option("--tol", verify_args.tol);
    verify->add_flag("--cross-region", verify_args.cross_region);

    BoundsArgs bounds_args;
    auto* bounds = app.add_subcommand("bounds", "ratio curves and lower-bound sweeps");
    bounds->add_option("mode", bounds_args.mode)
        ->required()
        ->check(CLI::IsMember({"table", "curves", "gaps"}));
    bounds->add_option("--k-start", bounds_args.k_start);
    bounds->add_option("--k-end", bounds_args.k_end);
    bounds->add_option("--k-step", bounds_args.k_step);
    bounds->add_option("--curve-step", bounds_args.curve_step);
    bounds->add_option("--gaps-step", bounds_args.gaps_step);
    bounds->add_option("--det-k-step", bounds_args.det_k_step);
    bounds->add_option("--grid", bounds_args.grid);
    bounds->add_option("--o-mode", bounds_args.o_mode);
    bounds->add_flag("--with-computer-lb", bounds_args.with_computer_lb);
    bounds->add_flag("--verbose", bounds_args.verbose);
    bounds->add_option("--workers", bounds_args.workers);

    RatioArgs ratio_args;
    auto* ratio = app.add_subcommand("ratio", "adversarial worst-ratio search");
    ratio->add_option("-m,--mechanism", ratio_args.mech)->required();
    ratio->add_option("--objective", ratio_args.objective)
        ->check(CLI::IsMember({"sc", "mc"}));
    ratio->add_option("--k", ratio_args.k);
    ratio->add_option("--L", ratio_args.L);
    ratio->add_option("--budget", ratio_args.budget);
    ratio->add_option("--seed", ratio_args.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadArgs;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_args, output_path);
        if (verify->parsed()) return cmd_verify(verify_args, output_path);
        if (bounds->parsed()) return cmd_bounds(bounds_args, output_path);
        if (ratio->parsed()) return cmd_ratio(ratio_args, output_path);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const UnsupportedRegime& e) {
        std::cerr << "unsupported regime: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadArgs;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadArgs;
    }
    return 0;
}
