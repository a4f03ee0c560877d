#include <pdisc/pdisc.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace pdisc;

namespace {

struct RunConfig {
    std::string input;
    std::string params;
    std::string out;
    std::string svg;
    bool quadrant = false;
    SearchBounds bounds;
    std::vector<std::string> curves;
    bool dump_extactic = false;
    bool sample = false;
    std::uint64_t seed = kDefaultSampleSeed;
    PortraitOptions portrait;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

PlanarSystem load(const RunConfig &cfg) {
    Bindings overrides = cfg.params.empty() ? Bindings{} : parse_bindings(cfg.params);
    return parse_system(read_file(cfg.input), overrides);
}

MPoly parse_curve(const PlanarSystem &sys, const std::string &expr) {
    std::string src = "d" + sys.variables[0] + " = " + expr + "\nd" + sys.variables[1] + " = 0\n";
    return parse_system(src, sys.params).field.p;
}

std::string dump(const ojson &j) { return j.dump(2) + "\n"; }

void run_analyze(const RunConfig &cfg) {
    write_output(cfg.out, dump(analysis_json(load(cfg), cfg.quadrant)));
}

void run_darboux(const RunConfig &cfg) {
    PlanarSystem sys = load(cfg);
    std::vector<MPoly> extra;
    for (const auto &c : cfg.curves) extra.push_back(parse_curve(sys, c));
    ojson j = darboux_json(sys, liouville_verdict(sys, cfg.bounds, extra), cfg.dump_extactic);
    if (cfg.sample) {
        ojson runs = ojson::array();
        for (const auto &b : seeded_parameter_sample(cfg.seed)) {
            Bindings o{{"A", b.A}, {"B", b.B}, {"C", b.C}};
            PlanarSystem s = parse_system(read_file(cfg.input), o);
            IntegrabilityVerdict v = liouville_verdict(s, cfg.bounds);
            runs.push_back({{"params", {{"A", b.A.get_str()}, {"B", b.B.get_str()}, {"C", b.C.get_str()}}},
                            {"verdict", to_string(v.verdict)},
                            {"rank", v.rank_m},
                            {"rank_augmented", v.rank_augmented},
                            {"nullity", v.nullity}});
        }
        j["sample"] = {{"seed", cfg.seed}, {"runs", runs}};
    }
    write_output(cfg.out, dump(j));
}

void run_portrait(const RunConfig &cfg) {
    PortraitOptions opts = cfg.portrait;
    opts.quadrant_only = cfg.quadrant;
    PortraitDoc doc = build_portrait(load(cfg), opts);
    if (!cfg.svg.empty()) write_output(cfg.svg, render_svg(doc, RenderStyle{cfg.quadrant}));
    if (!cfg.out.empty() || cfg.svg.empty()) write_output(cfg.out, render_json(doc));
}

void run_leslie(const std::array<std::string, 6> &raw, const std::string &model, bool analyze, const RunConfig &cfg) {
    LeslieGowerParams p{parse_rat(raw[0]), parse_rat(raw[1]), parse_rat(raw[2]),
                        parse_rat(raw[3]), parse_rat(raw[4]), parse_rat(raw[5])};
    LeslieTransform t = leslie_transform(p);
    std::cout << "A=" << t.bindings.A << "\nB=" << t.bindings.B << "\nC=" << t.bindings.C << "\n";
    std::cout << "regime 1-AC = " << t.regime << "\n";
    if (!model.empty()) {
        std::string src = "params: A=" + t.bindings.A.get_str() + ", B=" + t.bindings.B.get_str() +
                          ", C=" + t.bindings.C.get_str() + "\n" + kLeslieSource;
        write_output(model, src);
    }
    if (analyze) write_output(cfg.out, dump(analysis_json(t.system, cfg.quadrant)));
}

std::uint64_t seed_from_env() {
    const char *s = std::getenv("PDISC_SEED");
    if (!s || !*s) return kDefaultSampleSeed;
    char *end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (*end) throw InputError("PDISC_SEED must be a nonnegative integer");
    return v;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Exact analysis of planar polynomial vector fields on the Poincare disc"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::array<std::string, 6> bio{"1", "1", "1", "1", "1", "1"};
    std::string model;
    bool chain = false;

    auto common = [&](CLI::App *sub) {
        sub->add_option("model", cfg.input, "Vector-field file")->required();
        sub->add_option("--params", cfg.params, "Parameter overrides NAME=RAT,...");
        sub->add_option("--out", cfg.out, "JSON output path (stdout when omitted)");
    };
    auto *analyze = app.add_subcommand("analyze", "Equilibria, charts at infinity and blow-ups as JSON");
    common(analyze);
    analyze->add_flag("--quadrant", cfg.quadrant, "Restrict to the closed positive quadrant");

    auto *darboux = app.add_subcommand("darboux", "Invariant curves, exponential factors and the Liouville verdict");
    common(darboux);
    darboux->add_option("--curve-degree", cfg.bounds.curve_degree, "Maximum degree of supplied curves")
        ->check(CLI::PositiveNumber);
    darboux->add_option("--exp-degree", cfg.bounds.exp_degree, "Exponent degree bound N")->check(CLI::PositiveNumber);
    darboux->add_option("--extactic-order", cfg.bounds.extactic_order, "Extactic order m")->check(CLI::Range(1, 2));
    darboux->add_option("--curve", cfg.curves, "Candidate invariant curve (repeatable)");
    darboux->add_flag("--dump-extactic", cfg.dump_extactic, "Include the full extactic polynomial");
    darboux->add_flag("--sample", cfg.sample, "Also run the seeded (A, B, C) sample");

    auto *portrait = app.add_subcommand("portrait", "Poincare-disc phase portrait as SVG and JSON");
    common(portrait);
    portrait->add_option("--svg", cfg.svg, "SVG output path");
    portrait->add_flag("--quadrant", cfg.quadrant, "Restrict to the closed positive quadrant");
    portrait->add_option("--grid", cfg.portrait.grid, "Seed grid size per side")->check(CLI::PositiveNumber);
    portrait->add_option("--tmax", cfg.portrait.integration.tmax, "Integration time bound")->check(CLI::PositiveNumber);
    portrait->add_option("--separatrix-eps", cfg.portrait.separatrix_eps, "Separatrix seed offset on the disc")
        ->check(CLI::PositiveNumber);
    portrait->add_option("--rtol", cfg.portrait.integration.rtol, "Relative tolerance")->check(CLI::PositiveNumber);
    portrait->add_option("--atol", cfg.portrait.integration.atol, "Absolute tolerance")->check(CLI::PositiveNumber);
    portrait->add_option("--converge-distance", cfg.portrait.integration.converge_distance,
                         "Distance to an equilibrium counted as convergence")
        ->check(CLI::PositiveNumber);
    portrait->add_option("--threads", cfg.portrait.threads, "Worker threads (0: all cores)");

    auto *leslie = app.add_subcommand("leslie", "Biological Leslie-Gower parameters to (A, B, C) and the regime");
    const char *names[] = {"--r", "--k", "--q", "--s", "--n", "--c"};
    for (std::size_t i = 0; i < 6; ++i) leslie->add_option(names[i], bio[i])->required();
    leslie->add_option("--model", model, "Write the instantiated model file");
    leslie->add_flag("--analyze", chain, "Run analyze on the resulting system");
    leslie->add_flag("--quadrant", cfg.quadrant, "Restrict the chained analysis to the positive quadrant");
    leslie->add_option("--out", cfg.out, "JSON output path for the chained analysis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        cfg.seed = seed_from_env();
        if (*analyze) run_analyze(cfg);
        else if (*darboux) run_darboux(cfg);
        else if (*portrait) run_portrait(cfg);
        else if (*leslie) run_leslie(bio, model, chain, cfg);
    } catch (const InputError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvariantViolation &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
