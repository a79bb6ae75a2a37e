#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srl/catalog.hpp"
#include "srl/chart.hpp"
#include "srl/errors.hpp"
#include "srl/grading.hpp"
#include "srl/loops.hpp"
#include "srl/model_file.hpp"
#include "srl/nilpotent.hpp"
#include "srl/poly_text.hpp"
#include "srl/rng.hpp"
#include "srl/simulate.hpp"

namespace fs = std::filesystem;
using namespace srl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheck = 2;

struct Options {
    std::string model;
    std::uint64_t seed = 1;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> steps;
    std::vector<double> eps;
    std::optional<double> radius;
    std::string out;
    std::optional<std::size_t> max_depth;
    unsigned max_degree = kDefaultMaxDegree;
    std::size_t workers = 0;
    std::vector<double> times;
    bool jacobian = false;
    bool malliavin = false;
    bool adapted = false;
    bool limit = false;
    bool construct = false;
    bool validate = false;
    bool identity = false;
    bool independent_limit = false;
    double tolerance = 0.3;
    std::size_t n = 100000;
};

class Checks {
public:
    explicit Checks(std::ostream& out = std::cout) : out_(out) {}

    void record(const std::string& name, bool passed, const std::string& detail = {}) {
        out_ << "check " << name << ": " << (passed ? "PASS" : "FAIL");
        if (!detail.empty()) out_ << " (" << detail << ")";
        out_ << '\n';
        if (!passed) failed_.push_back(name);
    }
    int exit_code() const {
        if (failed_.empty()) return kExitOk;
        out_ << "failed checks:";
        for (const auto& f : failed_) out_ << ' ' << f;
        out_ << '\n';
        return kExitCheck;
    }

private:
    std::ostream& out_;
    std::vector<std::string> failed_;
};

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

void write_file(const Options& o, const std::string& name, const std::string& content) {
    if (o.out.empty()) return;
    fs::create_directories(o.out);
    std::ofstream f(fs::path(o.out) / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (fs::path(o.out) / name).string());
    f << content;
    std::cout << "wrote " << (fs::path(o.out) / name).string() << '\n';
}

std::vector<std::vector<double>> sample_points(std::size_t d, std::size_t count, std::uint64_t seed) {
    Philox4x32 rng(seed, 0x504f494e54ULL);
    std::vector<std::vector<double>> pts(count, std::vector<double>(d));
    for (auto& p : pts) {
        for (auto& x : p) x = 2.0 * rng.next_uniform() - 1.0;
    }
    return pts;
}

GradingResult grade(const ModelFile& m, const Options& o) {
    return build_graded_structure(m.generators, m.base_point, o.max_depth.value_or(m.max_depth));
}

// File chart when present (it must validate), otherwise a constructed one.
AdaptedChart resolve_chart(const ModelFile& m, const GradingResult& g, Checks& checks) {
    if (m.chart) {
        auto result = validate_adapted(*m.chart, m.generators, g.structure);
        if (auto* v = std::get_if<ChartViolation>(&result)) {
            checks.record("chart.validate_adapted", false, v->message);
            throw Error("the model file chart is not adapted");
        }
        checks.record("chart.validate_adapted", true, "model file chart");
        return std::get<AdaptedChart>(std::move(result));
    }
    AdaptedChart chart = construct_adapted(m.generators, g);
    checks.record("chart.construct_adapted", true, "constructed chart");
    return chart;
}

SimConfig make_config(const ModelFile& m, const Options& o, std::size_t default_paths, std::size_t default_steps) {
    SimConfig c;
    c.eps = o.eps.empty() ? m.simulation.eps.value_or(0.01) : o.eps.front();
    c.paths = o.paths.value_or(m.simulation.paths.value_or(default_paths));
    c.steps = o.steps.value_or(m.simulation.steps.value_or(default_steps));
    c.master_seed = o.seed;
    c.workers = o.workers;
    return c;
}

int cmd_analyze(const Options& o) {
    const ModelFile m = load_model_file(o.model);
    Checks checks;
    GradingResult g = [&] {
        try {
            return grade(m, o);
        } catch (const HormanderFailure& e) {
            std::cout << e.what() << '\n';
            checks.record("grading.build_graded_structure", false, "bracket condition fails at the base point");
            throw;
        }
    }();
    const auto& s = g.structure;
    std::cout << "model " << m.name << " (dim " << m.dim << ")\n";
    std::cout << "brackets at the base point:\n";
    for (const auto& e : g.table.entries) {
        const auto value = e.field.evaluate(s.base_point());
        std::cout << "  " << e.label() << " = " << to_string(e.field, m.variables) << "  at x: (";
        for (std::size_t k = 0; k < value.size(); ++k) std::cout << (k ? ", " : "") << to_string(value[k]);
        std::cout << ")\n";
    }
    std::cout << "d = (";
    for (std::size_t n = 1; n <= s.step(); ++n) std::cout << (n > 1 ? ", " : "") << s.flag_dim(n);
    std::cout << ")\nN = " << s.step() << "\nweights = (";
    for (std::size_t k = 0; k < s.weights().size(); ++k) std::cout << (k ? ", " : "") << s.weights()[k];
    std::cout << ")\nQ = " << s.homogeneous_dimension() << '\n';
    checks.record("grading.build_graded_structure", true, "step " + std::to_string(s.step()));
    if (m.drift) {
        const auto pts = sample_points(m.dim, 20, o.seed);
        const auto report = check_drift_in_span(*m.drift, m.generators, m.base_point, pts);
        checks.record("grading.check_drift_in_span", report.ok(),
                      std::to_string(report.failing_points.size()) + " failing sample points");
    }
    const std::string csv = grading_report_csv(s);
    std::cout << csv;
    write_file(o, "grading.csv", csv);
    return checks.exit_code();
}

int cmd_chart(const Options& o) {
    const ModelFile m = load_model_file(o.model);
    Checks checks;
    const GradingResult g = grade(m, o);
    checks.record("grading.build_graded_structure", true);
    std::optional<AdaptedChart> chart;
    const bool validate = o.validate || o.identity || (!o.construct && m.chart);
    if (o.construct) {
        chart = construct_adapted(m.generators, g, o.max_degree == kDefaultMaxDegree ? 0 : o.max_degree);
        checks.record("chart.construct_adapted", true);
    } else if (validate) {
        PolyMap theta = PolyMap::translation(m.base_point);
        if (!o.identity) {
            if (!m.chart) throw InvalidArgument("--validate needs a [chart] section or --identity");
            theta = *m.chart;
        }
        auto result = validate_adapted(theta, m.generators, g.structure);
        if (auto* v = std::get_if<ChartViolation>(&result)) {
            std::cout << "violation: condition "
                      << (v->condition == ChartViolation::Condition::alignment ? "(i)" : "(ii)") << " n=" << v->n;
            if (v->condition == ChartViolation::Condition::vanishing) {
                std::cout << " k=" << v->k + 1 << " D=" << word_label(v->word) << " value=" << to_string(v->value);
            }
            std::cout << '\n' << v->message << '\n';
            checks.record("chart.validate_adapted", false, v->message);
            return checks.exit_code();
        }
        chart = std::get<AdaptedChart>(std::move(result));
        checks.record("chart.validate_adapted", true);
    } else {
        chart = construct_adapted(m.generators, g);
        checks.record("chart.construct_adapted", true);
    }
    const std::string theta = to_string(PolyVectorField(chart->theta().components()), m.variables);
    const std::string inverse = to_string(PolyVectorField(chart->theta().inverse()), default_names(m.dim, 'y'));
    std::cout << "theta = " << theta << "\ninverse = " << inverse << '\n';
    const std::string cert = certificate_csv(*chart);
    std::cout << cert;
    write_file(o, "chart.txt", "theta = " + theta + "\ninverse = " + inverse + "\n");
    write_file(o, "certificate.csv", cert);
    return checks.exit_code();
}

int cmd_nilpotent(const Options& o) {
    const ModelFile m = load_model_file(o.model);
    Checks checks;
    const GradingResult g = grade(m, o);
    const AdaptedChart chart = resolve_chart(m, g, checks);
    const NilpotentSystem sys = nilpotentize(m.generators, chart, o.max_degree);
    const auto ynames = default_names(m.dim, 'y');
    std::ostringstream text;
    for (std::size_t i = 0; i < sys.fields.size(); ++i) {
        text << "X~" << i + 1 << " = " << to_string(sys.fields[i], ynames) << '\n';
    }
    text << "drift~ = " << to_string(sys.drift_tilde, ynames) << '\n';
    std::cout << text.str();
    write_file(o, "nilpotent.txt", text.str());

    std::ostringstream csv;
    csv << "check,field,passed,detail\n";
    for (const auto& c : check_homogeneity(sys, 20, o.seed)) {
        checks.record("nilpotent.check_homogeneity[X~" + std::to_string(c.field + 1) + "]", c.passed, c.detail);
        csv << "homogeneity," << c.field + 1 << ',' << c.passed << ',' << c.detail << '\n';
    }
    for (const auto& c : check_cascade(sys)) {
        checks.record("nilpotent.check_cascade[X~" + std::to_string(c.field + 1) + "]", c.passed, c.detail);
        csv << "cascade," << c.field + 1 << ',' << c.passed << ',' << c.detail << '\n';
    }
    for (const auto& l : check_bracket_flag(sys)) {
        checks.record("nilpotent.check_bracket_flag[n=" + std::to_string(l.n) + "]", l.passed(),
                      "rank " + std::to_string(l.rank) + ", d_n " + std::to_string(l.expected));
        csv << "bracket_flag," << l.n << ',' << l.passed() << ",rank " << l.rank << '\n';
    }
    const auto pts = sample_points(m.dim, 20, o.seed);
    std::size_t bad = 0;
    for (const auto& p : check_strong_hormander_everywhere(sys, pts)) bad += p.passed ? 0 : 1;
    checks.record("nilpotent.check_strong_hormander_everywhere", bad == 0,
                  std::to_string(pts.size() - bad) + "/" + std::to_string(pts.size()) + " sample points");
    csv << "strong_hormander,all," << (bad == 0) << ',' << bad << " failing points\n";
    const std::vector<Rational> grid{Rational(1, 4), Rational(1, 16), Rational(1, 100)};
    const auto conv = check_convergence_to_nilpotent(m.generators, chart, grid, o.max_degree);
    std::string detail = std::to_string(conv.terms.size()) + " residual terms";
    checks.record("nilpotent.check_convergence_to_nilpotent", conv.passed, detail);
    csv << "convergence,all," << conv.passed << ',' << detail << '\n';
    write_file(o, "nilpotent_checks.csv", csv.str());
    return checks.exit_code();
}

int cmd_simulate(const Options& o) {
    const ModelFile m = load_model_file(o.model);
    // stdout carries the CSV when no --out is given
    Checks checks(o.out.empty() ? std::cerr : std::cout);
    const GradingResult g = grade(m, o);
    SimConfig config = make_config(m, o, 1000, 1024);
    SdeModel model;
    bool adapted = o.adapted || o.malliavin;
    if (o.limit) {
        const AdaptedChart chart = resolve_chart(m, g, checks);
        model = make_limit_model(nilpotentize(m.generators, chart, o.max_degree));
        config.eps = 1.0;
    } else if (adapted) {
        const AdaptedChart chart = resolve_chart(m, g, checks);
        model = make_adapted_model(m.generators, m.drift_or_zero(), chart);
    } else {
        model = make_polynomial_model(m.generators, m.drift_or_zero(), m.base_point, m.name);
    }
    RecordOptions rec;
    rec.times = o.times;
    rec.jacobian = o.jacobian;
    rec.malliavin = o.malliavin;
    const PathEnsemble ens = run_ensemble(model, config, rec);
    std::ostringstream csv;
    write_ensemble_csv(csv, ens);
    if (o.out.empty()) {
        std::cout << csv.str();
    } else {
        write_file(o, "ensemble.csv", csv.str());
    }
    std::cerr << "simulate: " << ens.size() << " paths, " << ens.flagged << " flagged, eps " << config.eps
              << ", steps " << config.steps << ", seed " << config.master_seed << ", chunks " << ens.chunks << '\n';
    if (o.malliavin) std::cerr << "simulate: max eigenvalue clip " << ens.max_clip << '\n';
    return checks.exit_code();
}

// Loop statistics are simulated in adapted coordinates: Euler steps in the original coordinates break the
// cancellations that make the higher chart coordinates small, and the rescaling amplifies that error.
SdeModel charted_model(const ModelFile& m, const GradingResult& g, Checks& checks) {
    return make_adapted_model(m.generators, m.drift_or_zero(), resolve_chart(m, g, checks), m.name);
}

int cmd_heat_slope(const Options& o) {
    const ModelFile m = load_model_file(o.model);
    Checks checks;
    const GradingResult g = grade(m, o);
    const SdeModel model = charted_model(m, g, checks);
    const std::vector<double> grid = o.eps.empty() ? std::vector<double>{0.2, 0.1, 0.05, 0.02} : o.eps;
    const SimConfig config = make_config(m, o, 20000, 1024);
    const double radius = o.radius.value_or(0.5);
    const HeatSlopeReport r = heat_kernel_slope(model, grid, config, radius);
    std::ostringstream csv;
    write_report_csv(csv, r);
    std::cout << csv.str();
    write_file(o, "heat_slope.csv", csv.str());
    checks.record("loops.heat_kernel_slope", std::abs(r.fit.slope - r.expected()) <= o.tolerance,
                  "slope " + fmt(r.fit.slope) + " +- " + fmt(1.96 * r.fit.slope_se) + ", Q/2 = " + fmt(r.expected()));
    checks.record("loops.density_at_zero", r.q_lower99 > 0.0, "99% lower bound " + fmt(r.q_lower99));
    return checks.exit_code();
}

int cmd_loops(const Options& o) {
    const ModelFile m = load_model_file(o.model);
    Checks checks;
    const GradingResult g = grade(m, o);
    const AdaptedChart chart = resolve_chart(m, g, checks);
    const SdeModel model = make_adapted_model(m.generators, m.drift_or_zero(), chart, m.name);
    const NilpotentSystem sys = nilpotentize(m.generators, chart, o.max_degree);
    std::vector<double> grid = o.eps.empty() ? std::vector<double>{0.2, 0.05, 0.01} : o.eps;
    std::sort(grid.begin(), grid.end(), std::greater<>());
    const SimConfig base = make_config(m, o, 100000, 1024);
    const double radius = o.radius.value_or(m.simulation.radius.value_or(0.1));
    std::vector<double> times;
    for (int k = 0; k <= 64; ++k) times.push_back(k / 64.0);
    const std::vector<double> compare_times{0.25, 0.5, 0.75};

    SimConfig limit_config = base;
    // common random numbers by default: the eps ensembles and the limit share Brownian increments, so the
    // distance trend is not swamped by sampling noise. Permutation p-values need --independent-limit.
    if (o.independent_limit) limit_config.master_seed = base.master_seed + 1000003;
    const LoopEnsemble limit = sample_loops(sys, limit_config, radius, times, 2);
    std::ostringstream csv;
    std::ostringstream long_csv;
    long_csv << "eps,time,coordinate,statistic,value\n";
    std::vector<LoopEnsemble> ensembles;
    std::vector<double> energies;
    double last_ks = 0.0;
    for (double eps : grid) {
        SimConfig c = base;
        c.eps = eps;
        ensembles.push_back(sample_loops(model, c, radius, times, 2));
        const LoopComparison cmp = compare_loop_laws(ensembles.back(), limit, compare_times, 200, o.seed);
        write_report_csv(csv, cmp, eps);
        write_long_format(long_csv, ensembles.back());
        energies.push_back(cmp.energy.statistic);
        last_ks = cmp.max_ks();
        std::cout << "eps " << eps << ": accepted " << ensembles.back().size() << " (rate "
                  << ensembles.back().acceptance_rate << "), energy " << cmp.energy.statistic << " (p "
                  << cmp.energy.p_value << "), max KS " << cmp.max_ks() << '\n';
    }
    bool monotone = true;
    for (std::size_t i = 1; i < energies.size(); ++i) monotone = monotone && energies[i] < energies[i - 1];
    checks.record("loops.compare_loop_laws[monotone energy]", monotone);
    checks.record("loops.compare_loop_laws[final KS <= 0.12]", last_ks <= 0.12, "max KS " + fmt(last_ks));

    const LoopEnsemble* smallest[] = {&ensembles.back()};
    const std::vector<double> lags{1.0 / 64, 1.0 / 32, 1.0 / 16};
    const TightnessReport tight = tightness_moment_check(smallest, lags);
    write_report_csv(csv, tight);
    checks.record("loops.tightness_moment_check", tight.passed(1.7), "exponent " + fmt(tight.min_exponent));

    SimConfig collapse_config = base;
    const CollapseReport collapse =
        sqrt_eps_collapse(model, g.structure.flag_dim(1), grid, collapse_config, o.radius.value_or(0.3));
    write_report_csv(csv, collapse);
    std::string detail = collapse.vacuous ? "vacuous: elliptic at the base point" : "";
    for (const auto& c : collapse.coordinates) {
        detail += (detail.empty() ? "" : ", ") + std::string("coord ") + std::to_string(c.coordinate + 1) +
                  " exponent " + fmt(c.exponent);
    }
    checks.record("loops.sqrt_eps_collapse", collapse.passed(), detail);
    std::cout << csv.str();
    write_file(o, "loops.csv", csv.str());
    write_file(o, "loops_long.csv", long_csv.str());
    return checks.exit_code();
}

int cmd_oracle_bridge(const Options& o) {
    Checks checks;
    BridgeOracleOptions opt;
    opt.seed = o.seed;
    if (o.steps) opt.steps = *o.steps;
    {
        // conditioned simulation of the limit loop of the grushin-like example, coordinate 1 at t = 1/2
        const auto gens = catalog::grushin_like();
        const RationalVector origin(2, Rational(0));
        const GradingResult g = build_graded_structure(gens, origin);
        const auto chart = std::get<AdaptedChart>(validate_adapted(catalog::grushin_like_chart(), gens, g.structure));
        const NilpotentSystem sys = nilpotentize(gens, chart);
        SimConfig c;
        c.paths = o.paths.value_or(100000);
        c.steps = 1024;
        c.master_seed = o.seed + 1;
        c.workers = o.workers;
        const double half[] = {0.5};
        const LoopEnsemble loops = sample_loops(sys, c, o.radius.value_or(0.1), half, 2);
        opt.loop_midpoints = loops.marginal(0, 0);
        std::cout << "limit loops accepted: " << loops.size() << '\n';
    }
    const BridgeOracleReport r = reweighted_bridge_oracle(o.n, opt);
    std::ostringstream csv;
    write_report_csv(csv, r);
    std::cout << csv.str();
    write_file(o, "oracle_bridge.csv", csv.str());
    checks.record("loops.reweighted_bridge_oracle[weighted differs]",
                  r.weighted_vs_plain.statistic > 0.02 && r.permutation_p < 0.01,
                  "KS " + fmt(r.weighted_vs_plain.statistic) + ", permutation p " + fmt(r.permutation_p));
    if (r.vs_loops) {
        checks.record("loops.reweighted_bridge_oracle[agrees with loops]", r.vs_loops->statistic <= 0.05,
                      "KS " + fmt(r.vs_loops->statistic));
    }
    return checks.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"srloops: graded structure, adapted charts, nilpotent approximation and small-time loop checks "
                 "for polynomial sub-Riemannian diffusions"};
    app.require_subcommand(1);
    Options o;

    auto model_arg = [&](CLI::App* sub) {
        sub->add_option("model", o.model, "model file")->required()->check(CLI::ExistingFile);
        sub->add_option("--max-depth", o.max_depth, "bracket depth limit")->check(CLI::PositiveNumber);
        sub->add_option("--max-degree", o.max_degree, "degree cap for compositions")->check(CLI::PositiveNumber);
        sub->add_option("--out", o.out, "output directory for CSV files");
    };
    auto sim_args = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--paths", o.paths, "number of paths")->check(CLI::PositiveNumber);
        sub->add_option("--steps", o.steps, "time steps on [0, 1]")->check(CLI::PositiveNumber);
        sub->add_option("--eps", o.eps, "eps value (repeatable)")->check(CLI::PositiveNumber);
        sub->add_option("--radius", o.radius, "acceptance or density radius")->check(CLI::PositiveNumber);
        sub->add_option("--workers", o.workers, "worker threads (0: all cores); never changes results");
    };

    auto* analyze = app.add_subcommand("analyze", "bracket table, flag dimensions, weights and Q");
    model_arg(analyze);
    analyze->add_option("--seed", o.seed, "seed for sample points");

    auto* chart = app.add_subcommand("chart", "construct or validate an adapted chart");
    model_arg(chart);
    auto* g1 = chart->add_flag("--construct", o.construct, "build an adapted chart");
    auto* g2 = chart->add_flag("--validate", o.validate, "validate the model file chart");
    chart->add_flag("--identity", o.identity, "validate the identity chart (translated to the base point)");
    g1->excludes(g2);

    auto* nilpotent = app.add_subcommand("nilpotent", "nilpotent approximation and its structural checks");
    model_arg(nilpotent);
    nilpotent->add_option("--seed", o.seed, "seed for sample points");

    auto* simulate = app.add_subcommand("simulate", "Euler-Maruyama ensemble as CSV");
    model_arg(simulate);
    sim_args(simulate);
    simulate->add_option("--times", o.times, "record times in [0, 1]");
    simulate->add_flag("--jacobian", o.jacobian, "record the terminal inverse Jacobian flow v");
    simulate->add_flag("--malliavin", o.malliavin, "rescaled Malliavin matrix (adapted coordinates)");
    simulate->add_flag("--adapted", o.adapted, "simulate in adapted chart coordinates");
    simulate->add_flag("--limit", o.limit, "simulate the limiting nilpotent system");

    auto* heat = app.add_subcommand("heat-slope", "log-log slope of the diagonal heat kernel");
    model_arg(heat);
    sim_args(heat);
    heat->add_option("--tolerance", o.tolerance, "allowed |slope - Q/2|");

    auto* loops = app.add_subcommand("loops", "loop convergence, tightness and sqrt(eps) collapse");
    model_arg(loops);
    sim_args(loops);
    loops->add_flag("--independent-limit", o.independent_limit, "draw the limit ensemble from an independent stream");

    auto* oracle = app.add_subcommand("oracle-bridge", "reweighted Brownian bridge oracle");
    oracle->add_option("-n,--samples", o.n, "number of bridges")->check(CLI::Range(10000, 100000000));
    oracle->add_option("--seed", o.seed, "master seed");
    oracle->add_option("--steps", o.steps, "bridge grid steps")->check(CLI::PositiveNumber);
    oracle->add_option("--paths", o.paths, "paths for the conditioned limit simulation")->check(CLI::PositiveNumber);
    oracle->add_option("--radius", o.radius, "acceptance radius of the limit loops")->check(CLI::PositiveNumber);
    oracle->add_option("--workers", o.workers, "worker threads");
    oracle->add_option("--out", o.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*analyze) return cmd_analyze(o);
        if (*chart) return cmd_chart(o);
        if (*nilpotent) return cmd_nilpotent(o);
        if (*simulate) return cmd_simulate(o);
        if (*heat) return cmd_heat_slope(o);
        if (*loops) return cmd_loops(o);
        if (*oracle) return cmd_oracle_bridge(o);
    } catch (const srl::ParseError& e) {
        std::cerr << o.model << ':' << e.line() << ':' << e.column() << ": " << e.message() << '\n';
        return kExitUsage;
    } catch (const HormanderFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheck;
    } catch (const ChartConstructionFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheck;
    } catch (const srl::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
