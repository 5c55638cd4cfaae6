#include "depsel/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "depsel/analysis.hpp"
#include "depsel/casestudy.hpp"
#include "depsel/errors.hpp"
#include "depsel/identification.hpp"
#include "depsel/io.hpp"
#include "depsel/preferences.hpp"
#include "depsel/selection_models.hpp"
#include "depsel/solver.hpp"
#include "text.hpp"

namespace depsel::cli {

namespace {

// Input-file diagnostic: prefixes the offending path.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class F>
auto load(const std::string& path, F&& parse) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    try {
        return parse(in);
    } catch (const FormatError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const ArgumentError& e) {
        throw InputError(path + ": " + e.what());
    }
}

// Output sink: a file (with provenance header) or the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback, const std::string& provenance, const std::string& comment = "#")
        : fallback_(fallback) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw InputError(path + ": cannot write file");
        *file_ << comment << provenance.substr(1) << '\n';
    }

    std::ostream& stream() { return file_ ? *file_ : fallback_; }

private:
    std::ostream& fallback_;
    std::unique_ptr<std::ofstream> file_;
};

std::string config_string(const std::vector<std::string>& argv) {
    std::string s;
    for (std::size_t k = 1; k < argv.size(); ++k) {
        s += argv[k];
        s += '\x1f';
    }
    return s;
}

std::vector<double> parse_levels(const std::string& spec) {
    std::vector<double> levels;
    for (const auto& item : text::split_csv(spec)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            const auto v = text::parse_double(item);
            if (!v) throw ArgumentError("invalid level '" + item + "'");
            levels.push_back(*v);
            continue;
        }
        std::vector<double> parts;
        std::size_t start = 0;
        while (true) {
            const auto next = item.find(':', start);
            const auto v = text::parse_double(item.substr(start, next == std::string::npos ? std::string::npos : next - start));
            if (!v) throw ArgumentError("invalid level range '" + item + "'");
            parts.push_back(*v);
            if (next == std::string::npos) break;
            start = next + 1;
        }
        if (parts.size() > 3) throw ArgumentError("invalid level range '" + item + "'");
        const double step = parts.size() == 3 ? parts[2] : 1.0;
        if (!(step > 0.0) || parts[1] < parts[0]) throw ArgumentError("invalid level range '" + item + "'");
        const auto count = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / step + 1e-9));
        for (std::size_t k = 0; k <= count; ++k) levels.push_back(parts[0] + static_cast<double>(k) * step);
    }
    if (levels.empty()) throw ArgumentError("empty level list");
    return levels;
}

std::pair<double, double> parse_cuts(const std::string& spec) {
    const auto cells = text::split_csv(spec);
    if (cells.size() != 2) throw ArgumentError("--cuts expects 'a,b'");
    const auto a = text::parse_double(cells[0]);
    const auto b = text::parse_double(cells[1]);
    if (!a || !b) throw ArgumentError("--cuts expects two numbers");
    return {*a, *b};
}

std::vector<std::string> ids_of(const std::vector<Requirement>& reqs) {
    std::vector<std::string> ids;
    for (const auto& r : reqs) ids.push_back(r.id);
    return ids;
}

// Flags shared by subcommands that assemble a SelectionProblem.
struct ProblemFlags {
    std::string dataset;
    std::string requirements;
    std::string constraints;
    std::string vdg;
    std::string influence;
    std::string subsets;
    std::string mode;
    std::optional<double> budget;
    std::optional<double> percent;

    void attach(CLI::App* app, bool with_budget) {
        app->add_option("--dataset", dataset, "Bundled dataset (casestudy)")->check(CLI::IsMember({"casestudy"}));
        app->add_option("--requirements", requirements, "Requirements CSV (id,name,cost,value,probability)");
        app->add_option("--constraints", constraints, "Precedence constraints JSON");
        app->add_option("--vdg", vdg, "Value dependency graph CSV");
        app->add_option("--influence", influence, "Influence matrix CSV");
        app->add_option("--subsets", subsets, "Subset value estimates JSON (increase-decrease)");
        app->add_option("--mode", mode, "Capacity row: cost (sum c x <= b) or price (sum v x <= b)")
            ->check(CLI::IsMember({"cost", "price"}));
        if (with_budget) {
            app->add_option("--budget", budget, "Budget or price limit");
            app->add_option("--percent", percent, "Limit as a percentage of the total cost (cost) or value (price)");
        }
    }

    struct Loaded {
        SelectionProblem problem;
        std::vector<std::string> ids;
        std::vector<SubsetEstimate> subset_estimates;
        bool explicit_constraints = false;
    };

    Loaded load_problem(bool need_budget) const {
        Loaded l;
        if (dataset.empty() == requirements.empty()) throw ArgumentError("give exactly one of --dataset or --requirements");
        if (!dataset.empty()) {
            l.problem = case_study_problem();
        } else {
            l.problem.requirements = load(requirements, [](std::istream& in) { return read_requirements(in); });
            l.problem.precedence = PrecedenceGraph(l.problem.requirements.size());
            l.problem.mode = ConstraintMode::budget_cost;
        }
        l.ids = ids_of(l.problem.requirements);
        if (!mode.empty()) l.problem.mode = mode == "price" ? ConstraintMode::price_value : ConstraintMode::budget_cost;
        if (!constraints.empty()) {
            l.problem.precedence = load(constraints, [&](std::istream& in) { return read_constraints(in, l.ids); });
            l.explicit_constraints = true;
        }
        if (!vdg.empty() && !influence.empty()) throw ArgumentError("give at most one of --vdg or --influence");
        if (!vdg.empty()) {
            const auto g = load(vdg, [&](std::istream& in) { return read_vdg(in, l.ids); });
            l.problem.influence = propagate_strengths(g);
        } else if (!influence.empty()) {
            l.problem.influence = load(influence, [&](std::istream& in) { return read_influence(in, l.ids); });
        }
        if (!subsets.empty())
            l.subset_estimates = load(subsets, [&](std::istream& in) { return read_subsets(in, l.ids); });
        if (need_budget) {
            if (budget.has_value() == percent.has_value()) throw ArgumentError("give exactly one of --budget or --percent");
            if (budget) {
                l.problem.budget = *budget;
            } else {
                double total = 0.0;
                for (const auto& r : l.problem.requirements)
                    total += l.problem.mode == ConstraintMode::price_value ? r.value : r.cost;
                l.problem.budget = *percent / 100.0 * total;
            }
        }
        return l;
    }
};

void warn_bk(Method method, const ProblemFlags::Loaded& l, std::ostream& err) {
    if (method == Method::bk && (l.explicit_constraints || !l.problem.precedence.empty()))
        err << "warning: bk ignores precedence constraints (and value dependencies)\n";
}

LinearModel model_for(Method method, const ProblemFlags::Loaded& l, bool simplify) {
    SelectionProblem p = l.problem;
    if (method == Method::dars && !p.influence) p.influence = InfluenceMatrix::zero(p.size());
    return build_model(p, method, l.subset_estimates, ModelOptions{simplify});
}

} // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dependency-aware requirements selection"};
    app.name("depsel");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));
    const std::string provenance = provenance_line(config_string(argv));

    // identify
    auto* identify = app.add_subcommand("identify", "Preferences -> VDG CSV and eta/odds report");
    std::string pref_path, vdg_out = "vdg.csv", report_out, cuts = "0,1";
    double z_prime = 1.96;
    identify->add_option("--preferences", pref_path, "Preference matrix CSV")->required();
    identify->add_option("--z", z_prime, "Critical value z' of the odds-ratio interval");
    identify->add_option("--cuts", cuts, "Membership cuts a,b");
    identify->add_option("--out", vdg_out, "VDG CSV output ('-' for stdout)");
    identify->add_option("--report", report_out, "Per-pair eta/odds report CSV");

    // resample
    auto* resample_cmd = app.add_subcommand("resample", "Fit a dichotomized Gaussian and resample preferences");
    std::string samples_out = "resampled.csv";
    std::uint64_t seed = 0;
    std::size_t initial_count = 1000, rounds = 8;
    double tolerance = 0.02;
    resample_cmd->add_option("--preferences", pref_path, "Preference matrix CSV")->required();
    resample_cmd->add_option("--seed", seed, "Random seed")->required();
    resample_cmd->add_option("--count", initial_count, "Initial sample size");
    resample_cmd->add_option("--rounds", rounds, "Maximum doubling rounds");
    resample_cmd->add_option("--tolerance", tolerance, "Mean/covariance gap tolerance");
    resample_cmd->add_option("--out", samples_out, "Resampled matrix CSV");

    // influence
    auto* influence_cmd = app.add_subcommand("influence", "VDG -> influence matrix CSV");
    ProblemFlags influence_flags;
    std::string influence_out;
    influence_flags.attach(influence_cmd, false);
    influence_cmd->add_option("--out", influence_out, "Influence CSV output (default stdout)");

    // select
    auto* select = app.add_subcommand("select", "Solve one selection problem");
    ProblemFlags select_flags;
    std::string method_name_arg = "dars", select_out;
    bool simplify = false, timing = false;
    std::uint64_t node_limit = 0;
    double time_limit = 0.0;
    select_flags.attach(select, true);
    select->add_option("--method", method_name_arg, "bk, pcbk, sbk, dars or id");
    select->add_flag("--simplify", simplify, "Substitute g := x in the DARS model");
    select->add_flag("--timing", timing, "Include elapsed time in the Solution JSON");
    select->add_option("--node-limit", node_limit, "Branch-and-bound node limit (0 = none)");
    select->add_option("--time-limit", time_limit, "Time limit in seconds (0 = none)");
    select->add_option("--out", select_out, "Solution JSON output (default stdout)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Price levels x methods -> SweepReport");
    ProblemFlags sweep_flags;
    std::string levels = "1:100", methods_arg = "pcbk,sbk,dars", format = "csv", sweep_out;
    sweep_flags.attach(sweep_cmd, false);
    sweep_cmd->add_option("--percents", levels, "Price levels: list and/or ranges a:b[:step]");
    sweep_cmd->add_option("--methods", methods_arg, "Comma-separated methods");
    sweep_cmd->add_option("--format", format, "csv, json or long")->check(CLI::IsMember({"csv", "json", "long"}));
    sweep_cmd->add_option("--out", sweep_out, "Report output (default stdout)");
    sweep_cmd->add_flag("--simplify", simplify, "Substitute g := x in the DARS model");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "SyntheticSpec -> instance files");
    SyntheticSpec spec;
    std::string output_dir = ".";
    simulate->add_option("--n", spec.n, "Number of requirements")->required();
    simulate->add_option("--vdl", spec.vdl, "Value dependency level");
    simulate->add_option("--nvdl", spec.nvdl, "Negative share of value dependencies");
    simulate->add_option("--pdl", spec.pdl, "Precedence dependency level");
    simulate->add_option("--npdl", spec.npdl, "Negative (conflict) share of precedence dependencies");
    simulate->add_option("--budget-fraction", spec.budget_fraction, "Budget as a fraction of total cost");
    simulate->add_option("--seed", spec.seed, "Random seed")->required();
    simulate->add_option("--output-dir", output_dir, "Directory for requirements.csv, constraints.json, vdg.csv");

    // bench
    auto* bench = app.add_subcommand("bench", "Runtime grid over synthetic instances");
    std::string n_list = "10,20,50", vdl_list = "0.05", nvdl_list = "0.2", pdl_list = "0.02", npdl_list = "0.2";
    std::string bench_method = "dars", bench_out;
    std::size_t seeds = 1;
    double bench_budget_fraction = 0.5;
    double bench_time_limit = 60.0;
    bench->add_option("--n", n_list, "Requirement counts");
    bench->add_option("--vdl", vdl_list, "VDL values");
    bench->add_option("--nvdl", nvdl_list, "NVDL values");
    bench->add_option("--pdl", pdl_list, "PDL values");
    bench->add_option("--npdl", npdl_list, "NPDL values");
    bench->add_option("--seeds", seeds, "Instances per grid cell (seeds 0..k-1)");
    bench->add_option("--budget-fraction", bench_budget_fraction, "Budget as a fraction of total cost");
    bench->add_option("--time-limit", bench_time_limit, "Per-instance time limit in seconds");
    bench->add_option("--method", bench_method, "Model to solve");
    bench->add_option("--out", bench_out, "Runtime CSV output (default stdout)");

    // export-lp
    auto* export_cmd = app.add_subcommand("export-lp", "Write the compiled model as an LP file");
    ProblemFlags export_flags;
    std::string lp_out = "model.lp", json_out;
    export_flags.attach(export_cmd, true);
    export_cmd->add_option("--method", method_name_arg, "bk, pcbk, sbk, dars or id");
    export_cmd->add_flag("--simplify", simplify, "Substitute g := x in the DARS model");
    export_cmd->add_option("--out", lp_out, "LP output ('-' for stdout)");
    export_cmd->add_option("--json", json_out, "Also write the model as JSON");

    std::vector<const char*> raw;
    for (const auto& a : argv) raw.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return success;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return success;
    } catch (const CLI::CallForVersion& e) {
        out << tool_version() << '\n';
        return success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }

    try {
        if (identify->parsed()) {
            const auto [a, b] = parse_cuts(cuts);
            const MembershipConfig mem{a, b};
            SignificanceConfig sig;
            sig.z_prime = z_prime;
            validate(mem);
            validate(sig);
            const PreferenceMatrix prefs = load(pref_path, [](std::istream& in) { return load_preference_matrix(in); });
            const CausalAnalysis analysis = compute_eells(prefs);
            const ValueDependencyGraph g = build_vdg(analysis, sig, mem);
            Sink sink(vdg_out, out, provenance);
            write_vdg(g, prefs.requirement_ids(), sink.stream());
            if (!report_out.empty()) {
                Sink report(report_out, out, provenance);
                auto& r = report.stream();
                r << "from,to,defined,eells,odds_ratio,lower,upper,significant,strength\n";
                for (const auto& p : identification_report(analysis, sig, mem))
                    r << prefs.requirement_ids()[p.i] << ',' << prefs.requirement_ids()[p.j] << ',' << int(p.defined) << ','
                      << text::format_double(p.eells) << ',' << text::format_double(p.significance.odds_ratio) << ','
                      << text::format_double(p.significance.lower) << ',' << text::format_double(p.significance.upper)
                      << ',' << int(p.significance.significant) << ',' << text::format_double(p.strength) << '\n';
            }
            return success;
        }

        if (resample_cmd->parsed()) {
            const PreferenceMatrix prefs = load(pref_path, [](std::istream& in) { return load_preference_matrix(in); });
            ResampleOptions opts;
            opts.initial_count = initial_count;
            opts.max_rounds = rounds;
            opts.tolerance = tolerance;
            opts.seed = seed;
            const ResampleOutcome outcome = resample(prefs, opts);
            Sink sink(samples_out, out, provenance);
            write_preference_matrix(sink.stream(), outcome.samples);
            nlohmann::json report{{"rounds", outcome.rounds},
                                  {"samples", outcome.samples.user_count()},
                                  {"converged", outcome.converged},
                                  {"max_mean_gap", outcome.report.max_mean_gap},
                                  {"max_covariance_gap", outcome.report.max_covariance_gap},
                                  {"psd_repaired", outcome.model.psd_repaired},
                                  {"repair_shift", outcome.model.repair_shift}};
            if (samples_out != "-") out << report.dump(2) << '\n';
            return success;
        }

        if (influence_cmd->parsed()) {
            const auto l = influence_flags.load_problem(false);
            const InfluenceMatrix inf = l.problem.influence ? *l.problem.influence : InfluenceMatrix::zero(l.ids.size());
            Sink sink(influence_out, out, provenance);
            write_influence(inf, l.ids, sink.stream());
            return success;
        }

        if (select->parsed()) {
            const Method method = parse_method(method_name_arg);
            const auto l = select_flags.load_problem(true);
            warn_bk(method, l, err);
            const LinearModel model = model_for(method, l, simplify);
            const Solution sol = solve(model, SolverOptions{node_limit, time_limit});
            std::optional<SelectionEvaluation> eval;
            if (!sol.x.empty()) {
                eval = l.problem.influence ? evaluate_selection(l.problem.requirements, *l.problem.influence, sol.x)
                                           : evaluate_selection(l.problem.requirements, sol.x);
            }
            SolutionJsonOptions jo;
            jo.include_timing = timing;
            jo.evaluation = eval ? &*eval : nullptr;
            Sink sink(select_out, out, provenance);
            sink.stream() << solution_json(sol, l.ids, jo) << '\n';
            return sol.status == SolveStatus::infeasible ? infeasible : success;
        }

        if (sweep_cmd->parsed()) {
            const auto l = sweep_flags.load_problem(false);
            std::vector<Method> methods;
            for (const auto& m : text::split_csv(methods_arg)) methods.push_back(parse_method(m));
            for (Method m : methods) warn_bk(m, l, err);
            const auto percents = parse_levels(levels);
            SweepOptions opts;
            opts.model.simplify = simplify;
            opts.subsets = l.subset_estimates;
            const SweepReport report = sweep(l.problem, percents, methods, opts);
            Sink sink(sweep_out, out, provenance);
            if (format == "csv")
                write_sweep_csv(report, sink.stream());
            else if (format == "json")
                write_sweep_json(report, sink.stream());
            else
                write_sweep_long(report, sink.stream());
            return success;
        }

        if (simulate->parsed()) {
            const SyntheticInstance inst = generate_synthetic(spec);
            const std::filesystem::path dir(output_dir);
            std::filesystem::create_directories(dir);
            const auto ids = ids_of(inst.problem.requirements);
            {
                Sink s((dir / "requirements.csv").string(), out, provenance);
                write_requirements(inst.problem.requirements, s.stream());
            }
            {
                Sink s((dir / "constraints.json").string(), out, provenance);
                write_constraints(inst.problem.precedence, ids, s.stream());
            }
            {
                Sink s((dir / "vdg.csv").string(), out, provenance);
                write_vdg(inst.vdg, ids, s.stream());
            }
            const auto v = vdl_nvdl(inst.vdg);
            const auto p = pdl_npdl(inst.problem.precedence);
            nlohmann::json summary{{"n", spec.n},
                                   {"budget", inst.problem.budget},
                                   {"mode", "cost"},
                                   {"vdl", v.level},
                                   {"nvdl", v.negative.value_or(0.0)},
                                   {"pdl", p.level},
                                   {"npdl", p.negative.value_or(0.0)}};
            out << summary.dump(2) << '\n';
            return success;
        }

        if (bench->parsed()) {
            const Method method = parse_method(bench_method);
            std::vector<SyntheticSpec> specs;
            for (double n : parse_levels(n_list))
                for (double vdl : parse_levels(vdl_list))
                    for (double nvdl : parse_levels(nvdl_list))
                        for (double pdl : parse_levels(pdl_list))
                            for (double npdl : parse_levels(npdl_list))
                                for (std::size_t s = 0; s < seeds; ++s) {
                                    SyntheticSpec sp;
                                    sp.n = static_cast<std::size_t>(n);
                                    sp.vdl = vdl;
                                    sp.nvdl = nvdl;
                                    sp.pdl = pdl;
                                    sp.npdl = npdl;
                                    sp.budget_fraction = bench_budget_fraction;
                                    sp.seed = s;
                                    specs.push_back(sp);
                                }
            SolverOptions so;
            so.time_limit = bench_time_limit;
            const auto rows = benchmark(specs, method, so);
            Sink sink(bench_out, out, provenance);
            write_bench_csv(rows, sink.stream());
            return success;
        }

        if (export_cmd->parsed()) {
            const Method method = parse_method(method_name_arg);
            const auto l = export_flags.load_problem(true);
            warn_bk(method, l, err);
            const LinearModel model = model_for(method, l, simplify);
            {
                Sink sink(lp_out, out, provenance, "\\");
                export_lp(model, sink.stream());
            }
            if (!json_out.empty()) {
                Sink sink(json_out, out, provenance);
                sink.stream() << model_to_json(model) << '\n';
            }
            return success;
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }
    return input_error;
}

} // namespace depsel::cli
