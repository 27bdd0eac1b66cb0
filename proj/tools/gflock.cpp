// gflock: flocking-navigation experiments from the command line.
//
//   simulate  run one ruleset, export trajectory/events/metrics/uniformity
//   optimize  evolve a ruleset on a scenario, export rules/history/checkpoint
//   compare   two rulesets side by side across agent-count presets
//   replay    recompute metrics from an exported trajectory and verify them
//
// Exit codes: 0 ok, 2 bad configuration, 3 runtime failure, 4 replay mismatch.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gflock/gflock.hpp"

namespace fs = std::filesystem;
using namespace gflock;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitReplayMismatch = 4;

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) throw config_error("cannot write '" + tmp.string() + "'");
        out << content;
    }
    fs::rename(tmp, path);
}

std::string uniformity_csv(const EpisodeLog& log) {
    std::ostringstream os;
    os << "step,uniformity\n";
    const std::vector<double> u = uniformity_series(log);
    for (std::size_t t = 0; t < u.size(); ++t) os << t << ',' << format_double(u[t]) << '\n';
    return os.str();
}

struct CommonArgs {
    std::string scenario = "gauntlet";
    std::string rules = "bream";
    std::string rules_b;
    std::uint64_t seed = 42;
    int seeds = 1;
    int agents = 0;  // 0 = scenario default
    std::string out;
    std::string fitness = "robust";
};

FitnessConfig fitness_config(const std::string& variant) {
    FitnessConfig fc;
    if (variant == "literal")
        fc.variant = FitnessConfig::Variant::literal;
    else if (variant == "robust")
        fc.variant = FitnessConfig::Variant::robust;
    else
        throw config_error("fitness: expected 'literal' or 'robust', got '" + variant + "'");
    return fc;
}

void add_common(CLI::App* cmd, CommonArgs& a, bool with_rules_b) {
    cmd->add_option("--scenario", a.scenario, "builtin name (gauntlet, open) or JSON path");
    cmd->add_option("--rules", a.rules, "ruleset: builtin name (bream, expert) or JSON path");
    if (with_rules_b)
        cmd->add_option("--rules-b", a.rules_b, "second ruleset for comparison");
    cmd->add_option("--seed", a.seed, "base seed");
    cmd->add_option("--seeds", a.seeds, "number of consecutive seeds")->check(CLI::PositiveNumber);
    cmd->add_option("--agents", a.agents, "agent count override")->check(CLI::PositiveNumber);
    cmd->add_option("--out", a.out, "output directory")->envname("GFLOCK_OUT");
    cmd->add_option("--fitness", a.fitness, "fitness variant: robust (default) or literal");
}

fs::path require_out(const CommonArgs& a) {
    if (a.out.empty()) throw config_error("--out: output directory required (flag or GFLOCK_OUT)");
    return fs::path(a.out);
}

int cmd_simulate(const CommonArgs& a) {
    const Scenario scenario = load_scenario(a.scenario, a.agents);
    const RuleSet rules = load_ruleset(a.rules);
    const FitnessConfig fc = fitness_config(a.fitness);
    const fs::path out = require_out(a);
    for (int k = 0; k < a.seeds; ++k) {
        const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(k);
        const EpisodeLog log = run_episode(scenario, rules, seed);
        const MetricsReport report = metrics_report(log, fc);
        const fs::path dir = a.seeds == 1 ? out : out / ("seed_" + std::to_string(seed));
        std::ostringstream traj, events;
        write_trajectory_csv(log, traj);
        write_events_csv(log, events);
        write_file_atomic(dir / "trajectory.csv", traj.str());
        write_file_atomic(dir / "events.csv", events.str());
        write_file_atomic(dir / "metrics.json", to_json(report).dump(2) + "\n");
        write_file_atomic(dir / "uniformity.csv", uniformity_csv(log));
        std::cout << "seed " << seed << ": steps=" << log.steps.size() - 1
                  << " arrived=" << arrived_count(log)
                  << " death_rate=" << format_double(report.death_rate)
                  << " fitness=" << format_double(report.fitness) << "\n";
    }
    return kExitOk;
}

struct OptimizeArgs {
    CommonArgs common;
    int generations = 30;
    int population = 20;
    int elites = 4;
    double mutation_rate = 0.1;
    double sigma = 0.1;
    int episodes = 3;
    bool no_expert = false;
    std::string resume;
    int threads = 0;
};

int cmd_optimize(const OptimizeArgs& oa) {
    const CommonArgs& a = oa.common;
    GAConfig cfg;
    cfg.scenario = load_scenario(a.scenario, a.agents);
    cfg.generations = oa.generations;
    cfg.population_size = oa.population;
    cfg.elite_count = oa.elites;
    cfg.mutation_rate = oa.mutation_rate;
    cfg.mutation_sigma = oa.sigma;
    cfg.episodes_per_eval = oa.episodes;
    cfg.master_seed = a.seed;
    cfg.threads = oa.threads;
    if (!oa.no_expert) cfg.expert = load_ruleset(a.rules == "bream" ? "expert" : a.rules);
    validate_ga_config(cfg);
    const fs::path out = require_out(a);
    fs::create_directories(out);

    EvolveOptions opts;
    opts.checkpoint_path = (out / "checkpoint.json").string();
    opts.resume_from = oa.resume;
    opts.on_generation = [](const GenerationStats& g) {
        std::cout << "generation " << g.generation << " best " << format_double(g.best)
                  << " mean " << format_double(g.mean) << "\n";
    };
    const EvolveResult result = evolve(cfg, opts);

    std::ostringstream history;
    history << "generation,best,mean\n";
    for (const GenerationStats& h : result.history)
        history << h.generation << ',' << format_double(h.best) << ','
                << format_double(h.mean) << '\n';
    write_file_atomic(out / "rules_opt.json", to_json(result.best_rules).dump(2) + "\n");
    write_file_atomic(out / "history.csv", history.str());
    std::cout << "best fitness " << format_double(result.best_fitness) << ", rules written to "
              << (out / "rules_opt.json").string() << "\n";
    return kExitOk;
}

int cmd_compare(const CommonArgs& a) {
    if (a.rules_b.empty()) throw config_error("--rules-b: second ruleset required for compare");
    const RuleSet rules_a = load_ruleset(a.rules);
    const RuleSet rules_b = load_ruleset(a.rules_b);
    const FitnessConfig fc = fitness_config(a.fitness);
    const fs::path out = require_out(a);
    std::vector<int> presets = a.agents > 0 ? std::vector<int>{a.agents}
                                            : std::vector<int>{20, 60, 100};

    const auto mean_report = [&](const RuleSet& rules, const Scenario& s) {
        MetricsReport acc;
        for (int k = 0; k < a.seeds; ++k) {
            const MetricsReport r =
                metrics_report(run_episode(s, rules, a.seed + static_cast<std::uint64_t>(k)), fc);
            acc.aggregation += r.aggregation;
            acc.anisotropy += r.anisotropy;
            acc.average_time += r.average_time;
            acc.uniformity += r.uniformity;
            acc.death_rate += r.death_rate;
            acc.stability_variance += r.stability_variance;
            acc.fitness += r.fitness;
        }
        const double n = a.seeds;
        return MetricsReport{acc.aggregation / n, acc.anisotropy / n, acc.average_time / n,
                             acc.uniformity / n,  acc.death_rate / n,
                             acc.stability_variance / n, acc.fitness / n};
    };

    std::vector<std::string> labels;
    std::vector<MetricsReport> columns;
    nlohmann::json results = nlohmann::json::object();
    for (int n : presets) {
        const Scenario s = load_scenario(a.scenario, n);
        const MetricsReport ra = mean_report(rules_a, s);
        const MetricsReport rb = mean_report(rules_b, s);
        labels.push_back("A@" + std::to_string(n));
        columns.push_back(ra);
        labels.push_back("B@" + std::to_string(n));
        columns.push_back(rb);
        results[std::to_string(n)] = {{"A", to_json(ra)}, {"B", to_json(rb)}};
    }
    std::string table = "A = " + a.rules + "\nB = " + a.rules_b + "\n";
    table += render_comparison_table(labels, columns);
    const nlohmann::json j{
        {"rules_a", a.rules},  {"rules_b", a.rules_b}, {"scenario", a.scenario},
        {"seed", a.seed},      {"seeds", a.seeds},     {"presets", presets},
        {"fitness", a.fitness}, {"results", results},
    };
    write_file_atomic(out / "comparison.txt", table);
    write_file_atomic(out / "comparison.json", j.dump(2) + "\n");
    std::cout << table;
    return kExitOk;
}

struct ReplayArgs {
    CommonArgs common;
    std::string trajectory;
    std::string metrics;
};

int cmd_replay(const ReplayArgs& ra) {
    const CommonArgs& a = ra.common;
    const Scenario scenario = load_scenario(a.scenario, a.agents);
    const FitnessConfig fc = fitness_config(a.fitness);
    const fs::path out = require_out(a);
    const fs::path traj_path = ra.trajectory.empty() ? out / "trajectory.csv" : fs::path(ra.trajectory);
    const fs::path metrics_path = ra.metrics.empty() ? out / "metrics.json" : fs::path(ra.metrics);

    std::ifstream traj_in(traj_path);
    if (!traj_in) throw config_error("replay: cannot open '" + traj_path.string() + "'");
    const EpisodeLog log = read_trajectory_csv(traj_in, scenario.dt, scenario.max_steps);

    std::ifstream metrics_in(metrics_path);
    if (!metrics_in) throw config_error("replay: cannot open '" + metrics_path.string() + "'");
    nlohmann::json stored_json;
    try {
        metrics_in >> stored_json;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("replay: bad metrics JSON: " + std::string(e.what()));
    }
    const MetricsReport stored = metrics_report_from_json(stored_json);
    const MetricsReport recomputed = metrics_report(log, fc);

    // plot-ready long format of the per-step series
    std::ostringstream series;
    series << "step,metric,value\n";
    const std::vector<double> u = uniformity_series(log);
    for (std::size_t t = 0; t < u.size(); ++t)
        series << t << ",uniformity," << format_double(u[t]) << '\n';
    std::size_t step_index = 0;
    for (const StepSnapshot& snap : log.steps) {
        std::vector<Vec2> active;
        for (std::size_t i = 0; i < snap.statuses.size(); ++i)
            if (snap.statuses[i] == AgentStatus::active) active.push_back(snap.positions[i]);
        if (!active.empty())
            series << step_index << ",gamma," << format_double(gamma_t(active)) << '\n';
        ++step_index;
    }
    write_file_atomic(out / "replay_series.csv", series.str());

    const struct {
        const char* name;
        double MetricsReport::* field;
    } fields[] = {
        {"aggregation", &MetricsReport::aggregation},
        {"anisotropy", &MetricsReport::anisotropy},
        {"average_time", &MetricsReport::average_time},
        {"uniformity", &MetricsReport::uniformity},
        {"death_rate", &MetricsReport::death_rate},
        {"stability_variance", &MetricsReport::stability_variance},
        {"fitness", &MetricsReport::fitness},
    };
    for (const auto& f : fields) {
        const double diff = std::abs(stored.*f.field - recomputed.*f.field);
        if (!(diff <= 1e-9)) {
            std::cerr << "replay mismatch: metric '" << f.name << "' stored "
                      << format_double(stored.*f.field) << " recomputed "
                      << format_double(recomputed.*f.field) << "\n";
            return kExitReplayMismatch;
        }
    }
    std::cout << "replay ok: all metrics match within 1e-9\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flocking-navigation simulator and rule optimizer"};
    app.require_subcommand(1);

    CommonArgs sim_args;
    CLI::App* sim = app.add_subcommand("simulate", "run episodes and export artifacts");
    add_common(sim, sim_args, false);

    OptimizeArgs opt_args;
    CLI::App* opt = app.add_subcommand("optimize", "evolve a ruleset");
    add_common(opt, opt_args.common, false);
    opt->add_option("--generations", opt_args.generations, "generation count");
    opt->add_option("--population", opt_args.population, "population size");
    opt->add_option("--elites", opt_args.elites, "elites kept per generation");
    opt->add_option("--mutation-rate", opt_args.mutation_rate, "per-gene mutation probability");
    opt->add_option("--sigma", opt_args.sigma, "mutation step stddev");
    opt->add_option("--episodes", opt_args.episodes, "episodes per fitness evaluation");
    opt->add_flag("--no-expert", opt_args.no_expert, "start from a fully random population");
    opt->add_option("--resume", opt_args.resume, "checkpoint file to resume from");
    opt->add_option("--threads", opt_args.threads, "evaluation threads (0 = hardware)");

    CommonArgs cmp_args;
    cmp_args.seed = 1000;
    cmp_args.seeds = 5;
    CLI::App* cmp = app.add_subcommand("compare", "two rulesets across agent-count presets");
    add_common(cmp, cmp_args, true);

    ReplayArgs rep_args;
    CLI::App* rep = app.add_subcommand("replay", "recompute and verify exported metrics");
    add_common(rep, rep_args.common, false);
    rep->add_option("--trajectory", rep_args.trajectory, "trajectory CSV (default <out>/trajectory.csv)");
    rep->add_option("--metrics", rep_args.metrics, "metrics JSON (default <out>/metrics.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (opt->parsed()) return cmd_optimize(opt_args);
        if (cmp->parsed()) return cmd_compare(cmp_args);
        if (rep->parsed()) return cmd_replay(rep_args);
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const compatibility_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
