// vnet: run experiment plans, compare against closed forms, summarize.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "vnet/experiments/report.hpp"
#include "vnet/sim/scenario.hpp"
#include "vnet/sim/world.hpp"

namespace fs = std::filesystem;
using namespace vnet;
using namespace vnet::experiments;

namespace {

std::string results_file(const fs::path& dir, ExperimentId id) { return (dir / (to_string(id) + ".csv")).string(); }

std::map<std::string, double> read_timings(const fs::path& dir) {
    std::map<std::string, double> t;
    std::ifstream in(dir / "timings.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto c = line.find(',');
        if (c != std::string::npos) t[line.substr(0, c)] = std::stod(line.substr(c + 1));
    }
    return t;
}

void write_timings(const fs::path& dir, const std::map<std::string, double>& t) {
    std::ofstream out(dir / "timings.csv");
    out << "experiment,wall_s\n";
    for (const auto& [k, v] : t) out << k << ',' << v << '\n';
}

ResultBundle load_results(const fs::path& dir) {
    ResultBundle b;
    for (auto ids : {studies(), suites()}) {
        for (auto id : ids) {
            std::ifstream in(results_file(dir, id));
            if (!in) continue;
            if (id == ExperimentId::Merkle) b.merkle = read_merkle_csv(in);
            else {
                auto rows = read_csv(in);
                b.rows.insert(b.rows.end(), rows.begin(), rows.end());
            }
        }
    }
    b.wall_s = read_timings(dir);
    return b;
}

std::vector<ExperimentId> expand_ids(const std::vector<std::string>& names) {
    std::vector<ExperimentId> out;
    for (const auto& n : names) {
        if (n == "all" || n == "studies") out.insert(out.end(), studies().begin(), studies().end());
        if (n == "suites" || n == "all") out.insert(out.end(), suites().begin(), suites().end());
        if (n != "all" && n != "studies" && n != "suites") out.push_back(parse_experiment(n));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Replica-group simulation experiments"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run experiment plans and write CSVs");
    std::vector<std::string> exp_names, plan_files;
    std::string out_dir = "results";
    std::uint64_t seed = 0;
    bool full = false, quiet = false;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    run->add_option("-e,--experiment", exp_names, "E-*/S-* id, 'studies', 'suites' or 'all'");
    run->add_option("--plan", plan_files, "plan file")->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "base seed (overrides the plan)");
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--full", full, "full scale (9000 events per client)");
    run->add_option("--workers", workers, "parallel simulations")->check(CLI::PositiveNumber);
    run->add_flag("-q,--quiet", quiet);

    // compare
    auto* cmp = app.add_subcommand("compare", "closed-form vs simulated delay and loss");
    std::string cmp_dir = "results";
    cmp->add_option("--out", cmp_dir, "results directory");

    // summary
    auto* sum = app.add_subcommand("summary", "pass/fail per acceptance criterion");
    std::string sum_dir = "results";
    sum->add_option("--out", sum_dir, "results directory");

    // simulate
    auto* simc = app.add_subcommand("simulate", "run one scenario and print its metrics");
    std::string scenario_file;
    std::vector<std::string> sets;
    simc->add_option("--scenario", scenario_file, "scenario file")->check(CLI::ExistingFile);
    simc->add_option("--set", sets, "key=value override");
    simc->add_option("--seed", seed, "seed");

    // merkle
    auto* mk = app.add_subcommand("merkle", "Merkle vs flat verification on a generated corpus");
    std::size_t objects = 200, comps = 5, files = 5;
    std::vector<std::size_t> changes;
    std::uint64_t corpus_seed = 1;
    mk->add_option("--objects", objects);
    mk->add_option("--components-per-object", comps);
    mk->add_option("--files-per-component", files);
    mk->add_option("--changes", changes, "changed-file counts (default 1..50)");
    mk->add_option("--seed", corpus_seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::vector<ExperimentPlan> plans;
            for (const auto& f : plan_files) plans.push_back(load_plan(f, full));
            for (auto id : expand_ids(exp_names)) plans.push_back(default_plan(id, full));
            if (plans.empty()) {
                std::cerr << "run: give --experiment or --plan\n";
                return 2;
            }
            fs::create_directories(out_dir);
            auto timings = read_timings(out_dir);
            for (auto& p : plans) {
                if (run->count("--seed")) p.seed = seed;
                const std::string name = to_string(p.id);
                if (!quiet) std::cerr << name << " ...\n";
                const auto t0 = std::chrono::steady_clock::now();
                const auto res = run_plan(p, workers);
                const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                timings[name] = wall;
                std::ofstream(fs::path(out_dir) / (name + ".plan")) << format_plan(p);
                std::ofstream csv(results_file(out_dir, p.id));
                if (p.id == ExperimentId::Merkle) write_merkle_csv(csv, res.merkle);
                else write_csv(csv, res.rows);
                if (!res.qd.empty()) {
                    std::ofstream q(fs::path(out_dir) / (name + "_qd.csv"));
                    write_qd_csv(q, res.qd);
                }
                if (!quiet) std::fprintf(stderr, "%s: %zu rows in %.1f s\n", name.c_str(),
                                         res.rows.size() + res.merkle.size(), wall);
            }
            write_timings(out_dir, timings);
            return 0;
        }
        if (cmp->parsed()) {
            const auto b = load_results(cmp_dir);
            const auto rows = compare_with_closed_form(b.rows);
            std::ofstream f(fs::path(cmp_dir) / "closed_form.csv");
            write_compare_csv(f, rows);
            write_compare_csv(std::cout, rows);
            return 0;
        }
        if (sum->parsed()) {
            const auto b = load_results(sum_dir);
            return emit_summary(std::cout, evaluate_criteria(b));
        }
        if (simc->parsed()) {
            sim::SimScenario sc;
            if (!scenario_file.empty()) {
                std::ifstream in(scenario_file);
                sc = sim::parse_scenario(in);
            }
            for (const auto& kv : sets) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value");
                sim::set_scenario_key(sc, kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (simc->count("--seed")) sc.seed = seed;
            sc.validate();
            const auto m = sim::run(sc);
            auto row = make_row(m);
            row.experiment = "simulate";
            row.strategy = sim::to_string(sc.strategy);
            row.seed = sc.seed;
            row.group_size = sc.group_size;
            row.p_loss = sc.net.p_loss;
            write_csv(std::cout, {row});
            return m.violations.total() == 0 ? 0 : 1;
        }
        if (mk->parsed()) {
            ExperimentPlan p = default_plan(ExperimentId::Merkle);
            p.seed = corpus_seed;
            p.merkle.objects = objects;
            p.merkle.components_per_object = comps;
            p.merkle.files_per_component = files;
            p.merkle.changes = changes;
            p.merkle.equivalence_corpora = 0;
            const auto res = run_plan(p);
            std::cout << "changed_files,merkle_comparisons,flat_comparisons\n";
            for (const auto& r : res.merkle)
                std::cout << r.changed_files << ',' << r.merkle_comparisons << ',' << r.flat_comparisons << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
