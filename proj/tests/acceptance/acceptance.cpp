// Runs every study and property suite at desk scale and prints one verdict
// line per acceptance criterion.
//
//   acceptance [--out DIR] [--workers N] [--xfail N]... [--strict]
//
// Exit status: with --strict, nonzero when any criterion is not PASS.
// Otherwise nonzero only when a verdict differs from expectation: a
// criterion fails that is not listed with --xfail, a listed one passes, or
// a criterion could not be evaluated.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "vnet/experiments/report.hpp"

using namespace vnet::experiments;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria 1-13"};
    std::string out_dir;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<int> xfail;
    bool strict = false;
    app.add_option("--out", out_dir, "also write the result CSVs here");
    app.add_option("--workers", workers)->check(CLI::PositiveNumber);
    app.add_option("--xfail", xfail, "criterion expected to fail");
    app.add_flag("--strict", strict);
    CLI11_PARSE(app, argc, argv);

    ResultBundle bundle;
    std::vector<ExperimentId> ids = studies();
    ids.insert(ids.end(), suites().begin(), suites().end());
    if (!out_dir.empty()) fs::create_directories(out_dir);
    for (auto id : ids) {
        const auto plan = default_plan(id);
        const auto t0 = std::chrono::steady_clock::now();
        PlanResult res;
        try {
            res = run_plan(plan, workers);
        } catch (const std::exception& e) {
            std::cerr << to_string(id) << " aborted: " << e.what() << '\n';
            continue;
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bundle.wall_s[to_string(id)] = wall;
        std::fprintf(stderr, "%-16s %4zu runs %6.1f s\n", to_string(id).c_str(), res.rows.size() + res.merkle.size(),
                     wall);
        if (!out_dir.empty()) {
            std::ofstream csv(fs::path(out_dir) / (to_string(id) + ".csv"));
            if (id == ExperimentId::Merkle) write_merkle_csv(csv, res.merkle);
            else write_csv(csv, res.rows);
        }
        bundle.rows.insert(bundle.rows.end(), res.rows.begin(), res.rows.end());
        bundle.merkle.insert(bundle.merkle.end(), res.merkle.begin(), res.merkle.end());
    }

    const auto results = evaluate_criteria(bundle);
    const int all_pass = emit_summary(std::cout, results);
    if (strict) return all_pass;

    const std::set<int> expected(xfail.begin(), xfail.end());
    int surprises = 0;
    for (const auto& r : results) {
        const bool want_fail = expected.count(r.number) > 0;
        if (r.verdict == Verdict::NotRun || (r.verdict == Verdict::Fail) != want_fail) {
            std::cout << "unexpected verdict for C" << r.number << ": " << to_string(r.verdict) << '\n';
            ++surprises;
        }
    }
    return surprises == 0 ? 0 : 1;
}
