#include "vnet/experiments/runner.hpp"

#include <atomic>
#include <cstdio>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "vnet/sim/world.hpp"

namespace vnet::experiments {

namespace {

struct Task {
    std::size_t variant = 0;
    std::size_t point = 0;
    int rep = 0;
};

bool keeps_qd(ExperimentId id) { return id == ExperimentId::GcOnOff || id == ExperimentId::GcCycle; }

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool q = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (q) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') cur += '"', ++i;
            else if (c == '"') q = false;
            else cur += c;
        } else if (c == '"') q = true;
        else if (c == ',') out.push_back(std::move(cur)), cur.clear();
        else cur += c;
    }
    out.push_back(std::move(cur));
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<MerkleRow> run_merkle(const ExperimentPlan& plan) {
    namespace ct = content;
    const auto& mp = plan.merkle;
    std::vector<MerkleRow> rows;

    const auto inv = ct::generate_corpus(mp.objects, mp.components_per_object, mp.files_per_component, plan.seed);
    const auto local = ct::build_tree(inv);
    std::vector<std::size_t> changes = mp.changes;
    if (changes.empty())
        for (std::size_t k = 1; k <= 50; ++k) changes.push_back(k);
    for (std::size_t k : changes) {
        if (k > local.file_count()) throw std::invalid_argument("merkle: more changes than files");
        auto copy = inv;
        std::mt19937_64 rng(run_seed(plan.seed, k, 0));
        ct::mutate_files(copy, k, rng);
        const auto remote = ct::build_tree(copy);
        const auto h = ct::verify(local, remote);
        const auto f = ct::flat_verify(local, remote);
        MerkleRow r;
        r.variant = "sweep";
        r.corpus_seed = plan.seed;
        r.files = local.file_count();
        r.changed_files = k;
        r.merkle_comparisons = h.comparisons;
        r.flat_comparisons = f.comparisons;
        r.oracle_comparisons = descent_oracle(local, remote);
        if (k == 1) r.path_cost = 1 + mp.objects + mp.components_per_object + mp.files_per_component;
        r.sets_equal = h.changed == f.changed;
        rows.push_back(r);
    }

    for (int t = 0; t < mp.equivalence_corpora; ++t) {
        std::mt19937_64 rng(run_seed(plan.seed, 100000 + static_cast<std::size_t>(t), 0));
        auto a = ct::generate_corpus(1 + rng() % 12, 1 + rng() % 5, 1 + rng() % 8, rng());
        const auto ta = ct::build_tree(a);
        const std::size_t total = ta.file_count();
        const std::size_t k = rng() % (total + 1);
        ct::mutate_files(a, k, rng);
        const auto tb = ct::build_tree(a);
        const auto h = ct::verify(ta, tb);
        const auto f = ct::flat_verify(ta, tb);
        MerkleRow r;
        r.variant = "equivalence";
        r.corpus_seed = run_seed(plan.seed, 100000 + static_cast<std::size_t>(t), 0);
        r.files = total;
        r.changed_files = k;
        r.merkle_comparisons = h.comparisons;
        r.flat_comparisons = f.comparisons;
        r.oracle_comparisons = descent_oracle(ta, tb);
        r.sets_equal = h.changed == f.changed;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

RunRow make_row(const sim::Metrics& m) {
    RunRow r;
    r.events_sent = m.events_sent;
    r.updates_delivered = m.updates_delivered;
    r.delivery_rate = m.delivery_rate();
    r.mean_latency_ms = m.mean_latency();
    r.p95_latency_ms = m.p95_latency();
    r.mean_qd = m.mean_qd();
    r.max_qd = m.qd_max;
    r.final_qd = m.qd_final;
    r.consensus_rate = m.p_sync();
    r.consensus_triggers = m.consensus_triggers;
    r.sync_delay_ms = m.sync_delay_ms();
    r.d_c_ms = m.d_c();
    r.d_m_ms = m.d_m();
    r.elections = m.elections;
    r.reconfigurations = m.reconfigurations;
    r.late_staged = m.late_staged;
    r.late_dropped = m.late_dropped;
    r.divergence = m.divergence;
    r.group_failed = m.group_failed;
    const auto& v = m.violations;
    r.violations = v.total();
    r.viol_prefix = v.prefix;
    r.viol_app_digest = v.app_digest;
    r.viol_gc = v.gc_unsafe;
    r.viol_omega = v.omega;
    r.viol_state_sync = v.state_sync;
    r.viol_decision = v.decision + v.priority + v.protocol_error;
    r.viol_leader = v.leader;
    r.viol_milestone = v.milestone;
    r.milestone_checks = m.milestone_checks;
    r.omega_checks = m.omega_checks;
    r.first_error = m.first_error;
    return r;
}

std::size_t descent_oracle(const content::ContentTree& a, const content::ContentTree& b) {
    std::size_t n = 1;
    if (a.inventory_hash == b.inventory_hash) return n;
    if (a.objects.size() != b.objects.size()) throw std::invalid_argument("descent_oracle: shapes differ");
    for (std::size_t i = 0; i < a.objects.size(); ++i) {
        ++n;
        const auto& oa = a.objects[i];
        const auto& ob = b.objects[i];
        if (oa.hash == ob.hash) continue;
        for (std::size_t j = 0; j < oa.components.size(); ++j) {
            ++n;
            if (oa.components[j].hash == ob.components[j].hash) continue;
            n += oa.components[j].files.size();
        }
    }
    return n;
}

PlanResult run_plan(const ExperimentPlan& plan, int workers, const Progress& progress) {
    PlanResult res;
    res.id = plan.id;
    if (plan.id == ExperimentId::Merkle) {
        res.merkle = run_merkle(plan);
        if (progress) progress(1, 1);
        return res;
    }

    const auto points = expand_points(plan);
    std::vector<Variant> variants = plan.variants;
    if (variants.empty()) variants.push_back(Variant{"base", {}});

    std::vector<Task> tasks;
    for (std::size_t v = 0; v < variants.size(); ++v)
        for (std::size_t p = 0; p < points.size(); ++p)
            for (int r = 0; r < plan.repetitions; ++r) tasks.push_back(Task{v, p, r});

    // Scenarios are built up front so a bad override fails before any run.
    std::vector<sim::SimScenario> scenarios;
    scenarios.reserve(tasks.size());
    for (const auto& t : tasks) {
        sim::SimScenario sc = plan.base;
        sc.seed = run_seed(plan.seed, points[t.point].index, t.rep);
        for (const auto& [k, val] : variants[t.variant].set) sim::set_scenario_key(sc, k, val);
        for (const auto& [k, val] : points[t.point].set) sim::set_scenario_key(sc, k, val);
        sc.validate();
        scenarios.push_back(std::move(sc));
    }

    std::vector<sim::Metrics> out(tasks.size());
    std::atomic<std::size_t> next{0}, done{0};
    std::mutex report_mu;
    std::exception_ptr error;
    auto work = [&] {
        for (std::size_t i; (i = next++) < tasks.size();) {
            try {
                out[i] = sim::run(scenarios[i]);
            } catch (...) {
                std::lock_guard lock(report_mu);
                if (!error) error = std::current_exception();
            }
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard lock(report_mu);
                progress(d, tasks.size());
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& t = tasks[i];
        const auto& sc = scenarios[i];
        RunRow r = make_row(out[i]);
        r.experiment = to_string(plan.id);
        r.variant = variants[t.variant].label;
        r.sweep_key = points[t.point].key;
        r.sweep_value = points[t.point].value;
        r.rep = t.rep;
        r.seed = sc.seed;
        r.strategy = sim::to_string(sc.strategy);
        r.group_size = sc.group_size;
        r.p_loss = sc.net.p_loss;
        res.rows.push_back(std::move(r));
        if (keeps_qd(plan.id))
            for (const auto& [ts, q] : out[i].qd_series)
                res.qd.push_back(QdSample{variants[t.variant].label, points[t.point].value, t.rep, ts, q});
    }
    return res;
}

// --- CSV ---------------------------------------------------------------------

std::string csv_header() {
    return "experiment,variant,sweep_key,sweep_value,rep,seed,strategy,group_size,p_loss,"
           "events_sent,updates_delivered,delivery_rate,mean_latency_ms,p95_latency_ms,"
           "mean_qd,max_qd,final_qd,consensus_rate,consensus_triggers,sync_delay_ms,d_c_ms,d_m_ms,"
           "elections,reconfigurations,late_staged,late_dropped,divergence,group_failed,"
           "violations,viol_prefix,viol_app_digest,viol_gc,viol_omega,viol_state_sync,viol_decision,"
           "viol_leader,viol_milestone,milestone_checks,omega_checks,first_error";
}

void write_csv(std::ostream& out, const std::vector<RunRow>& rows) {
    out << csv_header() << '\n';
    for (const auto& r : rows) {
        out << quote(r.experiment) << ',' << quote(r.variant) << ',' << quote(r.sweep_key) << ','
            << quote(r.sweep_value) << ',' << r.rep << ',' << r.seed << ',' << r.strategy << ',' << r.group_size
            << ',' << num(r.p_loss) << ',' << r.events_sent << ',' << r.updates_delivered << ','
            << num(r.delivery_rate) << ',' << num(r.mean_latency_ms) << ',' << num(r.p95_latency_ms) << ','
            << num(r.mean_qd) << ',' << r.max_qd << ',' << r.final_qd << ',' << num(r.consensus_rate) << ','
            << r.consensus_triggers << ',' << num(r.sync_delay_ms) << ',' << num(r.d_c_ms) << ','
            << num(r.d_m_ms) << ',' << r.elections << ',' << r.reconfigurations << ',' << r.late_staged << ','
            << r.late_dropped << ',' << r.divergence << ',' << (r.group_failed ? 1 : 0) << ',' << r.violations
            << ',' << r.viol_prefix << ',' << r.viol_app_digest << ',' << r.viol_gc << ',' << r.viol_omega << ','
            << r.viol_state_sync << ',' << r.viol_decision << ',' << r.viol_leader << ',' << r.viol_milestone
            << ',' << r.milestone_checks << ',' << r.omega_checks << ',' << quote(r.first_error) << '\n';
    }
}

std::vector<RunRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != csv_header()) throw std::runtime_error("results csv: unexpected header");
    std::vector<RunRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 40) throw std::runtime_error("results csv: expected 40 fields, got " + std::to_string(f.size()));
        std::size_t i = 0;
        auto s = [&] { return f[i++]; };
        auto u = [&] { return std::stoull(f[i++]); };
        auto d = [&] { return std::stod(f[i++]); };
        RunRow r;
        r.experiment = s();
        r.variant = s();
        r.sweep_key = s();
        r.sweep_value = s();
        r.rep = static_cast<int>(u());
        r.seed = u();
        r.strategy = s();
        r.group_size = static_cast<int>(u());
        r.p_loss = d();
        r.events_sent = u();
        r.updates_delivered = u();
        r.delivery_rate = d();
        r.mean_latency_ms = d();
        r.p95_latency_ms = d();
        r.mean_qd = d();
        r.max_qd = u();
        r.final_qd = u();
        r.consensus_rate = d();
        r.consensus_triggers = u();
        r.sync_delay_ms = d();
        r.d_c_ms = d();
        r.d_m_ms = d();
        r.elections = u();
        r.reconfigurations = u();
        r.late_staged = u();
        r.late_dropped = u();
        r.divergence = u();
        r.group_failed = u() != 0;
        r.violations = u();
        r.viol_prefix = u();
        r.viol_app_digest = u();
        r.viol_gc = u();
        r.viol_omega = u();
        r.viol_state_sync = u();
        r.viol_decision = u();
        r.viol_leader = u();
        r.viol_milestone = u();
        r.milestone_checks = u();
        r.omega_checks = u();
        r.first_error = s();
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string merkle_csv_header() {
    return "variant,corpus_seed,files,changed_files,merkle_comparisons,flat_comparisons,oracle_comparisons,"
           "path_cost,sets_equal";
}

void write_merkle_csv(std::ostream& out, const std::vector<MerkleRow>& rows) {
    out << merkle_csv_header() << '\n';
    for (const auto& r : rows)
        out << r.variant << ',' << r.corpus_seed << ',' << r.files << ',' << r.changed_files << ','
            << r.merkle_comparisons << ',' << r.flat_comparisons << ',' << r.oracle_comparisons << ','
            << r.path_cost << ',' << (r.sets_equal ? 1 : 0) << '\n';
}

std::vector<MerkleRow> read_merkle_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != merkle_csv_header())
        throw std::runtime_error("merkle csv: unexpected header");
    std::vector<MerkleRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 9) throw std::runtime_error("merkle csv: expected 9 fields");
        MerkleRow r;
        r.variant = f[0];
        r.corpus_seed = std::stoull(f[1]);
        r.files = std::stoull(f[2]);
        r.changed_files = std::stoull(f[3]);
        r.merkle_comparisons = std::stoull(f[4]);
        r.flat_comparisons = std::stoull(f[5]);
        r.oracle_comparisons = std::stoull(f[6]);
        r.path_cost = std::stoull(f[7]);
        r.sets_equal = f[8] == "1";
        rows.push_back(r);
    }
    return rows;
}

void write_qd_csv(std::ostream& out, const std::vector<QdSample>& rows) {
    out << "variant,sweep_value,rep,t_ms,qd\n";
    for (const auto& r : rows)
        out << quote(r.variant) << ',' << quote(r.sweep_value) << ',' << r.rep << ',' << num(r.t_ms) << ',' << r.qd
            << '\n';
}

}  // namespace vnet::experiments
