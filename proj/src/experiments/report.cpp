#include "vnet/experiments/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "vnet/sim/closed_form.hpp"

namespace vnet::experiments {

namespace {

using Field = std::function<double(const RunRow&)>;

std::vector<const RunRow*> select(const std::vector<RunRow>& rows, const std::string& exp,
                                  const std::string& variant = {}, const std::string& value = {}) {
    std::vector<const RunRow*> out;
    for (const auto& r : rows)
        if (r.experiment == exp && (variant.empty() || r.variant == variant) &&
            (value.empty() || r.sweep_value == value))
            out.push_back(&r);
    return out;
}

double mean(const std::vector<const RunRow*>& rs, const Field& f) {
    if (rs.empty()) return std::nan("");
    double s = 0;
    for (const auto* r : rs) s += f(*r);
    return s / static_cast<double>(rs.size());
}

double sum(const std::vector<const RunRow*>& rs, const Field& f) {
    double s = 0;
    for (const auto* r : rs) s += f(*r);
    return s;
}

// Values of the sweep in first-seen order.
std::vector<std::string> sweep_values(const std::vector<const RunRow*>& rs) {
    std::vector<std::string> out;
    for (const auto* r : rs)
        if (std::find(out.begin(), out.end(), r->sweep_value) == out.end()) out.push_back(r->sweep_value);
    return out;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

CriterionResult not_run(int n, const char* title, const std::string& threshold, const std::string& missing) {
    return CriterionResult{n, title, Verdict::NotRun, "missing " + missing, threshold};
}

CriterionResult decide(int n, const char* title, bool ok, std::string measured, std::string threshold) {
    return CriterionResult{n, title, ok ? Verdict::Pass : Verdict::Fail, std::move(measured), std::move(threshold)};
}

const Field kDelivery = [](const RunRow& r) { return r.delivery_rate; };
const Field kLatency = [](const RunRow& r) { return r.mean_latency_ms; };

CriterionResult c1(const ResultBundle& b) {
    const char* title = "total order and replica synchronization";
    const std::string thr = ">= 100 churn runs, 0 prefix/digest violations, <= 300 s";
    const auto rs = select(b.rows, "S-safety");
    if (rs.empty()) return not_run(1, title, thr, "S-safety");
    const double viol =
        sum(rs, [](const RunRow& r) { return double(r.viol_prefix + r.viol_app_digest + r.viol_decision); });
    const double reconf = sum(rs, [](const RunRow& r) { return double(r.reconfigurations); });
    const double failed = sum(rs, [](const RunRow& r) { return r.group_failed ? 1.0 : 0.0; });
    std::ostringstream m;
    m << rs.size() << " runs, " << viol << " violations, " << reconf << " reconfigurations, " << failed
      << " group failures";
    bool time_ok = true;
    if (auto it = b.wall_s.find("S-safety"); it != b.wall_s.end()) {
        m << ", " << fmt("%.1f s", it->second);
        time_ok = it->second <= 300.0;
    }
    return decide(1, title, rs.size() >= 100 && viol == 0 && reconf > 0 && time_ok, m.str(), thr);
}

CriterionResult c2(const ResultBundle& b) {
    const char* title = "GC safety";
    const std::string thr = "0 slots pruned beyond a live replica's applied marker";
    const auto rs = select(b.rows, "S-safety");
    if (rs.empty()) return not_run(2, title, thr, "S-safety");
    const double viol = sum(rs, [](const RunRow& r) { return double(r.viol_gc); });
    std::ostringstream m;
    m << rs.size() << " runs, " << viol << " unsafe prunes";
    return decide(2, title, viol == 0, m.str(), thr);
}

CriterionResult c3(const ResultBundle& b) {
    const char* title = "consensus agreement after leader crash";
    const std::string thr = "50 runs, each with an election, 0 state/leader/decision violations";
    const auto rs = select(b.rows, "S-crash-leader");
    if (rs.empty()) return not_run(3, title, thr, "S-crash-leader");
    std::size_t with_election = 0;
    double viol = 0;
    for (const auto* r : rs) {
        with_election += r->elections > 0;
        viol += double(r->viol_state_sync + r->viol_leader + r->viol_decision + r->viol_prefix);
    }
    std::ostringstream m;
    m << rs.size() << " runs, " << with_election << " with an election, " << viol << " violations";
    return decide(3, title, rs.size() >= 50 && with_election == rs.size() && viol == 0, m.str(), thr);
}

CriterionResult c4(const ResultBundle& b) {
    const char* title = "window agreement";
    const std::string thr = "0 per-cycle window mismatches";
    const auto rs = select(b.rows, "S-safety");
    if (rs.empty()) return not_run(4, title, thr, "S-safety");
    const double viol = sum(rs, [](const RunRow& r) { return double(r.viol_omega); });
    const double checks = sum(rs, [](const RunRow& r) { return double(r.omega_checks); });
    std::ostringstream m;
    m << checks << " cycle checks, " << viol << " mismatches";
    return decide(4, title, viol == 0 && checks > 0, m.str(), thr);
}

CriterionResult c5(const ResultBundle& b) {
    const char* title = "update delivery vs drop";
    const std::string thr = "fast/consensus within 0.05 of (1-p^n)^2, PB within 0.05 of (1-p)^2, fast > PB";
    const auto all = select(b.rows, "E-delivery-drop");
    if (all.empty()) return not_run(5, title, thr, "E-delivery-drop");
    bool ok = true;
    std::ostringstream m;
    for (const char* p : {"0.3", "0.5", "0.7"}) {
        const auto fast = select(b.rows, "E-delivery-drop", "fast", p);
        const auto cons = select(b.rows, "E-delivery-drop", "consensus_total_order", p);
        const auto pb = select(b.rows, "E-delivery-drop", "primary_backup", p);
        if (fast.empty() || cons.empty() || pb.empty()) return not_run(5, title, thr, std::string("p_loss ") + p);
        const double pl = std::stod(p);
        const int n = fast.front()->group_size;
        const double rep = std::pow(1 - std::pow(pl, n), 2), single = std::pow(1 - pl, 2);
        const double f = mean(fast, kDelivery), c = mean(cons, kDelivery), q = mean(pb, kDelivery);
        ok = ok && std::abs(f - rep) <= 0.05 && std::abs(c - rep) <= 0.05 && std::abs(q - single) <= 0.05 && f > q;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%sp=%s fast %.3f cons %.3f (want %.3f) pb %.3f (want %.3f)",
                      m.tellp() > 0 ? "; " : "", p, f, c, rep, q, single);
        m << buf;
    }
    return decide(5, title, ok, m.str(), thr);
}

CriterionResult c6(const ResultBundle& b) {
    const char* title = "latency ordering";
    const std::string thr = "fast <= 1.15 PB and <= 0.8 consensus at sigma 50; fast rising in sigma";
    const auto all = select(b.rows, "E-latency-jitter", "fast");
    if (all.empty()) return not_run(6, title, thr, "E-latency-jitter");
    const auto fast = select(b.rows, "E-latency-jitter", "fast", "50");
    const auto pb = select(b.rows, "E-latency-jitter", "primary_backup", "50");
    const auto cons = select(b.rows, "E-latency-jitter", "consensus_total_order", "50");
    if (fast.empty() || pb.empty() || cons.empty()) return not_run(6, title, thr, "sigma 50 rows");
    const double f = mean(fast, kLatency), q = mean(pb, kLatency), c = mean(cons, kLatency);
    std::vector<double> curve;
    for (const auto& v : sweep_values(all)) curve.push_back(mean(select(b.rows, "E-latency-jitter", "fast", v), kLatency));
    bool rising = curve.size() >= 2;
    for (std::size_t i = 1; i < curve.size(); ++i) rising = rising && curve[i] > curve[i - 1];
    std::ostringstream m;
    m << fmt("fast/PB %.3f", f / q) << fmt(", fast/consensus %.3f", f / c) << ", fast means";
    for (double v : curve) m << fmt(" %.1f", v);
    return decide(6, title, f <= 1.15 * q && f <= 0.8 * c && rising, m.str(), thr);
}

CriterionResult c7(const ResultBundle& b) {
    const char* title = "late-event handling";
    const std::string thr = "clock sigma 400: discard <= 0.15, dynamic >= 0.90";
    const auto dyn = select(b.rows, "E-late-events", "dynamic", "400");
    const auto dis = select(b.rows, "E-late-events", "simple_discard", "400");
    if (dyn.empty() || dis.empty()) return not_run(7, title, thr, "E-late-events at 400");
    const double d = mean(dyn, kDelivery), s = mean(dis, kDelivery);
    return decide(7, title, s <= 0.15 && d >= 0.90, fmt("dynamic %.3f", d) + fmt(", simple discard %.3f", s), thr);
}

CriterionResult c8(const ResultBundle& b) {
    const char* title = "GC effectiveness";
    const std::string thr = "no-GC final >= 10x GC max; GC max <= 400; max(10 s)/max(1 s) in [5, 15]";
    const auto on = select(b.rows, "E-gc-onoff", "gc_on");
    const auto off = select(b.rows, "E-gc-onoff", "gc_off");
    const auto g1 = select(b.rows, "E-gc-cycle", "stable", "1000");
    const auto g10 = select(b.rows, "E-gc-cycle", "stable", "10000");
    if (on.empty() || off.empty()) return not_run(8, title, thr, "E-gc-onoff");
    if (g1.empty() || g10.empty()) return not_run(8, title, thr, "E-gc-cycle 1 s and 10 s");
    const auto max_qd = [](const RunRow& r) { return double(r.max_qd); };
    const auto final_qd = [](const RunRow& r) { return double(r.final_qd); };
    const double on_max = mean(on, max_qd), off_final = mean(off, final_qd);
    const double ratio = mean(g10, max_qd) / mean(g1, max_qd);
    std::ostringstream m;
    m << fmt("GC max %.0f", on_max) << fmt(", no-GC final %.0f", off_final) << fmt(" (%.1fx)", off_final / on_max)
      << fmt(", period ratio %.2f", ratio);
    const bool ok = off_final >= 10 * on_max && on_max <= 400 && ratio >= 5 && ratio <= 15;
    return decide(8, title, ok, m.str(), thr);
}

CriterionResult c9(const ResultBundle& b) {
    const char* title = "time synchronization";
    const std::string thr = "sync off: Spearman rho > 0.9; sync on: mean latency < 1000 ms everywhere";
    const auto off = select(b.rows, "E-timesync", "sync_off");
    const auto on = select(b.rows, "E-timesync", "sync_on");
    if (off.empty() || on.empty()) return not_run(9, title, thr, "E-timesync");
    std::vector<double> x, y;
    for (const auto& v : sweep_values(off)) {
        x.push_back(std::stod(v));
        y.push_back(mean(select(b.rows, "E-timesync", "sync_off", v), kLatency));
    }
    double worst_on = 0;
    for (const auto& v : sweep_values(on)) worst_on = std::max(worst_on, mean(select(b.rows, "E-timesync", "sync_on", v), kLatency));
    const double rho = spearman(x, y);
    std::ostringstream m;
    m << fmt("rho %.3f", rho) << ", sync-off means";
    for (double v : y) m << fmt(" %.1f", v);
    m << fmt(", sync-on max %.1f ms", worst_on);
    return decide(9, title, x.size() >= 3 && rho > 0.9 && worst_on < 1000, m.str(), thr);
}

CriterionResult c10(const ResultBundle& b) {
    const char* title = "consensus-trigger floor";
    const std::string thr = "0 triggers with no loss, no clock error, bounded jitter";
    const auto rs = select(b.rows, "S-fast-path");
    if (rs.empty()) return not_run(10, title, thr, "S-fast-path");
    const double trig = sum(rs, [](const RunRow& r) { return double(r.consensus_triggers); });
    std::ostringstream m;
    m << rs.size() << " runs, " << trig << " triggers";
    return decide(10, title, trig == 0, m.str(), thr);
}

CriterionResult c11(const ResultBundle& b) {
    const char* title = "Merkle integrity";
    const std::string thr = ">= 5000 files, merkle < flat for 1..50 changes, single change = path cost = oracle, "
                            "100/100 equal sets";
    std::vector<const MerkleRow*> sweep, eq;
    for (const auto& r : b.merkle) (r.variant == "sweep" ? sweep : eq).push_back(&r);
    if (sweep.empty() || eq.empty()) return not_run(11, title, thr, "E-merkle");
    bool fewer = true, single_ok = false, have_single = false;
    std::set<std::size_t> ks;
    std::size_t files = sweep.front()->files;
    for (const auto* r : sweep) {
        ks.insert(r->changed_files);
        fewer = fewer && r->merkle_comparisons < r->flat_comparisons && r->sets_equal &&
                r->merkle_comparisons == r->oracle_comparisons;
        if (r->changed_files == 1) {
            have_single = true;
            single_ok = r->merkle_comparisons == r->path_cost && r->path_cost == r->oracle_comparisons;
        }
    }
    std::size_t equal = 0;
    for (const auto* r : eq) equal += r->sets_equal && r->merkle_comparisons == r->oracle_comparisons;
    const bool range = ks.count(1) && ks.count(50);
    std::ostringstream m;
    m << files << " files, " << ks.size() << " change counts, merkle<flat " << (fewer ? "all" : "not all")
      << ", single change " << (have_single && single_ok ? "matches" : "mismatch") << ", " << equal << "/"
      << eq.size() << " equal sets";
    const bool ok = files >= 5000 && range && fewer && have_single && single_ok && eq.size() >= 100 &&
                    equal == eq.size();
    return decide(11, title, ok, m.str(), thr);
}

CriterionResult c12() {
    const auto g = sim::check_loss_grid(2, 10);
    std::ostringstream m;
    m << g.points << " grid points, " << g.violations << " exceptions, " << g.non_monotone << " non-monotone";
    return decide(12, "closed-form inequality", g.points == 99 * 9 && g.violations == 0, m.str(),
                  "replicated loss < single-path loss on the 99 x 9 grid");
}

CriterionResult c13(const ResultBundle& b) {
    const char* title = "neighbor change";
    const std::string thr = "50/50 runs with join and leave at one lambda on every replica";
    const auto rs = select(b.rows, "S-neighbor");
    if (rs.empty()) return not_run(13, title, thr, "S-neighbor");
    std::size_t good = 0;
    for (const auto* r : rs)
        good += r->viol_milestone == 0 && r->violations == 0 &&
                r->milestone_checks >= 2 * static_cast<std::uint64_t>(r->group_size);
    std::ostringstream m;
    m << good << "/" << rs.size() << " runs agreed";
    return decide(13, title, rs.size() >= 50 && good == rs.size(), m.str(), thr);
}

}  // namespace

std::vector<ClosedFormRow> compare_with_closed_form(const std::vector<RunRow>& rows) {
    std::vector<ClosedFormRow> out;
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<const RunRow*>> groups;
    std::vector<std::tuple<std::string, std::string, std::string>> order;
    for (const auto& r : rows) {
        auto key = std::make_tuple(r.experiment, r.variant, r.sweep_value);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) order.push_back(key);
        it->second.push_back(&r);
    }
    for (const auto& key : order) {
        const auto& g = groups[key];
        ClosedFormRow c;
        c.experiment = std::get<0>(key);
        c.variant = std::get<1>(key);
        c.sweep_value = std::get<2>(key);
        c.strategy = g.front()->strategy;
        c.n = g.front()->group_size;
        c.runs = static_cast<int>(g.size());
        c.p_loss = mean(g, [](const RunRow& r) { return r.p_loss; });
        c.d_c_ms = mean(g, [](const RunRow& r) { return r.d_c_ms; });
        c.d_m_ms = mean(g, [](const RunRow& r) { return r.d_m_ms; });
        c.p_sync = mean(g, [](const RunRow& r) { return r.consensus_rate; });
        const auto cf = sim::closed_form(sim::parse_strategy(c.strategy), c.n, c.p_loss, c.d_c_ms, c.d_m_ms, c.p_sync);
        c.predicted_sync_delay_ms = cf.sync_delay_ms;
        c.simulated_sync_delay_ms = mean(g, [](const RunRow& r) { return r.sync_delay_ms; });
        c.sync_delay_abs_err = std::abs(c.predicted_sync_delay_ms - c.simulated_sync_delay_ms);
        // The closed form counts a lost update per (event, recipient) pair.
        c.predicted_loss = cf.loss_rate;
        c.simulated_loss = 1.0 - mean(g, kDelivery);
        c.loss_abs_err = std::abs(c.predicted_loss - c.simulated_loss);
        out.push_back(c);
    }
    return out;
}

void write_compare_csv(std::ostream& out, const std::vector<ClosedFormRow>& rows) {
    out << "experiment,variant,sweep_value,strategy,n,runs,p_loss,d_c_ms,d_m_ms,p_sync,predicted_sync_delay_ms,"
           "simulated_sync_delay_ms,sync_delay_abs_err,predicted_loss,simulated_loss,loss_abs_err\n";
    char buf[512];
    for (const auto& c : rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,%d,%d,%.4g,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.5f,%.5f,%.5f\n",
                      c.experiment.c_str(), c.variant.c_str(), c.sweep_value.c_str(), c.strategy.c_str(), c.n, c.runs,
                      c.p_loss, c.d_c_ms, c.d_m_ms, c.p_sync, c.predicted_sync_delay_ms, c.simulated_sync_delay_ms,
                      c.sync_delay_abs_err, c.predicted_loss, c.simulated_loss, c.loss_abs_err);
        out << buf;
    }
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::NotRun: return "NOT RUN";
    }
    return "?";
}

std::vector<CriterionResult> evaluate_criteria(const ResultBundle& b) {
    return {c1(b), c2(b), c3(b), c4(b), c5(b), c6(b), c7(b), c8(b), c9(b), c10(b), c11(b), c12(), c13(b)};
}

int emit_summary(std::ostream& out, const std::vector<CriterionResult>& results) {
    int bad = 0;
    for (const auto& r : results) {
        char head[96];
        std::snprintf(head, sizeof head, "[%-7s] C%-2d %s", to_string(r.verdict), r.number, r.title.c_str());
        out << head << ": " << r.measured << " (want " << r.threshold << ")\n";
        bad += r.verdict != Verdict::Pass;
    }
    return bad == 0 ? 0 : 1;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) return std::nan("");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace vnet::experiments
