#include "vnet/experiments/plan.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "vnet/sim/models.hpp"

namespace vnet::experiments {

namespace {

struct Name {
    ExperimentId id;
    const char* text;
};

constexpr Name kNames[] = {
    {ExperimentId::LatencyJitter, "E-latency-jitter"},
    {ExperimentId::DeliveryDrop, "E-delivery-drop"},
    {ExperimentId::LatencyDrop, "E-latency-drop"},
    {ExperimentId::LateEvents, "E-late-events"},
    {ExperimentId::GcOnOff, "E-gc-onoff"},
    {ExperimentId::GcCycle, "E-gc-cycle"},
    {ExperimentId::TimeSync, "E-timesync"},
    {ExperimentId::Merkle, "E-merkle"},
    {ExperimentId::Safety, "S-safety"},
    {ExperimentId::CrashLeader, "S-crash-leader"},
    {ExperimentId::FastPath, "S-fast-path"},
    {ExperimentId::Neighbor, "S-neighbor"},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

std::pair<std::string, std::string> split_assign(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("plan: expected key=value in '" + s + "'");
    return {trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
}

Variant strategy_variant(const char* label) { return Variant{label, {{"strategy", label}}}; }

std::vector<Variant> three_strategies() {
    return {strategy_variant("fast"), strategy_variant("primary_backup"), strategy_variant("consensus_total_order")};
}

}  // namespace

std::string to_string(ExperimentId id) {
    for (const auto& n : kNames)
        if (n.id == id) return n.text;
    return "?";
}

ExperimentId parse_experiment(const std::string& s) {
    for (const auto& n : kNames)
        if (s == n.text) return n.id;
    throw std::invalid_argument("unknown experiment: " + s);
}

const std::vector<ExperimentId>& studies() {
    static const std::vector<ExperimentId> v{ExperimentId::LatencyJitter, ExperimentId::DeliveryDrop,
                                             ExperimentId::LatencyDrop,   ExperimentId::LateEvents,
                                             ExperimentId::GcOnOff,       ExperimentId::GcCycle,
                                             ExperimentId::TimeSync,      ExperimentId::Merkle};
    return v;
}

const std::vector<ExperimentId>& suites() {
    static const std::vector<ExperimentId> v{ExperimentId::Safety, ExperimentId::CrashLeader, ExperimentId::FastPath,
                                             ExperimentId::Neighbor};
    return v;
}

std::vector<Point> expand_points(const ExperimentPlan& plan) {
    std::vector<Point> out{Point{}};
    for (const auto& axis : plan.axes) {
        if (axis.values.empty()) throw std::invalid_argument("plan: empty sweep for " + axis.key);
        std::vector<Point> next;
        for (const auto& p : out) {
            for (const auto& v : axis.values) {
                Point q = p;
                q.key += (q.key.empty() ? "" : "/") + axis.key;
                q.value += (q.value.empty() ? "" : "/") + v;
                q.set.emplace_back(axis.key, v);
                next.push_back(std::move(q));
            }
        }
        out = std::move(next);
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].index = i;
    return out;
}

std::uint64_t run_seed(std::uint64_t base, std::size_t point, int repetition) {
    return sim::mix_seed(base, point, static_cast<std::uint64_t>(repetition));
}

ExperimentPlan default_plan(ExperimentId id, bool full) {
    ExperimentPlan p;
    p.id = id;
    p.base.events_per_client = full ? 9000 : 1000;
    switch (id) {
        case ExperimentId::LatencyJitter:
            p.repetitions = 5;
            p.variants = three_strategies();
            p.axes = {{"net.jitter_std_ms", {"50", "100", "150", "200", "250"}}};
            break;
        case ExperimentId::DeliveryDrop:
            p.repetitions = 2;
            p.variants = three_strategies();
            p.axes = {{"net.p_loss", {"0.3", "0.4", "0.5", "0.6", "0.7"}}};
            break;
        case ExperimentId::LatencyDrop:
            p.repetitions = 2;
            p.variants = three_strategies();
            p.axes = {{"net.p_loss", {"0.3", "0.4", "0.5", "0.6", "0.7"}}};
            break;
        case ExperimentId::LateEvents:
            p.repetitions = 2;
            p.variants = {{"dynamic", {{"late_policy", "dynamic"}}}, {"simple_discard", {{"late_policy", "discard"}}}};
            p.axes = {{"clock.offset_std_ms", {"0", "100", "200", "300", "400"}}};
            break;
        case ExperimentId::GcOnOff:
            p.variants = {{"gc_on", {{"gc.enabled", "1"}}}, {"gc_off", {{"gc.enabled", "0"}}}};
            break;
        case ExperimentId::GcCycle:
            p.variants = {{"stable", {}},
                          {"churn_300s", {{"churn.enabled", "1"}, {"churn.session_mean_s", "300"}}}};
            p.axes = {{"gc.period_ms", {"1000", "2000", "3000", "4000", "5000", "6000", "7000", "8000", "9000",
                                        "10000"}}};
            break;
        case ExperimentId::TimeSync:
            p.repetitions = 2;
            p.variants = {{"sync_off", {{"clock.sync", "0"}}}, {"sync_on", {{"clock.sync", "1"}}}};
            p.axes = {{"clock.offset_std_ms", {"0", "100", "200", "300", "400"}}};
            break;
        case ExperimentId::Merkle:
            break;
        case ExperimentId::Safety:
            p.repetitions = 12;
            p.base.churn.enabled = true;
            p.base.churn.session_mean_s = 60;
            p.axes = {{"net.jitter_std_ms", {"50", "150", "250"}}, {"net.p_loss", {"0", "0.3", "0.5"}}};
            break;
        case ExperimentId::CrashLeader:
            p.repetitions = 50;
            p.base.events_per_client = full ? 1000 : 300;
            p.base.net.jitter_std_ms = 150;
            p.base.net.p_loss = 0.3;
            p.base.crash_leader_at_ms = 20000;
            break;
        case ExperimentId::FastPath:
            p.repetitions = 5;
            p.base.net.jitter_std_ms = 10;
            break;
        case ExperimentId::Neighbor:
            p.repetitions = 50;
            p.base.events_per_client = full ? 1000 : 300;
            p.base.strategy = sim::Strategy::ConsensusTotalOrder;
            p.base.net.p_loss = 0.3;
            p.base.script = {{sim::ScriptedChange::Kind::Join, "x1", 5000, 0},
                             {sim::ScriptedChange::Kind::Leave, "c03", 9000, 1}};
            break;
    }
    return p;
}

ExperimentPlan parse_plan(std::istream& in, bool full) {
    std::vector<std::pair<std::string, std::string>> lines;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("plan line " + std::to_string(lineno) + ": expected key = value");
        lines.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    ExperimentPlan p;
    bool have_id = false, defaults = false;
    for (const auto& [k, v] : lines) {
        if (k == "experiment") {
            p.id = parse_experiment(v);
            have_id = true;
        } else if (k == "defaults") {
            defaults = v == "1" || v == "true";
        }
    }
    if (!have_id) throw std::invalid_argument("plan: missing experiment");
    if (defaults) p = default_plan(p.id, full);
    else if (full) p.base.events_per_client = 9000;

    bool variants_reset = false, axes_reset = false;
    for (const auto& [k, v] : lines) {
        if (k == "experiment" || k == "defaults") continue;
        if (k == "seed") p.seed = std::stoull(v);
        else if (k == "repetitions") {
            p.repetitions = std::stoi(v);
            if (p.repetitions < 1) throw std::invalid_argument("plan: repetitions must be >= 1");
        } else if (k == "set") {
            const auto [sk, sv] = split_assign(v);
            sim::set_scenario_key(p.base, sk, sv);
        } else if (k == "variant") {
            if (!variants_reset) p.variants.clear(), variants_reset = true;
            const auto colon = v.find(':');
            Variant var{trim(v.substr(0, colon)), {}};
            if (colon != std::string::npos)
                for (const auto& w : words(v.substr(colon + 1))) var.set.push_back(split_assign(w));
            p.variants.push_back(std::move(var));
        } else if (k == "sweep") {
            if (!axes_reset) p.axes.clear(), axes_reset = true;
            const auto colon = v.find(':');
            if (colon == std::string::npos) throw std::invalid_argument("plan: sweep needs 'key: values'");
            p.axes.push_back(Axis{trim(v.substr(0, colon)), words(v.substr(colon + 1))});
        } else if (k == "merkle.objects") p.merkle.objects = std::stoul(v);
        else if (k == "merkle.components_per_object") p.merkle.components_per_object = std::stoul(v);
        else if (k == "merkle.files_per_component") p.merkle.files_per_component = std::stoul(v);
        else if (k == "merkle.equivalence_corpora") p.merkle.equivalence_corpora = std::stoi(v);
        else if (k == "merkle.changes") {
            p.merkle.changes.clear();
            for (const auto& w : words(v)) p.merkle.changes.push_back(std::stoul(w));
        } else throw std::invalid_argument("plan: unknown key " + k);
    }

    // Every override must name a real scenario key.
    sim::SimScenario probe = p.base;
    for (const auto& var : p.variants)
        for (const auto& [sk, sv] : var.set) sim::set_scenario_key(probe, sk, sv);
    for (const auto& pt : expand_points(p))
        for (const auto& [sk, sv] : pt.set) sim::set_scenario_key(probe, sk, sv);
    p.base.validate();
    return p;
}

ExperimentPlan load_plan(const std::string& path, bool full) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open plan " + path);
    return parse_plan(in, full);
}

std::string format_plan(const ExperimentPlan& p) {
    std::ostringstream o;
    o << "experiment = " << to_string(p.id) << '\n'
      << "seed = " << p.seed << '\n'
      << "repetitions = " << p.repetitions << '\n';
    std::istringstream base(sim::format_scenario(p.base));
    for (std::string l; std::getline(base, l);)
        if (!l.empty() && l.rfind("seed=", 0) != 0) o << "set = " << l << '\n';
    for (const auto& v : p.variants) {
        o << "variant = " << v.label << ':';
        for (const auto& [k, val] : v.set) o << ' ' << k << '=' << val;
        o << '\n';
    }
    for (const auto& a : p.axes) {
        o << "sweep = " << a.key << ':';
        for (const auto& v : a.values) o << ' ' << v;
        o << '\n';
    }
    if (p.id == ExperimentId::Merkle) {
        o << "merkle.objects = " << p.merkle.objects << '\n'
          << "merkle.components_per_object = " << p.merkle.components_per_object << '\n'
          << "merkle.files_per_component = " << p.merkle.files_per_component << '\n'
          << "merkle.equivalence_corpora = " << p.merkle.equivalence_corpora << '\n';
        if (!p.merkle.changes.empty()) {
            o << "merkle.changes =";
            for (auto c : p.merkle.changes) o << ' ' << c;
            o << '\n';
        }
    }
    return o.str();
}

}  // namespace vnet::experiments
