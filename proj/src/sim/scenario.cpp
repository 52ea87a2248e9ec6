#include "vnet/sim/scenario.hpp"

#include <istream>
#include <sstream>
#include <stdexcept>

namespace vnet::sim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("scenario: bad number for " + key + ": " + v);
    }
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_double(key, v)); }

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw std::invalid_argument("scenario: bad flag for " + key + ": " + v);
}

bool set_net(NetModel& n, const std::string& field, const std::string& key, const std::string& v) {
    if (field == "d_min_ms") n.d_min_ms = to_double(key, v);
    else if (field == "jitter_mean_ms") n.jitter_mean_ms = to_double(key, v);
    else if (field == "jitter_std_ms") n.jitter_std_ms = to_double(key, v);
    else if (field == "p_loss") n.p_loss = to_double(key, v);
    else return false;
    return true;
}

// "<base> <at_ms> <notifier>"
ScriptedChange parse_change(ScriptedChange::Kind kind, const std::string& key, const std::string& v) {
    std::istringstream in(v);
    ScriptedChange c;
    c.kind = kind;
    if (!(in >> c.base_id >> c.at_ms >> c.notifier)) throw std::invalid_argument("scenario: bad " + key + ": " + v);
    return c;
}

}  // namespace

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Fast: return "fast";
        case Strategy::PrimaryBackup: return "primary_backup";
        case Strategy::ReliablePrimaryBackup: return "reliable_primary_backup";
        case Strategy::ConsensusTotalOrder: return "consensus_total_order";
    }
    return "?";
}

Strategy parse_strategy(const std::string& s) {
    if (s == "fast") return Strategy::Fast;
    if (s == "primary_backup" || s == "pb") return Strategy::PrimaryBackup;
    if (s == "reliable_primary_backup" || s == "rpb") return Strategy::ReliablePrimaryBackup;
    if (s == "consensus_total_order" || s == "consensus") return Strategy::ConsensusTotalOrder;
    throw std::invalid_argument("unknown strategy: " + s);
}

void SimScenario::validate() const {
    timing.validate();
    if (client_count < 0) throw std::invalid_argument("client_count must be >= 0");
    if (group_size < 1) throw std::invalid_argument("group_size must be >= 1");
    if (spare_count < 0) throw std::invalid_argument("spare_count must be >= 0");
    if (events_per_client < 0) throw std::invalid_argument("events_per_client must be >= 0");
    for (const NetModel* n : {&net, &group_net}) {
        if (n->d_min_ms < 0 || n->jitter_std_ms < 0) throw std::invalid_argument("negative delay parameter");
        if (n->p_loss < 0 || n->p_loss > 1) throw std::invalid_argument("p_loss outside [0, 1]");
    }
    if (churn.enabled && (churn.session_mean_s <= 0 || churn.shape <= 0))
        throw std::invalid_argument("churn parameters must be positive");
    if (gc_period_ms <= 0 || heartbeat_ms <= 0 || failure_timeout_ms <= 0 || bandwidth_bytes_per_ms <= 0)
        throw std::invalid_argument("periods and bandwidth must be positive");
    for (const auto& c : script)
        if (c.notifier < 0 || c.notifier >= client_count)
            throw std::invalid_argument("script notifier out of range: " + c.base_id);
}

void set_scenario_key(SimScenario& s, const std::string& key, const std::string& v) {
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
        const std::string prefix = key.substr(0, dot), field = key.substr(dot + 1);
        bool ok = false;
        if (prefix == "net") ok = set_net(s.net, field, key, v);
        else if (prefix == "group_net") ok = set_net(s.group_net, field, key, v);
        else if (prefix == "churn") {
            ok = true;
            if (field == "enabled") s.churn.enabled = to_bool(key, v);
            else if (field == "session_mean_s") s.churn.session_mean_s = to_double(key, v);
            else if (field == "shape") s.churn.shape = to_double(key, v);
            else ok = false;
        } else if (prefix == "clock") {
            ok = true;
            if (field == "offset_std_ms") s.clock.offset_std_ms = to_double(key, v);
            else if (field == "sync") s.clock.sync_enabled = to_bool(key, v);
            else ok = false;
        } else if (prefix == "gc") {
            ok = true;
            if (field == "enabled") s.gc_enabled = to_bool(key, v);
            else if (field == "period_ms") s.gc_period_ms = to_double(key, v);
            else ok = false;
        } else if (prefix == "timing") {
            ok = true;
            if (field == "low_ms") s.timing = delivery::TimingParams::from_bounds(to_double(key, v), s.timing.net_high);
            else if (field == "high_ms") s.timing = delivery::TimingParams::from_bounds(s.timing.net_low, to_double(key, v));
            else ok = false;
        }
        if (!ok) throw std::invalid_argument("scenario: unknown key " + key);
        return;
    }
    if (key == "seed") s.seed = std::stoull(v);
    else if (key == "clients") s.client_count = to_int(key, v);
    else if (key == "group_size") s.group_size = to_int(key, v);
    else if (key == "spare_count") s.spare_count = to_int(key, v);
    else if (key == "events_per_client") s.events_per_client = to_int(key, v);
    else if (key == "strategy") s.strategy = parse_strategy(v);
    else if (key == "late_policy") {
        if (v == "dynamic") s.late_policy = delivery::WindowPolicy::Dynamic;
        else if (v == "discard") s.late_policy = delivery::WindowPolicy::Discard;
        else throw std::invalid_argument("scenario: late_policy must be dynamic or discard");
    } else if (key == "control_delay_ms") s.control_delay_ms = to_double(key, v);
    else if (key == "bandwidth_bytes_per_ms") s.bandwidth_bytes_per_ms = to_double(key, v);
    else if (key == "update_timeout_ms") s.update_timeout_ms = to_double(key, v);
    else if (key == "heartbeat_ms") s.heartbeat_ms = to_double(key, v);
    else if (key == "failure_timeout_ms") s.failure_timeout_ms = to_double(key, v);
    else if (key == "query_retry_ms") s.query_retry_ms = to_double(key, v);
    else if (key == "client_start_ms") s.client_start_ms = to_double(key, v);
    else if (key == "drain_ms") s.drain_ms = to_double(key, v);
    else if (key == "qd_sample_ms") s.qd_sample_ms = to_double(key, v);
    else if (key == "join_lead_cycles") s.join_lead_cycles = to_int(key, v);
    else if (key == "crash_leader_at_ms") s.crash_leader_at_ms = to_double(key, v);
    else if (key == "join") s.script.push_back(parse_change(ScriptedChange::Kind::Join, key, v));
    else if (key == "leave") s.script.push_back(parse_change(ScriptedChange::Kind::Leave, key, v));
    else throw std::invalid_argument("scenario: unknown key " + key);
}

SimScenario parse_scenario(std::istream& in) {
    SimScenario s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("scenario line " + std::to_string(lineno) + ": expected key=value");
        set_scenario_key(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    s.validate();
    return s;
}

SimScenario parse_scenario_text(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

std::string format_scenario(const SimScenario& s) {
    std::ostringstream o;
    o.precision(17);
    auto net = [&](const char* p, const NetModel& n) {
        o << p << ".d_min_ms=" << n.d_min_ms << '\n'
          << p << ".jitter_mean_ms=" << n.jitter_mean_ms << '\n'
          << p << ".jitter_std_ms=" << n.jitter_std_ms << '\n'
          << p << ".p_loss=" << n.p_loss << '\n';
    };
    o << "seed=" << s.seed << '\n'
      << "clients=" << s.client_count << '\n'
      << "group_size=" << s.group_size << '\n'
      << "spare_count=" << s.spare_count << '\n'
      << "timing.low_ms=" << s.timing.net_low << '\n'
      << "timing.high_ms=" << s.timing.net_high << '\n'
      << "events_per_client=" << s.events_per_client << '\n'
      << "strategy=" << to_string(s.strategy) << '\n'
      << "late_policy=" << (s.late_policy == delivery::WindowPolicy::Dynamic ? "dynamic" : "discard") << '\n';
    net("net", s.net);
    net("group_net", s.group_net);
    o << "control_delay_ms=" << s.control_delay_ms << '\n'
      << "bandwidth_bytes_per_ms=" << s.bandwidth_bytes_per_ms << '\n'
      << "churn.enabled=" << s.churn.enabled << '\n'
      << "churn.session_mean_s=" << s.churn.session_mean_s << '\n'
      << "churn.shape=" << s.churn.shape << '\n'
      << "clock.offset_std_ms=" << s.clock.offset_std_ms << '\n'
      << "clock.sync=" << s.clock.sync_enabled << '\n'
      << "gc.enabled=" << s.gc_enabled << '\n'
      << "gc.period_ms=" << s.gc_period_ms << '\n'
      << "update_timeout_ms=" << s.update_timeout_ms << '\n'
      << "heartbeat_ms=" << s.heartbeat_ms << '\n'
      << "failure_timeout_ms=" << s.failure_timeout_ms << '\n'
      << "query_retry_ms=" << s.query_retry_ms << '\n'
      << "client_start_ms=" << s.client_start_ms << '\n'
      << "drain_ms=" << s.drain_ms << '\n'
      << "qd_sample_ms=" << s.qd_sample_ms << '\n'
      << "join_lead_cycles=" << s.join_lead_cycles << '\n'
      << "crash_leader_at_ms=" << s.crash_leader_at_ms << '\n';
    for (const auto& c : s.script)
        o << (c.kind == ScriptedChange::Kind::Join ? "join=" : "leave=") << c.base_id << ' ' << c.at_ms << ' '
          << c.notifier << '\n';
    return o.str();
}

}  // namespace vnet::sim
