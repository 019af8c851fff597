#include "blackwell/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace blackwell {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string transition_label(const Mdp& m, int s, int a) {
    return "(" + m.state_name(s) + "," + m.action_name(a) + ")";
}

void check_unique(const std::vector<std::string>& names, const char* what) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!seen.insert(names[i]).second)
            throw ValidationError(std::string(what) + "[" + std::to_string(i) +
                                  "]: duplicate identifier \"" + names[i] + "\"");
    }
}

}  // namespace

Mdp::Mdp(std::vector<std::string> states, std::vector<std::string> actions, double r_max,
         Eigen::VectorXd initial, std::vector<std::vector<std::vector<Transition>>> arcs)
    : states_(std::move(states)),
      actions_(std::move(actions)),
      r_max_(r_max),
      initial_(std::move(initial)),
      arcs_(std::move(arcs)) {
    if (states_.empty()) throw ValidationError("states: must be non-empty");
    if (actions_.empty()) throw ValidationError("actions: must be non-empty");
    check_unique(states_, "states");
    check_unique(actions_, "actions");
    if (!(r_max_ >= 0.0) || !std::isfinite(r_max_))
        throw ValidationError("r_max: must be a finite nonnegative number");

    const int n = state_count();
    const int na = action_count();
    if (static_cast<int>(arcs_.size()) != n)
        throw ValidationError("transitions: expected one action table per state");
    for (auto& per_state : arcs_)
        if (static_cast<int>(per_state.size()) != na)
            throw ValidationError("transitions: expected one arc list per action");

    if (initial_.size() != n) throw ValidationError("initial: expected one entry per state");
    double initial_sum = 0.0;
    for (int s = 0; s < n; ++s) {
        const double p = initial_[s];
        if (!std::isfinite(p) || p < 0.0 || p > 1.0)
            throw ValidationError("initial." + states_[s] + ": probability " + std::to_string(p) +
                                  " outside [0,1]");
        initial_sum += p;
    }
    if (std::abs(initial_sum - 1.0) > kProbabilityTolerance)
        throw ValidationError("initial: probabilities sum to " + std::to_string(initial_sum) +
                              ", expected 1");

    defined_.assign(n, {});
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < na; ++a) {
            const auto& list = arcs_[s][a];
            if (list.empty()) continue;
            double sum = 0.0;
            for (std::size_t k = 0; k < list.size(); ++k) {
                const Transition& t = list[k];
                const std::string where =
                    "transitions" + transition_label(*this, s, a) + ".to[" + std::to_string(k) + "]";
                if (t.target < 0 || t.target >= n)
                    throw ValidationError(where + ".sp: state index out of range");
                if (!std::isfinite(t.probability) || t.probability < 0.0 || t.probability > 1.0)
                    throw ValidationError(where + ".p: probability " +
                                          std::to_string(t.probability) + " outside [0,1]");
                if (!std::isfinite(t.reward) || t.reward < 0.0 || t.reward > r_max_)
                    throw ValidationError(where + ".r: reward " + std::to_string(t.reward) +
                                          " outside [0, r_max=" + std::to_string(r_max_) + "]");
                sum += t.probability;
            }
            if (std::abs(sum - 1.0) > kProbabilityTolerance)
                throw ValidationError("transitions" + transition_label(*this, s, a) +
                                      ": successor probabilities sum to " + std::to_string(sum) +
                                      ", expected 1");
            defined_[s].push_back(a);
        }
        if (defined_[s].empty())
            throw ValidationError("state " + states_[s] + " has no defined action");
    }
}

int Mdp::state_index(std::string_view name) const {
    for (int s = 0; s < state_count(); ++s)
        if (states_[s] == name) return s;
    return -1;
}

int Mdp::action_index(std::string_view name) const {
    for (int a = 0; a < action_count(); ++a)
        if (actions_[a] == name) return a;
    return -1;
}

bool operator==(const Mdp& a, const Mdp& b) {
    return a.states_ == b.states_ && a.actions_ == b.actions_ && a.r_max_ == b.r_max_ &&
           a.initial_.size() == b.initial_.size() && a.initial_ == b.initial_ &&
           a.arcs_ == b.arcs_;
}

void check_policy(const Mdp& mdp, const Policy& policy) {
    if (static_cast<int>(policy.actions.size()) != mdp.state_count())
        throw ValidationError("policy: expected one action per state");
    for (int s = 0; s < mdp.state_count(); ++s) {
        const int a = policy.actions[s];
        if (a < 0 || a >= mdp.action_count() || !mdp.action_defined(s, a))
            throw ValidationError("policy references undefined action at state " +
                                  mdp.state_name(s));
    }
}

InducedChain induce_chain(const Mdp& mdp, const Policy& policy) {
    check_policy(mdp, policy);
    const int n = mdp.state_count();
    InducedChain chain;
    chain.transition = Eigen::MatrixXd::Zero(n, n);
    chain.reward = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < n; ++s) {
        for (const Transition& t : mdp.arcs(s, policy[s])) {
            chain.transition(s, t.target) += t.probability;
            chain.reward[s] += t.probability * t.reward;
        }
    }
    return chain;
}

std::uint64_t policy_count(const Mdp& mdp) {
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t n = 1;
    for (int s = 0; s < mdp.state_count(); ++s) {
        const std::uint64_t k = mdp.defined_actions(s).size();
        if (n > kMax / k) return kMax;
        n *= k;
    }
    return n;
}

std::vector<Policy> enumerate_policies(const Mdp& mdp, std::uint64_t cap) {
    const std::uint64_t total = policy_count(mdp);
    if (total > cap) {
        std::string shown = total == std::numeric_limits<std::uint64_t>::max()
                                ? std::string("at least 18446744073709551615")
                                : std::to_string(total);
        throw CapExceededError("policy enumeration needs " + shown + " policies, cap is " +
                                   std::to_string(cap),
                               total);
    }
    const int n = mdp.state_count();
    std::vector<std::size_t> pick(n, 0);
    std::vector<Policy> out;
    out.reserve(static_cast<std::size_t>(total));
    while (true) {
        Policy p;
        p.actions.resize(n);
        for (int s = 0; s < n; ++s) p.actions[s] = mdp.defined_actions(s)[pick[s]];
        out.push_back(std::move(p));
        int s = n - 1;
        while (s >= 0) {
            if (++pick[s] < mdp.defined_actions(s).size()) break;
            pick[s] = 0;
            --s;
        }
        if (s < 0) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

namespace {

const char* json_type_name(const ordered_json& j) {
    if (j.is_string()) return "string";
    if (j.is_number()) return "number";
    if (j.is_array()) return "array";
    if (j.is_object()) return "object";
    if (j.is_boolean()) return "boolean";
    return "null";
}

double require_number(const ordered_json& j, const std::string& path) {
    if (!j.is_number())
        throw ValidationError(path + ": expected a number, got " + json_type_name(j));
    return j.get<double>();
}

std::string require_string(const ordered_json& j, const std::string& path) {
    if (!j.is_string())
        throw ValidationError(path + ": expected a string, got " + json_type_name(j));
    return j.get<std::string>();
}

void reject_unknown_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                         const std::string& path) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) known = true;
        if (!known) throw ValidationError(path + ": unknown key \"" + item.key() + "\"");
    }
}

std::vector<std::string> parse_name_array(const ordered_json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path + ": expected an array of strings");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < j.size(); ++i)
        names.push_back(require_string(j[i], path + "[" + std::to_string(i) + "]"));
    return names;
}

}  // namespace

Mdp parse_mdp(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("document: expected a JSON object");
    reject_unknown_keys(doc, {"states", "actions", "r_max", "initial", "transitions"}, "document");
    for (const char* key : {"states", "actions", "r_max", "initial", "transitions"})
        if (!doc.contains(key))
            throw ValidationError("document: missing key \"" + std::string(key) + "\"");

    const auto states = parse_name_array(doc["states"], "states");
    const auto actions = parse_name_array(doc["actions"], "actions");
    const double r_max = require_number(doc["r_max"], "r_max");

    auto state_index = [&](const std::string& name, const std::string& path) {
        auto it = std::find(states.begin(), states.end(), name);
        if (it == states.end())
            throw ValidationError(path + ": unknown state \"" + name + "\"");
        return static_cast<int>(it - states.begin());
    };
    auto action_index = [&](const std::string& name, const std::string& path) {
        auto it = std::find(actions.begin(), actions.end(), name);
        if (it == actions.end())
            throw ValidationError(path + ": unknown action \"" + name + "\"");
        return static_cast<int>(it - actions.begin());
    };

    if (!doc["initial"].is_object())
        throw ValidationError("initial: expected an object mapping state to probability");
    Eigen::VectorXd initial = Eigen::VectorXd::Zero(static_cast<int>(states.size()));
    for (const auto& item : doc["initial"].items()) {
        const int s = state_index(item.key(), "initial." + item.key());
        initial[s] = require_number(item.value(), "initial." + item.key());
    }

    if (!doc["transitions"].is_array())
        throw ValidationError("transitions: expected an array of records");
    std::vector<std::vector<std::vector<Transition>>> arcs(
        states.size(), std::vector<std::vector<Transition>>(actions.size()));
    std::unordered_set<long long> seen;
    const auto& records = doc["transitions"];
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::string path = "transitions[" + std::to_string(i) + "]";
        const auto& rec = records[i];
        if (!rec.is_object()) throw ValidationError(path + ": expected an object");
        reject_unknown_keys(rec, {"s", "a", "to"}, path);
        for (const char* key : {"s", "a", "to"})
            if (!rec.contains(key))
                throw ValidationError(path + ": missing key \"" + std::string(key) + "\"");
        const int s = state_index(require_string(rec["s"], path + ".s"), path + ".s");
        const int a = action_index(require_string(rec["a"], path + ".a"), path + ".a");
        if (!seen.insert(static_cast<long long>(s) * actions.size() + a).second)
            throw ValidationError(path + ": duplicate definition for (" + states[s] + "," +
                                  actions[a] + ")");
        const auto& to = rec["to"];
        if (!to.is_array() || to.empty())
            throw ValidationError(path + ".to: expected a non-empty array");
        for (std::size_t k = 0; k < to.size(); ++k) {
            const std::string arc_path = path + ".to[" + std::to_string(k) + "]";
            const auto& arc = to[k];
            if (!arc.is_object()) throw ValidationError(arc_path + ": expected an object");
            reject_unknown_keys(arc, {"sp", "p", "r"}, arc_path);
            for (const char* key : {"sp", "p", "r"})
                if (!arc.contains(key))
                    throw ValidationError(arc_path + ": missing key \"" + std::string(key) + "\"");
            Transition t;
            t.target = state_index(require_string(arc["sp"], arc_path + ".sp"), arc_path + ".sp");
            t.probability = require_number(arc["p"], arc_path + ".p");
            t.reward = require_number(arc["r"], arc_path + ".r");
            arcs[s][a].push_back(t);
        }
    }

    return Mdp(states, actions, r_max, std::move(initial), std::move(arcs));
}

Mdp load_mdp(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_mdp(buffer.str());
}

Mdp load_mdp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open MDP file: " + path);
    return load_mdp(in);
}

std::string serialize_mdp(const Mdp& mdp) {
    ordered_json doc;
    doc["states"] = mdp.states();
    doc["actions"] = mdp.actions();
    doc["r_max"] = mdp.r_max();
    ordered_json initial = ordered_json::object();
    for (int s = 0; s < mdp.state_count(); ++s)
        if (mdp.initial()[s] != 0.0) initial[mdp.state_name(s)] = mdp.initial()[s];
    doc["initial"] = std::move(initial);
    ordered_json records = ordered_json::array();
    for (int s = 0; s < mdp.state_count(); ++s) {
        for (int a : mdp.defined_actions(s)) {
            ordered_json rec;
            rec["s"] = mdp.state_name(s);
            rec["a"] = mdp.action_name(a);
            ordered_json to = ordered_json::array();
            for (const Transition& t : mdp.arcs(s, a)) {
                ordered_json arc;
                arc["sp"] = mdp.state_name(t.target);
                arc["p"] = t.probability;
                arc["r"] = t.reward;
                to.push_back(std::move(arc));
            }
            rec["to"] = std::move(to);
            records.push_back(std::move(rec));
        }
    }
    doc["transitions"] = std::move(records);
    return doc.dump(2) + "\n";
}

std::string format_policy(const Mdp& mdp, const Policy& policy) {
    std::string out;
    for (int s = 0; s < mdp.state_count(); ++s) {
        if (s > 0) out += ';';
        out += mdp.action_name(policy[s]);
    }
    return out;
}

Policy parse_policy(const Mdp& mdp, std::string_view text) {
    Policy policy;
    policy.actions.assign(mdp.state_count(), -1);
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view pair = text.substr(pos, end - pos);
        const std::size_t eq = pair.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError("policy: expected state=action, got \"" + std::string(pair) +
                                  "\"");
        const int s = mdp.state_index(pair.substr(0, eq));
        const int a = mdp.action_index(pair.substr(eq + 1));
        if (s < 0)
            throw ValidationError("policy: unknown state \"" + std::string(pair.substr(0, eq)) +
                                  "\"");
        if (a < 0)
            throw ValidationError("policy: unknown action \"" + std::string(pair.substr(eq + 1)) +
                                  "\"");
        policy.actions[s] = a;
        pos = end + 1;
    }
    for (int s = 0; s < mdp.state_count(); ++s)
        if (policy.actions[s] < 0)
            throw ValidationError("policy: state " + mdp.state_name(s) + " not assigned");
    check_policy(mdp, policy);
    return policy;
}

}  // namespace blackwell
