// Command-line front end: every analysis as a subcommand with a JSON envelope
// on stdout (--format csv flattens the tabular payload). Exit codes: 0 on
// success, 1 on validation/usage errors, 2 on cap errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blackwell/blackwell.hpp"
#include "blackwell/delayed_q.hpp"
#include "blackwell/generators.hpp"
#include "blackwell/mdp.hpp"
#include "blackwell/regret.hpp"
#include "blackwell/solver.hpp"

namespace {

using blackwell::Mdp;
using blackwell::Policy;
using ordered_json = nlohmann::ordered_json;

std::uint64_t policy_cap_from_env() {
    const char* raw = std::getenv("BLACKWELL_MDP_POLICY_CAP");
    if (!raw) return blackwell::kDefaultPolicyCap;
    char* end = nullptr;
    const unsigned long long cap = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || cap == 0)
        throw blackwell::ValidationError(
            "BLACKWELL_MDP_POLICY_CAP must be a positive integer");
    return cap;
}

ordered_json policy_json(const Mdp& mdp, const Policy& policy) {
    ordered_json out = ordered_json::object();
    for (int s = 0; s < mdp.state_count(); ++s)
        out[mdp.state_name(s)] = mdp.action_name(policy[s]);
    return out;
}

void check_finite(const ordered_json& node, const std::string& path) {
    if (node.is_number_float() && !std::isfinite(node.get<double>()))
        throw blackwell::NumericalError("non-finite number in output at " + path);
    if (node.is_object())
        for (const auto& item : node.items()) check_finite(item.value(), path + "." + item.key());
    if (node.is_array())
        for (std::size_t i = 0; i < node.size(); ++i)
            check_finite(node[i], path + "[" + std::to_string(i) + "]");
}

std::string csv_cell(const ordered_json& value) {
    if (value.is_string()) return value.get<std::string>();
    return value.dump();  // shortest round-trip for numbers; true/false; null
}

void emit(const std::string& command, const ordered_json& inputs, const ordered_json& results,
          const std::vector<std::string>& warnings, const std::string& format) {
    ordered_json envelope;
    envelope["command"] = command;
    envelope["inputs"] = inputs;
    envelope["results"] = results;
    envelope["warnings"] = warnings;
    check_finite(envelope, "envelope");
    if (format == "csv") {
        if (!results.contains("table") || !results["table"].is_array() ||
            results["table"].empty()) {
            std::cout << "\n";
            return;
        }
        const auto& table = results["table"];
        std::string header;
        for (const auto& item : table[0].items()) {
            if (!header.empty()) header += ',';
            header += item.key();
        }
        std::cout << header << "\n";
        for (const auto& row : table) {
            std::string line;
            for (const auto& item : row.items()) {
                if (!line.empty()) line += ',';
                line += csv_cell(item.value());
            }
            std::cout << line << "\n";
        }
        return;
    }
    std::cout << envelope.dump(2) << "\n";
}

Policy policy_or_optimal(const Mdp& mdp, const std::string& text, double gamma) {
    if (!text.empty()) return blackwell::parse_policy(mdp, text);
    return blackwell::optimal_policy(mdp, gamma).policy;
}

std::vector<double> parse_gamma_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        out.push_back(std::stod(text.substr(pos, end - pos)));
        pos = end + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
    CLI::App app{"Exact Blackwell-optimality analysis for finite tabular MDPs"};
    app.require_subcommand(1);
    const std::uint64_t cap = policy_cap_from_env();

    std::string mdp_path, policy_text, format = "json", out_path, gamma_list_text;
    double gamma = 0.0, gamma_learn = 0.0, tolerance = 1e-10;
    std::string state_name;

    auto add_common = [&](CLI::App* cmd, bool needs_mdp = true) {
        if (needs_mdp) cmd->add_option("--mdp", mdp_path, "MDP file")->required();
        cmd->add_option("--format", format, "json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    // analyze
    auto* analyze = app.add_subcommand(
        "analyze", "Discounted values, Q-values, gain and bias for a policy "
                   "(default: the optimal policy at --gamma)");
    add_common(analyze);
    analyze->add_option("--gamma", gamma, "evaluation discount in [0,1)")->required();
    analyze->add_option("--policy", policy_text, "state=action,... (default: optimal)");

    // gamma-star
    auto* gamma_star_cmd =
        app.add_subcommand("gamma-star", "Blackwell optimal policy and threshold");
    add_common(gamma_star_cmd);
    gamma_star_cmd->add_option("--tolerance", tolerance, "bisection tolerance");

    // regret
    auto* regret_cmd = app.add_subcommand(
        "regret", "Blackwell regret of a policy learned at --gamma-learn");
    add_common(regret_cmd);
    regret_cmd->add_option("--gamma-learn", gamma_learn, "learning discount")->required();
    regret_cmd->add_option("--policy", policy_text,
                           "state=action,... (default: optimal at --gamma-learn)");

    // gaps
    auto* gaps_cmd =
        app.add_subcommand("gaps", "Action gaps, maximal action gap, policy gaps");
    add_common(gaps_cmd);
    gaps_cmd->add_option("--gamma", gamma, "evaluation discount")->required();
    gaps_cmd->add_option("--state", state_name, "restrict to one state");
    gaps_cmd->add_option("--policy", policy_text,
                         "state=action,... (default: optimal at --gamma)");

    // pivot-scan
    auto* pivot_cmd = app.add_subcommand(
        "pivot-scan", "Policy gaps of the Blackwell policy approaching gamma_star");
    add_common(pivot_cmd);
    pivot_cmd->add_option("--gammas", gamma_list_text,
                          "comma-separated scan discounts (default ladder)");

    // generate
    auto* generate_cmd = app.add_subcommand("generate", "Write a distracting MDP file");
    generate_cmd->require_subcommand(1);
    int chain_h = 2;
    double chain_eps = 0.25, gen_r_max = 1.0, two_p = 0.002, two_r_d = 0.1;
    auto* gen_chain = generate_cmd->add_subcommand("chain", "line of states s0..sH");
    gen_chain->set_help_flag("--help", "print help");  // frees -h for the horizon flag
    gen_chain->add_option("--h", chain_h, "horizon (diameter)")->required();
    gen_chain->add_option("--eps", chain_eps, "distractor reward")->required();
    gen_chain->add_option("--r-max", gen_r_max, "reward ceiling")->required();
    gen_chain->add_option("--out", out_path, "output file")->required();
    gen_chain->add_option("--format", format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    auto* gen_two = generate_cmd->add_subcommand("two-state", "s_d/s_H pair");
    gen_two->add_option("--p", two_p, "escape probability")->required();
    gen_two->add_option("--r-d", two_r_d, "distractor reward")->required();
    gen_two->add_option("--r-max", gen_r_max, "reward ceiling")->required();
    gen_two->add_option("--out", out_path, "output file")->required();
    gen_two->add_option("--format", format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    // diameter
    auto* diameter_cmd = app.add_subcommand("diameter", "Expected-hitting-time diameter");
    add_common(diameter_cmd);

    // transient-check
    auto* transient_cmd = app.add_subcommand(
        "transient-check", "Are all rewards transient under every policy; V_max trend");
    add_common(transient_cmd);
    transient_cmd->add_option("--gammas", gamma_list_text,
                              "comma-separated V_max grid (default 0.9,0.99,0.999)");

    // learn
    auto* learn_cmd = app.add_subcommand("learn", "One delayed Q-learning run");
    add_common(learn_cmd);
    blackwell::LearnerConfig learn_config;
    int learn_m = 0;
    learn_cmd->add_option("--gamma", learn_config.gamma, "learning discount")->required();
    learn_cmd->add_option("--epsilon", learn_config.epsilon, "update tolerance eps_1");
    learn_cmd->add_option("--delta", learn_config.delta, "PAC confidence");
    learn_cmd->add_option("--m", learn_m, "samples per attempted update (default: formula)");
    learn_cmd->add_option("--seed", learn_config.seed, "RNG seed")->required();
    learn_cmd->add_option("--max-steps", learn_config.max_steps, "step budget");

    // sweep
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Delayed Q-learning protocol: several configs, several seeded runs");
    add_common(sweep_cmd);
    std::vector<double> sweep_gammas;
    std::vector<double> sweep_epsilons;
    int sweep_m = 0, sweep_runs = 5;
    double sweep_delta = 0.1;
    std::uint64_t sweep_seed = 1, sweep_budget = 10'000'000;
    sweep_cmd->add_option("--gamma", sweep_gammas, "one config per value")->required();
    sweep_cmd->add_option("--epsilon", sweep_epsilons,
                          "eps per config (single value broadcasts; default 0.05)");
    sweep_cmd->add_option("--m", sweep_m, "samples per attempted update");
    sweep_cmd->add_option("--delta", sweep_delta, "PAC confidence");
    sweep_cmd->add_option("--seed", sweep_seed, "base seed (run i uses seed+i)")->required();
    sweep_cmd->add_option("--runs", sweep_runs, "runs per config");
    sweep_cmd->add_option("--max-steps", sweep_budget, "step budget per run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return e.get_name() == "CallForHelp" ? code : 1;
    }

    std::vector<std::string> warnings;

    if (analyze->parsed()) {
        const Mdp mdp = blackwell::load_mdp_file(mdp_path);
        const Policy policy = policy_or_optimal(mdp, policy_text, gamma);
        const blackwell::ValueVector values = blackwell::evaluate(mdp, policy, gamma);
        const Eigen::MatrixXd q = blackwell::q_values_from(mdp, values);
        const blackwell::GainBias gb = blackwell::gain_bias(mdp, policy);
        if (gb.multichain)
            warnings.push_back("policy induces a multichain process; gain varies by state");
        ordered_json results;
        results["policy"] = policy_json(mdp, policy);
        results["expected_initial_value"] = mdp.initial().dot(values.values);
        ordered_json table = ordered_json::array();
        for (int s = 0; s < mdp.state_count(); ++s) {
            ordered_json row;
            row["state"] = mdp.state_name(s);
            row["value"] = values.values[s];
            row["gain"] = gb.gain[s];
            row["bias"] = gb.bias[s];
            for (int a : mdp.defined_actions(s))
                row["q_" + mdp.action_name(a)] = q(s, a);
            table.push_back(std::move(row));
        }
        results["table"] = std::move(table);
        ordered_json inputs{{"mdp", mdp_path}, {"gamma", gamma}};
        if (!policy_text.empty()) inputs["policy"] = policy_text;
        emit("analyze", inputs, results, warnings, format);
        return 0;
    }

    if (gamma_star_cmd->parsed()) {
        const Mdp mdp = blackwell::load_mdp_file(mdp_path);
        const blackwell::BlackwellReport report =
            blackwell::find_blackwell(mdp, tolerance, cap);
        warnings = report.warnings;
        ordered_json results;
        results["gamma_star"] = report.gamma_star;
        results["beta"] = policy_json(mdp, report.beta);
        results["certified_grid"] = report.certified_grid;
        if (const auto spec = blackwell::recognize_family(mdp)) {
            ordered_json closed;
            closed["family"] = spec->family == blackwell::Family::chain ? "chain" : "two_state";
            closed["gamma_star_closed_form"] = blackwell::gamma_star_closed_form(*spec);
            closed["difference"] =
                std::abs(blackwell::gamma_star_closed_form(*spec) - report.gamma_star);
            results["closed_form"] = std::move(closed);
        }
        for (const std::string& w :
             blackwell::threshold_cross_check_warnings(mdp, report.gamma_star))
            warnings.push_back(w);
        ordered_json table = ordered_json::array();
        for (const auto& record : report.crossovers) {
            ordered_json row;
            row["competitor"] = blackwell::format_policy(mdp, record.competitor);
            row["state"] = record.state >= 0 ? mdp.state_name(record.state) : "";
            row["crossover_gamma"] = record.gamma;
            row["value_gap"] = record.value_gap;
            row["tied"] = record.tied;
            table.push_back(std::move(row));
        }
        results["table"] = std::move(table);
        emit("gamma-star", {{"mdp", mdp_path}, {"tolerance", tolerance}}, results, warnings,
             format);
        return 0;
    }

    if (regret_cmd->parsed()) {
        const Mdp mdp = blackwell::load_mdp_file(mdp_path);
        const blackwell::BlackwellReport report = blackwell::find_blackwell(mdp, 1e-10, cap);
        warnings = report.warnings;
        const Policy policy = policy_or_optimal(mdp, policy_text, gamma_learn);
        const blackwell::RegretReport regret =
            blackwell::blackwell_regret(mdp, policy, gamma_learn, report);
        ordered_json results;
        results["policy"] = policy_json(mdp, policy);
        ordered_json row;
        row["gamma_learn"] = regret.gamma_learn;
        row["gamma_star"] = regret.gamma_star;
        row["gamma_prime"] = regret.gamma_prime;
        row["blackwell_regret"] = regret.blackwell_regret;
        row["standard_regret_at_gamma_prime"] = regret.standard_regret_at_gamma_prime;
        if (gamma_learn < report.gamma_star) {
            const blackwell::Lemma1Check check =
                blackwell::lemma1_check(mdp, policy, gamma_learn, report);
            row["regret_at_gamma_star"] = check.regret_at_gamma_star;
            row["lemma_agrees"] = check.agree;
        } else {
            warnings.push_back(
                "gamma_learn >= gamma_star: the myopic-regime identity does not apply");
        }
        results["table"] = ordered_json::array({row});
        ordered_json inputs{{"mdp", mdp_path}, {"gamma_learn", gamma_learn}};
        if (!policy_text.empty()) inputs["policy"] = policy_text;
        emit("regret", inputs, results, warnings, format);
        return 0;
    }

    if (gaps_cmd->parsed()) {
        const Mdp mdp = blackwell::load_mdp_file(mdp_path);
        const Policy policy = policy_or_optimal(mdp, policy_text, gamma);
        ordered_json results;
        results["policy"] = policy_json(mdp, policy);
        results["max_action_gap"] = blackwell::max_action_gap(mdp, policy, gamma);
        std::vector<int> targets;
        if (!state_name.empty()) {
            const int s = mdp.state_index(state_name);
            if (s < 0)
                throw blackwell::ValidationError("unknown state \"" + state_name + "\"");
            targets.push_back(s);
        } else {
            for (int s = 0; s < mdp.state_count(); ++s)
                if (mdp.defined_actions(s).size() >= 2) targets.push_back(s);
        }
        ordered_json table = ordered_json::array();
        for (int s : targets) {
            const blackwell::GapReport gap = blackwell::policy_gap(mdp, policy, gamma, s, cap);
            ordered_json row;
            row["state"] = mdp.state_name(s);
            row["gamma"] = gamma;
            row["action_gap"] = blackwell::action_gap(mdp, gamma, s);
            row["policy_gap"] = gap.policy_gap;
            row["witness"] = blackwell::format_policy(mdp, gap.witness);
            table.push_back(std::move(row));
        }
        results["table"] = std::move(table);
        ordered_json inputs{{"mdp", mdp_path}, {"gamma", gamma}};
        if (!state_name.empty()) inputs["state"] = state_name;
        if (!policy_text.empty()) inputs["policy"] = policy_text;
        emit("gaps", inputs, results, warnings, format);
        return 0;
    }

    if (pivot_cmd->parsed()) {
        const Mdp mdp = blackwell::load_mdp_file(mdp_path);
        std::vector<double> gammas;
        if (!gamma_list_text.empty()) gammas = parse_gamma_list(gamma_list_text);
        const blackwell::PivotScanReport scan = blackwell::pivot_scan(mdp, gammas, 1e-10, cap);
        warnings = scan.warnings;
        ordered_json results;
        results["gamma_star"] = scan.gamma_star;
        results["beta"] = policy_json(mdp, scan.beta);
        results["vacuous"] = scan.vacuous;
        ordered_json pivots = ordered_json::array();
        for (int s : scan.pivot_states) pivots.push_back(mdp.state_name(s));
        results["pivot_states"] = std::move(pivots);
        ordered_json table = ordered_json::array();
        for (std::size_t j = 0; j < scan.gammas.size(); ++j) {
            for (int s = 0; s < mdp.state_count(); ++s) {
                if (std::isnan(scan.gaps(j, s))) continue;
                ordered_json row;
                row["gamma"] = scan.gammas[j];
                row["state"] = mdp.state_name(s);
                row["policy_gap"] = scan.gaps(j, s);
                row["is_pivot"] =
                    !scan.pivot_states.empty() && s == scan.pivot_states.front();
                table.push_back(std::move(row));
            }
        }
        results["table"] = std::move(table);
        ordered_json chain_checks = ordered_json::array();
        for (const auto& check : scan.chain_checks) {
            ordered_json row;
            row["gamma"] = check.gamma;
            row["witness"] = blackwell::format_policy(mdp, check.witness);
            row["v_beta_at_gamma"] = check.v_beta_at_gamma;
            row["v_witness_at_gamma"] = check.v_witness_at_gamma;
            row["v_witness_at_gamma_star"] = check.v_witness_at_gamma_star;
            row["v_beta_at_gamma_star"] = check.v_beta_at_gamma_star;
            row["holds_1"] = check.holds_1;
            row["holds_2"] = check.holds_2;
            row["holds_3"] = check.holds_3;
            chain_checks.push_back(std::move(row));
        }
        results["inequality_chain"] = std::move(chain_checks);
        ordered_json inputs{{"mdp", mdp_path}};
        if (!gamma_list_text.empty()) inputs["gammas"] = gamma_list_text;
        emit("pivot-scan", inputs, results, warnings, format);
        return 0;
    }

    if (generate_cmd->parsed()) {
        const bool chain = gen_chain->parsed();
        const Mdp mdp = chain ? blackwell::generate_chain(chain_h, chain_eps, gen_r_max)
                              : blackwell::generate_two_state(two_p, two_r_d, gen_r_max);
        std::ofstream out(out_path);
        if (!out) throw blackwell::ValidationError("cannot write to " + out_path);
        out << blackwell::serialize_mdp(mdp);
        ordered_json inputs;
        inputs["family"] = chain ? "chain" : "two_state";
        if (chain) {
            inputs["h"] = chain_h;
            inputs["eps"] = chain_eps;
        } else {
            inputs["p"] = two_p;
            inputs["r_d"] = two_r_d;
        }
        inputs["r_max"] = gen_r_max;
        inputs["out"] = out_path;
        ordered_json results;
        ordered_json row;
        row["path"] = out_path;
        row["states"] = mdp.state_count();
        row["policies"] = blackwell::policy_count(mdp);
        results["table"] = ordered_json::array({row});
        emit("generate", inputs, results, warnings, format);
        return 0;
    }

    if (diameter_cmd->parsed()) {
        const Mdp mdp = blackwell::load_mdp_file(mdp_path);
        const blackwell::DiameterResult result = blackwell::diameter(mdp);
        ordered_json results;
        ordered_json row;
        row["diameter"] = result.diameter;
        row["from"] = mdp.state_name(result.from);
        row["to"] = mdp.state_name(result.to);
        results["table"] = ordered_json::array({row});
        emit("diameter", {{"mdp", mdp_path}}, results, warnings, format);
        return 0;
    }

    if (transient_cmd->parsed()) {
        const Mdp mdp = blackwell::load_mdp_file(mdp_path);
        std::vector<double> gammas = {0.9, 0.99, 0.999};
        if (!gamma_list_text.empty()) gammas = parse_gamma_list(gamma_list_text);
        const blackwell::TransientRewardCheck check =
            blackwell::rewards_all_transient(mdp, cap);
        const blackwell::VmaxTrend trend = blackwell::vmax_trend(mdp, gammas);
        if (!trend.communicating)
            warnings.push_back("state space is not communicating; V_max is taken over all "
                               "states");
        ordered_json results;
        results["all_rewards_transient"] = check.all_transient;
        if (check.witness) {
            ordered_json witness;
            witness["policy"] = blackwell::format_policy(mdp, check.witness->first);
            witness["state"] = mdp.state_name(check.witness->second);
            results["witness"] = std::move(witness);
        }
        results["communicating"] = trend.communicating;
        ordered_json table = ordered_json::array();
        for (std::size_t i = 0; i < trend.gammas.size(); ++i) {
            ordered_json row;
            row["gamma"] = trend.gammas[i];
            row["vmax"] = trend.vmax[i];
            table.push_back(std::move(row));
        }
        results["table"] = std::move(table);
        ordered_json inputs{{"mdp", mdp_path}};
        if (!gamma_list_text.empty()) inputs["gammas"] = gamma_list_text;
        emit("transient-check", inputs, results, warnings, format);
        return 0;
    }

    if (learn_cmd->parsed()) {
        const Mdp mdp = blackwell::load_mdp_file(mdp_path);
        if (learn_m > 0) learn_config.m = learn_m;
        const blackwell::LearnerTrace trace = blackwell::run_delayed_q(mdp, learn_config);
        ordered_json results;
        results["steps"] = trace.steps_taken;
        results["terminated_by"] = trace.terminated_by;
        results["greedy_policy"] = policy_json(mdp, trace.greedy_policy);
        results["m"] = trace.m_used;
        if (trace.empirical_policy_gap) {
            ordered_json gap;
            gap["state"] = mdp.state_name(trace.empirical_policy_gap->first);
            gap["q_estimate"] = trace.empirical_policy_gap->second;
            results["empirical_policy_gap"] = std::move(gap);
        }
        ordered_json table = ordered_json::array();
        for (int s = 0; s < mdp.state_count(); ++s) {
            for (int a : mdp.defined_actions(s)) {
                ordered_json row;
                row["state"] = mdp.state_name(s);
                row["action"] = mdp.action_name(a);
                row["q"] = trace.q_final(s, a);
                row["visits"] = trace.visit_counts(s, a);
                table.push_back(std::move(row));
            }
        }
        results["table"] = std::move(table);
        ordered_json inputs{{"mdp", mdp_path},
                            {"gamma", learn_config.gamma},
                            {"epsilon", learn_config.epsilon},
                            {"delta", learn_config.delta},
                            {"seed", learn_config.seed},
                            {"max_steps", learn_config.max_steps}};
        if (learn_config.m) inputs["m"] = *learn_config.m;
        emit("learn", inputs, results, warnings, format);
        return 0;
    }

    if (sweep_cmd->parsed()) {
        const Mdp mdp = blackwell::load_mdp_file(mdp_path);
        if (sweep_epsilons.empty()) sweep_epsilons.assign(sweep_gammas.size(), 0.05);
        if (sweep_epsilons.size() == 1)
            sweep_epsilons.assign(sweep_gammas.size(), sweep_epsilons.front());
        if (sweep_epsilons.size() != sweep_gammas.size())
            throw blackwell::ValidationError(
                "--epsilon must be given once or once per --gamma");
        std::vector<blackwell::LearnerConfig> configs;
        for (std::size_t i = 0; i < sweep_gammas.size(); ++i) {
            blackwell::LearnerConfig config;
            config.gamma = sweep_gammas[i];
            config.epsilon = sweep_epsilons[i];
            config.delta = sweep_delta;
            if (sweep_m > 0) config.m = sweep_m;
            config.seed = sweep_seed;
            config.max_steps = sweep_budget;
            configs.push_back(config);
        }
        const blackwell::ExperimentSummary summary =
            blackwell::experiment(mdp, configs, sweep_runs, cap);
        ordered_json results;
        ordered_json rows = ordered_json::array();
        for (const auto& row : summary.rows) {
            ordered_json r;
            r["gamma"] = row.config.gamma;
            r["epsilon"] = row.config.epsilon;
            r["m"] = row.config.m ? *row.config.m : blackwell::default_m(mdp, row.config);
            r["runs"] = row.runs;
            r["steps_mean"] = row.steps_mean;
            r["steps_stddev"] = row.steps_stddev;
            r["fraction_blackwell"] = row.fraction_blackwell;
            r["fraction_gain_optimal"] = row.fraction_gain_optimal;
            r["gap_state"] = mdp.state_name(row.gap_state);
            r["exact_policy_gap"] = row.exact_policy_gap;
            rows.push_back(std::move(r));
        }
        results["summary"] = std::move(rows);
        ordered_json table = ordered_json::array();
        for (std::size_t i = 0; i < summary.runs.size(); ++i) {
            const auto& record = summary.runs[i];
            ordered_json row;
            row["config"] = static_cast<int>(i) / sweep_runs;
            row["gamma"] = record.config.gamma;
            row["epsilon"] = record.config.epsilon;
            row["seed"] = record.config.seed;
            row["steps"] = record.steps;
            row["terminated_by"] = record.terminated_by;
            row["greedy_policy"] = blackwell::format_policy(mdp, record.greedy_policy);
            row["blackwell_optimal"] = record.blackwell_optimal;
            row["gain_optimal"] = record.gain_optimal;
            row["empirical_policy_gap"] =
                record.empirical_policy_gap ? record.empirical_policy_gap->second : 0.0;
            table.push_back(std::move(row));
        }
        results["table"] = std::move(table);
        ordered_json inputs{{"mdp", mdp_path}, {"runs", sweep_runs},
                            {"seed", sweep_seed}, {"delta", sweep_delta},
                            {"max_steps", sweep_budget}};
        inputs["gammas"] = sweep_gammas;
        inputs["epsilons"] = sweep_epsilons;
        if (sweep_m > 0) inputs["m"] = sweep_m;
        emit("sweep", inputs, results, warnings, format);
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const blackwell::CapExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const blackwell::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
