// epistemia — command-line front end for partial epistemic models, action
// models, product updates, solvability search, and obstruction checking.
//
// Exit status: 0 on success verdicts, 1 on negative verdicts
// (invalid / unsolvable / disagreement), 2 on usage or input errors,
// 3 when a search gives up on its node budget.

#include <epistemia/epistemia.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace epistemia;

namespace {

constexpr int exit_success = 0;
constexpr int exit_negative = 1;
constexpr int exit_usage = 2;
constexpr int exit_budget = 3;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw error(path + ": " + e.what());
    }
}

bool is_complex_json(const json& j) { return j.contains("facets"); }

int infer_num_agents(const json& j) {
    int n = 0;
    if (j.contains("rel"))
        for (const auto& [key, pairs] : j.at("rel").items()) n = std::max(n, std::stoi(key) + 1);
    return n;
}

/// Loads a Kripke model from either a complex file (derived model) or a
/// model file.
PartialEpistemicModel load_model(const std::string& path) {
    json j = load_json(path);
    if (is_complex_json(j)) return derive_model(complex_from_json(j));
    return model_from_json(j, infer_num_agents(j));
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

json trace_to_json(const FalsificationTrace& trace, const PartialEpistemicModel& m) {
    json steps = json::array();
    for (std::size_t i = 0; i < trace.worlds.size(); ++i) {
        json step;
        if (i > 0) step["agent"] = trace.agents[i - 1];
        step["world"] = m.keys[static_cast<std::size_t>(trace.worlds[i])];
        steps.push_back(std::move(step));
    }
    return steps;
}

json morphism_to_json(const std::vector<std::vector<int>>& images,
                      const PartialEpistemicModel& src, const PartialEpistemicModel& dst) {
    json out = json::object();
    for (std::size_t w = 0; w < images.size(); ++w) {
        json arr = json::array();
        for (int u : images[w]) arr.push_back(dst.keys[static_cast<std::size_t>(u)]);
        out[src.keys[w]] = std::move(arr);
    }
    return out;
}

SimplicialTaskOrProtocol build_protocol(const std::string& name, int n) {
    if (name == "mp") return mp_protocol(input_model(n));
    if (name == "identity") return identity_protocol(input_model(n));
    throw error("unknown protocol: " + name + " (expected mp or identity)");
}

SimplicialTaskOrProtocol build_task(const std::string& name, int n) {
    if (name == "consensus") return consensus_simplicial_task(n);
    throw error("unknown task: " + name + " (expected consensus)");
}

int run(int argc, char** argv) {
    CLI::App app{"epistemia — epistemic solvability toolkit"};
    app.require_subcommand(1);

    int n = 0;
    std::vector<int> values;
    std::string input_file, model_file, actions_file, protocol_file, task_file, file;
    std::string formula_text, world_key, task_kind;
    std::string protocol_name = "mp", task_name = "consensus";
    long long budget = 1000000;
    bool quiet = false, as_dot = false, as_json = false;

    auto* gen_input = app.add_subcommand("gen-input", "write the input model for n agents");
    gen_input->add_option("--n", n, "number of agents")->required();
    gen_input->add_option("--values", values, "input value set (default 0..n-1)");

    auto* gen_mp0 = app.add_subcommand(
        "gen-mp0", "write the value-blind synchronous message passing action model");
    gen_mp0->add_option("--n", n, "number of agents")->required();

    auto* gen_mp = app.add_subcommand(
        "gen-mp", "write the full synchronous message passing action model for an input model");
    gen_mp->add_option("--input", input_file, "input model JSON file")->required();

    auto* gen_task = app.add_subcommand("gen-task", "write a task action model");
    gen_task->add_option("kind", task_kind, "task kind (consensus)")->required();
    gen_task->add_option("--n", n, "number of agents")->required();

    auto* update = app.add_subcommand("update", "product update of a model by an action model");
    update->add_option("--model", model_file, "model or complex JSON file")->required();
    update->add_option("--actions", actions_file, "action model JSON file")->required();

    auto* check = app.add_subcommand("check", "evaluate a formula on a model");
    check->add_option("--model", model_file, "model or complex JSON file")->required();
    check->add_option("--formula", formula_text, "formula text")->required();
    check->add_option("--world", world_key, "check at one world instead of all");

    auto* solve = app.add_subcommand("solve", "decide task solvability by morphism search");
    solve->add_option("--input", input_file, "input model JSON file")->required();
    solve->add_option("--protocol", protocol_file, "protocol action model JSON file")->required();
    solve->add_option("--task", task_file, "task action model JSON file")->required();
    solve->add_option("--budget", budget, "search node budget");

    auto* obstruct = app.add_subcommand(
        "obstruct", "verify a logical obstruction against consensus over message passing");
    obstruct->add_option("--n", n, "number of agents")->required();
    obstruct->add_option("--formula", formula_text, "candidate formula (default: built-in)");
    obstruct->add_flag("--quiet", quiet, "omit the falsification trace");

    auto* bridge = app.add_subcommand(
        "bridge", "compare the topological and logical solvability verdicts");
    bridge->add_option("--n", n, "number of agents")->required();
    bridge->add_option("--protocol", protocol_name, "protocol kind: mp or identity");
    bridge->add_option("--task", task_name, "task kind: consensus");
    bridge->add_option("--budget", budget, "morphism search node budget");

    auto* exp = app.add_subcommand("export", "re-serialize a model or complex file");
    exp->add_option("file", file, "model or complex JSON file")->required();
    exp->add_flag("--dot", as_dot, "emit Graphviz DOT");
    exp->add_flag("--json", as_json, "emit normalized JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_success : exit_usage;
    }

    if (gen_input->parsed()) {
        emit(complex_to_json(input_model(n, values)));
        return exit_success;
    }

    if (gen_mp0->parsed()) {
        emit(action_model_to_json(mp0(n).model));
        return exit_success;
    }

    if (gen_mp->parsed()) {
        json j = load_json(input_file);
        if (!is_complex_json(j)) throw error("gen-mp expects a complex JSON file");
        emit(action_model_to_json(mp_full(complex_from_json(j)).model));
        return exit_success;
    }

    if (gen_task->parsed()) {
        if (task_kind != "consensus") throw error("unknown task kind: " + task_kind);
        emit(action_model_to_json(consensus_task(n)));
        return exit_success;
    }

    if (update->parsed()) {
        PartialEpistemicModel m = load_model(model_file);
        ActionModel a = action_model_from_json(load_json(actions_file), m.num_agents(),
                                               ParseLimits{m.num_agents(), {}});
        UpdateModel um = product_update(m, a);
        emit(update_model_to_json(um, m, a));
        return exit_success;
    }

    if (check->parsed()) {
        PartialEpistemicModel m = load_model(model_file);
        FormulaPtr f = parse(formula_text, ParseLimits{m.num_agents(), {}});
        json out;
        if (!world_key.empty()) {
            int w = m.world_index(world_key);
            bool ok = eval(m, w, f);
            out["verdict"] = ok ? "valid" : "invalid";
            out["world"] = world_key;
            emit(out);
            return ok ? exit_success : exit_negative;
        }
        ValidityResult res = is_valid(m, f);
        out["verdict"] = res.valid ? "valid" : "invalid";
        if (!res.valid) out["witness"] = m.keys[static_cast<std::size_t>(res.witness)];
        emit(out);
        return res.valid ? exit_success : exit_negative;
    }

    if (solve->parsed()) {
        json ij = load_json(input_file);
        if (!is_complex_json(ij)) throw error("solve expects a complex JSON input file");
        SimplicialModel input = complex_from_json(ij);
        int agents = input.complex.num_agents();
        ParseLimits limits{agents, {}};
        ActionModel protocol = action_model_from_json(load_json(protocol_file), agents, limits);
        ActionModel task = action_model_from_json(load_json(task_file), agents, limits);
        SolvabilityInstance inst = make_instance(std::move(input), std::move(protocol),
                                                 std::move(task));
        SearchResult res = search_solution(inst, budget);
        json out;
        out["verdict"] = to_string(res.verdict);
        out["nodes"] = res.nodes;
        if (res.verdict == SearchVerdict::found)
            out["witness"] = morphism_to_json(res.morphism, inst.protocol_update.model,
                                              inst.task_update.model);
        emit(out);
        if (res.verdict == SearchVerdict::found) return exit_success;
        return res.verdict == SearchVerdict::unsolvable ? exit_negative : exit_budget;
    }

    if (obstruct->parsed()) {
        SimplicialModel input = input_model(n);
        MpActionModel mp = mp_full(input);
        SolvabilityInstance inst =
            make_instance(std::move(input), std::move(mp.model), consensus_task(n));
        FormulaPtr phi = formula_text.empty()
                             ? build_phi(n)
                             : parse(formula_text, ParseLimits{n, {}});
        ObstructionResult res = check_obstruction(inst, phi);
        const PartialEpistemicModel& pm = inst.protocol_update.model;
        json out;
        out["verdict"] = to_string(res.verdict);
        if (res.witness)
            out["witness"] = pm.keys[static_cast<std::size_t>(*res.witness)];
        if (res.task_counterexample)
            out["task_counterexample"] =
                inst.task_update.model.keys[static_cast<std::size_t>(*res.task_counterexample)];
        if (res.verdict == ObstructionVerdict::obstruction && !quiet)
            out["trace"] = trace_to_json(res.trace, pm);
        emit(out);
        return res.verdict == ObstructionVerdict::obstruction ? exit_success : exit_negative;
    }

    if (bridge->parsed()) {
        SimplicialTaskOrProtocol protocol = build_protocol(protocol_name, n);
        SimplicialTaskOrProtocol task = build_task(task_name, n);
        ProbeReport rep = equivalence_probe(protocol, task, budget);
        json out;
        out["verdict"] = !rep.definitive ? "budget-exceeded" : (rep.agree ? "agree" : "disagree");
        out["topological_exists"] = rep.topological_exists;
        out["logical"] = to_string(rep.morphism_search.verdict);
        out["nodes"] = rep.morphism_search.nodes;
        if (rep.decision_map.found) {
            json dm = json::object();
            for (const auto& [from, to] : rep.decision_map.map)
                dm["(" + std::to_string(from.agent) + "," + std::to_string(from.value) + ")"] =
                    "(" + std::to_string(to.agent) + "," + std::to_string(to.value) + ")";
            out["decision_map"] = std::move(dm);
        }
        emit(out);
        if (!rep.definitive) return exit_budget;
        return rep.agree ? exit_success : exit_negative;
    }

    if (exp->parsed()) {
        if (as_dot == as_json) throw error("export needs exactly one of --dot or --json");
        json j = load_json(file);
        if (is_complex_json(j)) {
            SimplicialModel sm = complex_from_json(j);
            if (as_dot)
                std::cout << to_dot(sm.complex);
            else
                emit(complex_to_json(sm));
        } else if (j.contains("pre")) {
            ActionModel a = action_model_from_json(j, infer_num_agents(j),
                                                   ParseLimits{infer_num_agents(j), {}});
            if (as_dot)
                std::cout << to_dot(a.frame());
            else
                emit(action_model_to_json(a));
        } else {
            PartialEpistemicModel m = model_from_json(j, infer_num_agents(j));
            if (as_dot)
                std::cout << to_dot(m);
            else
                emit(model_to_json(m));
        }
        return exit_success;
    }

    throw error("no command selected");
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}
