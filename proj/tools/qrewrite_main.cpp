// qrewrite: conversational query rewriting from the command line.
// Subcommands: rewrite (one-shot), chat (interactive/piped loop),
// eval (batch evaluation and reporting), dataset (validate/stats/generate).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "qrew/qrew.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qrew;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitProvider = 2;
constexpr int kExitInput = 3;

struct CliConfig {
    std::string provider_config;
    std::string template_manifest;
    std::string default_approach;  // "rewrite" or "fusion"
    int verbosity = 0;
};

/// Discovery order: explicit --config flag, then QREWRITE_CONFIG, then the
/// per-user config path. An explicitly named file that is missing is a
/// startup error; absent defaults just mean built-in behavior.
CliConfig load_cli_config(const std::string& explicit_path) {
    std::string path = explicit_path;
    bool required = !explicit_path.empty();
    if (path.empty()) {
        if (const char* env = std::getenv("QREWRITE_CONFIG"); env != nullptr && *env != '\0') {
            path = env;
            required = true;
        }
    }
    if (path.empty()) {
        const char* xdg = std::getenv("XDG_CONFIG_HOME");
        const char* home = std::getenv("HOME");
        if (xdg != nullptr && *xdg != '\0') {
            path = std::string(xdg) + "/qrewrite/config.json";
        } else if (home != nullptr && *home != '\0') {
            path = std::string(home) + "/.config/qrewrite/config.json";
        }
    }
    CliConfig cfg;
    if (path.empty() || (!required && !fs::exists(path))) {
        return cfg;
    }
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path +
                          " (pass --config or set QREWRITE_CONFIG to a readable file)");
    }
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw ConfigError("config file is not valid JSON: " + path);
    }
    cfg.provider_config = j.value("provider_config", std::string());
    cfg.template_manifest = j.value("template_manifest", std::string());
    cfg.default_approach = j.value("default_approach", std::string());
    cfg.verbosity = j.value("verbosity", 0);
    return cfg;
}

std::unique_ptr<GenerativeModelProvider> make_provider(const std::string& mock,
                                                       const std::string& script_path,
                                                       const std::string& provider_config) {
    if (!mock.empty()) {
        if (mock == "identity") return std::make_unique<EchoQueryMock>();
        if (mock == "rule") return std::make_unique<RuleFusionMock>();
        if (mock == "scripted") {
            if (script_path.empty()) {
                throw ConfigError("--mock scripted requires --script FILE");
            }
            return std::make_unique<ScriptedMock>(ScriptedMock::from_file(script_path));
        }
        throw ConfigError("unknown mock '" + mock + "' (expected identity, rule or scripted)");
    }
    if (!provider_config.empty()) {
        if (!fs::exists(provider_config)) {
            throw ConfigError("provider config does not exist: " + provider_config);
        }
        return std::make_unique<HttpModelProvider>(HttpProviderConfig::from_file(provider_config));
    }
    throw ConfigError("no model configured: pass --mock identity|rule|scripted "
                      "or --provider-config FILE");
}

TemplateRegistry make_templates(const std::string& manifest_path) {
    if (manifest_path.empty()) return TemplateRegistry::builtin();
    if (!fs::exists(manifest_path)) {
        throw ConfigError("template manifest does not exist: " + manifest_path);
    }
    return TemplateRegistry::from_manifest(manifest_path);
}

/// "rewrite", "fusion", optionally with "+gate".
Approach parse_approach(const std::string& name, TaskType task) {
    const bool gated = name.ends_with("+gate");
    const std::string base = gated ? name.substr(0, name.size() - 5) : name;
    Approach approach;
    if (base == "fusion") {
        approach.config = RewriteConfig::query_fusion();
        approach.approach_id = "query_fusion";
    } else if (base == "rewrite") {
        approach.config = RewriteConfig::query_rewrite();
        approach.approach_id = "query_rewrite";
    } else {
        throw ConfigError("unknown approach '" + name + "' (expected rewrite or fusion, "
                          "optionally with +gate)");
    }
    approach.config.prompt_template_id = task == TaskType::TextToVis ? "text-to-vis" : "text-qa";
    if (gated) {
        approach.config.gate_enabled = true;
        approach.approach_id += "+gate";
    }
    return approach;
}

ConversationSession load_session_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open history file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_session(ss.str());
}

void save_session_file(const ConversationSession& session, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write session file: " + path);
    out << serialize_session(session) << '\n';
}

// --- rewrite ----------------------------------------------------------------

struct RewriteArgs {
    std::string approach;
    std::string history_path;
    std::string query;
    std::string mock;
    std::string script;
    std::string session_out;
    bool gate = false;
    int k = -1;  // -1 keeps the preset value
    bool verbose = false;
};

int cmd_rewrite(const CliConfig& cli, const RewriteArgs& args) {
    if (text::is_blank(args.query)) {
        std::cerr << "error: --query must not be empty\n";
        return kExitInput;
    }
    const std::string approach_name =
        !args.approach.empty() ? args.approach
                               : (!cli.default_approach.empty() ? cli.default_approach : "fusion");
    Approach approach = parse_approach(approach_name, TaskType::TextToVis);
    if (args.gate) approach.config.gate_enabled = true;
    if (args.k >= 0) approach.config.k = args.k;

    auto provider = make_provider(args.mock, args.script, cli.provider_config);
    RewriteEngine engine(make_templates(cli.template_manifest));

    ConversationSession session = args.history_path.empty()
                                      ? ConversationSession::create("cli")
                                      : load_session_file(args.history_path);

    const RewriteOutcome outcome =
        engine.rewrite(session, args.query, approach.config, *provider);
    std::cout << outcome.rewritten_query << '\n';
    if (args.verbose) {
        std::cerr << "approach: " << approach.approach_id << '\n';
        std::cerr << "gate fired: " << (outcome.was_gated ? "yes" : "no") << '\n';
        std::cerr << "context items (" << outcome.context_used.size() << "):\n";
        for (std::size_t i = 0; i < outcome.context_used.size(); ++i) {
            std::cerr << "  [" << outcome.context_used.source_indices[i] << "] "
                      << outcome.context_used.items[i].query << '\n';
        }
    }
    if (!args.session_out.empty()) {
        Turn turn;
        turn.index = session.turns.empty() ? 1 : session.turns.back().index + 1;
        turn.user_query = outcome.original_query;
        turn.rewritten_query = outcome.rewritten_query;
        save_session_file(session_append(session, std::move(turn)), args.session_out);
    }
    return kExitOk;
}

// --- chat -------------------------------------------------------------------

struct ChatArgs {
    std::string approach;
    std::string mock;
    std::string script;
    std::string save_path;
    std::string session_id = "chat";
    bool gate = false;
};

int cmd_chat(const CliConfig& cli, const ChatArgs& args) {
    const std::string approach_name =
        !args.approach.empty() ? args.approach
                               : (!cli.default_approach.empty() ? cli.default_approach : "fusion");
    Approach approach = parse_approach(approach_name, TaskType::TextToVis);
    if (args.gate) approach.config.gate_enabled = true;

    auto provider = make_provider(args.mock, args.script, cli.provider_config);
    RewriteEngine engine(make_templates(cli.template_manifest));

    const bool fusion = approach.config.history_source == HistorySource::RewrittenQueries;
    const bool interactive = isatty(fileno(stdin)) != 0;
    ConversationSession session = ConversationSession::create(args.session_id);

    std::string line;
    while (true) {
        if (interactive) std::cerr << "> " << std::flush;
        if (!std::getline(std::cin, line)) break;
        const std::string query = text::trim_copy(line);
        if (query.empty()) continue;
        if (query == "/exit" || query == "/quit") break;
        if (query == "/reset") {  // start a fresh conversation, e.g. on topic change
            session = ConversationSession::create(args.session_id);
            continue;
        }
        try {
            if (fusion) {
                auto [next, outcome] =
                    engine.advance_fusion(session, query, std::nullopt, approach.config, *provider);
                session = std::move(next);
                std::cout << outcome.rewritten_query << std::endl;
            } else {
                const RewriteOutcome outcome =
                    engine.rewrite(session, query, approach.config, *provider);
                Turn turn;
                turn.index = session.turns.empty() ? 1 : session.turns.back().index + 1;
                turn.user_query = query;
                turn.rewritten_query = outcome.rewritten_query;
                session = session_append(session, std::move(turn));
                std::cout << outcome.rewritten_query << std::endl;
            }
        } catch (const ProviderError& e) {
            std::cerr << "error: " << e.what() << '\n';  // keep the session going
        }
    }
    if (!args.save_path.empty()) {
        save_session_file(session, args.save_path);
    }
    return kExitOk;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
    std::string dataset_path;
    std::string manifest_path;
    std::vector<std::string> score_fixtures;
    std::string approaches = "fusion,rewrite";
    std::string mock;
    std::string script;
    std::string report_path;
    int jobs = 0;  // 0 = hardware concurrency
    std::size_t embed_dim = HashEmbedder::kDefaultDimension;
};

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string trimmed = text::trim_copy(item);
        if (!trimmed.empty()) out.push_back(trimmed);
    }
    return out;
}

int cmd_eval(const CliConfig& cli, const EvalArgs& args) {
    std::vector<std::pair<std::string, EvalReport>> reports;

    if (!args.score_fixtures.empty()) {
        for (const auto& path : args.score_fixtures) {
            const std::string label = fs::path(path).stem().string();
            reports.emplace_back(label, aggregate_fixture(label, load_score_fixture(path)));
        }
    } else {
        if (args.dataset_path.empty()) {
            throw ConfigError("eval needs --dataset FILE or at least one --scores FILE");
        }
        Dataset dataset;
        try {
            std::optional<fs::path> manifest;
            if (!args.manifest_path.empty()) manifest = fs::path(args.manifest_path);
            dataset = load_dataset(args.dataset_path, manifest);
        } catch (const SchemaError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitConfig;
        }

        std::vector<Approach> approaches;
        for (const auto& name : split_csv(args.approaches)) {
            approaches.push_back(parse_approach(name, dataset.task_type));
        }
        auto provider = make_provider(args.mock, args.script, cli.provider_config);
        HashEmbedder embedder(args.embed_dim);
        RewriteEngine engine(make_templates(cli.template_manifest));
        EvalOptions options;
        options.jobs = args.jobs > 0
                           ? args.jobs
                           : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        EvalReport report =
            run_eval(dataset, approaches, *provider, embedder, nullptr, options, engine);
        if (!report.failures.empty()) {
            std::cerr << "warning: " << report.failures.size()
                      << " conversation(s) aborted on provider errors (see report)\n";
        }
        reports.emplace_back(dataset.dataset_id, std::move(report));
    }

    std::vector<std::pair<std::string, const EvalReport*>> views;
    views.reserve(reports.size());
    for (const auto& [label, report] : reports) views.emplace_back(label, &report);
    std::cout << render_comparison_table(views);

    if (!args.report_path.empty()) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& [label, report] : reports) out.push_back(to_json(report));
        std::ofstream file(args.report_path);
        if (!file) throw ConfigError("cannot write report file: " + args.report_path);
        file << out.dump(2) << '\n';
    }
    return kExitOk;
}

// --- dataset ----------------------------------------------------------------

int cmd_dataset_validate(const std::string& input, const std::string& manifest) {
    try {
        std::optional<fs::path> m;
        if (!manifest.empty()) m = fs::path(manifest);
        const Dataset dataset = load_dataset(input, m);
        const DatasetStats stats = compute_stats(dataset);
        std::cout << "ok: " << dataset.dataset_id << " (" << dataset.conversations.size()
                  << " conversations, " << stats.n_questions << " questions)\n";
        return kExitOk;
    } catch (const SchemaError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    }
}

int cmd_dataset_stats(const std::string& input, const std::string& manifest) {
    std::optional<fs::path> m;
    if (!manifest.empty()) m = fs::path(manifest);
    const Dataset dataset = load_dataset(input, m);
    const DatasetStats stats = compute_stats(dataset);
    std::cout << "dataset:                    " << dataset.dataset_id << '\n'
              << "task:                       " << to_string(dataset.task_type) << '\n'
              << "questions:                  " << stats.n_questions << '\n'
              << "questions with chat history: " << stats.n_with_history << '\n'
              << "chat length:                " << stats.chat_length_min << "-"
              << stats.chat_length_max << '\n'
              << "question types:             " << stats.n_distinct_intents << '\n';
    return kExitOk;
}

struct GenerateArgs {
    std::string task = "vis";
    int conversations = 5;
    int min_turns = 2;
    int max_turns = 5;
    std::uint64_t seed = 0;
    std::string output;
    std::string manifest_out;
};

int cmd_dataset_generate(const GenerateArgs& args) {
    SyntheticProfile profile;
    profile.task_type = args.task == "qa" ? TaskType::TextQA : TaskType::TextToVis;
    profile.n_conversations = args.conversations;
    profile.min_turns = args.min_turns;
    profile.max_turns = args.max_turns;
    profile.seed = args.seed;
    const Dataset dataset = generate_synthetic(profile);
    save_dataset(dataset, args.output);
    if (!args.manifest_out.empty()) {
        const DatasetStats stats = compute_stats(dataset);
        DatasetManifest manifest;
        manifest.dataset_id = dataset.dataset_id;
        manifest.task_type = dataset.task_type;
        manifest.declared_stats.n_questions = stats.n_questions;
        manifest.declared_stats.n_with_history = stats.n_with_history;
        manifest.declared_stats.chat_length_min = stats.chat_length_min;
        manifest.declared_stats.chat_length_max = stats.chat_length_max;
        manifest.declared_stats.n_question_types = stats.n_distinct_intents;
        std::ofstream out(args.manifest_out);
        if (!out) throw ConfigError("cannot write manifest file: " + args.manifest_out);
        out << to_json(manifest).dump(2) << '\n';
    }
    std::cout << "wrote " << dataset.conversations.size() << " conversations to " << args.output
              << '\n';
    return kExitOk;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ProviderError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitProvider;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversational query rewriting: window rewrite, recursive fusion, "
                 "and an offline evaluation harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string template_manifest_flag;
    std::string provider_config_flag;
    app.add_option("--config", config_path, "CLI config file (JSON)");
    app.add_option("--template-manifest", template_manifest_flag,
                   "Prompt template manifest (overrides config)");
    app.add_option("--provider-config", provider_config_flag,
                   "HTTP provider config file (overrides config)");

    auto* rewrite = app.add_subcommand("rewrite", "Rewrite one query against a saved history");
    RewriteArgs rewrite_args;
    rewrite->add_option("--approach", rewrite_args.approach, "rewrite or fusion (default fusion)");
    rewrite->add_option("--history", rewrite_args.history_path, "Session file to continue from");
    rewrite->add_option("--query", rewrite_args.query, "The query to rewrite")->required();
    rewrite->add_option("--mock", rewrite_args.mock, "identity, rule or scripted");
    rewrite->add_option("--script", rewrite_args.script, "Script file for --mock scripted");
    rewrite->add_option("--save", rewrite_args.session_out, "Write the advanced session here");
    rewrite->add_option("--k", rewrite_args.k, "Override the window length");
    rewrite->add_flag("--gate", rewrite_args.gate, "Enable the needs-rewrite gate");
    rewrite->add_flag("--verbose", rewrite_args.verbose, "Show context items and gate decision");

    auto* chat = app.add_subcommand("chat", "Line-per-turn chat loop (pipe input to script it)");
    ChatArgs chat_args;
    chat->add_option("--approach", chat_args.approach, "rewrite or fusion (default fusion)");
    chat->add_option("--mock", chat_args.mock, "identity, rule or scripted");
    chat->add_option("--script", chat_args.script, "Script file for --mock scripted");
    chat->add_option("--save", chat_args.save_path, "Write the final session here");
    chat->add_option("--session-id", chat_args.session_id, "Session id for saved files");
    chat->add_flag("--gate", chat_args.gate, "Enable the needs-rewrite gate");

    auto* eval = app.add_subcommand("eval", "Replay a dataset under one or more approaches");
    EvalArgs eval_args;
    eval->add_option("--dataset", eval_args.dataset_path, "Line-delimited dataset file");
    eval->add_option("--manifest", eval_args.manifest_path, "Dataset manifest with declared stats");
    eval->add_option("--scores", eval_args.score_fixtures,
                     "Precomputed per-question score fixture(s); skips replay");
    eval->add_option("--approaches", eval_args.approaches,
                     "Comma list: fusion, rewrite, rewrite+gate, fusion+gate");
    eval->add_option("--mock", eval_args.mock, "identity, rule or scripted");
    eval->add_option("--script", eval_args.script, "Script file for --mock scripted");
    eval->add_option("--report", eval_args.report_path, "Write the JSON report here");
    eval->add_option("--jobs", eval_args.jobs, "Worker threads (default: processors)");
    eval->add_option("--embed-dim", eval_args.embed_dim, "Hash embedder dimension");

    auto* dataset = app.add_subcommand("dataset", "Validate, inspect or generate datasets");
    dataset->require_subcommand(1);

    auto* validate = dataset->add_subcommand("validate", "Check schema and declared stats");
    std::string validate_input, validate_manifest;
    validate->add_option("--input", validate_input, "Dataset file")->required();
    validate->add_option("--manifest", validate_manifest, "Manifest file");

    auto* stats = dataset->add_subcommand("stats", "Print corpus statistics");
    std::string stats_input, stats_manifest;
    stats->add_option("--input", stats_input, "Dataset file")->required();
    stats->add_option("--manifest", stats_manifest, "Manifest file");

    auto* generate = dataset->add_subcommand("generate", "Write a seeded synthetic corpus");
    GenerateArgs gen_args;
    generate->add_option("--task", gen_args.task, "qa or vis (default vis)");
    generate->add_option("--conversations", gen_args.conversations, "Number of conversations");
    generate->add_option("--min-turns", gen_args.min_turns, "Minimum questions per conversation");
    generate->add_option("--max-turns", gen_args.max_turns, "Maximum questions per conversation");
    generate->add_option("--seed", gen_args.seed, "Generator seed")->required();
    generate->add_option("--output", gen_args.output, "Output dataset file")->required();
    generate->add_option("--manifest-out", gen_args.manifest_out,
                         "Also write a manifest with the computed stats");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    return guarded([&]() -> int {
        CliConfig cli = load_cli_config(config_path);
        if (!template_manifest_flag.empty()) cli.template_manifest = template_manifest_flag;
        if (!provider_config_flag.empty()) cli.provider_config = provider_config_flag;

        if (rewrite->parsed()) return cmd_rewrite(cli, rewrite_args);
        if (chat->parsed()) return cmd_chat(cli, chat_args);
        if (eval->parsed()) return cmd_eval(cli, eval_args);
        if (validate->parsed()) return cmd_dataset_validate(validate_input, validate_manifest);
        if (stats->parsed()) return cmd_dataset_stats(stats_input, stats_manifest);
        if (generate->parsed()) return cmd_dataset_generate(gen_args);
        return kExitConfig;
    });
}
