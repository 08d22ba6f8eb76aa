#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "test_util.hpp"

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Run the CLI with stdin fed from a string; capture stdout/stderr and the
/// exit code.
CliResult run_cli(const std::string& args, const std::string& stdin_data = {}) {
    static const std::string cli = QREW_CLI_PATH;
    qtest::TempDir dir;
    const auto in_path = dir.file("in.txt");
    const auto out_path = dir.file("out.txt");
    const auto err_path = dir.file("err.txt");
    {
        std::ofstream in(in_path, std::ios::binary);
        in << stdin_data;
    }
    const std::string command = cli + " " + args + " < " + in_path.string() + " > " +
                                out_path.string() + " 2> " + err_path.string();
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    return result;
}

std::string demo_inputs_joined() {
    std::string out;
    for (const auto& [input, rewrite] : qtest::demo_trace()) out += input + "\n";
    return out;
}

std::string demo_rewrites_joined() {
    std::string out;
    for (const auto& [input, rewrite] : qtest::demo_trace()) out += rewrite + "\n";
    return out;
}

TEST(CliChat, GoldenFusionReplayByteExact) {
    const auto result = run_cli("chat --approach fusion --mock rule", demo_inputs_joined());
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.out, demo_rewrites_joined());
}

TEST(CliChat, BlankLinesIgnored) {
    const auto result =
        run_cli("chat --approach fusion --mock rule",
                "\n\ncompare monthly revenue by country\n\nyearly\n\n");
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.out,
              "compare monthly revenue by country\ncompare yearly revenue by country\n");
}

TEST(CliChat, ScriptedMockReplaysIdentically) {
    const auto script = qtest::fixture_path("demo_script.json").string();
    const auto result = run_cli("chat --approach fusion --mock scripted --script " + script,
                                demo_inputs_joined());
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.out, demo_rewrites_joined());
}

TEST(CliChat, ResetStartsTheChainOver) {
    const auto result = run_cli("chat --approach fusion --mock rule",
                                "compare monthly revenue by country\n"
                                "yearly\n"
                                "/reset\n"
                                "show it as a line chart\n");
    EXPECT_EQ(result.exit_code, 0);
    // After the reset there is no base question, so the fragment echoes.
    EXPECT_EQ(result.out,
              "compare monthly revenue by country\n"
              "compare yearly revenue by country\n"
              "show it as a line chart\n");
}

TEST(CliChat, ProviderErrorKeepsSessionGoing) {
    qtest::TempDir dir;
    const auto script = dir.file("script.json");
    std::ofstream(script) << R"([{"contains": "Current question: yearly",
                                  "response": "compare yearly revenue by country"}])";
    const auto result = run_cli("chat --approach fusion --mock scripted --script " +
                                    script.string(),
                                "unknown query\nyearly\n");
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.out, "compare yearly revenue by country\n");
    EXPECT_NE(result.err.find("script_miss"), std::string::npos);
}

TEST(CliChat, SaveThenContinueViaRewriteHistory) {
    qtest::TempDir dir;
    const auto session_path = dir.file("session.json");
    const auto chat = run_cli("chat --approach fusion --mock rule --save " + session_path.string(),
                              "compare monthly revenue by country\nyearly\n");
    ASSERT_EQ(chat.exit_code, 0);
    ASSERT_TRUE(std::filesystem::exists(session_path));

    const auto rewrite = run_cli("rewrite --approach fusion --mock rule --history " +
                                 session_path.string() + " --query 'show it as a line chart'");
    EXPECT_EQ(rewrite.exit_code, 0);
    EXPECT_EQ(rewrite.out, "compare yearly revenue by country as line chart\n");
}

TEST(CliRewrite, FusionAgainstShippedSessionFixture) {
    const auto history = qtest::fixture_path("demo_session.json").string();
    const auto result = run_cli("rewrite --approach fusion --mock rule --history " + history +
                                " --query 'show it as a line chart'");
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.out, "compare yearly revenue by country as line chart\n");
}

TEST(CliRewrite, EmptyQueryIsInputError) {
    const auto result = run_cli("rewrite --mock identity --query ''");
    EXPECT_EQ(result.exit_code, 3);
    EXPECT_NE(result.err.find("empty"), std::string::npos);
}

TEST(CliRewrite, NoHistoryIdentityEchoesQuery) {
    const auto result = run_cli("rewrite --mock identity --query 'compare revenue by country'");
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_EQ(result.out, "compare revenue by country\n");
}

TEST(CliRewrite, VerbosePrintsContextAndGate) {
    const auto history = qtest::fixture_path("demo_session.json").string();
    const auto result = run_cli("rewrite --approach fusion --mock rule --history " + history +
                                " --query 'show it as a line chart' --verbose");
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_NE(result.err.find("gate fired: no"), std::string::npos);
    EXPECT_NE(result.err.find("compare yearly revenue by country"), std::string::npos);
}

TEST(CliRewrite, UnknownApproachIsConfigError) {
    const auto result = run_cli("rewrite --approach nonsense --mock identity --query q");
    EXPECT_EQ(result.exit_code, 1);
}

TEST(CliRewrite, MissingProviderIsConfigError) {
    const auto result = run_cli("rewrite --query 'compare revenue by country'");
    EXPECT_EQ(result.exit_code, 1);
    EXPECT_NE(result.err.find("--mock"), std::string::npos);
}

TEST(CliRewrite, ProviderFailureIsExitTwo) {
    qtest::TempDir dir;
    const auto script = dir.file("script.json");
    std::ofstream(script) << R"([{"contains": "never-matches", "response": "x"}])";
    const auto result = run_cli("rewrite --mock scripted --script " + script.string() +
                                " --query 'compare revenue by country' --approach rewrite");
    EXPECT_EQ(result.exit_code, 2);
}

TEST(CliConfig, ExplicitMissingConfigFailsAtStartup) {
    const auto result =
        run_cli("--config /nonexistent/qrewrite.json rewrite --mock identity --query q");
    EXPECT_EQ(result.exit_code, 1);
    EXPECT_NE(result.err.find("config"), std::string::npos);
}

TEST(CliEval, ScoreFixtureModeRendersPublishedTable) {
    const auto qa = qtest::fixture_path("scores_text_qa.json").string();
    const auto vis = qtest::fixture_path("scores_text_to_vis_long.json").string();
    const auto result = run_cli("eval --scores " + qa + " --scores " + vis);
    EXPECT_EQ(result.exit_code, 0);
    for (const char* expected :
         {"0.826", "0.751", "0.859", "0.828", "0.820", "0.773", "0.760", "0.734",
          "query_fusion", "query_rewrite", "scores_text_qa", "scores_text_to_vis_long"}) {
        EXPECT_NE(result.out.find(expected), std::string::npos) << expected;
    }
}

TEST(CliEval, GatedApproachRowsLabeledDistinctly) {
    const auto gated = qtest::fixture_path("scores_text_qa_gated.json").string();
    const auto result = run_cli("eval --scores " + gated);
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_NE(result.out.find("query_rewrite+gate"), std::string::npos);
    EXPECT_NE(result.out.find("0.871"), std::string::npos);
    EXPECT_NE(result.out.find("0.859"), std::string::npos);
}

TEST(CliEval, SyntheticCorpusFusionBeatsRewrite) {
    qtest::TempDir dir;
    const auto data = dir.file("corpus.jsonl").string();
    const auto report_path = dir.file("report.json").string();
    ASSERT_EQ(run_cli("dataset generate --task vis --conversations 5 --min-turns 6 "
                      "--max-turns 6 --seed 99 --output " + data)
                  .exit_code,
              0);
    const auto result = run_cli("eval --dataset " + data +
                                " --approaches fusion,rewrite --mock rule --jobs 2 --report " +
                                report_path);
    EXPECT_EQ(result.exit_code, 0);
    ASSERT_TRUE(std::filesystem::exists(report_path));
    const auto reports = nlohmann::json::parse(read_file(report_path));
    ASSERT_EQ(reports.size(), 1u);
    double fusion_cosine = -1.0, rewrite_cosine = -1.0;
    for (const auto& agg : reports.at(0).at("aggregates")) {
        if (agg.at("approach_id") == "query_fusion") fusion_cosine = agg.at("mean_cosine");
        if (agg.at("approach_id") == "query_rewrite") rewrite_cosine = agg.at("mean_cosine");
    }
    EXPECT_NEAR(fusion_cosine, 1.0, 1e-9);
    EXPECT_LT(rewrite_cosine, fusion_cosine);
}

TEST(CliEval, InvalidDatasetExitsOne) {
    qtest::TempDir dir;
    const auto bad = dir.file("bad.jsonl");
    std::ofstream(bad) << "{\"conversation_id\":\"c\",\"task_type\":\"text_qa\","
                          "\"questions\":[{\"turn_index\":2,\"user_query\":\"q\"}]}\n";
    const auto result = run_cli("eval --dataset " + bad.string() + " --mock rule");
    EXPECT_EQ(result.exit_code, 1);
}

TEST(CliDataset, StatsPrintsDemoNumbers) {
    const auto data = qtest::fixture_path("analytics_demo.jsonl").string();
    const auto manifest = qtest::fixture_path("analytics_demo.manifest.json").string();
    const auto result = run_cli("dataset stats --input " + data + " --manifest " + manifest);
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_NE(result.out.find("questions:                  10"), std::string::npos);
    EXPECT_NE(result.out.find("questions with chat history: 9"), std::string::npos);
    EXPECT_NE(result.out.find("10-10"), std::string::npos);
}

TEST(CliDataset, GenerateIsSeedReproducible) {
    qtest::TempDir dir;
    const auto a = dir.file("a.jsonl").string();
    const auto b = dir.file("b.jsonl").string();
    const std::string flags = "dataset generate --task vis --conversations 4 --min-turns 2 "
                              "--max-turns 6 --seed 7 --output ";
    ASSERT_EQ(run_cli(flags + a).exit_code, 0);
    ASSERT_EQ(run_cli(flags + b).exit_code, 0);
    EXPECT_EQ(read_file(a), read_file(b));
}

TEST(CliDataset, GeneratedManifestValidates) {
    qtest::TempDir dir;
    const auto data = dir.file("gen.jsonl").string();
    const auto manifest = dir.file("gen.manifest.json").string();
    ASSERT_EQ(run_cli("dataset generate --task qa --conversations 6 --min-turns 2 --max-turns 5 "
                      "--seed 13 --output " + data + " --manifest-out " + manifest)
                  .exit_code,
              0);
    const auto result = run_cli("dataset validate --input " + data + " --manifest " + manifest);
    EXPECT_EQ(result.exit_code, 0);
    EXPECT_NE(result.out.find("ok"), std::string::npos);
}

TEST(CliDataset, ValidateReportsLocationsAndExitsNonzero) {
    qtest::TempDir dir;
    const auto bad = dir.file("corrupt.jsonl");
    std::ofstream(bad) << "{\"conversation_id\":\"conv-x\",\"task_type\":\"text_qa\","
                          "\"questions\":[{\"turn_index\":1,\"user_query\":\"a\"},"
                          "{\"turn_index\":4,\"user_query\":\"b\"}]}\n";
    const auto result = run_cli("dataset validate --input " + bad.string());
    EXPECT_EQ(result.exit_code, 1);
    EXPECT_NE(result.err.find("conv-x"), std::string::npos);
}

}  // namespace
