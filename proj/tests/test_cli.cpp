#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks against the built binary: exit codes and the shapes
// of stdout. Each invocation runs in a fresh process.

namespace {

const std::string kCli = NEPHRODOSE_CLI;
const std::string kDataDir = NEPHRODOSE_DATA_DIR;
const std::string kFixtureDir = NEPHRODOSE_FIXTURE_DIR;

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout only
};

RunResult run(const std::string& args) {
    const std::string out_path =
        (std::filesystem::temp_directory_path() / "nephrodose_cli_out.txt").string();
    const std::string command = kCli + " " + args + " >" + out_path + " 2>/dev/null";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    result.output = buffer.str();
    return result;
}

std::string temp_file(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("rules check accepts the shipped pack") {
    const RunResult result = run("rules check " + kDataDir + "/sample_hegp.rules");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("0 findings") != std::string::npos);
}

TEST_CASE("rules check flags a broken pack with exit 3") {
    const RunResult result = run("rules check " + kFixtureDir + "/broken.rules");
    CHECK(result.exit_code == 3);
    CHECK(result.output.find("OverlappingBands") != std::string::npos);
}

TEST_CASE("rules check reports parse errors with exit 2") {
    const RunResult result = run("rules check " + kFixtureDir + "/syntax_error.rules");
    CHECK(result.exit_code == 2);
}

TEST_CASE("egfr prints one decimal") {
    const RunResult result = run("egfr --scr 1.0 --age 60 --sex m");
    CHECK(result.exit_code == 0);
    CHECK(result.output == "76.2\n");

    CHECK(run("egfr --scr 1.0 --age 60 --sex f").output == "56.6\n");
    CHECK(run("egfr --scr 0 --age 60 --sex m").exit_code == 1);
    CHECK(run("egfr --scr 1.0 --age 15 --sex m").exit_code == 1);
}

TEST_CASE("check exit codes mirror the verdict") {
    const std::string base = "check --pack " + kDataDir + "/sample_hegp.rules --med ALLO ";
    SUBCASE("accept") {
        const RunResult result = run(base + "--egfr 45 --dose 150 --unit mg --freq 2");
        CHECK(result.exit_code == 0);
        CHECK(result.output.find("ACCEPT") != std::string::npos);
        CHECK(result.output.find("ALLO-3") != std::string::npos);
    }
    SUBCASE("over-dose alert carries the rule id and exits 4") {
        const RunResult result = run(base + "--egfr 45 --dose 300 --unit mg --freq 3");
        CHECK(result.exit_code == 4);
        CHECK(result.output.find("exceeds-max-daily-dose") != std::string::npos);
        CHECK(result.output.find("ALLO-3") != std::string::npos);
    }
    SUBCASE("under-dose alert exits 4") {
        CHECK(run(base + "--egfr 45 --dose 50 --unit mg --freq 1").exit_code == 4);
    }
    SUBCASE("unknown medication is indeterminate, exit 5") {
        const RunResult result = run("check --pack " + kDataDir +
                                     "/sample_hegp.rules --med NOPE --egfr 45 --dose 100 "
                                     "--unit mg --freq 1");
        CHECK(result.exit_code == 5);
        CHECK(result.output.find("NO_RULE_FOR_MEDICATION") != std::string::npos);
    }
    SUBCASE("compact regimen form") {
        const RunResult result = run(base + "--egfr 45 --regimen \"300mg x3\"");
        CHECK(result.exit_code == 4);
        CHECK(run(base + "--egfr 45 --regimen \"150mg x2\"").exit_code == 0);
        CHECK(run(base + "--egfr 45 --regimen \"nonsense\"").exit_code == 1);
        CHECK(run(base + "--egfr 45 --regimen \"300mg x3\" --dose 1 --unit mg --freq 1")
                  .exit_code == 1);
        CHECK(run(base + "--egfr 45").exit_code == 1); // neither form given
    }
    SUBCASE("per-kg dose without weight is indeterminate") {
        const RunResult result = run("check --pack " + kDataDir +
                                     "/sample_hegp.rules --med GENT --egfr 70 --dose 5 "
                                     "--unit mg_per_kg --freq 1");
        CHECK(result.exit_code == 5);
        const RunResult with_weight = run("check --pack " + kDataDir +
                                          "/sample_hegp.rules --med GENT --egfr 70 --dose 5 "
                                          "--unit mg_per_kg --freq 1 --weight 80");
        CHECK(with_weight.exit_code == 0);
    }
}

TEST_CASE("usage errors exit 1") {
    CHECK(run("no-such-command").exit_code == 1);
    CHECK(run("agree").exit_code == 1);         // missing required flag
    CHECK(run("egfr --scr 1.0").exit_code == 1); // missing required flags
    CHECK(run("").exit_code == 1);               // subcommand required
}

TEST_CASE("missing files exit 2") {
    CHECK(run("rules check /no/such/pack.rules").exit_code == 2);
    CHECK(run("agree --verdicts /no/such/verdicts.csv").exit_code == 2);
}

TEST_CASE("replay, agree, discord and reports run end to end on the shipped data") {
    const std::string out = temp_file("nephrodose_cli_verdicts.csv");
    const RunResult replay = run("replay --pack " + kDataDir + "/sample_hegp.rules --log " +
                                 kDataDir + "/synthetic_hegp_log.csv --out " + out + " --summary");
    CHECK(replay.exit_code == 0);
    CHECK(replay.output.find("8251") != std::string::npos);
    CHECK(replay.output.find("5006") != std::string::npos);

    const RunResult agree = run("agree --verdicts " + out);
    CHECK(agree.exit_code == 0);
    CHECK(agree.output.find("kappa = 0.106") != std::string::npos);
    CHECK(agree.output.find("[0.068, 0.144]") != std::string::npos);
    CHECK(agree.output.find("91.93%") != std::string::npos);

    const RunResult discord = run("discord --verdicts " + out);
    CHECK(discord.exit_code == 0);
    CHECK(discord.output.find("404") != std::string::npos);

    const RunResult diagnose =
        run("diagnose --verdicts " + out + " --gold " + kDataDir + "/gold_labels.csv");
    CHECK(diagnose.exit_code == 0);
    CHECK(diagnose.output.find("tp 287") != std::string::npos);
    CHECK(diagnose.output.find("96.96%") != std::string::npos);

    const RunResult freq = run("report freq --verdicts " + out);
    CHECK(freq.exit_code == 0);
    CHECK(freq.output.find("GENT") != std::string::npos);
    CHECK(freq.output.find("53.57%") != std::string::npos);

    const RunResult rules = run("report rules --verdicts " + out + " --adjudications " +
                                kDataDir + "/adjudications.csv --total-rules 962");
    CHECK(rules.exit_code == 0);
    CHECK(rules.output.find("5/962") != std::string::npos);
    CHECK(rules.output.find("0.52%") != std::string::npos);

    const RunResult severity = run("report severity --adjudications " + kDataDir +
                                   "/adjudications.csv --format structured");
    CHECK(severity.exit_code == 0);
    CHECK(severity.output.find("\"serious_or_life_threatening\": 0") != std::string::npos);
    CHECK(severity.output.find("\"total\": 404") != std::string::npos);

    const RunResult correct = run("report correct --verdicts " + out + " --adjudications " +
                                  kDataDir + "/adjudications.csv");
    CHECK(correct.exit_code == 0);
    CHECK(correct.output.find("4863") != std::string::npos);
    CHECK(correct.output.find("97.14%") != std::string::npos);

    std::remove(out.c_str());
}

TEST_CASE("structured output is stable json") {
    const RunResult result =
        run("agree --verdicts " + kDataDir + "/synthetic_verdict_log.csv --format structured");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("\"report\": \"agreement\"") != std::string::npos);
    CHECK(result.output.find("\"both_fired\": 27") != std::string::npos);

    const RunResult again =
        run("agree --verdicts " + kDataDir + "/synthetic_verdict_log.csv --format structured");
    CHECK(result.output == again.output);
}
