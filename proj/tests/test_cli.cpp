#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
    const char* env = std::getenv("BLACKWELL_CLI");
    REQUIRE_MESSAGE(env != nullptr, "BLACKWELL_CLI must point at the CLI binary");
    return env;
}

struct CommandResult {
    int exit_code = -1;
    std::string out;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

CommandResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const std::string command =
        "cd " + dir.string() + " && " + cli_path() + " " + args + " > " + out.string() + " 2> " +
        (dir / "stderr.txt").string();
    const int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    return result;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("blackwell_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("generate then gamma-star reports the closed-form threshold") {
    TempDir dir;
    REQUIRE(run_cli("generate chain --h 2 --eps 0.25 --r-max 1 --out chain.mdp", dir.path)
                .exit_code == 0);
    const CommandResult result = run_cli("gamma-star --mdp chain.mdp", dir.path);
    REQUIRE(result.exit_code == 0);
    const auto envelope = nlohmann::json::parse(result.out);
    CHECK(std::abs(envelope["results"]["gamma_star"].get<double>() - 0.5) <= 1e-8);
    CHECK(std::abs(envelope["results"]["closed_form"]["gamma_star_closed_form"].get<double>() -
                   0.5) <= 1e-12);
    CHECK(envelope["results"]["beta"]["s0"] == "right");
}

TEST_CASE("canonical two-state instance carries the threshold warning") {
    TempDir dir;
    REQUIRE(run_cli("generate two-state --p 0.002 --r-d 0.1 --r-max 1 --out fig.mdp", dir.path)
                .exit_code == 0);
    const CommandResult result = run_cli("gamma-star --mdp fig.mdp", dir.path);
    REQUIRE(result.exit_code == 0);
    const auto envelope = nlohmann::json::parse(result.out);
    CHECK(std::abs(envelope["results"]["gamma_star"].get<double>() - 50.0 / 50.9) <= 1e-8);
    bool warned = false;
    for (const auto& warning : envelope["warnings"])
        if (warning.get<std::string>().find("0.84724541") != std::string::npos) warned = true;
    CHECK(warned);
}

TEST_CASE("gamma out of range exits with the validation code") {
    TempDir dir;
    REQUIRE(run_cli("generate chain --h 2 --eps 0.25 --r-max 1 --out chain.mdp", dir.path)
                .exit_code == 0);
    CHECK(run_cli("analyze --mdp chain.mdp --gamma 1.0", dir.path).exit_code == 1);
    CHECK(run_cli("no-such-command", dir.path).exit_code == 1);
    CHECK(run_cli("analyze --mdp chain.mdp --gamma 0.5 --no-such-flag", dir.path).exit_code ==
          1);
}

TEST_CASE("policy cap override via the environment") {
    TempDir dir;
    REQUIRE(run_cli("generate chain --h 2 --eps 0.25 --r-max 1 --out chain.mdp", dir.path)
                .exit_code == 0);
    const std::string guarded =
        "sh -c 'BLACKWELL_MDP_POLICY_CAP=3 " + cli_path() + " gamma-star --mdp chain.mdp'";
    const fs::path out = dir.path / "cap.txt";
    const int status = std::system(
        ("cd " + dir.path.string() + " && " + guarded + " > " + out.string() + " 2>&1").c_str());
    CHECK(WEXITSTATUS(status) == 2);
}

TEST_CASE("csv output round-trips the tabular payload") {
    TempDir dir;
    REQUIRE(run_cli("generate chain --h 2 --eps 0.25 --r-max 1 --out chain.mdp", dir.path)
                .exit_code == 0);
    const CommandResult json_run = run_cli("pivot-scan --mdp chain.mdp", dir.path);
    const CommandResult csv_run = run_cli("pivot-scan --mdp chain.mdp --format csv", dir.path);
    REQUIRE(json_run.exit_code == 0);
    REQUIRE(csv_run.exit_code == 0);
    const auto table = nlohmann::json::parse(json_run.out)["results"]["table"];

    std::istringstream csv(csv_run.out);
    std::string line;
    REQUIRE(std::getline(csv, line));
    CHECK(line == "gamma,state,policy_gap,is_pivot");
    std::size_t row = 0;
    while (std::getline(csv, line)) {
        REQUIRE(row < table.size());
        std::istringstream cells(line);
        std::string gamma, state, gap, pivot;
        std::getline(cells, gamma, ',');
        std::getline(cells, state, ',');
        std::getline(cells, gap, ',');
        std::getline(cells, pivot, ',');
        // numbers recover the payload's doubles exactly
        CHECK(std::strtod(gamma.c_str(), nullptr) == table[row]["gamma"].get<double>());
        CHECK(state == table[row]["state"].get<std::string>());
        CHECK(std::strtod(gap.c_str(), nullptr) == table[row]["policy_gap"].get<double>());
        CHECK(pivot == (table[row]["is_pivot"].get<bool>() ? "true" : "false"));
        ++row;
    }
    CHECK(row == table.size());
}

TEST_CASE("every subcommand is byte-deterministic across invocations") {
    TempDir dir;
    REQUIRE(run_cli("generate two-state --p 0.2 --r-d 0.1 --r-max 1 --out desk.mdp", dir.path)
                .exit_code == 0);
    const std::string mdp = "--mdp desk.mdp";
    const std::string commands[] = {
        "generate two-state --p 0.2 --r-d 0.1 --r-max 1 --out again.mdp",
        "analyze " + mdp + " --gamma 0.3",
        "gamma-star " + mdp,
        "regret " + mdp + " --gamma-learn 0.2",
        "gaps " + mdp + " --gamma 0.3",
        "pivot-scan " + mdp,
        "diameter " + mdp,
        "transient-check " + mdp,
        "learn " + mdp + " --gamma 0.4 --m 100 --seed 7 --max-steps 100000",
        "sweep " + mdp + " --gamma 0.34 0.41 --m 100 --seed 1 --runs 2 --max-steps 100000",
    };
    for (const std::string& command : commands) {
        const CommandResult first = run_cli(command, dir.path);
        const CommandResult second = run_cli(command, dir.path);
        REQUIRE(first.exit_code == 0);
        CHECK(first.exit_code == second.exit_code);
        CHECK(first.out == second.out);
    }
    // generated files are byte-identical too
    CHECK(slurp(dir.path / "desk.mdp") == slurp(dir.path / "again.mdp"));
}
