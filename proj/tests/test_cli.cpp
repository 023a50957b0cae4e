#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

// MCDLAB_CLI_PATH and MCDLAB_DATA_DIR are injected by the build.

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " " + std::string(MCDLAB_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) r.out.append(buf, n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data_file(const char* name) {
    return std::string(MCDLAB_DATA_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

nlohmann::json load_json(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

} // namespace

TEST_CASE("analyze reports the demonstration gap and exits cleanly") {
    RunResult r = run_cli("analyze " + data_file("qubit_qutrit.json") + " --j 1 --json /tmp/cli_a.json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("nonlocal: yes") != std::string::npos);

    nlohmann::json rep = load_json("/tmp/cli_a.json");
    CHECK(rep["schema_version"] == 1);
    CHECK(rep["exact"] == true);
    CHECK(rep["states"] == 3);
    REQUIRE(rep["outcomes"].size() == 1);
    const nlohmann::json& o = rep["outcomes"][0];
    CHECK(o["j"] == 1);
    CHECK(std::abs(o["confidence"]["value"].get<double>() - 1.0) <= 1e-9);
    CHECK(std::abs(o["separable"]["q_upper"].get<double>() - 0.5) <= 1e-6);
    CHECK(o["gap"]["nonlocal"] == "yes");
    CHECK(o["sigma"]["separability"] == "inside");
    CHECK(o["minerr"]["status"] == "certified");
    CHECK(std::abs(o["minerr"]["p_g"].get<double>() - 0.7) <= 1e-6);
    CHECK(rep["input"]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("analyze defaults to every outcome in order") {
    RunResult r = run_cli("analyze " + data_file("qubit_qutrit.json") + " --json /tmp/cli_all.json");
    CHECK(r.exit_code == 0);
    nlohmann::json rep = load_json("/tmp/cli_all.json");
    REQUIRE(rep["outcomes"].size() == 3);
    CHECK(rep["outcomes"][0]["j"] == 1);
    CHECK(rep["outcomes"][1]["j"] == 2);
    CHECK(rep["outcomes"][2]["j"] == 3);
    CHECK(rep["outcomes"][1]["gap"]["nonlocal"] == "no");
    CHECK(std::abs(rep["outcomes"][2]["confidence"]["value"].get<double>() - 2.0 / 3.0) <=
          1e-9);
}

TEST_CASE("json reports are byte-identical across reruns") {
    std::string f = data_file("qubit_qutrit.json");
    CHECK(run_cli("analyze " + f + " --j 1 --json /tmp/cli_d1.json").exit_code == 0);
    CHECK(run_cli("analyze " + f + " --j 1 --json /tmp/cli_d2.json").exit_code == 0);
    CHECK(slurp("/tmp/cli_d1.json") == slurp("/tmp/cli_d2.json"));
}

TEST_CASE("seed resolution prefers the flag over the environment") {
    std::string f = data_file("qubit_qutrit.json");
    RunResult env_only =
        run_cli("analyze " + f + " --j 1 --json /tmp/cli_s1.json", "MCDLAB_SEED=42");
    CHECK(env_only.exit_code == 0);
    CHECK(load_json("/tmp/cli_s1.json")["seed"] == 42);
    RunResult both =
        run_cli("analyze " + f + " --j 1 --seed 9 --json /tmp/cli_s2.json", "MCDLAB_SEED=42");
    CHECK(both.exit_code == 0);
    CHECK(load_json("/tmp/cli_s2.json")["seed"] == 9);
    RunResult bad_env =
        run_cli("analyze " + f + " --j 1", "MCDLAB_SEED=notanumber");
    CHECK(bad_env.exit_code == 2);
}

TEST_CASE("validation failures exit with code two") {
    std::ofstream("/tmp/cli_bad.json") << "{\"dims\": [2,";
    CHECK(run_cli("analyze /tmp/cli_bad.json").exit_code == 2);
    CHECK(run_cli("analyze /tmp/does_not_exist.json").exit_code == 2);
    CHECK(run_cli("analyze " + data_file("qubit_qutrit.json") + " --j 7").exit_code == 2);
    CHECK(run_cli("analyze " + data_file("qubit_qutrit.json") + " --j 0").exit_code == 2);
    CHECK(run_cli("definitely-not-a-subcommand").exit_code == 2);
    CHECK(run_cli("construct --mode single " + data_file("qubit_qutrit.json") +
                  " --out /tmp/cli_x.json")
              .exit_code == 2); // ensemble file where an operator is expected
}

TEST_CASE("construct single mode verifies its guarantees end to end") {
    RunResult r = run_cli("construct --mode single " + data_file("xi_witness.json") +
                          " --out /tmp/cli_built.json --json /tmp/cli_built_rep.json");
    CHECK(r.exit_code == 0);
    nlohmann::json rep = load_json("/tmp/cli_built_rep.json");
    CHECK(rep["guarantees_verified"] == true);
    CHECK(rep["mode"] == "single");

    // The output is a loadable ensemble that reproduces the gap.
    RunResult a = run_cli("analyze /tmp/cli_built.json --j 1 --json /tmp/cli_built_a.json");
    CHECK(a.exit_code == 0);
    nlohmann::json arep = load_json("/tmp/cli_built_a.json");
    CHECK(std::abs(arep["outcomes"][0]["confidence"]["value"].get<double>() - 1.0) <= 1e-9);
    CHECK(arep["outcomes"][0]["separable"]["q_upper"].get<double>() <= 0.5 + 1e-6);
    CHECK(arep["outcomes"][0]["gap"]["nonlocal"] == "yes");
}

TEST_CASE("crosscheck certifies the bridge for the gapped outcome only") {
    std::string f = data_file("qubit_qutrit.json");
    RunResult r1 = run_cli("crosscheck " + f + " --j 1 --json /tmp/cli_cc.json");
    CHECK(r1.exit_code == 0);
    nlohmann::json rep = load_json("/tmp/cli_cc.json");
    CHECK(rep["crosscheck"]["status"] == "certified");
    CHECK(std::abs(rep["crosscheck"]["r"].get<double>() - 0.6) <= 1e-6);
    CHECK(std::abs(rep["crosscheck"]["p_g"].get<double>() - 0.7) <= 1e-6);
    CHECK(rep["crosscheck"]["reverse_ok"] == true);

    RunResult r2 = run_cli("crosscheck " + f + " --j 2 --json /tmp/cli_cc2.json");
    CHECK(r2.exit_code == 0);
    CHECK(load_json("/tmp/cli_cc2.json")["crosscheck"]["status"] == "skipped");
}

TEST_CASE("sweep writes a deterministic csv honoring the config seed") {
    std::ofstream("/tmp/cli_sweep_cfg.json")
        << R"({"dims":[2,2],"samples":2,"states":2,"law":"pure","seed":3})";
    RunResult r1 = run_cli("sweep /tmp/cli_sweep_cfg.json --out /tmp/cli_sw1.csv");
    CHECK(r1.exit_code == 0);
    RunResult r2 = run_cli("sweep /tmp/cli_sweep_cfg.json --out /tmp/cli_sw2.csv");
    CHECK(r2.exit_code == 0);
    CHECK(slurp("/tmp/cli_sw1.csv") == slurp("/tmp/cli_sw2.csv"));

    std::string head = slurp("/tmp/cli_sw1.csv").substr(0, 60);
    CHECK(head.find("sample,j,c,q_lower,q_upper,gap,exact,nonlocal,solver_status") == 0);

    // Config validation: a missing dims array is a user error.
    std::ofstream("/tmp/cli_sweep_bad.json") << R"({"samples":2})";
    CHECK(run_cli("sweep /tmp/cli_sweep_bad.json --out /tmp/cli_swx.csv").exit_code == 2);
}
