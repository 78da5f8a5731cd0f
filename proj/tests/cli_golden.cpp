// Golden checks for the command-line tool, run as a separate process so the
// full argv / exit-code / stdout path is exercised.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& command) {
    RunResult r;
    std::string full = command + " 2>/dev/null";
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.output.append(buf.data(), got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

int failures = 0;

void check(bool cond, const std::string& what) {
    if (!cond) {
        ++failures;
        std::cerr << "FAIL: " << what << "\n";
    }
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: cli_golden <cli-binary> <systems-dir>\n";
        return 1;
    }
    std::string cli = argv[1];
    std::string dir = argv[2];

    // validate: good system passes, broken J exits 2 naming the violation.
    RunResult ok = run(cli + " validate --system " + dir + "/dirac_pi.json");
    check(ok.exit_code == 0, "validate exit code");
    check(contains(ok.output, "\"valid\": true"), "validate report");

    {
        std::string bad = dir + "/.bad_J.json";
        std::string cmd = "python3 -c \"import json;d=json.load(open('" + dir +
                          "/dirac_pi.json'));d['J']=[[[1,0],[0,0]],[[0,0],[1,0]]];"
                          "json.dump(d,open('" + bad + "','w'))\"";
        check(std::system(cmd.c_str()) == 0, "fixture setup");
        RunResult r = run(cli + " validate --system " + bad);
        check(r.exit_code == 2, "bad-J exit code");
        check(contains(r.output, "skew-Hermitian") || contains(r.output, "signature"),
              "bad-J failure message names the J violation");
        std::remove(bad.c_str());
    }

    // spectrum on the Dirichlet condition: 21 integer eigenvalues.
    {
        RunResult r = run(cli + " spectrum --system " + dir + "/dirac_pi.json --bc " + dir +
                          "/bc_dirichlet.json --range \"-10.5,10.5\"");
        check(r.exit_code == 0, "spectrum exit code");
        check(contains(r.output, "\"count\": 21"), "spectrum count");
    }

    // classify-bc on the dissipative condition.
    {
        RunResult r = run(cli + " classify-bc --system " + dir + "/dirac_pi.json --bc " +
                          dir + "/bc_dissipative.json");
        check(r.exit_code == 0, "classify exit code");
        check(contains(r.output, "\"class\": \"maximal-dissipative\""), "classify class");
    }

    // classify-bc on the separated dissipative condition.
    {
        RunResult r = run(cli + " classify-bc --system " + dir + "/dirac_pi.json --bc " +
                          dir + "/bc_separated_dissipative.json");
        check(r.exit_code == 0, "separated classify exit code");
        check(contains(r.output, "\"class\": \"maximal-dissipative\""),
              "separated classify class");
    }

    // indices on the truncated system: heuristic tag, exit 0 when conclusive.
    {
        RunResult r = run(cli + " indices --system " + dir + "/dirac_trunc40.json");
        check(r.exit_code == 0, "indices exit code");
        check(contains(r.output, "truncation-heuristic"), "indices method tag");
        check(contains(r.output, "\"N_plus\": 1"), "indices N+");
    }

    // weyl sweep writes a CSV with the documented header.
    {
        std::string csv = dir + "/.weyl_sweep.csv";
        RunResult r = run(cli + " weyl --system " + dir +
                          "/dirac_pi.json --lambda 0,1 --lambda 1,1 --out " + csv);
        check(r.exit_code == 0, "weyl exit code");
        RunResult head = run("head -1 " + csv);
        check(contains(head.output, "lambda_re,lambda_im,m_0_0_re,m_0_0_im"),
              "weyl CSV header");
        std::remove(csv.c_str());
    }

    // determinism across runs (byte equality).
    for (const char* cmd : {"signature", "indices", "triplet"}) {
        std::string c = cli + " " + cmd + " --system " + dir + "/mixed3.json";
        RunResult a = run(c);
        RunResult b = run(c);
        check(a.exit_code == 0, std::string(cmd) + " exit code");
        check(a.output == b.output && !a.output.empty(),
              std::string(cmd) + " byte-stable output");
    }

    if (failures == 0) std::cout << "cli golden checks passed\n";
    return failures == 0 ? 0 : 1;
}
