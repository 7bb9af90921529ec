#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string tmp_path(const std::string& tag) {
    return "/tmp/expanderlab_cli_" + std::to_string(getpid()) + "_" + tag;
}

// Runs the laboratory binary with the given arguments, capturing both
// streams and the exit code.
RunResult run(const std::string& args) {
    const std::string out = tmp_path("out"), err = tmp_path("err");
    const std::string cmd =
        std::string("\"") + EXPANDERLAB_PATH + "\" " + args + " > " + out + " 2> " + err;
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    std::remove(out.c_str());
    std::remove(err.c_str());
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("curve: csv to stdout, integration summary to stderr") {
    const RunResult r = run("curve --d 1 --s-max 5 --samples 101 --format csv");
    CHECK(r.code == 0);
    CHECK(first_line(r.out) == "s,x1,x2,theta,kappa");
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 102);
    CHECK(contains(r.err, "\"max_invariant_drift\""));
    CHECK(!contains(r.out, "\r"));
}

TEST_CASE("curve: json summary carries the cone fit") {
    const RunResult r = run("curve --d 1 --format json");
    CHECK(r.code == 0);
    for (const char* key :
         {"\"d\":", "\"first_integral_c\":", "\"max_invariant_drift\":", "\"end_radius\":",
          "\"asymptotic\": true", "\"cone_half_angle\":", "\"cone_residual\":"})
        CHECK(contains(r.out, key));
    CHECK(contains(r.out, "0.76070867578"));  // frozen half angle at d = 1
}

TEST_CASE("identities: clean run exits zero with eight reports") {
    const RunResult r = run("identities --d 1");
    CHECK(r.code == 0);
    for (const char* name : {"drifted-H", "drifted-H-squared", "drifted-A-squared",
                             "grad-A-vs-grad-H", "separable-eigenfunction", "alpha-drifted-H",
                             "alpha-drifted-H-gradient-form", "x-gradH-vs-half-Axx"})
        CHECK(contains(r.out, std::string("\"identity_name\": \"") + name + "\""));
    CHECK(contains(r.out, "\"warning\": \"\""));
}

TEST_CASE("spectrum: json shape, operators, and flat factors") {
    const RunResult dr = run("spectrum --d 0 --k 3");
    CHECK(dr.code == 0);
    for (const char* key : {"\"operator\": \"drifted\"", "\"eigenvalues\": [", "\"est_error\":",
                            "\"S\": 16", "\"m\": 4001"})
        CHECK(contains(dr.out, key));
    CHECK(contains(dr.out, "0.4999997502468"));

    const RunResult st = run("spectrum --d 1 --operator stability");
    CHECK(st.code == 0);
    CHECK(contains(st.out, "\"operator\": \"stability\""));

    // with flat factors only the product bottom is certified
    const RunResult pr = run("spectrum --d 1 --flat-factors 2 --k 5");
    CHECK(pr.code == 0);
    const size_t open = pr.out.find("\"eigenvalues\": [");
    REQUIRE(open != std::string::npos);
    const size_t close = pr.out.find(']', open);
    const std::string inside = pr.out.substr(open + 16, close - open - 16);
    CHECK(inside.find(',') == std::string::npos);  // exactly one entry
}

TEST_CASE("volume: curvature power brings the annulus evidence") {
    const RunResult r = run("volume --d 1 --delta 2");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "\"annuli\": ["));
    CHECK(contains(r.out, "\"annuli_tend_to_zero\": true"));
    CHECK(contains(r.out, "0.332809415158"));
    const RunResult plain = run("volume --d 1");
    CHECK(plain.code == 0);
    CHECK(contains(plain.out, "2.3697620495714"));
    CHECK(!contains(plain.out, "\"annuli\""));
}

TEST_CASE("growth: csv rows all pass") {
    const RunResult r = run("growth --d 1 --radii 2,4,8 --format csv");
    CHECK(r.code == 0);
    CHECK(first_line(r.out) == "r,vol,bound,pass");
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
    CHECK(!contains(r.out, ",0\n"));  // no failing row
}

TEST_CASE("probes: the trailing csv flag equals the series verdict") {
    const RunResult mono = run("probe-i --d 0 --r 4 --format csv");
    CHECK(mono.code == 0);
    CHECK(first_line(mono.out) == "t,value,monotone_flag");
    const size_t last_comma = mono.out.rfind(',');
    CHECK(mono.out.substr(last_comma) == ",1\n");

    // deliberately undersized growth fit: verdict flips, exit stays 0
    const RunResult broken = run("probe-i --d 1 --a 0 --b 0 --r 4 --format csv");
    CHECK(broken.code == 0);
    CHECK(broken.out.substr(broken.out.rfind(',')) == ",0\n");

    // alpha = 0 is the unweighted closed-form case; the default alpha = 1
    // saturates and legitimately decreases
    const RunResult div = run("probe-div --d 0 --alpha 0 --r0 1 --t-min 2 --t-max 18 --format csv");
    CHECK(div.code == 0);
    CHECK(div.out.substr(div.out.rfind(',')) == ",1\n");

    // bare invocation must work: the default grid sits above the default r0
    const RunResult bare = run("probe-div --d 0");
    CHECK(bare.code == 0);
    CHECK(first_line(bare.out) == "t,value,monotone_flag");
    CHECK(contains(bare.out, "\n2,"));
    CHECK(contains(bare.out, "\n20,"));
}

TEST_CASE("bounds and rigidity: verdict-bearing json") {
    const RunResult b = run("bounds --d 1 --alpha 2");
    CHECK(b.code == 0);
    CHECK(contains(b.out, "\"bottom-drifted-vs-inf-H2\""));
    CHECK(!contains(b.out, "\"pass\": false"));

    const RunResult rg = run("rigidity --d 1");
    CHECK(rg.code == 0);
    CHECK(contains(rg.out, "\"pointwise-quartic-hyperplane\""));
    CHECK(contains(rg.out, "\"cubic-with-annulus-decay-hyperplane\""));
    CHECK(contains(rg.out, "\"hypothesis_holds\": false"));
    CHECK(contains(rg.out, "0.1875"));  // vertex quartic witness at d = 1
}

TEST_CASE("config file: applied, overridden by flags, and validated") {
    const std::string cfg = tmp_path("cfg");
    {
        std::ofstream f(cfg);
        f << "# laboratory run configuration\n"
          << "d = 2\n"
          << "s-max = 10\n"
          << "samples = 20001\n";
    }
    const RunResult with_cfg = run("curve --format json --config " + cfg);
    CHECK(with_cfg.code == 0);
    CHECK(contains(with_cfg.out, "\"d\": 2,"));
    CHECK(contains(with_cfg.out, "\"s_max\": 10,"));

    const RunResult overridden = run("curve --format json --config " + cfg + " --d 0.5");
    CHECK(overridden.code == 0);
    CHECK(contains(overridden.out, "\"d\": 0.5,"));
    CHECK(contains(overridden.out, "\"s_max\": 10,"));

    {
        std::ofstream f(cfg);
        f << "k = 4\n";  // spectrum key, invalid for curve
    }
    const RunResult bad = run("curve --config " + cfg);
    CHECK(bad.code == 2);
    CHECK(contains(bad.err, "\"error\": \"usage\""));
    std::remove(cfg.c_str());
}

TEST_CASE("usage errors exit 2 with a json diagnosis on stderr") {
    for (const char* args :
         {"", "curve --d nope", "spectrum --d 1 --operator bogus", "spectrum --d 1 --format csv",
          "growth --d 1 --radii 2,-4", "spectrum --d 1 --k 0", "frobnicate",
          "curve --d 1 --d 2", "curve --d ''"}) {
        INFO("args: ", args);
        const RunResult r = run(args);
        CHECK(r.code == 2);
        CHECK(r.out.empty());
    }
    CHECK(contains(run("spectrum --d 1 --format csv").err, "\"error\": \"usage\""));
    // an empty value must be rejected, not coerced to 0 (d = 0 is a valid member)
    CHECK(contains(run("curve --d ''").err, "value must not be empty"));
}

TEST_CASE("runtime failures exit 1 with the error kind") {
    const RunResult window = run("spectrum --d 1 --S 25");
    CHECK(window.code == 1);
    CHECK(contains(window.err, "\"error\": \"window\""));
    const RunResult blowup = run("curve --d 50");
    CHECK(blowup.code == 1);
    CHECK(contains(blowup.err, "\"error\": \"numeric_blowup\""));
}

TEST_CASE("identical invocations produce identical bytes") {
    const RunResult a = run("report --d 1");
    const RunResult b = run("report --d 1");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
    CHECK(contains(a.out, "\"pass\": true"));
}

TEST_CASE("--out writes the same bytes the stream would carry") {
    const std::string path = tmp_path("vol.json");
    const RunResult direct = run("volume --d 1");
    const RunResult filed = run("volume --d 1 --out " + path);
    CHECK(filed.code == 0);
    CHECK(filed.out.empty());
    CHECK(slurp(path) == direct.out);
    std::remove(path.c_str());
}
