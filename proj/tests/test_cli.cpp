#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>

#include "calib/analytic_2r.hpp"
#include "calib/io.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace calib;
using testsup::deg;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "calib-cli-tests";
    fs::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args, const std::string& tag) {
    const fs::path out = scratch_dir() / (tag + ".stdout");
    const std::string cmd = std::string(CALIB_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2> " + (scratch_dir() / (tag + ".stderr")).string();
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.stdout_text = read_text(out);
    return r;
}

} // namespace

TEST_CASE("design runs are byte-identical for the same seed") {
    const fs::path dir = scratch_dir();
    const std::string model = testsup::model_path("two_link.model");
    // Identical command both times; capture the first run's outputs before the
    // rerun overwrites them.
    const std::string args = "design --model " + model +
                             " --test-pose -45deg,20deg --m 2 --seed 7 --starts 48"
                             " --out-plan " +
                             (dir / "det.csv").string() + " --out-report " +
                             (dir / "det.report").string();
    REQUIRE(run_cli(args, "det0").exit_code == 0);
    const std::string csv0 = read_text(dir / "det.csv");
    const std::string report0 = read_text(dir / "det.report");
    REQUIRE(run_cli(args, "det1").exit_code == 0);
    CHECK(read_text(dir / "det.csv") == csv0);
    CHECK(read_text(dir / "det.report") == report0);
    CHECK(csv0.size() > 0);
}

TEST_CASE("design finds the closed-form optimal second-joint angles") {
    const fs::path dir = scratch_dir();
    const auto r = run_cli("design --model " + testsup::model_path("two_link.model") +
                               " --test-pose -45deg,20deg --m 2 --seed 3 --starts 64"
                               " --out-plan " +
                               (dir / "opt.csv").string(),
                           "opt");
    REQUIRE(r.exit_code == 0);
    const Plan plan = load_plan_csv((dir / "opt.csv").string(), 2);
    TwoLinkCase c;
    c.q20 = deg(20);
    // The optimum is the one-dimensional family sum cos q2 = S*; check the
    // invariant rather than any particular decomposition.
    double S = 0;
    for (const auto& e : plan.entries) S += std::cos(e.q[1]);
    CHECK(std::abs(S - optimal_S(c)) < 1e-3);
}

TEST_CASE("m below the identifiability floor exits with the input-error code") {
    const fs::path dir = scratch_dir();
    const auto r = run_cli("design --model " + testsup::model_path("two_link_both.model") +
                               " --test-pose 0,0 --m 1 --out-plan " + (dir / "x.csv").string(),
                           "floor");
    CHECK(r.exit_code == 2);
}

TEST_CASE("unparseable flags exit with code 2") {
    const auto r = run_cli("design --model nowhere.model --m", "badflags");
    CHECK(r.exit_code == 2);
}

TEST_CASE("analytic-2r reports the published optimum at 20 degrees") {
    const auto r = run_cli("analytic-2r --q20 20deg --m 2", "an2r");
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.find("optimal_sum_cos_q2: 1.40041") != std::string::npos);
    CHECK(r.stdout_text.find("rho0_min_sq_over_sigma_sq: 0.67101") != std::string::npos);
    CHECK(r.stdout_text.find("note:") == std::string::npos);
}

TEST_CASE("analytic-2r flags the historical table discrepancy at 60 degrees") {
    const auto r = run_cli("analytic-2r --q20 60deg", "an2r60");
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.find("note: historical tabulated value 0.83") != std::string::npos);
    CHECK(r.stdout_text.find("0.93301") != std::string::npos);
}

TEST_CASE("evaluate scores a saved plan consistently with the design report") {
    const fs::path dir = scratch_dir();
    const std::string model = testsup::model_path("two_link.model");
    const auto d = run_cli("design --model " + model +
                               " --test-pose -45deg,20deg --m 2 --seed 11 --starts 48"
                               " --out-plan " +
                               (dir / "rt.csv").string() + " --out-report " +
                               (dir / "rt.report").string(),
                           "rt-design");
    REQUIRE(d.exit_code == 0);
    const auto e = run_cli("evaluate --model " + model + " --plan " + (dir / "rt.csv").string() +
                               " --test-pose -45deg,20deg",
                           "rt-eval");
    REQUIRE(e.exit_code == 0);
    // The rho0 line must agree between the optimizer report and re-evaluation
    // of the serialized plan.
    const std::string report = read_text(dir / "rt.report");
    const auto grab = [](const std::string& text, const std::string& key) {
        const auto pos = text.find(key);
        REQUIRE(pos != std::string::npos);
        const auto end = text.find('\n', pos);
        return text.substr(pos + key.size(), end - pos - key.size());
    };
    const double r_design = std::stod(grab(report, "rho0_sq_m2: "));
    const double r_eval = std::stod(grab(e.stdout_text, "rho0_sq_m2: "));
    CHECK(r_eval == doctest::Approx(r_design).epsilon(1e-9));
}

TEST_CASE("simulate reproduces the ordering of the published plan family") {
    const fs::path dir = scratch_dir();
    const std::string model = testsup::model_path("two_link.model");
    double rms[3] = {0, 0, 0};
    const char* plans[3] = {"plans/fig2a.csv", "plans/fig2b.csv", "plans/fig2c.csv"};
    for (int i = 0; i < 3; ++i) {
        const std::string tag = "sim" + std::to_string(i);
        const auto r = run_cli("simulate --model " + model + " --plan " +
                                   testsup::model_path(plans[i]) +
                                   " --test-pose 0,20deg --trials 2000 --seed 5"
                                   " --no-perturb",
                               tag);
        REQUIRE(r.exit_code == 0);
        const auto pos = r.stdout_text.find("rms_m: ");
        REQUIRE(pos != std::string::npos);
        rms[i] = std::stod(r.stdout_text.substr(pos + 7));
    }
    // Narrow plan worst, D-optimal in between, test-pose-optimal best.
    CHECK(rms[0] > rms[1]);
    CHECK(rms[1] > rms[2]);
}

TEST_CASE("simulate refuses a non-positive trial count") {
    const auto r = run_cli("simulate --model " + testsup::model_path("two_link.model") +
                               " --plan " + testsup::model_path("plans/fig2b.csv") +
                               " --test-pose 0,20deg --trials 0",
                           "sim0");
    CHECK(r.exit_code == 2);
}

TEST_CASE("simulate campaign CSV and SVG outputs are deterministic") {
    const fs::path dir = scratch_dir();
    const std::string model = testsup::model_path("two_link.model");
    for (int run = 0; run < 2; ++run) {
        const std::string tag = "simdet" + std::to_string(run);
        const auto r = run_cli("simulate --model " + model + " --plan " +
                                   testsup::model_path("plans/fig2c.csv") +
                                   " --test-pose 0,20deg --trials 500 --seed 21 --out-csv " +
                                   (dir / (tag + ".csv")).string() + " --plot " +
                                   (dir / (tag + ".svg")).string(),
                               tag);
        REQUIRE(r.exit_code == 0);
    }
    CHECK(read_text(dir / "simdet0.csv") == read_text(dir / "simdet1.csv"));
    CHECK(read_text(dir / "simdet0.svg") == read_text(dir / "simdet1.svg"));
    CHECK(read_text(dir / "simdet0.csv").find("# seed 21") != std::string::npos);
}

TEST_CASE("compare emits pairwise gains for named plans") {
    const auto r = run_cli("compare --model " + testsup::model_path("two_link.model") +
                               " --test-pose 0,20deg --plan d=" +
                               testsup::model_path("plans/fig2b.csv") + " --plan opt=" +
                               testsup::model_path("plans/fig2c.csv"),
                           "cmp");
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.find("plan d:") != std::string::npos);
    CHECK(r.stdout_text.find("plan opt:") != std::string::npos);
    const auto pos = r.stdout_text.find("gain d vs opt: ");
    REQUIRE(pos != std::string::npos);
    const double gain = std::stod(r.stdout_text.substr(pos + 15));
    CHECK(gain == doctest::Approx(22.1).epsilon(0.02));
}

TEST_CASE("baseline summarizes a random-plan population") {
    const auto r = run_cli("baseline --model " + testsup::model_path("two_link.model") +
                               " --test-pose 0,20deg --m 2 --plans 500 --seed 2",
                           "base");
    REQUIRE(r.exit_code == 0);
    const auto grab = [&](const std::string& key) {
        const auto pos = r.stdout_text.find(key);
        REQUIRE(pos != std::string::npos);
        return std::stod(r.stdout_text.substr(pos + key.size()));
    };
    const double mn = grab("min_rho0_m: ");
    const double mean = grab("mean_rho0_m: ");
    const double mx = grab("max_rho0_m: ");
    CHECK(mn > 0.0);
    CHECK(mn <= mean);
    CHECK(mean <= mx);
    TwoLinkCase c;
    c.sigma = 1e-3;
    c.q20 = deg(20);
    CHECK(mn >= std::sqrt(rho0_min(c)) * (1.0 - 1e-9));
}
