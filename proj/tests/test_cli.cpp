// End-to-end checks of the atlas binary: exit codes, output formats, and
// byte determinism, driven through popen. ATLAS_BIN is injected by the build.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <string>

#include <butterfly/render.hpp>

namespace {

struct RunResult {
    int exit_code;
    std::string output;  // stdout and stderr interleaved
};

RunResult run_atlas(const std::string& args) {
    const std::string cmd = std::string(ATLAS_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
    const int status = pclose(pipe);
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), output};
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

}  // namespace

TEST_CASE("factor prints the generator word") {
    const RunResult r = run_atlas("factor --matrix 2,1,3,2");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "BABAA\n");

    const RunResult id = run_atlas("factor --matrix 1,0,0,1");
    CHECK(id.exit_code == 0);
    CHECK(id.output == "\n");
}

TEST_CASE("spectrum emits both formats") {
    const RunResult json = run_atlas("spectrum --theta 1/3 --format json");
    REQUIRE(json.exit_code == 0);
    CHECK(json.output.find("\"theta\":\"1/3\"") != std::string::npos);
    CHECK(count_of(json.output, "[-") >= 1);
    CHECK(count_of(json.output, "\"bands\":[[") == 1);
    // three bands: the bands array holds three two-element rows
    const std::size_t bands = json.output.find("\"bands\":");
    CHECK(count_of(json.output.substr(bands), "],[") == 2);

    const RunResult csv = run_atlas("spectrum --theta 1/3 --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.output.rfind("theta,k,lo,hi\n", 0) == 0);
    CHECK(count_of(csv.output, "\n") == 4);
    CHECK(csv.output.find("1/3,2,") != std::string::npos);
}

TEST_CASE("charpoly reports integer coefficients or fails honestly") {
    const RunResult ok = run_atlas("charpoly --theta 1/4");
    REQUIRE(ok.exit_code == 0);
    CHECK(ok.output.find("[1,0,-8,0,4]") != std::string::npos);

    // q = 5 has irrational coefficients: integrality check must reject it
    const RunResult bad = run_atlas("charpoly --theta 1/5");
    CHECK(bad.exit_code == 3);
}

TEST_CASE("invalid inputs exit with code 2") {
    CHECK(run_atlas("spectrum --theta abc").exit_code == 2);
    CHECK(run_atlas("spectrum --theta 3/2").exit_code == 2);
    CHECK(run_atlas("spectrum --theta 1/0").exit_code == 2);
    CHECK(run_atlas("similarity --matrix 1,0,0,1 --r 1 --sign + --theta 1/2 --x 0").exit_code ==
          2);
    CHECK(run_atlas("similarity --matrix 1,1,1,0 --r 0 --sign + --theta 1/2 --x 0").exit_code ==
          2);
    CHECK(run_atlas("nonsense").exit_code == 2);
    CHECK(run_atlas("spectrum").exit_code == 2);
    CHECK(run_atlas("--help").exit_code == 0);
}

TEST_CASE("similarity point mode prints image data") {
    const RunResult r =
        run_atlas("similarity --matrix 1,0,2,1 --r 0 --sign + --theta 1/1 --x 2.0");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("\"theta_out\":\"1/3\"") != std::string::npos);
    CHECK(r.output.find("\"bands\":[1]") != std::string::npos);

    // even-q touching point: double valued, two points and two band indices
    const RunResult split =
        run_atlas("similarity --matrix 1,0,2,1 --r 0 --sign + --theta 1/2 --x 0");
    REQUIRE(split.exit_code == 0);
    const std::size_t pts = split.output.find("\"points\":[");
    REQUIRE(pts != std::string::npos);
    CHECK(count_of(split.output.substr(pts, split.output.find(']', pts) - pts), ",") == 1);
}

TEST_CASE("gaps lists every label with its interval") {
    const RunResult r = run_atlas("gaps --theta 2/5");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.rfind("k,s,t,lo,hi\n", 0) == 0);
    CHECK(count_of(r.output, "\n") == 5);  // header plus q - 1 rows

    // q = 1 spectra are a single band: the table is empty but well formed
    const RunResult none = run_atlas("gaps --theta 0/1");
    CHECK(none.exit_code == 0);
    CHECK(none.output == "k,s,t,lo,hi\n");
}

TEST_CASE("butterfly figure is byte deterministic") {
    const RunResult a = run_atlas("butterfly --qmax 8");
    const RunResult b = run_atlas("butterfly --qmax 8");
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.rfind("<svg ", 0) == 0);

    const RunResult csv = run_atlas("butterfly --qmax 4 --format csv");
    REQUIRE(csv.exit_code == 0);
    // Farey(4) rows: 0/1 1/4 1/3 1/2 2/3 3/4 1/1 with q bands each
    CHECK(count_of(csv.output, "\n") == 1 + 1 + 4 + 3 + 2 + 3 + 4 + 1);
}

TEST_CASE("curve summary carries counts and symmetry") {
    const RunResult r = run_atlas("curve --from 1/3 --to 1/5 --grid 256 --restricted");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("\"component_count\":") != std::string::npos);
    CHECK(r.output.find("\"symmetry\":\"odd\"") != std::string::npos);
    CHECK(r.output.find("\"diagonal_segments\":3") != std::string::npos);

    // unrestricted traces have no diagonal count
    const RunResult u = run_atlas("curve --from 1/3 --to 1/5 --grid 256");
    REQUIRE(u.exit_code == 0);
    CHECK(u.output.find("diagonal_segments") == std::string::npos);

    CHECK(run_atlas("curve --from 1/3 --to 1/5 --grid 16").exit_code == 2);
}

TEST_CASE("scalar queries print plain decimals") {
    const RunResult f = run_atlas("ids --x 0");
    REQUIRE(f.exit_code == 0);
    CHECK(f.output == "0.5\n");

    const RunResult t = run_atlas("trace --theta 1/2 --x 0");
    REQUIRE(t.exit_code == 0);
    CHECK(std::stod(t.output) == Catch::Approx(0.5).margin(1e-8));
}
