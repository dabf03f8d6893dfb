#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(RSFP_CLI_PATH) + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path);

// Largest difference between the last columns of two CSV files with equal layout.
double csv_distance(const std::string& a, const std::string& b) {
    std::istringstream ia(slurp(a)), ib(slurp(b));
    std::string la, lb;
    double d = 0.0;
    while (std::getline(ia, la) && std::getline(ib, lb)) {
        if (la.empty() || !(std::isdigit(static_cast<unsigned char>(la[0])) || la[0] == '-')) continue;
        d = std::max(d, std::abs(std::stod(la.substr(la.rfind(',') + 1)) - std::stod(lb.substr(lb.rfind(',') + 1))));
    }
    return d;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

const char* kConfig = "states = 2\nQ = -1 1 2 -2\nb = -0.5, -1\nc = 1\nsigma = 1 2\n"
                      "data = stepwise_delta\nmeans = 5 -5\ntimes = 0.5, 1\nL = 12\n";

}  // namespace

TEST_CASE("reproduce-fig 1 writes three slices with peaks at +-5") {
    REQUIRE(run("reproduce-fig 1 --out fig1.csv") == 0);
    std::ifstream in("fig1.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,s,p");
    int footers = 0;
    double best[2] = {-1, -1}, arg[2] = {0, 0};
    while (std::getline(in, line)) {
        if (line.rfind("# mass,", 0) == 0) {
            ++footers;
            continue;
        }
        double t, x, s, p;
        char c;
        std::istringstream ls(line);
        ls >> t >> c >> x >> c >> s >> c >> p;
        if (t != 0.0) continue;
        const int j = s < 0.5 ? 0 : 1;
        if (p > best[j]) best[j] = p, arg[j] = x;
    }
    CHECK(footers == 3);
    CHECK(arg[0] == doctest::Approx(5.0).epsilon(0.02));
    CHECK(arg[1] == doctest::Approx(-5.0).epsilon(0.02));
}

TEST_CASE("identical seeds give byte-identical output") {
    write("mc.cfg", kConfig);
    REQUIRE(run("solve --config mc.cfg --solver mc --paths 2000 --seed 5 --out mc_a.csv") == 0);
    REQUIRE(run("solve --config mc.cfg --solver mc --paths 2000 --seed 5 --out mc_b.csv") == 0);
    REQUIRE(run("solve --config mc.cfg --solver mc --paths 2000 --seed 6 --out mc_c.csv") == 0);
    CHECK(slurp("mc_a.csv") == slurp("mc_b.csv"));
    CHECK(slurp("mc_a.csv") != slurp("mc_c.csv"));
    CHECK(slurp("mc_a.csv.meta.json").find("\"seed\": 5") != std::string::npos);
    REQUIRE(run("solve --config mc.cfg --solver spectral --out sp_a.csv") == 0);
    REQUIRE(run("solve --config mc.cfg --solver spectral --out sp_b.csv --isa scalar") == 0);
    CHECK(csv_distance("sp_a.csv", "sp_b.csv") < 1e-12);
    CHECK(slurp("sp_a.csv").rfind("t,x,s,p\n", 0) == 0);
}

TEST_CASE("flags override the config") {
    write("base.cfg", kConfig);
    REQUIRE(run("solve --config base.cfg --solver closed_form --grid-nx 5 --out small.csv") == 0);
    std::ifstream in("small.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
        if (line[0] != '#' && line[0] != 't') ++rows;
    CHECK(rows == 2 * 2 * 5);
}

TEST_CASE("compare reports and enforces tolerances") {
    CHECK(run("compare --preset fig1 --a closed_form --b spectral --tol 1e-10") == 0);
    CHECK(slurp("cli_stdout.txt").find("PASS") != std::string::npos);
    CHECK(run("compare --preset fig1 --a closed_form --b spectral --set coupling=galerkin --tol 1e-10") == 2);
    CHECK(slurp("cli_stdout.txt").find("FAIL") != std::string::npos);
    CHECK(run("compare --preset fig1 --a closed_form --b spectral --norm l2") == 1);
}

TEST_CASE("exit codes") {
    write("bad_syntax.cfg", "states = 2\nQ = -1 1 2 -2\nwhatever = 1\n");
    CHECK(run("solve --config bad_syntax.cfg") == 3);
    CHECK(slurp("cli_stderr.txt").find("line 3 [whatever]") != std::string::npos);

    write("bad_q.cfg", "Q = -1 1 2 -1\nmeans = 0 0\ntimes = 1\n");
    CHECK(run("validate --config bad_q.cfg") == 1);
    CHECK(run("validate --preset fig3") == 0);
    CHECK(slurp("cli_stdout.txt").find("q-property:       ok") != std::string::npos);

    CHECK(run("solve --config does_not_exist.cfg") == 3);
    CHECK(run("solve --preset fig1 --out /nonexistent-dir/x.csv") == 3);
    CHECK(run("reproduce-fig 4") == 3);
    CHECK(run("solve --preset fig1 --solver spectral --set coupling=galerkin --mu-max 1") == 2);
}

TEST_CASE("bounds sidecar") {
    write("ug.cfg", "states = 2\nQ = -1 1 2 -2\nb = -0.5, -1\nc = 1\nsigma = 1 2\n"
                    "data = uniform_gaussian\ntimes = 1\nL = 6\ngrid_nx = 7\n");
    REQUIRE(run("solve --config ug.cfg --solver spectral --set transport=frozen_mode --bounds ug_bounds.csv --out ug.csv") == 0);
    CHECK(slurp("ug_bounds.csv").rfind("t,x,s,lower,upper\n", 0) == 0);
}
