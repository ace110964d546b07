#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "dcm/dual_curvature.hpp"
#include "dcm/io.hpp"
#include "test_helpers.hpp"

using namespace dcm;
using namespace dcmtest;

TEST_CASE("json writer is deterministic and sorted") {
    JVal o = JVal::obj();
    o.set("zeta", JVal::num(1.0 / 3.0));
    o.set("alpha", JVal::boolean(true));
    JVal a = JVal::arr();
    a.push(JVal::num(2.0));
    a.push(JVal::str("x"));
    o.set("list", std::move(a));
    CHECK(o.dump() == "{\"alpha\":true,\"list\":[2,\"x\"],\"zeta\":0.333333333333}");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "\"inf\"");
}

TEST_CASE("function descriptors round-trip") {
    SUBCASE("quadratic") {
        auto rep = parse_function_json(R"({"kind":"quadratic","dim":2,"a":2.0,"offset":0.5})");
        CHECK(rep.kind == ConvexFunctionRep::Kind::Quadratic);
        auto again = parse_function_json(function_to_json(rep).dump());
        CHECK(again.quad_a == doctest::Approx(2.0));
        CHECK(again.offset == doctest::Approx(0.5));
    }
    SUBCASE("grid with inf tokens") {
        GridSpec spec(1, 1.0, 3);
        GridFn g(spec);
        g.values = {std::numeric_limits<double>::infinity(), 0.0, 1.0};
        auto rep = ConvexFunctionRep::grid_sampled(std::move(g), false, false);
        std::string text = function_to_json(rep).dump();
        CHECK(text.find("\"inf\"") != std::string::npos);
        auto again = parse_function_json(text);
        CHECK(std::isinf(again.grid.values[0]));
        CHECK(again.grid.values[2] == doctest::Approx(1.0));
    }
    SUBCASE("indicator with body") {
        auto rep = parse_function_json(
            R"({"kind":"indicator","dim":2,"body":{"kind":"polytope","vertices":[[1,1],[-1,1],[-1,-1],[1,-1]]}})");
        CHECK(rep.body->origin_symmetric);
        auto again = parse_function_json(function_to_json(rep).dump());
        CHECK(again.body->vertices.size() == 4);
    }
    SUBCASE("validation errors") {
        CHECK_THROWS_AS((void)parse_function_json(R"({"kind":"nope"})"),
                        std::invalid_argument);
        CHECK_THROWS_AS(
            (void)parse_function_json(R"({"kind":"grid","dim":1,"R":1.0,"N":3,"values":[1,2]})"),
            std::invalid_argument);
    }
}

TEST_CASE("measure round-trip and csv schema") {
    EuclideanMeasure m;
    m.dim = 2;
    m.add(Vec(0.5, -1.0), 2.0);
    m.add(Vec(-0.5, 1.0), 2.0);
    std::string js = measure_to_json(m).dump();
    EuclideanMeasure back = parse_measure_json(js);
    REQUIRE(back.points.size() == 2);
    CHECK(back.weights[0] == doctest::Approx(2.0));

    std::string csv = measure_to_csv(m);
    CHECK(csv.rfind("y0,y1,weight\n", 0) == 0);
    CHECK(csv.find("0.5,-1,2\n") != std::string::npos);
}

namespace {

std::string run_cli(const std::string& args, int expected_exit) {
    std::string bin = std::string(DCMKIT_BIN);
    std::string out_file = "/tmp/dcmkit_test_out.txt";
    std::string cmd = bin + " " + args + " > " + out_file + " 2>&1";
    int rc = std::system(cmd.c_str());
    int code = WEXITSTATUS(rc);
    CHECK(code == expected_exit);
    std::ifstream in(out_file);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

void write_tmp(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

} // namespace

TEST_CASE("cli: subcommands, exit codes, round-trips") {
    write_tmp("/tmp/dcm_gauss.json", R"({"kind":"quadratic","dim":2,"a":1.0,"even":true})");
    write_tmp("/tmp/dcm_ball1.json",
              R"({"phi":{"kind":"indicator","dim":2,"body":{"kind":"ball","dim":2,"r":1.0}}})");
    write_tmp("/tmp/dcm_square.json",
              R"({"kind":"polytope","dim":2,"vertices":[[1,1],[-1,1],[-1,-1],[1,-1]]})");

    SUBCASE("moment prints the gaussian area") {
        std::string out = run_cli("moment --fn /tmp/dcm_gauss.json --q 2", 0);
        CHECK(out.find("6.2827") != std::string::npos);
    }
    SUBCASE("conjugate of a quadratic is catalog-exact") {
        std::string out = run_cli("conjugate --fn /tmp/dcm_gauss.json --R 4 --N 65", 0);
        CHECK(out.find("\"kind\":\"quadratic\"") != std::string::npos);
    }
    SUBCASE("body subcommand round-trips its polar output") {
        run_cli("body --body /tmp/dcm_square.json --q 1 --polar-out /tmp/dcm_polar.json",
                0);
        std::string out = run_cli("body --body /tmp/dcm_polar.json --q 1", 0);
        CHECK(out.find("\"origin_symmetric\":true") != std::string::npos);
    }
    SUBCASE("unknown flags exit 2") {
        run_cli("moment --fn /tmp/dcm_gauss.json --q 2 --no-such-flag", 2);
    }
    SUBCASE("malformed json exits 2") {
        write_tmp("/tmp/dcm_bad.json", "{nope");
        run_cli("moment --fn /tmp/dcm_bad.json --q 2", 2);
    }
    SUBCASE("numerical guard exits 3") {
        // flat grid phi: moment may be infinite
        std::string vals = "[";
        for (int i = 0; i < 9; ++i) vals += std::string(i ? "," : "") + "0";
        vals += "]";
        write_tmp("/tmp/dcm_flat.json",
                  R"({"kind":"grid","dim":2,"R":2.0,"N":3,"values":)" + vals + "}");
        std::string out = run_cli("moment --fn /tmp/dcm_flat.json --q 1", 3);
        CHECK(out.find("moment may be infinite") != std::string::npos);
    }
    SUBCASE("minkowski rejects inadmissible measures with exit 2") {
        write_tmp("/tmp/dcm_mu_bad.json",
                  R"({"dim":2,"atoms":[{"y":[1,0],"w":0.5},{"y":[-1,0],"w":0.5}]})");
        std::string out = run_cli(
            "minkowski --mu /tmp/dcm_mu_bad.json --q 2 --grid-res 16 --max-iter 5", 2);
        CHECK(out.find("concentrated") != std::string::npos);
    }
    SUBCASE("minkowski solves a small cross measure") {
        write_tmp("/tmp/dcm_mu.json",
                  R"({"dim":2,"atoms":[{"y":[1,0],"w":1.0},{"y":[-1,0],"w":1.0},)"
                  R"({"y":[0,1],"w":1.0},{"y":[0,-1],"w":1.0},)"
                  R"({"y":[0.5,0],"w":0.5},{"y":[-0.5,0],"w":0.5},)"
                  R"({"y":[0,0.5],"w":0.5},{"y":[0,-0.5],"w":0.5}]})");
        std::string out = run_cli(
            "minkowski --mu /tmp/dcm_mu.json --q 2 --A 16 --grid-res 32 --max-iter 200",
            0);
        CHECK(out.find("\"converged\":true") != std::string::npos);
    }
}

TEST_CASE("cli: identical inputs give byte-identical artifacts across threads") {
    write_tmp("/tmp/dcm_gauss.json", R"({"kind":"quadratic","dim":2,"a":1.0,"even":true})");
    write_tmp("/tmp/dcm_ball1.json",
              R"({"phi":{"kind":"indicator","dim":2,"body":{"kind":"ball","dim":2,"r":1.0}}})");
    std::string a = run_cli(
        "varcheck --f /tmp/dcm_gauss.json --g /tmp/dcm_ball1.json --q 2 --threads 1", 0);
    std::string b = run_cli(
        "varcheck --f /tmp/dcm_gauss.json --g /tmp/dcm_ball1.json --q 2 --threads 8", 0);
    CHECK(a == b);
    std::string c = run_cli(
        "dualcurv --f /tmp/dcm_gauss.json --q 2 --euclidean-csv /tmp/dcm_m1.csv --threads 1",
        0);
    std::string d = run_cli(
        "dualcurv --f /tmp/dcm_gauss.json --q 2 --euclidean-csv /tmp/dcm_m2.csv --threads 8",
        0);
    CHECK(c == d);
    CHECK(read_file("/tmp/dcm_m1.csv") == read_file("/tmp/dcm_m2.csv"));
}
