#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "doctest.h"
#include "lipfree/io.hpp"
#include "lipfree/verify.hpp"

using namespace lipfree;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "lipfree_test_io";
    fs::create_directories(dir);
    return dir;
}

void put(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    Run r;
    const std::string cmd = std::string(LIPFREE_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(5.0) == "5");
    CHECK(format_double(std::nan("")) == "null");
}

TEST_CASE("space files") {
    SUBCASE("round trip is exact") {
        const auto seg = integer_segment(4, 0.5);
        const auto back = space_from_json(json::parse(space_to_json_text(seg))).space;
        CHECK(back.same_as(seg));
        CHECK(back.labels() == seg.labels());
    }
    SUBCASE("base moves to index 0") {
        const auto j = json::parse(R"({"p": 1, "labels": ["a","b","c"], "base": 2,
                                       "dist": [[0,1,3],[1,0,2],[3,2,0]]})");
        const auto loaded = space_from_json(j);
        CHECK(loaded.order == std::vector<std::size_t>{2, 0, 1});
        CHECK(loaded.space.labels() == std::vector<std::string>{"c", "a", "b"});
        CHECK(loaded.space.d(0, 1) == 3.0);
        CHECK(loaded.space.d(1, 2) == 1.0);
    }
    SUBCASE("malformed input") {
        CHECK_THROWS_AS((void)space_from_json(json::parse(R"({"dist": [[0]]})")), StructuralError);
        CHECK_THROWS_AS((void)space_from_json(json::parse(R"({"p": 1, "dist": [[0,1]]})")), StructuralError);
        CHECK_THROWS_AS((void)read_json_file("/nonexistent/space.json"), StructuralError);
    }
}

TEST_CASE("molecule files") {
    const auto space = json::parse(R"({"p": 1, "base": 1, "dist": [[0,1,3],[1,0,2],[3,2,0]]})");
    SUBCASE("full coefficients follow the base reorder") {
        const auto mu = molecule_from_json({{"space", space}, {"coeffs", {1.0, -1.0, 0.0}}}, "");
        CHECK(mu.coeffs() == std::vector<double>{-1.0, 1.0, 0.0});
        CHECK(norm(mu, NormMethod::enumerate).value == doctest::Approx(1.0));
    }
    SUBCASE("delta coordinates skip the base") {
        const auto mu = molecule_from_json({{"space", space}, {"coeffs", {0.0, 1.0}}}, "");
        CHECK(mu.delta() == std::vector<double>{0.0, 1.0});
        CHECK(norm(mu, NormMethod::enumerate).value == doctest::Approx(2.0));
    }
    SUBCASE("space by relative path") {
        const auto dir = scratch();
        put(dir / "s.json", space.dump());
        put(dir / "m.json", R"({"space": "s.json", "coeffs": [3, 0]})");
        CHECK(norm(read_molecule_file((dir / "m.json").string())).value == doctest::Approx(3.0));
    }
    SUBCASE("wrong length") {
        CHECK_THROWS_AS((void)molecule_from_json({{"space", space}, {"coeffs", {1.0}}}, ""), StructuralError);
    }
}

TEST_CASE("certificate json") {
    auto seg = std::make_shared<const PMetricSpace>(integer_segment(3, 0.5));
    const auto cert = norm(Molecule::from_delta(seg, {0.0, 0.0, 1.0}), NormMethod::enumerate);
    const auto j = certificate_to_json(cert);
    CHECK(j["value"].get<double>() == doctest::Approx(3.0));
    CHECK(j["method"] == "enumerate");
    for (const char* key : {"upper", "lower", "primal", "dual", "exact"}) CHECK(j.contains(key));
    CHECK(j["primal"][0].contains("lambda"));
}

TEST_CASE("verify config and reports") {
    const auto dir = scratch();
    put(dir / "c.cfg", "# comment\nsuite = norms\np = 0.5, 1\nseed=7\nmax_points = 5  # trailing\ntolerance = 1e-6\n");
    const auto c = read_config_file((dir / "c.cfg").string());
    CHECK(c.suite == "norms");
    CHECK(c.ps == std::vector<double>{0.5, 1.0});
    CHECK(c.seed == 7);
    CHECK(c.max_points == 5);
    CHECK(*c.tolerance == 1e-6);

    put(dir / "bad.cfg", "colour = red\n");
    CHECK_THROWS_AS((void)read_config_file((dir / "bad.cfg").string()), StructuralError);
    put(dir / "bad2.cfg", "seed = many\n");
    CHECK_THROWS_AS((void)read_config_file((dir / "bad2.cfg").string()), StructuralError);

    CHECK(suite_criteria("all").size() == 14);
    CHECK(suite_criteria("bases") == std::vector<int>{2, 3, 4, 5, 6, 14});
    CHECK_THROWS_AS((void)suite_criteria("nope"), StructuralError);

    VerifyConfig norms;
    norms.suite = "norms";
    const auto a = records_csv(run_suite(norms));
    const auto b = records_csv(run_suite(norms));
    CHECK(a == b);
    CHECK(a.rfind("criterion,instance,p,bound,measured,margin,pass\n", 0) == 0);
}

TEST_CASE("command line") {
    const auto dir = scratch();
    put(dir / "two.json", R"({"p": 1, "dist": [[0, 2], [2, 0]]})");
    put(dir / "elem.json", R"({"space": "two.json", "coeffs": [-0.5, 0.5]})");

    SUBCASE("elementary molecule has norm one") {
        const auto r = run("norm --molecule " + (dir / "elem.json").string());
        CHECK(r.code == 0);
        CHECK(json::parse(r.out)["value"].get<double>() == doctest::Approx(1.0));
    }
    SUBCASE("delta(5) - delta(0) on Z[0,5] at p = 1/2") {
        write_space_file((dir / "z5.json").string(), integer_segment(5, 0.5));
        put(dir / "m5.json", R"({"space": "z5.json", "coeffs": [0, 0, 0, 0, 1]})");
        const auto r = run("norm --molecule " + (dir / "m5.json").string() + " --method enumerate");
        CHECK(r.code == 0);
        CHECK(json::parse(r.out)["value"].get<double>() == doctest::Approx(5.0).epsilon(1e-12));
    }
    SUBCASE("--space overrides the molecule's space") {
        write_space_file((dir / "z2.json").string(), integer_segment(2, 1.0));
        put(dir / "m2.json", R"({"space": "missing.json", "coeffs": [1, 1]})");
        const auto r = run("norm --space " + (dir / "z2.json").string() + " --molecule " + (dir / "m2.json").string());
        CHECK(r.code == 0);
        CHECK(json::parse(r.out)["value"].get<double>() == doctest::Approx(3.0));
    }
    SUBCASE("enumeration cap gives exit 3") {
        write_space_file((dir / "z11.json").string(), integer_segment(11, 1.0));
        put(dir / "m11.json", R"({"space": "z11.json", "coeffs": [0,0,0,0,0,0,0,0,0,0,1]})");
        CHECK(run("norm --molecule " + (dir / "m11.json").string() + " --method enumerate").code == 3);
        CHECK(run("norm --molecule " + (dir / "m11.json").string() + " --method bounds_only").code == 0);
    }
    SUBCASE("invalid space gives exit 2") {
        put(dir / "bad.json", R"({"p": 1, "dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]})");
        put(dir / "mb.json", R"({"space": "bad.json", "coeffs": [0, 1]})");
        CHECK(run("norm --molecule " + (dir / "mb.json").string()).code == 2);
    }
    SUBCASE("verify writes reports and honours overrides") {
        const auto out = dir / "reports";
        fs::remove_all(out);
        put(dir / "v.cfg", "suite = bases\nout = " + out.string() + "\n");
        const auto r = run("verify --config " + (dir / "v.cfg").string() + " --suite qmetric --workers 1");
        CHECK(r.code == 0);
        CHECK(r.out.find("PASS 13") != std::string::npos);
        CHECK(fs::exists(out / "qmetric.csv"));
        CHECK(fs::exists(out / "qmetric.json"));
        CHECK(!fs::exists(out / "bases.csv"));
    }
    SUBCASE("a tolerance below zero fails rows with exit 1") {
        CHECK(run("verify --suite qmetric --tolerance -1").code == 1);
    }
    SUBCASE("unknown suite gives exit 2") { CHECK(run("verify --suite nope").code == 2); }
}
