#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ptint/io.hpp"

using namespace ptint;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "ptint_test_io";
    fs::create_directories(dir);
    return dir / name;
}

int error_line(const std::string& text)
{
    try {
        io::RunConfig::from_text(io::ConfigText::parse(text));
    } catch (const io::ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("profile csv round trip")
{
    RadialProfile pr;
    pr.grid.radii = {1e-6, 0.1, 1.0 / 3.0, 7.0};
    pr.u = {1.0 / 7.0, -2.5e-300, 0.1, 3.0};
    pr.du = {-1e10, 0.0, std::nextafter(1.0, 2.0), -0.2};
    pr.f = {0.5, 0.25, 0.125, 1e-17};
    const auto path = scratch("profile.csv");
    io::write_profile_csv(path, pr);
    const auto back = io::read_profile_csv(path);
    CHECK(back.grid.radii == pr.grid.radii);
    CHECK(back.u == pr.u);
    CHECK(back.du == pr.du);
    CHECK(back.f == pr.f);
    CHECK(io::profile_csv(pr).rfind("r,u,du,f\n", 0) == 0);

    std::ofstream(scratch("bad.csv")) << "r,u,du,f\n1,2,3\n";
    CHECK_THROWS(io::read_profile_csv(scratch("bad.csv")));
    CHECK_THROWS(io::read_profile_csv(scratch("missing.csv")));
}

TEST_CASE("config parse errors carry line numbers")
{
    CHECK(error_line("[params]\nd = 2\nbogus = 1\n") == 3);
    CHECK(error_line("# comment\n\n[params]\nlambda = -1\n") == 4);
    CHECK(error_line("[run]\nmode = sideways\n") == 2);
    CHECK(error_line("[nosuch]\nx = 1\n") == 2);
    CHECK(error_line("[params]\np = three\n") == 2);
    CHECK(error_line("[shoot]\nscan_points = 2\n") == 2);
    CHECK_THROWS_AS(io::ConfigText::parse("[params]\nd = 2\nd = 3\n"), io::ConfigError);
    CHECK_THROWS_AS(io::ConfigText::parse("key without equals\n"), io::ConfigError);
    try {
        io::ConfigText::parse("[run]\nk = 1\nk = 2\n");
    } catch (const io::ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).rfind("config line 3:", 0) == 0);
    }
    CHECK(error_line("[params]\nd = 3\np = 2.5\n") == -1);
}

TEST_CASE("config text round trip")
{
    io::RunConfig c;
    c.params.d = 3;
    c.params.p = 1.7;
    c.params.lambda = 0.3;
    c.params.alpha = Alpha::finite(-0.1);
    c.mode = "nodal";
    c.k = 2;
    c.seed = 99;
    c.shoot.scan_points = 55;
    c.shoot.integ.rel_tol = 3e-10;
    c.var_grid.R = 33;
    c.output = "dir with spaces";
    const std::string text = c.to_text().str();
    const auto back = io::RunConfig::from_text(io::ConfigText::parse(text));
    CHECK(back.params == c.params);
    CHECK(back.mode == "nodal");
    CHECK(back.k == 2);
    CHECK(back.seed == 99);
    CHECK(back.shoot.scan_points == 55);
    CHECK(back.shoot.integ.rel_tol == 3e-10);
    CHECK(back.var_grid.R == 33);
    CHECK(back.output == "dir with spaces");
    CHECK(back.to_text().str() == text);
}

TEST_CASE("json output")
{
    CHECK(io::number(std::numeric_limits<double>::quiet_NaN()).is_null());
    CHECK(io::number(INFINITY).is_null());
    CHECK(io::number(0.25).get<double>() == 0.25);

    BranchPoint pt;
    pt.q = 1.25;
    pt.a = -0.5;
    pt.f0 = 0.75;
    pt.alpha_kind = AlphaKind::Finite;
    pt.alpha = 0.1;
    const auto j = io::to_json(pt);
    CHECK(j.at("q").get<double>() == 1.25);
    CHECK(j.dump() == io::to_json(pt).dump());
    BranchPoint weak = pt;
    weak.f0.reset();
    weak.alpha_kind = AlphaKind::Unconstrained;
    CHECK(io::to_json(weak).at("f0").is_null());

    const auto path = scratch("pt.json");
    io::write_json(path, j);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(io::json::parse(ss.str()) == j);
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST_CASE("versions stamp")
{
    const std::string v = io::versions_stamp();
    for (const char* key : {"ptint:", "compiler:", "eigen:", "boost:", "nlohmann_json:", "kernels:"})
        CHECK(v.find(key) != std::string::npos);
}
