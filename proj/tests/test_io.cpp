#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twinsurf/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace twinsurf;

TEST_CASE("CSV header and row order")
{
    const auto g = make_grid(GridSpec{3, 3, 0, 2, 0, 2}, regions::everything());
    const std::string text = io::to_csv({ScalarField::sample(g, [](double x, double y) { return x + 10 * y; })});
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y,v");
    std::getline(in, line);
    CHECK(line == "0,0,0");
    std::getline(in, line);
    CHECK(line == "1,0,1");

    const std::string two = io::to_csv({ScalarField(g, 1.0), ScalarField(g, 2.0)});
    CHECK(two.rfind("x,y,v1,v2\n", 0) == 0);
    const std::string named = io::to_csv({ScalarField(g, 1.0)}, {"f"});
    CHECK(named.rfind("x,y,f\n", 0) == 0);
}

TEST_CASE("CSV round trip on a masked grid")
{
    const GridSpec spec{41, 41, -3, 3, -3, 3};
    const auto g = make_grid(spec, regions::slit_annulus(1, 3, 0.5 * spec.hy()), 2, 0);
    const ScalarField f = ScalarField::sample(g, [](double x, double y) { return std::atan2(y, x) + 1e-3 * x * y; });
    const std::string text = io::to_csv({f});
    std::istringstream in(text);
    const io::CsvTable t = io::parse_csv(in, std::make_pair(2.0, 0.0));
    REQUIRE(t.fields.size() == 1);
    CHECK(t.columns == std::vector<std::string>{"x", "y", "v"});
    CHECK(t.grid->node_count() == g->node_count());
    CHECK(t.grid->h() == doctest::Approx(g->h()));
    // the parsed box is the bounding box of the listed nodes
    CHECK(t.grid->x(t.grid->anchor().i) == doctest::Approx(g->x(g->anchor().i)));
    CHECK(t.grid->y(t.grid->anchor().j) == doctest::Approx(g->y(g->anchor().j)));
    std::istringstream a(text), b(io::to_csv(t.fields));
    std::string la, lb;
    double worst = 0;
    int rows = 0;
    std::getline(a, la);
    std::getline(b, lb);
    while (std::getline(a, la) && std::getline(b, lb)) {
        std::istringstream ra(la), rb(lb);
        for (std::string ca, cb; std::getline(ra, ca, ',') && std::getline(rb, cb, ',');)
            worst = std::max(worst, std::abs(std::stod(ca) - std::stod(cb)));
        ++rows;
    }
    CHECK(rows == g->node_count());
    CHECK(worst <= 1e-12);
}

TEST_CASE("CSV parse errors")
{
    std::istringstream empty("");
    CHECK_THROWS_AS(io::parse_csv(empty), Error);
    std::istringstream bad_header("a,b\n1,2\n");
    CHECK_THROWS_AS(io::parse_csv(bad_header), Error);
    std::istringstream bad_value("x,y,v\n0,0,1\n1,0,oops\n");
    try {
        io::parse_csv(bad_value);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kParse);
    }
    CHECK_THROWS_AS(io::read_csv("/nonexistent/file.csv"), Error);
}

TEST_CASE("report JSON round trip")
{
    ResidualReport r;
    r.max_abs = 1.5e-4;
    r.mean_abs = 2e-5;
    r.l2 = 3e-5;
    r.h = 0.01;
    r.node_count = 1234;
    const nlohmann::json j = io::to_json(r);
    for (const char* k : {"max_abs", "mean_abs", "l2", "h", "node_count"}) CHECK(j.contains(k));
    const ResidualReport back = io::report_from_json(j);
    CHECK(back.max_abs == r.max_abs);
    CHECK(back.mean_abs == r.mean_abs);
    CHECK(back.l2 == r.l2);
    CHECK(back.h == r.h);
    CHECK(back.node_count == r.node_count);
}

TEST_CASE("Weierstrass CSV header")
{
    const auto g = make_grid(GridSpec{3, 3, 0, 1, 0, 1}, regions::everything());
    WeierstrassData w;
    w.grid = g;
    for (int k = 0; k < 3; ++k) {
        w.re.emplace_back(g, 0.5);
        w.im.emplace_back(g, -0.5);
    }
    const std::string text = io::weierstrass_csv(w);
    CHECK(text.rfind("xi1,xi2,re_phi1,im_phi1,re_phi2,im_phi2,re_phi3,im_phi3\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);
}
