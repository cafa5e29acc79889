#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "repeatcap/tables.hpp"

using namespace repeatcap;
using namespace repeatcap::tables;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("grid parsing") {
    const auto g = Grid::parse("0.1:0.5:0.2");
    CHECK(g.points() == std::vector<double>{0.1, 0.30000000000000004, 0.5});
    CHECK(Grid::parse("0.5:0.5:1").points().size() == 1);
    CHECK_THROWS_AS(Grid::parse("nonsense"), std::invalid_argument);
    CHECK_THROWS_AS(Grid::parse("0.5:0.1:0.1"), std::invalid_argument);
    CHECK_THROWS_AS(Grid::parse("0.1:0.5:0"), std::invalid_argument);
}

TEST_CASE("truncated formatting") {
    CHECK(format_truncated(0.552658, 3) == "0.552");
    CHECK(format_truncated(0.9999, 3) == "0.999");
    CHECK(format_truncated(0.2639147047, 6) == "0.263914");
    CHECK(format_truncated(47.343266311, 6) == "47.343266");
}

TEST_CASE("poi-mean table row matches the reference data") {
    const auto csv = poi_mean_csv(Grid::parse("0.5:0.5:1"));
    CHECK(csv == "q,ell1,mu1,ell2,mu2\n0.500000,0.263914,0.393231,0.159182,0.252846\n");
}

TEST_CASE("cap table rows match the reference data") {
    const auto poi = poi_cap_csv(Grid::parse("0.01:0.01:1"));
    CHECK(poi ==
          "d,c1,q1,c2,q2,c3,q3,c4,q4\n"
          "0.01,0.849,0.881,0.872,0.883,1.095,0.849,1.096,0.849\n");
    const auto del = del_cap_csv(Grid::parse("0.99:0.99:1"));
    CHECK(del ==
          "d,c1,q1,c2,q2,c3,q3,c4,q4\n"
          "0.99,0.465,0.724,0.602,0.658,0.612,0.656,0.621,0.663\n");
}

TEST_CASE("CSV output is byte-reproducible") {
    const auto grid = Grid::parse("0.2:0.8:0.3");
    CHECK(poi_mean_csv(grid) == poi_mean_csv(grid));
    const auto g2 = Grid::parse("0.5:0.5:1");
    CHECK(del_cap_csv(g2) == del_cap_csv(g2));
}

TEST_CASE("slope curve peaks at the golden ratio for p = 1/2") {
    const auto csv = slope_curve_csv(true, 0.5, dists::DistKind::InvBin,
                                     bounds::Method::ExactDist, Grid::parse("0.01:0.99:0.01"));
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    double best_q = 0.0, best_v = -1.0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const double q = std::stod(line.substr(0, comma));
        const double v = std::stod(line.substr(comma + 1));
        if (v > best_v) {
            best_v = v;
            best_q = q;
        }
    }
    CHECK(best_q == doctest::Approx(0.62).epsilon(0.02));
    CHECK(best_v == doctest::Approx(0.694242).epsilon(1e-4));
}

TEST_CASE("gap curve for the digamma law matches its closed form") {
    const auto csv = gap_curve_csv(false, 0.9, dists::DistKind::PoiDigamma, 0.5, 20);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,gap,predicted");
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string x, gap, pred;
        std::getline(row, x, ',');
        std::getline(row, gap, ',');
        std::getline(row, pred, ',');
        REQUIRE(!pred.empty());
        CHECK(std::abs(std::stod(gap) - std::stod(pred)) <= 1e-7);
    }
}

TEST_CASE("pmf curve matches the golden file") {
    const auto csv = pmf_curve_csv(dists::DistKind::BinTrunc, 0.5, 0.5, 80);
    const auto golden = read_file(std::string(REPEATCAP_GOLDEN_DIR) + "/pmf_bintrunc_p05_q05.csv");
    CHECK(csv == golden);
    // shape: monotone decreasing after y = 1 for these parameters
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    double prev = 1e9;
    int y = 0;
    while (std::getline(in, line)) {
        const double v = std::stod(line.substr(line.find(',') + 1));
        if (y >= 1) CHECK(v <= prev);
        prev = v;
        ++y;
    }
}

TEST_CASE("estimates curve brackets the exact values") {
    const auto csv = estimates_curve_csv(dists::DistKind::InvBin, 0.1, Grid::parse("0.2:0.8:0.2"));
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
        REQUIRE(v.size() == 7);
        CHECK(v[1] <= v[2]);
        CHECK(v[2] <= v[3]);
        CHECK(v[4] <= v[5]);
        CHECK(v[5] <= v[6]);
    }
}
