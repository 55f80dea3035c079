#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "ccp/io.hpp"

using namespace ccp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ccp_io_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("g17 formatting round-trips doubles exactly") {
    for (double v : {1.0 / 3.0, 1e-300, 123456.789, -0.1, 2.2250738585072014e-308})
        CHECK(std::stod(io::format_g17(v)) == v);
}

TEST_CASE("table round trip is bitwise") {
    TempDir tmp;
    io::Table t;
    t.header = {"a", "b"};
    t.rows = {{1.0 / 3.0, -2.5}, {1e-17, 4.0}};
    const fs::path p = tmp.path / "t.csv";
    io::write_table(p, t);
    const io::Table back = io::read_table(p);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);

    // writing again produces identical bytes
    const fs::path p2 = tmp.path / "t2.csv";
    io::write_table(p2, back);
    std::ifstream f1(p), f2(p2);
    const std::string s1((std::istreambuf_iterator<char>(f1)), {});
    const std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
}

TEST_CASE("malformed tables are rejected") {
    TempDir tmp;
    const fs::path p = tmp.path / "bad.csv";
    write_text(p, "a,b\n1.0\n");
    CHECK_THROWS(io::read_table(p));
    write_text(p, "a,b\n1.0,oops\n");
    CHECK_THROWS(io::read_table(p));
    write_text(p, "a,b\n1.0,\n");  // missing cell
    CHECK_THROWS(io::read_table(p));
    CHECK_THROWS(io::read_table(tmp.path / "absent.csv"));
}

TEST_CASE("sites round trip and duplicate labels") {
    TempDir tmp;
    io::LabeledSites s;
    s.labels = {"a", "b", "c"};
    s.sites = {{0.0, 0.0}, {0.25, 0.5}, {1.0, 1.0}};
    const fs::path p = tmp.path / "sites.csv";
    io::write_sites(p, s);
    const auto back = io::read_sites(p);
    CHECK(back.labels == s.labels);
    for (size_t i = 0; i < s.sites.size(); ++i) {
        CHECK(back.sites[i].x == s.sites[i].x);
        CHECK(back.sites[i].y == s.sites[i].y);
    }
    write_text(p, "label,x,y\na,0,0\na,1,1\n");
    CHECK_THROWS(io::read_sites(p));
}

TEST_CASE("dataset joins observations to sites by label") {
    TempDir tmp;
    write_text(tmp.path / "sites.csv", "label,x,y\np,0,0\nq,0.5,0\n");
    // columns deliberately out of order relative to the sites file
    write_text(tmp.path / "obs.csv", "q,p\n1,2\n3,4\n");
    const auto ds = io::read_dataset(tmp.path / "sites.csv", tmp.path / "obs.csv");
    CHECK(ds.observations.n == 2);
    CHECK(ds.observations.d == 2);
    CHECK(ds.observations.at(0, 0) == 2.0);  // column p
    CHECK(ds.observations.at(0, 1) == 1.0);  // column q
    CHECK(ds.observations.sites[1].x == 0.5);

    write_text(tmp.path / "obs2.csv", "q,r\n1,2\n");
    CHECK_THROWS(io::read_dataset(tmp.path / "sites.csv", tmp.path / "obs2.csv"));
}

TEST_CASE("json write/read round trip") {
    TempDir tmp;
    const nlohmann::json j{{"x", 1.5}, {"tag", "v"}};
    io::write_json(tmp.path / "j.json", j);
    CHECK(io::read_json(tmp.path / "j.json") == j);
}

TEST_SUITE_END();
