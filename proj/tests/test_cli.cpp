#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qsl/cli.hpp"

using nlohmann::json;

namespace {
struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = qsl::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> data_lines(const std::string& s) {
  std::vector<std::string> v;
  for (auto& l : lines(s))
    if (!l.empty() && l[0] != '#') v.push_back(l);
  return v;
}

std::string tmp_path(const std::string& name) { return "/tmp/qsl_cli_test_" + name; }
}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("number formatting") {
    CHECK(qsl::cli::format_number(0.1) == "0.10000000000000001");
    CHECK(qsl::cli::format_number(2.0) == "2");
  }

  TEST_CASE("sum") {
    auto r = cli({"sum", "--geometry", "torus", "--d", "1", "--dispersion", "massless", "--q", "0", "--z", "1",
                  "--beta", "1", "--units", "natural"});
    REQUIRE(r.code == 0);
    auto d = data_lines(r.out);
    REQUIRE(d.size() == 2);
    CHECK(d[0] == "beta,value,tail_bound,terms_used,method");
    const double v = std::stod(d[1].substr(d[1].find(',') + 1));
    CHECK(v == doctest::Approx(2.16395341).epsilon(1e-8));
    CHECK(r.out.find("# config: ") != std::string::npos);
    CHECK(r.out.find("version") != std::string::npos);

    auto bad = cli({"sum", "--q", "1.5"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("-1 <= q <= 1") != std::string::npos);

    auto grid = cli({"sum", "--beta-grid", "1:0.5:8"});
    CHECK(grid.code == 0);
    CHECK(data_lines(grid.out).size() == 9);

    auto js = cli({"sum", "--beta-grid", "1:0.5:3", "--format", "json", "--kind", "lp"});
    REQUIRE(js.code == 0);
    auto j = json::parse(js.out);
    CHECK(j["rows"].size() == 3);
    CHECK(j["config"]["kind"] == "lp");

    CHECK(cli({"sum", "--geometry", "sphere3", "--dispersion", "relativistic"}).code == 2);
    CHECK(cli({"sum", "--d", "3", "--beta", "1e-6", "--method", "direct"}).code == 3);
    CHECK(cli({"sum", "--dispersion", "tachyonic"}).code == 2);
    CHECK(cli({"sum", "--q", "1", "--z", "1"}).code == 2);  // pole at the zero mode
    CHECK(cli({"nonsense"}).code == 2);
  }

  TEST_CASE("config files and round trips") {
    const std::string cfg = tmp_path("cfg.json");
    std::ofstream(cfg) << R"({"command":"sum","beta":2.0,"q":-1,"d":2})";
    auto a = cli({"sum", "--config", cfg});
    auto b = cli({"sum", "--d", "2", "--q", "-1", "--beta", "2"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    // flags win
    auto c = cli({"sum", "--config", cfg, "--beta", "0.5"});
    CHECK(c.out.find("\n0.5,") != std::string::npos);
    // command taken from the config
    CHECK(cli({"--config", cfg}).out == a.out);
    // the echo in an output file reproduces it byte for byte
    const std::string out1 = tmp_path("c1.csv"), out2 = tmp_path("c2.csv");
    REQUIRE(cli({"compare", "--case", "massless-1d", "--q", "-1", "--truncate", "3", "--beta-grid", "0.0625:0.5:3",
                 "--out", out1})
                .code == 0);
    REQUIRE(cli({"--config", out1, "--out", out2}).code == 0);
    std::stringstream s1, s2;
    s1 << std::ifstream(out1).rdbuf();
    s2 << std::ifstream(out2).rdbuf();
    CHECK(s1.str() == s2.str());
    std::ofstream(cfg) << R"({"bogus":1})";
    CHECK(cli({"sum", "--config", cfg}).code == 2);
    CHECK(cli({"sum", "--config", tmp_path("missing.json")}).code == 2);
    std::remove(cfg.c_str());
    std::remove(out1.c_str());
    std::remove(out2.c_str());
  }

  TEST_CASE("expand") {
    auto r = cli({"expand", "--case", "massless-1d", "--q", "0", "--order", "3"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    std::vector<double> powers;
    for (auto& t : j["terms"]) powers.push_back(t["power"].get<double>());
    CHECK(powers == std::vector<double>{-1, 1, 3});
    CHECK(j["terms"][1]["exact"] == "1/6");
    CHECK(j["terms"][2]["exact"] == "-1/360");

    auto a = json::parse(cli({"expand", "--case", "anzaf", "--d", "2", "--q", "0.5", "--order", "1"}).out);
    CHECK(a["remainder_class"] == "Conjectural");
    CHECK(a.contains("warning"));
    auto a2 = json::parse(cli({"expand", "--case", "anzaf", "--d", "2", "--q", "0.5", "--conjectural"}).out);
    CHECK_FALSE(a2.contains("warning"));

    CHECK(cli({"expand", "--case", "sphere-massless", "--q", "0.5"}).code == 2);
    CHECK(cli({"expand", "--case", "sphere-massless", "--q", "0.5", "--conjectural"}).code == 0);
    CHECK(cli({"expand", "--case", "massive-1d-theta", "--q", "0.5"}).code == 2);

    auto o0 = json::parse(cli({"expand", "--case", "massless-1d", "--q", "-0.5", "--order", "0"}).out);
    CHECK(o0["terms"].size() <= 2);
    auto rel = json::parse(cli({"expand", "--case", "relativistic", "--d", "3"}).out);
    CHECK(rel["terms"][0]["coefficient"].get<double>() == doctest::Approx(8 * M_PI));
    CHECK(rel["remainder_class"] == "PowerBounded");
  }

  TEST_CASE("compare") {
    auto m = cli({"compare", "--case", "massive-torus", "--d", "1", "--q", "0", "--beta-grid", "0.05:0.5:4"});
    REQUIRE(m.code == 0);
    auto rows = data_lines(m.out);
    CHECK(rows[0] == "beta,exact,predicted,residual,scaled_residual,floor");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      std::vector<double> v;
      std::stringstream ss(rows[i]);
      for (std::string c; std::getline(ss, c, ',');) v.push_back(std::stod(c));
      CHECK(std::abs(v[3]) <= v[5]);
    }
    CHECK(m.out.find("# fit: none") != std::string::npos);

    auto f = cli({"compare", "--case", "massless-1d", "--q", "-1", "--order", "3", "--truncate", "3", "--beta-grid",
                  "0.0625:0.5:7"});
    REQUIRE(f.code == 0);
    auto pos = f.out.find("# fit: slope=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(f.out.substr(pos + 13)) >= 3.85);

    auto empty = cli({"compare", "--case", "massless-1d", "--beta-grid", "1:0.5:0"});
    CHECK(empty.code == 0);
    CHECK(data_lines(empty.out).size() == 1);
  }

  TEST_CASE("condense") {
    auto r = cli({"condense", "--d", "3", "--dispersion", "massive", "--q", "1", "--z-grid", "0:0.95:20"});
    REQUIRE(r.code == 0);
    auto rows = data_lines(r.out);
    CHECK(rows[0] == "z,density,verdict");
    double prev = -1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double v = std::stod(rows[i].substr(rows[i].find(',') + 1));
      CHECK(v > prev);
      prev = v;
    }
    CHECK(rows.back().find("Finite") != std::string::npos);
    CHECK(prev == doctest::Approx(std::sqrt(M_PI) / 2 * 2.612375348685488 / 2).epsilon(1e-9));

    auto d1 = cli({"condense", "--d", "1", "--dispersion", "massless", "--q", "1"});
    CHECK(data_lines(d1.out).back().find("Divergent") != std::string::npos);
    auto zero = cli({"condense", "--d", "3", "--q", "1", "--z-grid", "0:0:1"});
    CHECK(data_lines(zero.out)[1] == "0,0,Subcritical");
    CHECK(cli({"condense", "--q", "-0.5"}).code == 2);
  }

  TEST_CASE("figure-derivatives") {
    auto r = cli({"figure-derivatives", "--q", "0.5", "--z", "1.0", "--max-n", "40"});
    REQUIRE(r.code == 0);
    auto rows = data_lines(r.out);
    CHECK(rows[0] == "n,growth");
    CHECK(rows.size() == 41);
    CHECK(r.out.find("# precision: bits=256") != std::string::npos);
    auto q0 = data_lines(cli({"figure-derivatives", "--q", "0", "--max-n", "5"}).out);
    for (std::size_t i = 1; i < q0.size(); ++i) CHECK(q0[i].substr(q0[i].find(',') + 1) == "1");
    CHECK(data_lines(cli({"figure-derivatives", "--max-n", "0"}).out).size() == 1);
    auto ex = cli({"figure-derivatives", "--precision-bits", "64", "--min-digits", "30"});
    CHECK(ex.code == 3);
    CHECK(ex.err.find("failing n=") != std::string::npos);
  }

  TEST_CASE("probe") {
    auto r = cli({"probe"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["report"]["conjectured"].get<double>() == doctest::Approx(4 * std::log(2.0)).epsilon(1e-8));
    CHECK(j.contains("within_5_percent"));
  }

  TEST_CASE("help") { CHECK(cli({"--help"}).code == 0); }
}
