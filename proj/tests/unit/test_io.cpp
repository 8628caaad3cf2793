#include <doctest.h>

#include <random>

#include "../support/fixtures.hpp"
#include "igl/csv.hpp"
#include "igl/errors.hpp"
#include "igl/report_io.hpp"

using igl::Matrix;
namespace csv = igl::csv;
namespace io = igl::io;

TEST_CASE("CSV quoting and parsing") {
  CHECK(csv::escape("plain") == "plain");
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const auto rows = csv::parse("a,\"b,c\",\"d\"\"e\"\r\n\n1,\"multi\nline\",3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == csv::Row{"a", "b,c", "d\"e"});
  CHECK(rows[1] == csv::Row{"1", "multi\nline", "3"});
  CHECK_THROWS_AS(csv::parse("a,\"unterminated\n"), igl::MalformedRow);
  const csv::Row odd{"x,y", "q\"", "", "line\nbreak"};
  CHECK(csv::parse(csv::format_row(odd)).at(0) == odd);
}

TEST_CASE("numbers round-trip exactly") {
  std::mt19937_64 eng(1);
  std::uniform_real_distribution<double> ud(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = ud(eng) * std::pow(10.0, static_cast<int>(eng() % 40) - 20);
    CHECK(std::stod(csv::number(v)) == v);
  }
  CHECK(csv::number(0.5) == "0.5");
  CHECK(csv::number(1.0) == "1");
}

TEST_CASE("matrix CSV round trip") {
  std::mt19937_64 eng(2);
  const Matrix m = fixtures::normal_matrix(7, 4, eng);
  const auto lm = csv::parse_matrix(csv::format_matrix(m, {"a", "b", "c", "d"}));
  CHECK(lm.labels == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(lm.values == m);
  CHECK(csv::parse_matrix(csv::format_matrix(m)).labels[0] == "V1");
  CHECK_THROWS_AS(csv::parse_matrix("a,b\n1,2\n3\n"), igl::MalformedRow);
  CHECK_THROWS_AS(csv::parse_matrix("a,b\n1,zz\n"), igl::MalformedRow);
}

TEST_CASE("interval column file") {
  const auto x = csv::parse_interval_columns("x_l,x_u,y_l,y_u\n0,1,2,3\n1,1,2,5\n");
  CHECK(x.labels() == std::vector<std::string>{"x", "y"});
  CHECK(x.upper()(1, 1) == 5.0);
  CHECK_THROWS_AS(csv::parse_interval_columns("x_l,y_u\n0,1\n"), igl::InputError);
  CHECK_THROWS_AS(csv::parse_interval_columns("x_l,x_u\n2,1\n"), igl::BoundViolation);
}

TEST_CASE("interval file pair must share a header") {
  const auto dir = fixtures::scratch_dir("pair");
  csv::write_file((dir / "l.csv").string(), "a,b\n0,0\n1,1\n");
  csv::write_file((dir / "u.csv").string(), "a,c\n1,1\n2,2\n");
  CHECK_THROWS_AS(csv::read_interval_pair((dir / "l.csv").string(), (dir / "u.csv").string()), igl::InputError);
  CHECK_THROWS_AS(csv::read_file((dir / "missing.csv").string()), igl::InputError);
}

TEST_CASE("fit JSON round trip") {
  const auto cov = fixtures::wishart_cov(5, 3);
  igl::SolverConfig cfg;
  cfg.lambda = 0.2;
  const auto fit = igl::igl_fit(cov, cfg);
  const io::Json j = io::Json::parse(io::fit_to_json(fit).dump());
  const auto back = io::fit_from_json(j);
  CHECK(back.theta_hat == fit.theta_hat);
  CHECK(back.sigma_hat == fit.sigma_hat);
  CHECK(back.gap == fit.gap);
  CHECK(back.sweeps == fit.sweeps);
  CHECK(back.converged == fit.converged);
  CHECK(j["theta"].size() == 25);
  CHECK(j["theta"][1].get<double>() == fit.theta_hat(0, 1));
  CHECK_THROWS_AS(io::fit_from_json(io::Json{{"lambda", 1}}), igl::InputError);
}

TEST_CASE("experiment config JSON") {
  const auto j = io::Json::parse(R"({"structures":["band","er"],"dgps":["dgp1"],"widths":[1,2],
    "n":[50],"ratios":[0.5],"reps":3,"master_seed":7,"truth_mode":"base"})");
  const auto cfg = io::experiment_from_json(j);
  CHECK(cfg.structures.size() == 2);
  CHECK(cfg.reps == 3);
  CHECK(cfg.master_seed == 7);
  CHECK(cfg.truth_mode == igl::sim::TruthMode::base);
  const auto again = io::experiment_from_json(io::experiment_to_json(cfg));
  CHECK(io::experiment_to_json(again) == io::experiment_to_json(cfg));
  CHECK_THROWS_AS(io::experiment_from_json(io::Json::parse(R"({"reps":2})")), igl::InvalidConfig);
  CHECK_THROWS_AS(io::experiment_from_json(io::Json::parse(R"({"n":"lots"})")), igl::InvalidConfig);
  CHECK_THROWS_AS(io::experiment_from_json(io::Json::parse(R"({"n":[50],"structures":["star"]})")), igl::InvalidConfig);
  CHECK_THROWS_AS(io::experiment_from_json(io::Json::array()), igl::InvalidConfig);
}

TEST_CASE("path CSV layout") {
  const auto cov = fixtures::wishart_cov(4, 8);
  const auto path = igl::select_lambda(cov, {0.8, 0.4, 0.2}, 100, igl::SolverConfig{});
  const auto rows = csv::parse(io::path_csv(path));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == csv::Row{"lambda", "bic", "k", "gap", "sweeps", "selected"});
  int selected = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) selected += rows[k][5] == "1";
  CHECK(selected == 1);
  CHECK(rows[1 + path.selected_index][5] == "1");
}

TEST_CASE("manifest hash is stable and content sensitive") {
  const io::Json a{{"x", 1}, {"y", "z"}};
  const io::Json b{{"x", 2}, {"y", "z"}};
  CHECK(io::config_hash(a) == io::config_hash(a));
  CHECK(io::config_hash(a) != io::config_hash(b));
  CHECK(io::config_hash(a).size() == 16);
  const auto m = io::manifest("fit", a, 5);
  CHECK(m["subcommand"] == "fit");
  CHECK(m["master_seed"] == 5);
}
