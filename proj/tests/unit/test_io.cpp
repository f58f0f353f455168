#include <cmath>
#include <sstream>

#include "doctest.h"
#include "jumpinterp/error.hpp"
#include "jumpinterp/io.hpp"

using namespace jumpinterp;

TEST_SUITE("io") {
  TEST_CASE("time series round trip") {
    const TimeSeries ts = TimeSeries::from_rows({{0, 1}, {2, -1}, {0.5, 0.5}}, BNorm(2, 1.0));
    const TimeSeries back = time_series_from_json(to_json(ts));
    CHECK(back.flat_values() == ts.flat_values());
    CHECK(back.labels() == ts.labels());
    CHECK(back.norm() == ts.norm());
  }

  TEST_CASE("process and martingale round trip") {
    const auto f = SampledProcess::scalar(AtomicMeasureSpace::with_weights({0.5, 2.0}),
                                          {{0, 1, 2}, {3, 4, 5}});
    const auto g = sampled_process_from_json(to_json(f));
    CHECK(g.space().weights() == f.space().weights());
    CHECK(g.series(1).flat_values() == f.series(1).flat_values());
    const json mj = json::parse(R"({"partitions": [[[0, 1, 2, 3]], [[0, 1], [2, 3]]],
                                    "values": [1, -1, 3, 1], "weights": [1, 1, 1, 1]})");
    const auto m = martingale_from_json(mj);
    CHECK(m.at(0)[0] == doctest::Approx(1.0));
    CHECK(martingale_from_json(to_json(m)).at(1) == m.at(1));
  }

  TEST_CASE("CSV readers") {
    const TimeSeries ts = time_series_from_csv("# comment\nx,y\n1,2\n3,4\n", 2.0);
    CHECK(ts.size() == 2);
    CHECK(ts.dimension() == 2);
    CHECK_THROWS_AS(time_series_from_csv("1,2\n3\n", 2.0), ParseError);
    CHECK_THROWS_AS(time_series_from_csv("1,2\n3,abc\n", 2.0), ParseError);
    CHECK_THROWS_AS(time_series_from_csv("# nothing\n", 2.0), ParseError);
    const auto Q = matrix_from_csv("0.5,0.5\n0.5,0.5\n");
    CHECK(Q.size() == 2);
  }

  TEST_CASE("malformed JSON is reported as a parse error") {
    CHECK_THROWS_AS(time_series_from_json(json::parse(R"({"values": "x"})")), ParseError);
    CHECK_THROWS_AS(time_series_from_json(json::parse(R"({"values": []})")), ParseError);
    CHECK_THROWS_AS(time_series_from_json(json::parse(R"({"values": [[1, 2], [3]]})")), ParseError);
    CHECK_THROWS_AS(sampled_process_from_json(json::parse(R"({"space": {"weights": [1, 1]},
                                                               "values": [[1, 2], [3]]})")),
                    ParseError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), ParseError);
    CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"entries": 3})")), ParseError);
  }
}
