#include <doctest.h>

#include <charconv>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hbst/io.hpp"
#include "hbst/synthetic.hpp"
#include "support.hpp"

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(cells);
  }
  return rows;
}

// Header matches and every row has its width.
void check_schema(const std::string& text, const std::vector<std::string>& header) {
  const auto rows = parse_csv(text);
  REQUIRE_FALSE(rows.empty());
  CHECK(rows.front() == header);
  for (const auto& row : rows) REQUIRE(row.size() == header.size());
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  REQUIRE(ec == std::errc{});
  REQUIRE(ptr == s.data() + s.size());
  return v;
}

}  // namespace

TEST_CASE("format_double round trips") {
  hbst::Rng rng(401);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    REQUIRE(parse_double(hbst::format_double(v)) == v);
  }
  CHECK(hbst::format_double(0.25) == "0.25");
  CHECK(hbst::format_double(1.0) == "1");
}

TEST_CASE("match CSV") {
  std::vector<hbst::MatchRecord> matches{{test::entry("01", 3, 4), test::entry("11", 1, 2), 1}};
  std::ostringstream out;
  hbst::write_match_csv(out, matches);
  CHECK(out.str() == "query_image,query_kp,ref_image,ref_kp,distance\n3,4,1,2,1\n");
  std::ostringstream empty;
  hbst::write_match_csv(empty, {});
  check_schema(empty.str(), {"query_image", "query_kp", "ref_image", "ref_kp", "distance"});
}

TEST_CASE("ground truth CSV round trip") {
  hbst::GroundTruth gt;
  gt.pairs = {{5, 1}, {9, 3}, {9, 4}};
  std::ostringstream out;
  hbst::write_ground_truth_csv(out, gt);
  check_schema(out.str(), {"query_id", "reference_id"});
  std::istringstream in(out.str());
  CHECK(hbst::read_ground_truth_csv(in).pairs == gt.pairs);
}

TEST_CASE("ground truth CSV errors") {
  for (const char* bad : {"", "q,r\n1,0\n", "query_id,reference_id\n1\n", "query_id,reference_id\n1,2\n",
                          "query_id,reference_id\n3,1,2\n", "query_id,reference_id\nx,1\n"}) {
    std::istringstream in(bad);
    CHECK_THROWS_AS(hbst::read_ground_truth_csv(in), hbst::FormatError);
  }
}

TEST_CASE("PR, timing and scores CSVs") {
  hbst::PrCurve curve;
  curve.points = {{0.1, 0.5, 1.0, 2.0 / 3.0}, {0.7, 1.0, 0.25, 0.4}};
  std::ostringstream pr;
  hbst::write_pr_csv(pr, curve);
  check_schema(pr.str(), {"threshold", "precision", "recall", "f1"});
  const auto rows = parse_csv(pr.str());
  REQUIRE(rows.size() == 3);
  CHECK(parse_double(rows[1][3]) == 2.0 / 3.0);
  CHECK(parse_double(rows[2][0]) == 0.7);

  hbst::QueryScores q;
  q.image_id = 4;
  q.seconds = 0.125;
  hbst::ImageScore s;
  s.image_id = 2;
  s.votes = 3;
  s.score = 0.375;
  q.scores = {s};
  const std::vector<hbst::QueryScores> results{q};
  std::ostringstream timing;
  hbst::write_timing_csv(timing, results);
  CHECK(timing.str() == "image,seconds\n4,0.125\n");
  std::ostringstream scores;
  hbst::write_scores_csv(scores, results);
  CHECK(scores.str() == "query_image,ref_image,votes,score\n4,2,3,0.375\n");
}

TEST_CASE("completeness CSVs") {
  hbst::BitwiseCompleteness bw;
  bw.taus = {10, 25};
  bw.per_bit = {{1.0, 0.5}, {0.75, 0.25}};
  std::ostringstream bits;
  hbst::write_bitwise_csv(bits, bw);
  CHECK(bits.str() == "bit,tau,completeness\n0,10,1\n1,10,0.5\n0,25,0.75\n1,25,0.25\n");

  hbst::CompletenessReport r;
  r.tau = 25;
  r.per_depth_measured = {{0, 1.0}, {2, 0.5}};
  r.per_depth_predicted = {{0, 1.0}, {2, 0.5625}};
  const std::vector<hbst::CompletenessReport> reports{r};
  std::ostringstream depth;
  hbst::write_depth_csv(depth, reports);
  CHECK(depth.str() == "depth,tau,measured,predicted\n0,25,1,1\n2,25,0.5,0.5625\n");
}

TEST_CASE("pose file") {
  std::istringstream in("# id tx ty tz qx qy qz qw\n\n0 1 2 3 0 0 0 1\n7 0 0 0 0 0.7071067811865476 0 0.7071067811865476\n");
  const auto poses = hbst::read_poses(in);
  REQUIRE(poses.size() == 2);
  CHECK(poses[0].image_id == 0);
  CHECK(poses[0].position[2] == 3.0);
  CHECK(poses[0].optical_axis[2] == doctest::Approx(1.0));
  CHECK(poses[1].image_id == 7);
  CHECK(poses[1].optical_axis[0] == doctest::Approx(1.0));

  for (const char* bad : {"0 1 2 3 0 0 0\n", "0 1 2 3 0 0 0 1 9\n", "a 1 2 3 0 0 0 1\n", "0 0 0 0 0 0 0 0\n"}) {
    std::istringstream b(bad);
    CHECK_THROWS_AS(hbst::read_poses(b), hbst::FormatError);
  }
}
