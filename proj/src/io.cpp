#include "hbst/io.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace hbst {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint32_t parse_u32(const std::string& field, const std::string& line) {
  std::uint32_t value = 0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) throw FormatError("malformed integer in line: " + line);
  return value;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_match_csv(std::ostream& out, std::span<const MatchRecord> matches) {
  out << "query_image,query_kp,ref_image,ref_kp,distance\n";
  for (const auto& m : matches) {
    out << m.query.image_id << ',' << m.query.keypoint_id << ',' << m.reference.image_id << ','
        << m.reference.keypoint_id << ',' << m.distance << '\n';
  }
}

void write_ground_truth_csv(std::ostream& out, const GroundTruth& truth) {
  out << "query_id,reference_id\n";
  for (const auto& [q, r] : truth.pairs) out << q << ',' << r << '\n';
}

GroundTruth read_ground_truth_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "query_id,reference_id") {
    throw FormatError("ground truth CSV must start with the header query_id,reference_id");
  }
  GroundTruth truth;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw FormatError("ground truth row needs exactly two columns: " + line);
    }
    const auto q = parse_u32(trim(line.substr(0, comma)), line);
    const auto r = parse_u32(trim(line.substr(comma + 1)), line);
    if (q <= r) throw FormatError("ground truth pair must have query_id > reference_id: " + line);
    truth.pairs.emplace(q, r);
  }
  return truth;
}

void write_pr_csv(std::ostream& out, const PrCurve& curve) {
  out << "threshold,precision,recall,f1\n";
  for (const auto& p : curve.points) {
    out << format_double(p.threshold) << ',' << format_double(p.precision) << ','
        << format_double(p.recall) << ',' << format_double(p.f1) << '\n';
  }
}

void write_timing_csv(std::ostream& out, std::span<const QueryScores> results) {
  out << "image,seconds\n";
  for (const auto& r : results) out << r.image_id << ',' << format_double(r.seconds) << '\n';
}

void write_scores_csv(std::ostream& out, std::span<const QueryScores> results) {
  out << "query_image,ref_image,votes,score\n";
  for (const auto& r : results) {
    for (const auto& s : r.scores) {
      out << r.image_id << ',' << s.image_id << ',' << s.votes << ',' << format_double(s.score) << '\n';
    }
  }
}

void write_bitwise_csv(std::ostream& out, const BitwiseCompleteness& bitwise) {
  out << "bit,tau,completeness\n";
  for (std::size_t t = 0; t < bitwise.taus.size(); ++t) {
    for (std::size_t k = 0; k < bitwise.per_bit[t].size(); ++k) {
      out << k << ',' << bitwise.taus[t] << ',' << format_double(bitwise.per_bit[t][k]) << '\n';
    }
  }
}

void write_depth_csv(std::ostream& out, std::span<const CompletenessReport> reports) {
  out << "depth,tau,measured,predicted\n";
  for (const auto& report : reports) {
    for (const auto& [depth, measured] : report.per_depth_measured) {
      out << depth << ',' << report.tau << ',' << format_double(measured) << ','
          << format_double(report.per_depth_predicted.at(depth)) << '\n';
    }
  }
}

std::vector<PoseRecord> read_poses(std::istream& in) {
  std::vector<PoseRecord> poses;
  std::string line;
  while (std::getline(in, line)) {
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    std::istringstream fields(text);
    std::uint32_t id = 0;
    std::array<double, 3> t{};
    double qx = 0, qy = 0, qz = 0, qw = 0;
    std::string extra;
    if (!(fields >> id >> t[0] >> t[1] >> t[2] >> qx >> qy >> qz >> qw) || (fields >> extra)) {
      throw FormatError("pose line must be 'image_id tx ty tz qx qy qz qw': " + text);
    }
    try {
      poses.push_back(PoseRecord::from_quaternion(id, t, qx, qy, qz, qw));
    } catch (const UsageError& e) {
      throw FormatError(e.what());
    }
  }
  return poses;
}

}  // namespace hbst
