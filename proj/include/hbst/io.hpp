#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hbst/eval.hpp"
#include "hbst/oracle.hpp"

namespace hbst {

// Shortest text that parses back to the same double.
std::string format_double(double v);

// query_image,query_kp,ref_image,ref_kp,distance
void write_match_csv(std::ostream& out, std::span<const MatchRecord> matches);

// query_id,reference_id
void write_ground_truth_csv(std::ostream& out, const GroundTruth& truth);
// Throws FormatError on a missing header or malformed row.
GroundTruth read_ground_truth_csv(std::istream& in);

// threshold,precision,recall,f1
void write_pr_csv(std::ostream& out, const PrCurve& curve);

// image,seconds
void write_timing_csv(std::ostream& out, std::span<const QueryScores> results);

// query_image,ref_image,votes,score
void write_scores_csv(std::ostream& out, std::span<const QueryScores> results);

// bit,tau,completeness
void write_bitwise_csv(std::ostream& out, const BitwiseCompleteness& bitwise);

// depth,tau,measured,predicted
void write_depth_csv(std::ostream& out, std::span<const CompletenessReport> reports);

// Lines of "image_id tx ty tz qx qy qz qw"; blank lines and '#' comments are
// skipped. Throws FormatError on malformed lines.
std::vector<PoseRecord> read_poses(std::istream& in);

}  // namespace hbst
