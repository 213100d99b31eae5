#pragma once

// Region proposals from binary frames, IoU-thresholded precision/recall and a
// greedy overlap tracker.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "nomf/framer.hpp"
#include "nomf/geometry.hpp"

namespace nomf {

struct Region {
    BoundingBox box;
    std::vector<std::uint32_t> pixels; ///< linear indices y*W + x, ascending
};

/// 4- or 8-connected components of the 1-pixels, ordered by their first pixel
/// in row-major order.
std::vector<Region> connected_components(const EbbiFrame& frame, int connectivity = 8);

/// Bounding boxes of components whose box area is at least `min_area`.
std::vector<BoundingBox> propose_regions(const EbbiFrame& frame, std::int64_t min_area = 0, int connectivity = 8);

/// Intersection over union with inclusive pixel areas.
double iou(const BoundingBox& a, const BoundingBox& b);

struct EvalCurve {
    std::vector<double> thresholds;
    std::vector<double> precision;
    std::vector<double> recall;
    std::uint64_t proposals = 0;
    std::uint64_t ground_truth = 0;
};

inline constexpr std::int64_t kDefaultMinArea = 5;

/// Pooled precision/recall over all frames. Proposals smaller than `min_area`
/// are dropped, then each frame is matched greedily one-to-one by descending
/// IoU; a matched pair counts as a true positive at threshold t when IoU >= t.
/// No proposals gives precision 1; no ground truth gives recall 1.
/// Throws InvalidArgument when the two series have different frame counts.
EvalCurve evaluate(const BoxSeries& proposals, const BoxSeries& ground_truth, std::span<const double> thresholds,
                   std::int64_t min_area = kDefaultMinArea);

/// Evenly spaced thresholds lo, lo+step, ..., up to hi inclusive.
std::vector<double> iou_grid(double lo, double hi, double step);

struct Track {
    std::uint32_t id = 0;
    std::uint32_t first_frame = 0;
    std::vector<std::pair<std::uint32_t, BoundingBox>> boxes; ///< (frame, box)
    std::uint32_t last_frame() const { return boxes.empty() ? first_frame : boxes.back().first; }
};

/// Frame-to-frame association by greedy maximum IoU (> 0) against tracks alive
/// in the previous frame; unmatched boxes open new tracks with increasing ids.
std::vector<Track> track_overlap(const BoxSeries& per_frame);

/// CSV `frame,x_min,y_min,x_max,y_max`. `frames` pads the series with empty
/// frames; rows beyond it are an error.
BoxSeries read_boxes_csv(std::istream& in, std::optional<std::size_t> frames = std::nullopt);
void write_boxes_csv(std::ostream& out, const BoxSeries& series);

/// CSV `iou,precision,recall`.
void write_curve_csv(std::ostream& out, const EvalCurve& curve);

} // namespace nomf
