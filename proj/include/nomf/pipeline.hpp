#pragma once

// End-to-end helpers shared by the CLI and the acceptance suite:
// events -> frames -> denoised frames -> region proposals.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "nomf/filters.hpp"
#include "nomf/framer.hpp"
#include "nomf/imc_sim.hpp"
#include "nomf/tracker_eval.hpp"

namespace nomf {

enum class Denoiser { none, median, nomf, imc, nn };

/// Accepts "none", "median", "nomf", "imc" and "nn".
Denoiser parse_denoiser(std::string_view name);
std::string_view to_string(Denoiser d);

struct DenoiseOptions {
    Denoiser method = Denoiser::nomf;
    std::uint32_t n = 3;
    ArrayConfig array;           ///< geometry and n are taken from the frames / n above
    MismatchModel mismatch;      ///< used by Denoiser::imc
    NnFiltConfig nn;             ///< used by Denoiser::nn
    unsigned threads = 1;
};

struct DenoisedFrame {
    EbbiFrame frame;
    FlipStats stats; ///< populated for every frame-based method (imc-specific fields only for imc)
};

/// Frame-based methods (median, nomf, imc, none).
std::vector<DenoisedFrame> denoise_frames(std::span<const EbbiFrame> frames, const DenoiseOptions& opts);

/// Runs any method from events; NN-filt filters events before framing.
std::vector<DenoisedFrame> denoise_events(std::span<const Event> events, SensorGeometry geometry,
                                          std::uint64_t window_len, const DenoiseOptions& opts,
                                          const AccumulateOptions& acc = {});

/// Proposals per frame, indexed by EbbiFrame::index() and sized to `frame_count`.
BoxSeries proposals_by_frame(std::span<const DenoisedFrame> frames, std::size_t frame_count,
                             std::int64_t min_area = kDefaultMinArea);

} // namespace nomf
