#include "nomf/pipeline.hpp"

#include <algorithm>
#include <string>

#include "nomf/error.hpp"
#include "parallel.hpp"

namespace nomf {

Denoiser parse_denoiser(std::string_view name) {
    if (name == "none") return Denoiser::none;
    if (name == "median") return Denoiser::median;
    if (name == "nomf") return Denoiser::nomf;
    if (name == "imc") return Denoiser::imc;
    if (name == "nn") return Denoiser::nn;
    throw InvalidArgument("unknown method '" + std::string(name) + "' (expected median, nomf, imc or nn)");
}

std::string_view to_string(Denoiser d) {
    switch (d) {
    case Denoiser::none: return "none";
    case Denoiser::median: return "median";
    case Denoiser::nomf: return "nomf";
    case Denoiser::imc: return "imc";
    case Denoiser::nn: return "nn";
    }
    return "?";
}

namespace {

FlipStats diff_stats(const EbbiFrame& before, const EbbiFrame& after) {
    FlipStats s;
    s.flipped_pixels = simd::active().count_diff_u8(before.bits.data(), after.bits.data(), before.bits.size());
    s.alpha_measured = before.bits.empty() ? 0.0 : double(s.flipped_pixels) / double(before.bits.size());
    return s;
}

} // namespace

std::vector<DenoisedFrame> denoise_frames(std::span<const EbbiFrame> frames, const DenoiseOptions& opts) {
    if (opts.method == Denoiser::nn) throw InvalidArgument("nn filtering operates on events, not frames");
    if (opts.method != Denoiser::none) KernelConfig{opts.n, KernelMode::non_overlap}.validate();
    std::vector<DenoisedFrame> out(frames.size());
    // Frames are independent; the imc substreams are keyed by frame index.
    detail::parallel_for(frames.size(), opts.threads, [&](std::size_t i) {
        const EbbiFrame& in = frames[i];
        switch (opts.method) {
        case Denoiser::none: out[i] = {in, {}}; break;
        case Denoiser::median: out[i].frame = median_overlap(in, opts.n); break;
        case Denoiser::nomf: out[i].frame = nomf(in, opts.n); break;
        case Denoiser::imc: {
            ArrayConfig a = opts.array;
            a.rows = in.height();
            a.cols = in.width();
            a.n = opts.n;
            a.banks = std::max(a.banks, (a.cols + a.bank_cols - 1) / a.bank_cols);
            auto r = filter_frame_imc(in, a, opts.mismatch, in.index(), 1);
            out[i] = {std::move(r.frame), r.stats};
            return;
        }
        case Denoiser::nn: break;
        }
        out[i].stats = diff_stats(in, out[i].frame);
    });
    return out;
}

std::vector<DenoisedFrame> denoise_events(std::span<const Event> events, SensorGeometry geometry,
                                          std::uint64_t window_len, const DenoiseOptions& opts,
                                          const AccumulateOptions& acc) {
    if (opts.method == Denoiser::nn) {
        const auto raw = accumulate(events, geometry, window_len, acc);
        const auto kept = nn_filt(events, opts.nn, geometry);
        AccumulateOptions same = acc;
        if (!raw.empty()) {
            same.start_us = raw.front().frame.window_start;
            same.end_us = raw.back().frame.window_start + window_len;
        }
        auto filtered = accumulate(kept, geometry, window_len, same);
        std::vector<DenoisedFrame> out;
        for (std::size_t i = 0; i < filtered.size(); ++i)
            out.push_back({filtered[i].frame, diff_stats(raw[i].frame, filtered[i].frame)});
        return out;
    }
    auto windows = accumulate(events, geometry, window_len, acc);
    std::vector<EbbiFrame> frames;
    frames.reserve(windows.size());
    for (auto& w : windows) frames.push_back(std::move(w.frame));
    return denoise_frames(frames, opts);
}

BoxSeries proposals_by_frame(std::span<const DenoisedFrame> frames, std::size_t frame_count, std::int64_t min_area) {
    BoxSeries series(frame_count);
    for (const auto& f : frames) {
        const auto idx = f.frame.index();
        if (idx < frame_count) series[idx] = propose_regions(f.frame, min_area);
    }
    return series;
}

} // namespace nomf
