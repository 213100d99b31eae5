#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nomf/cost_model.hpp"
#include "nomf/error.hpp"
#include "nomf/event_io.hpp"
#include "nomf/framer.hpp"
#include "nomf/imc_sim.hpp"
#include "nomf/pbm.hpp"
#include "nomf/pipeline.hpp"
#include "nomf/tracker_eval.hpp"

namespace nomf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void add_common(Subcommand& s) {
    auto* app = s.app;
    app->add_option("--config", s.common->config_path, "JSON file with option values (flat object or a run manifest)");
    app->add_option("--seed", s.common->seed, "random seed; a fresh one is drawn and recorded when omitted");
    app->add_option("--threads", s.common->threads, "worker threads")->check(CLI::Range(1u, 1024u));
}

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

bool has_ext(const std::string& path, std::string_view ext) {
    auto e = fs::path(path).extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return e == ext;
}

// "csv", "bin" or "pbm"; "auto" goes by extension.
std::string input_kind(const std::string& path, const std::string& format) {
    if (format != "auto") return format;
    if (has_ext(path, ".pbm")) return "pbm";
    if (has_ext(path, ".bin") || has_ext(path, ".aer")) return "bin";
    return "csv";
}

std::vector<Event> read_events(const std::string& path, const std::string& kind, SensorGeometry g) {
    ParseOptions opts;
    opts.geometry = g;
    if (kind == "bin") {
        auto in = open_in(path, true);
        return parse_binary(in, opts);
    }
    auto in = open_in(path);
    return parse_csv(in, opts);
}

PbmFormat pbm_format(const std::string& s) { return s == "plain" ? PbmFormat::plain : PbmFormat::raw; }

AccumulateOptions window_range(std::optional<double> duration) {
    AccumulateOptions acc;
    acc.start_us = 0;
    if (duration) acc.end_us = std::uint64_t(std::llround(*duration * 1e6));
    return acc;
}

// ---------------------------------------------------------------- gen

struct GenOpts {
    std::string output;
    std::string gt;
    std::string format = "auto";
    std::uint32_t objects = 2;
    double duration = 4.0;
    double noise = 0.5;
    std::uint32_t width = 320, height = 240;
    std::uint32_t window = 66000;
    std::uint32_t edge_width = 3;
};

// ---------------------------------------------------------------- frame

struct FrameOpts {
    std::string input;
    std::string output;
    std::string format = "auto";
    std::string pbm = "raw";
    std::string stats;
    std::uint64_t window = kDefaultWindowUs;
    std::optional<double> duration;
    std::uint32_t width = 320, height = 240;
};

// ---------------------------------------------------------------- denoise

struct DenoiseOpts {
    std::string input;
    std::string output;
    std::string format = "auto";
    std::string pbm = "raw";
    std::string method = "nomf";
    std::string boxes;
    std::string stats;
    std::uint32_t n = 3;
    std::uint64_t window = kDefaultWindowUs;
    std::optional<double> duration;
    std::uint32_t width = 320, height = 240;
    double vdd = 1.2;
    std::optional<double> sigma_i;
    std::uint64_t tau = 66000;
    std::int64_t min_area = kDefaultMinArea;
};

// ---------------------------------------------------------------- cost

struct CostOpts {
    std::string output;
    std::string table;
    std::uint32_t n = 3;
    std::uint32_t width = 320, height = 240;
    std::uint32_t beta_t = 16;
    double gamma = 0.15;
    double alpha = 0.036;
    std::string alpha_from;
};

// ---------------------------------------------------------------- mc

struct McOpts {
    std::string output;
    std::string histogram;
    std::vector<double> vdd{0.8, 0.9, 1.0, 1.1, 1.2};
    std::vector<std::uint32_t> margins{1, 3, 5, 7, 9};
    std::uint32_t n = 3;
    std::uint64_t trials = 100000;
    std::optional<double> sigma_i;
    double sigma_c = 0.01;
    std::uint32_t bins = 50;
};

// ---------------------------------------------------------------- eval

struct EvalOpts {
    std::string proposals;
    std::string gt;
    std::string output;
    std::optional<std::size_t> frames;
    std::int64_t min_area = kDefaultMinArea;
    double iou_lo = 0.05, iou_hi = 0.95, iou_step = 0.05;
};

MismatchModel mismatch_for(std::optional<double> sigma_i, std::uint64_t seed) {
    MismatchModel mm = calibrated_model();
    if (sigma_i) mm.sigma_i = *sigma_i;
    mm.seed = seed;
    return mm;
}

json flip_summary(std::span<const DenoisedFrame> frames) {
    std::uint64_t flipped = 0, unintended = 0, wrong = 0, kernels = 0;
    double alpha = 0.0;
    for (const auto& f : frames) {
        flipped += f.stats.flipped_pixels;
        unintended += f.stats.unintended_flips;
        wrong += f.stats.wrong_kernels;
        kernels += f.stats.kernels;
        alpha += f.stats.alpha_measured;
    }
    return {{"frames", frames.size()},
            {"flipped_pixels", flipped},
            {"alpha_mean", frames.empty() ? 0.0 : alpha / double(frames.size())},
            {"unintended_flips", unintended},
            {"wrong_kernels", wrong},
            {"kernels", kernels}};
}

} // namespace

void add_gen(CLI::App& root, std::vector<Subcommand>& subs) {
    auto o = std::make_shared<GenOpts>();
    Subcommand s;
    s.app = root.add_subcommand("gen", "Generate a synthetic traffic scene: events plus ground-truth boxes");
    add_common(s);
    auto* a = s.app;
    a->add_option("-o,--output", o->output, "event file (.csv or .bin)")->required();
    a->add_option("--gt", o->gt, "ground-truth box CSV [<output stem>.gt.csv]");
    a->add_option("--format", o->format, "event format")->check(CLI::IsMember({"auto", "csv", "bin"}));
    a->add_option("--objects", o->objects, "moving objects, one per lane")->check(CLI::Range(0u, 20u));
    a->add_option("--duration", o->duration, "seconds")->check(CLI::PositiveNumber);
    a->add_option("--noise", o->noise, "background events per pixel per second")->check(CLI::NonNegativeNumber);
    a->add_option("--width", o->width)->check(CLI::Range(1u, 65536u));
    a->add_option("--height", o->height)->check(CLI::Range(1u, 65536u));
    a->add_option("--window", o->window, "ground-truth window, microseconds")->check(CLI::PositiveNumber);
    a->add_option("--edge-width", o->edge_width, "emitting boundary band, pixels")->check(CLI::PositiveNumber);
    s.run = [o](const Common&, std::uint64_t seed, json& m) {
        auto cfg = traffic_scene(seed, o->objects, o->duration, o->noise, {o->width, o->height});
        cfg.window_us = o->window;
        cfg.edge_width = o->edge_width;
        const auto scene = generate_synthetic(cfg);

        const std::string kind = input_kind(o->output, o->format);
        if (kind == "bin") {
            auto out = open_out(o->output, true);
            write_binary(out, scene.events);
        } else {
            auto out = open_out(o->output);
            write_csv(out, scene.events);
        }
        const std::string gt =
            o->gt.empty() ? (fs::path(o->output).replace_extension("").string() + ".gt.csv") : o->gt;
        {
            auto out = open_out(gt);
            write_boxes_csv(out, scene.ground_truth);
        }
        json objects = json::array();
        for (const auto& ob : cfg.objects)
            objects.push_back({{"box", {ob.initial.x_min, ob.initial.y_min, ob.initial.x_max, ob.initial.y_max}},
                               {"vx", ob.vx},
                               {"vy", ob.vy},
                               {"event_rate", ob.event_rate}});
        m["outputs"] = {o->output, gt};
        m["result"] = {{"events", scene.events.size()}, {"frames", scene.ground_truth.size()}, {"objects", objects}};
        std::cout << "wrote " << scene.events.size() << " events and " << scene.ground_truth.size()
                  << " ground-truth frames\n";
        return 0;
    };
    subs.push_back(std::move(s));
}

void add_frame(CLI::App& root, std::vector<Subcommand>& subs) {
    auto o = std::make_shared<FrameOpts>();
    Subcommand s;
    s.app = root.add_subcommand("frame", "Accumulate events into binary frames (PBM sequence)");
    add_common(s);
    auto* a = s.app;
    a->add_option("-i,--input", o->input, "event file (.csv or .bin)")->required()->check(CLI::ExistingFile);
    a->add_option("-o,--output", o->output, "PBM sequence")->required();
    a->add_option("--format", o->format, "input format")->check(CLI::IsMember({"auto", "csv", "bin"}));
    a->add_option("--pbm", o->pbm, "P1 (plain) or P4 (raw)")->check(CLI::IsMember({"plain", "raw"}));
    a->add_option("--stats", o->stats, "per-frame statistics CSV");
    a->add_option("--window", o->window, "microseconds")->check(CLI::PositiveNumber);
    a->add_option("--duration", o->duration, "emit frames up to this many seconds");
    a->add_option("--width", o->width)->check(CLI::Range(1u, 65536u));
    a->add_option("--height", o->height)->check(CLI::Range(1u, 65536u));
    s.run = [o](const Common&, std::uint64_t, json& m) {
        const SensorGeometry g{o->width, o->height};
        const auto events = read_events(o->input, input_kind(o->input, o->format), g);
        const auto windows = accumulate(events, g, o->window, window_range(o->duration));
        {
            auto out = open_out(o->output, true);
            for (const auto& w : windows) write_pbm(out, w.frame, pbm_format(o->pbm));
        }
        double gamma = 0.0;
        for (const auto& w : windows) gamma += w.stats.gamma_estimate;
        if (!windows.empty()) gamma /= double(windows.size());
        std::vector<std::string> outputs{o->output};
        if (!o->stats.empty()) {
            auto out = open_out(o->stats);
            out << "frame,window_start,events,active_pixels,gamma\n";
            for (const auto& w : windows)
                out << w.frame.index() << ',' << w.frame.window_start << ',' << w.stats.event_count << ','
                    << w.stats.active_pixel_count << ',' << w.stats.gamma_estimate << '\n';
            outputs.push_back(o->stats);
        }
        m["inputs"] = {o->input};
        m["outputs"] = outputs;
        m["result"] = {{"events", events.size()}, {"frames", windows.size()}, {"gamma_mean", gamma}};
        std::cout << "wrote " << windows.size() << " frames, mean gamma " << gamma << '\n';
        return 0;
    };
    subs.push_back(std::move(s));
}

void add_denoise(CLI::App& root, std::vector<Subcommand>& subs) {
    auto o = std::make_shared<DenoiseOpts>();
    Subcommand s;
    s.app = root.add_subcommand("denoise", "Denoise frames or events with median, nomf, imc or nn");
    add_common(s);
    auto* a = s.app;
    a->add_option("-i,--input", o->input, "events (.csv/.bin) or frames (.pbm)")->required()->check(CLI::ExistingFile);
    a->add_option("-o,--output", o->output, "denoised PBM sequence")->required();
    a->add_option("--format", o->format, "input format")->check(CLI::IsMember({"auto", "csv", "bin", "pbm"}));
    a->add_option("--pbm", o->pbm, "P1 (plain) or P4 (raw)")->check(CLI::IsMember({"plain", "raw"}));
    a->add_option("-m,--method", o->method)->check(CLI::IsMember({"none", "median", "nomf", "imc", "nn"}));
    a->add_option("-n,--kernel", o->n, "kernel size")->check(CLI::IsMember({3u, 5u}));
    a->add_option("--boxes", o->boxes, "region proposal CSV");
    a->add_option("--stats", o->stats, "per-frame flip statistics CSV");
    a->add_option("--window", o->window, "microseconds (event input)")->check(CLI::PositiveNumber);
    a->add_option("--duration", o->duration, "emit frames up to this many seconds (event input)");
    a->add_option("--width", o->width)->check(CLI::Range(1u, 65536u));
    a->add_option("--height", o->height)->check(CLI::Range(1u, 65536u));
    a->add_option("--vdd", o->vdd, "array supply for imc, volts")->check(CLI::Range(0.5, 2.0));
    a->add_option("--sigma-i", o->sigma_i, "per-cell current sigma for imc, amperes [calibrated]")
        ->check(CLI::NonNegativeNumber);
    a->add_option("--tau", o->tau, "nn support window, microseconds")->check(CLI::PositiveNumber);
    a->add_option("--min-area", o->min_area, "smallest proposal box area")->check(CLI::NonNegativeNumber);
    s.run = [o](const Common& c, std::uint64_t seed, json& m) {
        DenoiseOptions d;
        d.method = parse_denoiser(o->method);
        d.n = o->n;
        d.array.vdd = o->vdd;
        d.mismatch = mismatch_for(o->sigma_i, seed);
        d.nn.tau_us = o->tau;
        d.threads = c.threads;

        std::vector<DenoisedFrame> out;
        const std::string kind = input_kind(o->input, o->format);
        if (kind == "pbm") {
            if (d.method == Denoiser::nn) throw InvalidArgument("nn needs event input, not frames");
            auto in = open_in(o->input, true);
            const auto frames = read_pbm_sequence(in);
            out = denoise_frames(frames, d);
        } else {
            const SensorGeometry g{o->width, o->height};
            const auto events = read_events(o->input, kind, g);
            out = denoise_events(events, g, o->window, d, window_range(o->duration));
        }
        {
            auto f = open_out(o->output, true);
            for (const auto& df : out) write_pbm(f, df.frame, pbm_format(o->pbm));
        }
        std::vector<std::string> outputs{o->output};
        if (!o->boxes.empty()) {
            std::size_t count = 0;
            for (const auto& df : out) count = std::max<std::size_t>(count, df.frame.index() + 1);
            auto f = open_out(o->boxes);
            write_boxes_csv(f, proposals_by_frame(out, count, o->min_area));
            outputs.push_back(o->boxes);
        }
        if (!o->stats.empty()) {
            auto f = open_out(o->stats);
            f << "frame,window_start,flipped_pixels,alpha,unintended_flips,wrong_kernels\n";
            for (const auto& df : out)
                f << df.frame.index() << ',' << df.frame.window_start << ',' << df.stats.flipped_pixels << ','
                  << df.stats.alpha_measured << ',' << df.stats.unintended_flips << ',' << df.stats.wrong_kernels
                  << '\n';
            outputs.push_back(o->stats);
        }
        m["inputs"] = {o->input};
        m["outputs"] = outputs;
        m["result"] = flip_summary(out);
        if (d.method == Denoiser::imc)
            m["result"]["mismatch"] = {{"sigma_i", d.mismatch.sigma_i},
                                       {"sigma_c_rel", d.mismatch.sigma_c_rel},
                                       {"vdd", o->vdd}};
        std::cout << "denoised " << out.size() << " frames with " << o->method << ", mean alpha "
                  << m["result"]["alpha_mean"].get<double>() << '\n';
        return 0;
    };
    subs.push_back(std::move(s));
}

void add_cost(CLI::App& root, std::vector<Subcommand>& subs) {
    auto o = std::make_shared<CostOpts>();
    Subcommand s;
    s.app = root.add_subcommand("cost", "Memory, operation, energy and latency cost per frame");
    add_common(s);
    auto* a = s.app;
    a->add_option("-o,--output", o->output, "JSON report");
    a->add_option("--table", o->table, "energy/latency table JSON [built-in]")->check(CLI::ExistingFile);
    a->add_option("-n,--kernel", o->n, "kernel size (3 or 5)");
    a->add_option("--width", o->width);
    a->add_option("--height", o->height);
    a->add_option("--beta-t", o->beta_t, "bits per NN-filt timestamp");
    a->add_option("--gamma", o->gamma, "events per frame / pixels");
    a->add_option("--alpha", o->alpha, "flipped pixels per frame / pixels");
    a->add_option("--alpha-from", o->alpha_from, "take alpha as alpha_mean from a denoise manifest")
        ->check(CLI::ExistingFile);
    s.run = [o](const Common&, std::uint64_t, json& m) {
        CostParams p;
        p.width = o->width;
        p.height = o->height;
        p.n = o->n;
        p.beta_t = o->beta_t;
        p.gamma = o->gamma;
        p.alpha = o->alpha;
        std::string alpha_source = "default";
        std::vector<std::string> inputs;
        if (!o->alpha_from.empty()) {
            auto in = open_in(o->alpha_from);
            const json dm = json::parse(in);
            if (!dm.contains("result") || !dm["result"].contains("alpha_mean"))
                throw InvalidArgument("'" + o->alpha_from + "' has no result.alpha_mean");
            p.alpha = dm["result"]["alpha_mean"].get<double>();
            alpha_source = "measured";
            inputs.push_back(o->alpha_from);
        }
        EnergyTable table = default_energy_table();
        if (!o->table.empty()) {
            auto in = open_in(o->table);
            try {
                table = energy_table_from_json(json::parse(in));
            } catch (const json::exception& e) {
                throw ParseError(o->table + ": " + e.what());
            }
            inputs.push_back(o->table);
        }
        auto report = build_cost_report(p, table);
        report.alpha_source = alpha_source;
        write_table(std::cout, report);
        m["inputs"] = inputs;
        m["result"] = to_json(report);
        if (!o->output.empty()) {
            auto f = open_out(o->output);
            f << m["result"].dump(2) << '\n';
            m["outputs"] = {o->output};
        }
        return 0;
    };
    subs.push_back(std::move(s));
}

void add_mc(CLI::App& root, std::vector<Subcommand>& subs) {
    auto o = std::make_shared<McOpts>();
    Subcommand s;
    s.app = root.add_subcommand("mc", "Monte-Carlo kernel flip rate over supply voltage and majority margin");
    add_common(s);
    auto* a = s.app;
    a->add_option("-o,--output", o->output, "CSV vdd,margin,trials,flip_rate")->required();
    a->add_option("--histogram", o->histogram, "BL/BLB current histogram CSV");
    a->add_option("--vdd", o->vdd, "supply voltages")->check(CLI::Range(0.5, 2.0));
    a->add_option("--margin", o->margins, "|ones - zeros| values");
    a->add_option("-n,--kernel", o->n, "kernel size")->check(CLI::IsMember({3u, 5u}));
    a->add_option("--trials", o->trials, "races per point");
    a->add_option("--sigma-i", o->sigma_i, "per-cell current sigma, amperes [calibrated]")
        ->check(CLI::NonNegativeNumber);
    a->add_option("--sigma-c", o->sigma_c, "relative bit-line capacitance sigma")->check(CLI::NonNegativeNumber);
    a->add_option("--bins", o->bins, "histogram bins")->check(CLI::Range(1u, 100000u));
    s.run = [o](const Common& c, std::uint64_t seed, json& m) {
        if (o->trials == 0) throw InvalidArgument("--trials must be >= 1");
        const std::uint32_t cells = o->n * o->n;
        for (auto mg : o->margins)
            if (mg > cells || (cells - mg) % 2 != 0)
                throw InvalidArgument("margin " + std::to_string(mg) + " impossible for a " + std::to_string(cells) +
                                      "-cell kernel");
        MismatchModel mm = mismatch_for(o->sigma_i, seed);
        mm.sigma_c_rel = o->sigma_c;

        auto out = open_out(o->output);
        out << "vdd,margin,trials,flip_rate\n";
        std::unique_ptr<std::ofstream> hist;
        if (!o->histogram.empty()) {
            hist = std::make_unique<std::ofstream>(open_out(o->histogram));
            *hist << "vdd,margin,line,bin_lo,bin_hi,count\n";
        }
        json points = json::array();
        for (double v : o->vdd)
            for (auto mg : o->margins) {
                // majority of ones; the complementary case is symmetric
                const std::uint32_t ones = (cells + mg) / 2, zeros = cells - ones;
                const auto r = monte_carlo_flip_rate(ones, zeros, v, o->trials, mm, {}, c.threads, o->bins);
                char buf[128];
                std::snprintf(buf, sizeof buf, "%.3f,%u,%llu,%.6g\n", v, mg, (unsigned long long)r.trials,
                              r.flip_rate);
                out << buf;
                points.push_back({{"vdd", v},
                                  {"margin", mg},
                                  {"flip_rate", r.flip_rate},
                                  {"analytic", analytic_flip_rate(ones, zeros, v, mm)}});
                if (hist) {
                    for (const auto* h : {&r.bl_current, &r.blb_current})
                        for (std::size_t b = 0; b < h->counts.size(); ++b)
                            *hist << v << ',' << mg << ',' << (h == &r.bl_current ? "bl" : "blb") << ','
                                  << h->lo + double(b) * h->bin_width() << ','
                                  << h->lo + double(b + 1) * h->bin_width() << ',' << h->counts[b] << '\n';
                }
            }
        m["outputs"] = {o->output};
        if (hist) m["outputs"].push_back(o->histogram);
        m["result"] = {{"sigma_i", mm.sigma_i}, {"sigma_c_rel", mm.sigma_c_rel}, {"points", points}};
        std::cout << "wrote " << points.size() << " points (sigma_i " << mm.sigma_i << " A)\n";
        return 0;
    };
    subs.push_back(std::move(s));
}

void add_eval(CLI::App& root, std::vector<Subcommand>& subs) {
    auto o = std::make_shared<EvalOpts>();
    Subcommand s;
    s.app = root.add_subcommand("eval", "Precision/recall of region proposals against ground truth over IoU");
    add_common(s);
    auto* a = s.app;
    a->add_option("-p,--proposals", o->proposals, "proposal box CSV")->required()->check(CLI::ExistingFile);
    a->add_option("-g,--gt", o->gt, "ground-truth box CSV")->required()->check(CLI::ExistingFile);
    a->add_option("-o,--output", o->output, "CSV iou,precision,recall")->required();
    a->add_option("--frames", o->frames, "frame count [largest index in either file + 1]");
    a->add_option("--min-area", o->min_area, "drop proposals with a smaller box area")->check(CLI::NonNegativeNumber);
    a->add_option("--iou-lo", o->iou_lo);
    a->add_option("--iou-hi", o->iou_hi);
    a->add_option("--iou-step", o->iou_step);
    s.run = [o](const Common&, std::uint64_t, json& m) {
        auto read = [&](const std::string& path) {
            auto in = open_in(path);
            std::stringstream buf;
            buf << in.rdbuf();
            if (buf.str().find_first_not_of(" \t\r\n") == std::string::npos)
                throw ParseError("'" + path + "' is empty");
            try {
                return read_boxes_csv(buf, o->frames);
            } catch (const ParseError& e) {
                throw ParseError(path + ": " + e.what());
            }
        };
        auto prop = read(o->proposals);
        auto gt = read(o->gt);
        const std::size_t frames = std::max(prop.size(), gt.size());
        prop.resize(frames);
        gt.resize(frames);
        const auto grid = iou_grid(o->iou_lo, o->iou_hi, o->iou_step);
        const auto curve = evaluate(prop, gt, grid, o->min_area);
        {
            auto f = open_out(o->output);
            write_curve_csv(f, curve);
        }
        json rows = json::array();
        for (std::size_t i = 0; i < grid.size(); ++i)
            rows.push_back({{"iou", grid[i]}, {"precision", curve.precision[i]}, {"recall", curve.recall[i]}});
        m["inputs"] = {o->proposals, o->gt};
        m["outputs"] = {o->output};
        m["result"] = {
            {"frames", frames}, {"proposals", curve.proposals}, {"ground_truth", curve.ground_truth}, {"curve", rows}};
        std::cout << "frames " << frames << ", proposals " << curve.proposals << ", ground truth "
                  << curve.ground_truth << '\n';
        return 0;
    };
    subs.push_back(std::move(s));
}

std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& sub) {
    // args[0] is the program, args[1] the subcommand.
    std::size_t at = 0;
    std::string path;
    for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            at = i;
            path = args[i + 1];
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            at = i;
            path = args[i].substr(9);
            break;
        }
    }
    if (!at) return args;

    auto in = open_in(path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (j.is_object() && j.contains("config") && j["config"].is_object()) j = j["config"];
    if (!j.is_object()) throw ParseError(path + ": expected a JSON object");

    auto given = [&](const std::string& key) {
        std::vector<std::string> names{"--" + key};
        if (const CLI::Option* opt = sub.get_option_no_throw("--" + key)) {
            for (const auto& l : opt->get_lnames()) names.push_back("--" + l);
            for (const auto& sn : opt->get_snames()) names.push_back("-" + sn);
        }
        for (std::size_t i = 2; i < args.size(); ++i)
            for (const auto& flag : names)
                if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0 ||
                    (flag.size() == 2 && args[i].size() > 2 && args[i].rfind(flag, 0) == 0 && args[i][1] != '-'))
                    return true;
        return false;
    };
    auto scalar = [&](const std::string& key, const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer() || v.is_number_unsigned() || v.is_number_float()) return v.dump();
        throw ParseError(path + ": value of '" + key + "' must be a string or number");
    };

    std::vector<std::string> out(args.begin(), args.begin() + 2);
    for (const auto& [key, v] : j.items()) {
        if (key == "config" || given(key) || v.is_null()) continue;
        if (v.is_boolean()) {
            if (v.get<bool>()) out.push_back("--" + key);
            continue;
        }
        if (v.is_array()) {
            if (v.empty()) continue;
            out.push_back("--" + key);
            for (const auto& e : v) out.push_back(scalar(key, e));
            continue;
        }
        out.push_back("--" + key);
        out.push_back(scalar(key, v));
    }
    out.insert(out.end(), args.begin() + 2, args.end());
    return out;
}

json resolved_options(const CLI::App& app) {
    json j = json::object();
    for (const CLI::Option* opt : app.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help" || name == "config") continue;
        if (opt->get_expected_max() == 0) {
            j[name] = opt->count() > 0;
            continue;
        }
        const auto& res = opt->results();
        if (opt->get_expected_max() > 1) {
            if (!res.empty()) {
                j[name] = res;
            } else if (!opt->get_default_str().empty()) {
                // CLI11 renders vector defaults as "[a,b,c]"
                std::string d = opt->get_default_str();
                if (d.size() >= 2 && d.front() == '[' && d.back() == ']') d = d.substr(1, d.size() - 2);
                json arr = json::array();
                std::stringstream ss(d);
                for (std::string item; std::getline(ss, item, ',');) arr.push_back(item);
                j[name] = arr;
            }
            continue;
        }
        if (!res.empty())
            j[name] = res.back();
        else if (!opt->get_default_str().empty())
            j[name] = opt->get_default_str();
    }
    return j;
}

void write_manifest(const std::string& output, const json& manifest) {
    auto out = open_out(output + ".manifest.json");
    out << manifest.dump(2) << '\n';
}

} // namespace nomf::cli
