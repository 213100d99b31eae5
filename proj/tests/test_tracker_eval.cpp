#include "doctest.h"

#include <algorithm>
#include <cstring>
#include <random>
#include <set>
#include <sstream>

#include "nomf/error.hpp"
#include "nomf/event_io.hpp"
#include "nomf/framer.hpp"
#include "nomf/tracker_eval.hpp"
#include "oracles.hpp"

using namespace nomf;

namespace {

EbbiFrame from_rows(std::initializer_list<const char*> rows) {
    const auto h = std::uint32_t(rows.size());
    const auto w = std::uint32_t(std::strlen(*rows.begin()));
    EbbiFrame f(SensorGeometry{w, h});
    std::uint32_t y = 0;
    for (const char* r : rows) {
        for (std::uint32_t x = 0; x < w; ++x) f.set(x, y, r[x] == '1');
        ++y;
    }
    return f;
}

BoundingBox random_box(std::mt19937_64& rng, int extent) {
    const int x0 = int(rng() % extent), y0 = int(rng() % extent);
    return {x0, y0, x0 + int(rng() % 12), y0 + int(rng() % 12)};
}

} // namespace

TEST_SUITE("tracker_eval") {

TEST_CASE("diagonal pixels join only under 8-connectivity") {
    const auto f = from_rows({"1100", "0010", "0001", "1000"});
    const auto c8 = connected_components(f, 8);
    const auto c4 = connected_components(f, 4);
    REQUIRE(c8.size() == 2);
    CHECK(c8[0].box == BoundingBox{0, 0, 3, 2});
    CHECK(c8[1].box == BoundingBox{0, 3, 0, 3});
    CHECK(c4.size() == 4);
    CHECK_THROWS_AS(connected_components(f, 6), InvalidArgument);
}

TEST_CASE("components partition the foreground") {
    std::mt19937_64 rng(21);
    for (int it = 0; it < 50; ++it) {
        const auto f = oracle::random_frame(rng, 40, 30, 0.45);
        for (int conn : {4, 8}) {
            const auto regions = connected_components(f, conn);
            std::vector<int> owner(f.bits.size(), -1);
            for (std::size_t r = 0; r < regions.size(); ++r)
                for (auto p : regions[r].pixels) {
                    REQUIRE(owner[p] == -1);
                    owner[p] = int(r);
                }
            for (std::size_t p = 0; p < f.bits.size(); ++p) REQUIRE((owner[p] >= 0) == (f.bits[p] == 1));
            // no two distinct components touch
            const int W = 40;
            for (std::size_t p = 0; p < f.bits.size(); ++p) {
                if (owner[p] < 0) continue;
                const int x = int(p) % W, y = int(p) / W;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (conn == 4 && dx && dy) continue;
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= W || ny >= 30) continue;
                        const int q = owner[std::size_t(ny * W + nx)];
                        if (q >= 0) REQUIRE(q == owner[p]);
                    }
            }
        }
    }
}

TEST_CASE("proposals honour min_area on the box") {
    const auto f = from_rows({"11000", "11000", "00001"});
    CHECK(propose_regions(f, 0).size() == 2);
    CHECK(propose_regions(f, 4).size() == 1);
    CHECK(propose_regions(f, 5).empty());
}

TEST_CASE("iou") {
    CHECK(iou({0, 0, 9, 9}, {0, 0, 9, 9}) == 1.0);
    CHECK(iou({0, 0, 9, 9}, {20, 20, 29, 29}) == 0.0);
    // two 2x1 boxes sharing one pixel
    CHECK(iou({0, 0, 1, 0}, {1, 0, 2, 0}) == doctest::Approx(1.0 / 3.0));
    std::mt19937_64 rng(22);
    for (int it = 0; it < 500; ++it) {
        const auto a = random_box(rng, 20), b = random_box(rng, 20);
        const double v = iou(a, b);
        CHECK(v == doctest::Approx(oracle::pixel_iou(a, b)));
        CHECK(v == iou(b, a));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("evaluation conventions") {
    const std::vector<double> th{0.5};
    BoxSeries none(3), gt(3);
    gt[1] = {{0, 0, 9, 9}};
    auto c = evaluate(none, gt, th);
    CHECK(c.precision[0] == 1.0);
    CHECK(c.recall[0] == 0.0);
    c = evaluate(gt, none, th);
    CHECK(c.precision[0] == 0.0);
    CHECK(c.recall[0] == 1.0);
    c = evaluate(gt, gt, th);
    CHECK(c.precision[0] == 1.0);
    CHECK(c.recall[0] == 1.0);
    CHECK_THROWS_AS(evaluate(BoxSeries(2), gt, th), InvalidArgument);
}

TEST_CASE("one proposal cannot match two ground-truth boxes") {
    BoxSeries prop{{{0, 0, 19, 9}}};
    BoxSeries gt{{{0, 0, 9, 9}, {10, 0, 19, 9}}};
    const std::vector<double> th{0.3, 0.5};
    const auto c = evaluate(prop, gt, th);
    CHECK(c.precision[0] == 1.0);
    CHECK(c.recall[0] == 0.5);
    CHECK(c.precision[1] == 1.0); // IoU exactly 0.5
    CHECK(c.recall[1] == 0.5);
}

TEST_CASE("precision and recall never rise with the threshold; min_area never raises recall") {
    std::mt19937_64 rng(23);
    const auto th = iou_grid(0.05, 0.95, 0.05);
    CHECK(th.size() == 19);
    for (int it = 0; it < 30; ++it) {
        BoxSeries p(10), g(10);
        for (int f = 0; f < 10; ++f) {
            for (int k = 0; k < int(rng() % 5); ++k) p[f].push_back(random_box(rng, 40));
            for (int k = 0; k < int(rng() % 4); ++k) g[f].push_back(random_box(rng, 40));
        }
        const auto c = evaluate(p, g, th, 0);
        for (std::size_t i = 1; i < th.size(); ++i) {
            CHECK(c.precision[i] <= c.precision[i - 1]);
            CHECK(c.recall[i] <= c.recall[i - 1]);
        }
        const auto c5 = evaluate(p, g, th, 5);
        const auto c50 = evaluate(p, g, th, 50);
        for (std::size_t i = 0; i < th.size(); ++i) {
            CHECK(c5.recall[i] <= c.recall[i]);
            CHECK(c50.recall[i] <= c5.recall[i]);
        }
    }
    CHECK_THROWS_AS(iou_grid(0.0, 1.0, 0.1), InvalidArgument);
}

TEST_CASE("tracker follows two objects through a scene") {
    SyntheticSceneConfig cfg;
    cfg.noise_rate = 0.0;
    cfg.duration = 3.0;
    cfg.objects.push_back({{20, 20, 69, 49}, 30.0, 0.0, 100.0});
    cfg.objects.push_back({{250, 150, 299, 189}, -25.0, 0.0, 100.0});
    const auto scene = generate_synthetic(cfg);
    const auto frames = accumulate(scene.events, cfg.geometry, cfg.window_us);
    BoxSeries boxes;
    for (const auto& w : frames) boxes.push_back(propose_regions(w.frame, kDefaultMinArea));
    auto tracks = track_overlap(boxes);
    REQUIRE(tracks.size() == 2);
    for (const auto& t : tracks) CHECK(double(t.boxes.size()) >= 0.95 * double(frames.size()));
    CHECK(tracks[0].id == 0);
    CHECK(tracks[1].id == 1);
    // the tracks stay apart
    for (const auto& [f, b] : tracks[0].boxes) CHECK(b.y_max < 100);
    for (const auto& [f, b] : tracks[1].boxes) CHECK(b.y_min > 100);
}

TEST_CASE("tracker opens a new track after a gap") {
    BoxSeries s{{{0, 0, 5, 5}}, {}, {{0, 0, 5, 5}}, {{1, 0, 6, 5}}};
    const auto t = track_overlap(s);
    REQUIRE(t.size() == 2);
    CHECK(t[0].last_frame() == 0);
    CHECK(t[1].first_frame == 2);
    CHECK(t[1].boxes.size() == 2);
}

TEST_CASE("box and curve csv") {
    BoxSeries s(4);
    s[0] = {{1, 2, 3, 4}};
    s[2] = {{5, 6, 7, 8}, {0, 0, 0, 0}};
    std::stringstream io;
    write_boxes_csv(io, s);
    CHECK(read_boxes_csv(io, 4) == s);

    std::istringstream extra("frame,x_min,y_min,x_max,y_max\n9,0,0,1,1\n");
    CHECK_THROWS_AS(read_boxes_csv(extra, 4), ParseError);
    std::istringstream bad("0,5,5,1,1\n");
    CHECK_THROWS_AS(read_boxes_csv(bad), ParseError);
    std::istringstream few("0,5,5,6\n");
    CHECK_THROWS_AS(read_boxes_csv(few), ParseError);

    EvalCurve c;
    c.thresholds = {0.5};
    c.precision = {0.75};
    c.recall = {1.0};
    std::ostringstream out;
    write_curve_csv(out, c);
    CHECK(out.str() == "iou,precision,recall\n0.5000,0.750000,1.000000\n");
}

} // TEST_SUITE
