#include "nomf/pbm.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "nomf/error.hpp"

namespace nomf {

namespace {

constexpr const char* kMetaTag = "# nomf window_start=";

struct HeaderReader {
    std::istream& in;
    std::optional<std::uint64_t> window_start, window_len;

    // Skips whitespace and comments, harvesting our metadata comment when present.
    void skip_space() {
        while (true) {
            int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
                parse_meta(line);
            } else if (c != EOF && std::isspace(c)) {
                in.get();
            } else {
                return;
            }
        }
    }

    void parse_meta(const std::string& line) {
        unsigned long long s = 0, l = 0;
        if (std::sscanf(line.c_str(), "# nomf window_start=%llu window_len=%llu", &s, &l) == 2) {
            window_start = s;
            window_len = l;
        }
    }

    std::uint32_t number(const char* what) {
        skip_space();
        std::uint64_t v = 0;
        int digits = 0;
        while (std::isdigit(in.peek())) {
            v = v * 10 + std::uint64_t(in.get() - '0');
            if (v > 65536) throw ParseError(std::string("PBM ") + what + " too large");
            ++digits;
        }
        if (!digits) throw ParseError(std::string("PBM header: expected ") + what);
        return static_cast<std::uint32_t>(v);
    }
};

} // namespace

void write_pbm(std::ostream& out, const EbbiFrame& frame, PbmFormat format) {
    const auto W = frame.width(), H = frame.height();
    out << (format == PbmFormat::plain ? "P1\n" : "P4\n");
    out << kMetaTag << frame.window_start << " window_len=" << frame.window_len << '\n';
    out << W << ' ' << H << '\n';
    if (format == PbmFormat::plain) {
        // Plain PBM lines must stay within 70 characters.
        for (std::uint32_t y = 0; y < H; ++y) {
            auto row = frame.row(y);
            std::string line;
            for (std::uint32_t x = 0; x < W; ++x) {
                line.push_back(row[x] ? '1' : '0');
                if (line.size() == 70) {
                    out << line << '\n';
                    line.clear();
                }
            }
            if (!line.empty()) out << line << '\n';
        }
        return;
    }
    const std::size_t stride = (W + 7) / 8;
    std::string packed(stride, '\0');
    for (std::uint32_t y = 0; y < H; ++y) {
        std::fill(packed.begin(), packed.end(), '\0');
        auto row = frame.row(y);
        for (std::uint32_t x = 0; x < W; ++x)
            if (row[x]) packed[x / 8] = char(packed[x / 8] | (0x80 >> (x % 8)));
        out.write(packed.data(), static_cast<std::streamsize>(stride));
    }
}

std::optional<EbbiFrame> read_pbm(std::istream& in) {
    HeaderReader hdr{in, {}, {}};
    hdr.skip_space();
    if (in.peek() == EOF) return std::nullopt;
    char magic[2] = {};
    if (!in.read(magic, 2) || magic[0] != 'P' || (magic[1] != '1' && magic[1] != '4'))
        throw ParseError("not a PBM image (expected P1 or P4 magic)");
    const std::uint32_t W = hdr.number("width");
    const std::uint32_t H = hdr.number("height");
    if (W == 0 || H == 0) throw ParseError("PBM dimensions must be positive");

    EbbiFrame frame(SensorGeometry{W, H});
    if (magic[1] == '1') {
        for (std::size_t i = 0; i < frame.bits.size(); ++i) {
            hdr.skip_space();
            int c = in.get();
            if (c != '0' && c != '1')
                throw ParseError("P1 raster: expected 0 or 1 at pixel " + std::to_string(i));
            frame.bits[i] = std::uint8_t(c - '0');
        }
    } else {
        int sep = in.get();
        if (sep == EOF || !std::isspace(sep)) throw ParseError("P4 header must end with one whitespace byte");
        const std::size_t stride = (W + 7) / 8;
        std::string packed(stride, '\0');
        for (std::uint32_t y = 0; y < H; ++y) {
            if (!in.read(packed.data(), static_cast<std::streamsize>(stride)))
                throw ParseError("P4 raster truncated at row " + std::to_string(y));
            auto row = frame.row(y);
            for (std::uint32_t x = 0; x < W; ++x)
                row[x] = (static_cast<unsigned char>(packed[x / 8]) >> (7 - x % 8)) & 1u;
        }
    }
    frame.window_start = hdr.window_start.value_or(0);
    frame.window_len = hdr.window_len.value_or(0);
    return frame;
}

std::vector<EbbiFrame> read_pbm_sequence(std::istream& in) {
    std::vector<EbbiFrame> frames;
    while (auto f = read_pbm(in)) frames.push_back(std::move(*f));
    return frames;
}

} // namespace nomf
