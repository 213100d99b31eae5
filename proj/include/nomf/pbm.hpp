#pragma once

// Netpbm bitmap I/O for binary frames. 1 = black = pixel that saw an event.
// P4 rows are packed MSB-first and padded to whole bytes. Window metadata is
// carried in a header comment so frames round-trip exactly.

#include <iosfwd>
#include <optional>
#include <vector>

#include "nomf/framer.hpp"

namespace nomf {

enum class PbmFormat { plain /* P1 */, raw /* P4 */ };

void write_pbm(std::ostream& out, const EbbiFrame& frame, PbmFormat format = PbmFormat::raw);

/// Reads one image; returns nullopt at clean end of stream.
std::optional<EbbiFrame> read_pbm(std::istream& in);

/// Reads concatenated images until end of stream.
std::vector<EbbiFrame> read_pbm_sequence(std::istream& in);

} // namespace nomf
