#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "layergraph/overlay_graph.hpp"

namespace layergraph {

/// Line-oriented text dump:
///
///   LGDUMP 1
///   n <nodes>
///   m <layers>
///   seed <master> <replicate>
///   generator <free text>
///   percolation <free text or ->
///   config_hash <16 hex digits>
///   original_ids <0|1>
///   O <id> <id> ...                      (only when original_ids is 1)
///   layer <k> size <x> strength <y> edges <e>
///   N <node> <node> ...
///   E <u> <v>                            (e lines)
///   ...
///   end
///
/// Node ids are 0-based. Strengths use 17 significant digits so that text
/// and binary dumps round-trip exactly.
///
/// The binary form starts with the magic "LGDB", stores the same fields in
/// little-endian order and ends with "LGDE".
struct GraphDump {
  OverlayGraph graph;
  std::uint64_t config_hash = 0;
};

void write_text_dump(std::ostream& os, const OverlayGraph& G, std::uint64_t config_hash);
void write_binary_dump(std::ostream& os, const OverlayGraph& G, std::uint64_t config_hash);

/// Reads either form, detected from the first bytes. Throws FormatError.
GraphDump read_dump(std::istream& is);

void save_dump(const std::filesystem::path& path, const OverlayGraph& G, std::uint64_t config_hash,
               bool binary = false);
GraphDump load_dump(const std::filesystem::path& path);

}  // namespace layergraph
