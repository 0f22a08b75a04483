#pragma once

#include <iosfwd>
#include <string>

#include "netshift/circuit.hpp"

namespace netshift {

// Line-oriented circuit format, one record per line, '#' starts a comment:
//
//   node <id> input <index>
//   node <id> output <index> [<arity> <table-hex>]
//   node <id> gate <arity> <table-hex>
//   node <id> const <0|1>
//   edge <src> <dst>
//
// Node records must appear in topological order; an edge may only reference
// already-declared nodes. Indices are 1-based. An output record without a
// table is a port: it must have exactly one in-edge and forwards it.
// <table-hex> is the 2^arity-bit truth table written as one hex number,
// most significant digit first (table row 0 is bit 0).
Circuit load_circuit(std::istream& in);
Circuit load_circuit_file(const std::string& path);
void save_circuit(std::ostream& out, const Circuit& c, const std::string& header_comment = "");
void save_circuit_file(const std::string& path, const Circuit& c,
                       const std::string& header_comment = "");

std::string table_hex(const GateFn& fn);
GateFn table_from_hex(int arity, const std::string& hex);

}  // namespace netshift
