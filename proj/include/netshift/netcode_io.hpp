#pragma once

#include <iosfwd>
#include <string>

#include "netshift/netcode.hpp"

namespace netshift {

// Instance text format, one record per line, '#' comments:
//
//   node <id>
//   edge <id> <src> <dst> <capacity|inf>
//   pair <i> <s> <t> <bits>
//
// Capacities are integers, p/q rationals or decimals. Pair indices must be
// 1..k in order; injectors are added automatically on load and omitted on
// save.
CommInstance load_instance(std::istream& in);
CommInstance load_instance_file(const std::string& path);
void save_instance(std::ostream& out, const CommInstance& inst, const std::string& header = "");
void save_instance_file(const std::string& path, const CommInstance& inst,
                        const std::string& header = "");

// Coding solution file bound to an instance:
//
//   width <edge-id> <bits>          message width of an edge (default 1)
//   func <edge-id> <table-hex>      table over the tail's in-edge messages;
//                                   row index packs in-messages in in-edge
//                                   order, first message least significant
//   forward <edge-id>               copy the single in-message
//   decoder <i> <table-hex>         table over the sink's in-edge messages
//
// Rows are 2^(sum of in-widths); each table entry is the output word.
CodingSolution load_solution(std::istream& in, const CommInstance& inst);
CodingSolution load_solution_file(const std::string& path, const CommInstance& inst);

void write_rate_csv(std::ostream& out, const RateReport& rep);
void write_rate_text(std::ostream& out, const RateReport& rep);

}  // namespace netshift
