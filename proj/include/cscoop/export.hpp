#pragma once

#include "cscoop/explorer.hpp"

#include <string>

namespace cscoop {

// Control-flow graphs of every method, one digraph per method.
std::string export_dot(const Program &p);

// Snapshot of one configuration: processors, objects, frames, queues.
std::string export_dot(const Configuration &c);

// Explored state space (needs record_graph); violating states are filled red,
// terminal states drawn with a double border.
std::string export_dot(const StateSpace &space);

// Typed-graph XML snapshot of a configuration. Node types: processor, object,
// frame, request, state. Edge types: handler, lock, current_state, queued.
// The vocabulary is described in docs/gxl.md; tests read it back.
std::string export_gxl(const Configuration &c);

// Value encoding used in GXL attributes ("void", "int 3", "bool true",
// "ref p2 o1"); exposed for the round-trip reader.
std::string encode_value(const Value &v);
Value decode_value(const std::string &s);

} // namespace cscoop
