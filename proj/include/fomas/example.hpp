#pragma once

#include "fomas/io.hpp"

#include <string>

namespace fomas {

/// JSON text of the bundled four-agent demonstration problem
/// (the same content ships as data/paper_example.json).
const std::string& bundled_example_json();

/// Parsed form, reference controllers included.
ProblemFile bundled_example();

}  // namespace fomas
