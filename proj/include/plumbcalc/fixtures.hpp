#pragma once

#include "plumbcalc/plumbing.hpp"

#include <string>
#include <vector>

namespace plumbcalc {

// In-repo graph pack. The texts are embedded so tests and the command line
// resolve them without caring about the working directory; the same contents
// ship as fixtures/*.plumb.
struct Fixture {
  std::string name;
  std::string description;
  std::string text;
};

const std::vector<Fixture>& fixtures();

// nullptr when the name is unknown
const Fixture* find_fixture(std::string_view name);

// ParseError when the name is unknown
PlumbingGraph fixture_graph(std::string_view name);

}  // namespace plumbcalc
