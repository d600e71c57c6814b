#pragma once

#include <iosfwd>
#include <string>

#include "hauto/zoo.hpp"

namespace hauto::cli {

enum Exit { Holds = 0, Fails = 1, InputError = 2, PreconditionFailed = 3 };

// Parses "sat", "est", "track=x1,x2;x1!=x2", "reach=x1>x2,x2>nil", ...
PropertySpec parse_property(const std::string& text);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hauto::cli
