#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hauto/syntax.hpp"

namespace hauto {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, std::size_t column, const std::string& message);
    std::string source;
    std::size_t line, column;
};

struct SidDocument {
    Sid sid;
    // @final, @sink, @aux markers per predicate
    std::map<std::string, std::set<std::string>> annotations;
    // body of a declaration named `query`, kept out of the SID
    std::optional<SymbolicHeap> query;
};

// Calls may also refer to predicates of `known`.
SidDocument parse_document(std::string_view text, const std::string& source = "<input>", const Sid* known = nullptr);
SidDocument load_document(const std::string& path, const Sid* known = nullptr);

std::string print_document(const SidDocument& doc);
std::string print_sid(const Sid& sid);

}  // namespace hauto
