#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hauto/syntax.hpp"

namespace hauto {

struct Diagnostic {
    enum Kind { ArityMismatch, UnknownPredicate, DanglingVariable, EmptyTargets, NilQuantified };
    Kind kind;
    std::string pred;
    std::size_t rule = 0;
    std::string message;
};

std::vector<Diagnostic> validate_sid(const Sid& sid);
std::vector<Diagnostic> validate_heap(const Sid& sid, const SymbolicHeap& h);

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OracleCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Replaces call `call_index` of host by body. Body free variables become the call
// arguments; body bound variables are shifted past host.bound_count.
SymbolicHeap replace_call(const SymbolicHeap& host, std::size_t call_index, const SymbolicHeap& body);

// Replaces every call i by bodies[i] at once.
SymbolicHeap replace_calls(const SymbolicHeap& host, const std::vector<SymbolicHeap>& bodies);

SymbolicHeap canonicalize(const SymbolicHeap& h);

SymbolicHeap unfold(const Sid& sid, const UnfoldingTree& tree);

// Trees whose root is `start` itself (a node over a non-SID heap) are modelled as
// the start heap with subtrees for its calls.
struct EnumerateOptions {
    std::size_t cap = 100000;
};

std::set<SymbolicHeap> enumerate_unfoldings(const Sid& sid, const SymbolicHeap& start, std::size_t max_height,
                                            EnumerateOptions opt = {});

std::set<std::string> nonempty_predicates(const Sid& sid);

SymbolicHeap call_heap(const std::string& pred, std::uint32_t arity);

// Fresh predicate name not yet declared in sid, derived from base.
std::string fresh_pred_name(const Sid& sid, const std::string& base);

}  // namespace hauto
