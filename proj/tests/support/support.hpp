#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hauto/automaton.hpp"
#include "hauto/model.hpp"
#include "hauto/parser.hpp"
#include "hauto/semantics.hpp"
#include "hauto/zoo.hpp"

namespace hauto::test {

std::string fixture_path(const std::string& name);
SidDocument fixture(const std::string& name);
Sid fixture_sid(const std::string& name);

// Parses "query(..) <= body;" against the predicates of sid.
SymbolicHeap heap(const std::string& text, const Sid& sid = {});
Sid sid_of(const std::string& text);

using Rng = std::mt19937_64;

struct HeapShape {
    std::uint32_t min_free = 1, max_free = 3;
    std::uint32_t max_bound = 1;
    std::size_t max_spatial = 2;
    std::size_t min_fields = 1, max_fields = 2;
    std::size_t max_pure = 3;
};
SymbolicHeap random_heap(Rng& rng, const HeapShape& shape = {});

struct SidShape {
    std::size_t max_preds = 3;
    std::uint32_t max_arity = 3;
    std::size_t max_rules = 2;
    std::size_t max_calls = 2;
    std::size_t max_spatial = 2;
    std::uint32_t max_bound = 2;
    std::size_t fields = 1;
    std::size_t max_pure = 2;
    // first predicate always gets a call-free rule
    bool base_first = true;
};
Sid random_sid(Rng& rng, const SidShape& shape = {});

// Body with calls whose pred/arity come from sid; free variables 1..arity.
SymbolicHeap random_body(Rng& rng, const Sid& sid, std::uint32_t arity, const SidShape& shape);

UnfoldingTree random_tree(Rng& rng, const Sid& sid, const std::string& pred, std::size_t max_height);

// Every tight model of tau over a small location domain, with values for all variables.
struct FullModel {
    std::vector<std::uint32_t> val;  // indexed densely
    std::map<std::uint32_t, std::vector<std::uint32_t>> heap;
};
std::vector<FullModel> brute_models(const SymbolicHeap& tau);

// Relations holding in every model; all true when tau has no model.
struct BruteRelations {
    bool satisfiable = false;
    std::size_t n = 0;
    std::vector<char> eq, neq, pts, reach;
    std::vector<char> alloc;
    bool get(const std::vector<char>& m, std::size_t a, std::size_t b) const { return m[a * n + b]; }
};
BruteRelations brute_relations(const SymbolicHeap& tau);

// Stack restricted to the free variables of a full model.
Model restrict_model(const SymbolicHeap& tau, const FullModel& m);

// Pumping height for phi: every state phi can reach is reached by an unfolding tree of at most
// this height (the wrapping query node included).
std::size_t pumping_height(const Sid& sid, const SymbolicHeap& phi, const HeapAutomaton& a);

// Compositionality biconditional for one instance: phi with calls, reduced taus (one per call).
// Returns an empty string when it holds, else a description.
std::string check_compositional(const HeapAutomaton& a, const SymbolicHeap& phi,
                                const std::vector<SymbolicHeap>& taus);

// Body over `arity` free variables with calls P_i of the given arities.
SymbolicHeap random_call_body(Rng& rng, std::uint32_t arity, const std::vector<std::uint32_t>& call_arities,
                              const HeapShape& shape);

// Adds a disequality for every undecided pair of variables (nil included); a satisfiable
// heap becomes well-determined with its generic model as the only model.
SymbolicHeap determinize(const SymbolicHeap& tau);

// Two-variable list-like heaps: sll unfoldings, possibly perturbed, then determinized.
SymbolicHeap random_list_heap(Rng& rng, std::size_t max_height = 4);

// Every model of tau satisfies some unfolding of phi (unfolded to cells+2); brute force.
bool entails_by_models(const Sid& sid, const SymbolicHeap& tau, const SymbolicHeap& phi);

struct Reduction {
    SymbolicHeap phi;
    PropertySpec spec;
};
// Establishment, reachability and acyclicity formulas embedding a call of p: each property holds
// in every unfolding iff p is unsatisfiable.
std::vector<Reduction> lower_bound_reductions(const Sid& sid, const std::string& p);

}  // namespace hauto::test
