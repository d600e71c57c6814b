#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "hauto/syntax.hpp"

namespace hauto {

struct Model {
    // stack[0] is nil and always 0; stack[i] is the value of x_i
    std::vector<std::uint32_t> stack{0};
    std::map<std::uint32_t, std::vector<std::uint32_t>> heap;

    auto operator<=>(const Model&) const = default;
    bool operator==(const Model&) const = default;
};

class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Satisfaction per the symbolic-heap semantics; existentials solved exactly.
bool sat_reduced(const SymbolicHeap& tau, const Model& m);

// Relabels locations canonically so isomorphic models compare equal.
Model canonical_model(const Model& m);

// Brute-force enumeration of tight models over a bounded value domain.
struct ModelSearchOptions {
    std::size_t cap = 2000000;
};
std::vector<Model> tight_models_bounded(const SymbolicHeap& tau, ModelSearchOptions opt = {});

// Tight models up to isomorphism, derived from the completion's equivalence classes.
std::vector<Model> models_up_to_iso(const SymbolicHeap& tau);

// The model in which all variables not definitely equal are distinct.
Model generic_model(const SymbolicHeap& tau);

// Sufficient check: every pair of variables (nil included) is definitely equal or unequal.
bool is_determined(const SymbolicHeap& tau);

// tau1 must be satisfiable and pass is_determined.
bool entails_reduced(const SymbolicHeap& tau1, const SymbolicHeap& tau2);

// Every model of tau1 satisfies tau2; no determinedness premise.
bool entails_all_models(const SymbolicHeap& tau1, const SymbolicHeap& tau2);

std::string to_string(const Model& m);

}  // namespace hauto
