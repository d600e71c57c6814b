#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hauto/automaton.hpp"
#include "hauto/semantics.hpp"
#include "hauto/syntax.hpp"

namespace hauto {

using PredAutomata = std::map<std::string, AutomatonPtr>;

struct EntailmentQuery {
    Sid sid;
    SymbolicHeap lhs, rhs;
    PredAutomata pred_automata;
    // also require sampled unfoldings of lhs and rhs to pass is_determined
    bool strict = false;
};

struct EntailmentResult {
    bool holds = false;
    std::size_t states_discovered = 0;
};

class EntailmentPrecondition : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

// SAT refinement: same language minus unsatisfiable unfoldings.
Sid well_determine(const Sid& sid);

// Accepts reduced heaps (and, compositionally, unfoldings) entailing the reduced heap rhs.
AutomatonPtr representation_automaton(const SymbolicHeap& rhs);
// tau |= P(args) where args range over `arity` free variables; `hidden` trailing variables
// of every heap are existentially hidden before the predicate automaton sees it.
AutomatonPtr call_automaton(AutomatonPtr pred, std::vector<Var> args, std::uint32_t arity, std::uint32_t hidden);
// inner plus the pure constraints pi
AutomatonPtr pure_automaton(AutomatonPtr inner, std::vector<PureAtom> pi, std::uint32_t alpha);
AutomatonPtr sepcon_automaton(AutomatonPtr a, AutomatonPtr b);
// inner works over one more free variable; that variable is pinned to some variable of the heap
AutomatonPtr exists_automaton(AutomatonPtr inner);

AutomatonPtr build_entailment_automaton(const SymbolicHeap& rhs, const PredAutomata& preds, std::uint32_t alpha);

// sll(x1 x2). States are contracted list shapes together with the decided relations among nil
// and the free variables; only heaps with two free variables can be final.
// describe() starts with the sll_classify projection onto six states.
AutomatonPtr sll_entailment_automaton();
// The six states are too coarse to be compositional on their own.
enum class SllState : StateId { Eq, Diff, Rev, Fst, Snd, Bot };
SymbolicHeap sll_representation(SllState q);
SllState sll_classify(const SymbolicHeap& tau);
std::string to_string(SllState q);

struct EquivalenceClass {
    std::string name;
    SymbolicHeap representative;
    bool final = false;
    bool sink = false;
};

class EquivalenceClassSpec {
public:
    // Predicates annotated @aux are helpers; @sink marks the fallback class.
    EquivalenceClassSpec(Sid sid, const std::map<std::string, std::set<std::string>>& annotations);

    const std::vector<EquivalenceClass>& classes() const { return classes_; }
    std::uint32_t arity() const { return arity_; }
    std::optional<std::size_t> classify(const SymbolicHeap& tau) const;
    bool member(std::size_t cls, const Model& m) const;

private:
    struct Cache;
    Sid sid_;
    std::vector<EquivalenceClass> classes_;
    std::uint32_t arity_ = 0;
    std::shared_ptr<Cache> cache_;
};

class IncompleteClasses : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

AutomatonPtr myhill_nerode_automaton(std::shared_ptr<const EquivalenceClassSpec> classes);

EntailmentResult decide_entailment(const EntailmentQuery& q);

}  // namespace hauto
