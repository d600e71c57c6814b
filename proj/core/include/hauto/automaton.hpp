#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hauto/syntax.hpp"

namespace hauto {

using StateId = std::uint32_t;

class AlphaViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class HeapAutomaton {
public:
    virtual ~HeapAutomaton() = default;

    virtual std::string name() const = 0;
    virtual std::uint32_t alpha() const = 0;
    // Deterministic automata return at most one target.
    virtual bool deterministic() const = 0;
    virtual std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& inputs) const = 0;
    virtual bool is_final(StateId q) const = 0;
    virtual std::string describe(StateId q) const = 0;

protected:
    void check_alpha(const SymbolicHeap& body, const std::vector<StateId>& inputs) const;
};

using AutomatonPtr = std::shared_ptr<const HeapAutomaton>;

// Thread-safe id <-> value table; references stay valid for the table's lifetime.
template <class T>
class Interner {
public:
    StateId id(const T& v) const {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = index_.find(v);
        if (it != index_.end()) return it->second;
        auto id = static_cast<StateId>(values_.size());
        values_.push_back(v);
        index_.emplace(v, id);
        return id;
    }
    const T& get(StateId id) const {
        std::lock_guard<std::mutex> lk(mu_);
        return values_.at(id);
    }
    std::size_t size() const {
        std::lock_guard<std::mutex> lk(mu_);
        return values_.size();
    }

private:
    mutable std::mutex mu_;
    mutable std::deque<T> values_;
    mutable std::map<T, StateId> index_;
};

// ---- engine ----

bool accepts(const HeapAutomaton& a, const SymbolicHeap& tau);
std::vector<StateId> reduced_targets(const HeapAutomaton& a, const SymbolicHeap& tau);

struct Discovery {
    std::size_t rule = 0;
    std::vector<StateId> inputs;
};

struct NonemptyResult {
    bool nonempty = false;
    std::vector<std::pair<std::string, StateId>> order;  // discovery sequence
    std::map<std::pair<std::string, StateId>, Discovery> table;
    // every (pred, rule, inputs) -> targets evaluated; filled only by full runs
    std::vector<std::tuple<std::string, std::size_t, std::vector<StateId>, std::vector<StateId>>> transitions;
    std::size_t states_discovered() const { return order.size(); }
};

struct NonemptyOptions {
    bool early_exit = true;
    bool record_transitions = false;
};

NonemptyResult decide_nonempty(const Sid& sid, const std::string& pred, const HeapAutomaton& a,
                               NonemptyOptions opt = {});

struct RefinedSid {
    Sid sid;
    std::map<std::string, std::pair<std::string, StateId>> origin;  // pair predicate -> (P, q)
    std::size_t states_discovered = 0;
};

RefinedSid refine(const Sid& sid, const HeapAutomaton& a);
std::string pair_name(const std::string& pred, StateId q);

std::optional<UnfoldingTree> witness_unfolding(const Sid& sid, const std::string& pred, const HeapAutomaton& a);
std::optional<UnfoldingTree> witness_from(const Sid& sid, const std::string& pred, const HeapAutomaton& a,
                                          const NonemptyResult& r);

// Adds `phi` as the single rule of a fresh predicate; returns its name.
std::string wrap_formula(Sid& sid, const SymbolicHeap& phi, const std::string& base = "query");

bool exists_accepted(const Sid& sid, const SymbolicHeap& phi, const HeapAutomaton& a);
bool all_accepted(const Sid& sid, const SymbolicHeap& phi, const HeapAutomaton& a);

// ---- combinators ----

AutomatonPtr complement(AutomatonPtr a);
AutomatonPtr make_union(AutomatonPtr a, AutomatonPtr b);
AutomatonPtr make_intersection(AutomatonPtr a, AutomatonPtr b);
AutomatonPtr universal_automaton(std::uint32_t alpha, bool final);

}  // namespace hauto
