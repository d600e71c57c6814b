#pragma once

#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hauto/automaton.hpp"
#include "hauto/pure.hpp"

namespace hauto {

// (alloc, closed pure) over the free variables of a heap with `arity` free variables.
struct TrackingState {
    std::uint32_t arity = 0;
    bool inconsistent = false;
    std::vector<std::uint32_t> alloc;  // sorted free indices
    std::vector<PureAtom> pure;        // sorted; non-reflexive equalities and all disequalities

    auto operator<=>(const TrackingState&) const = default;
    bool operator==(const TrackingState&) const = default;
};

struct ReachState {
    TrackingState track;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> reach;  // sorted pairs over 0..arity

    auto operator<=>(const ReachState&) const = default;
    bool operator==(const ReachState&) const = default;
};

TrackingState tracking_of(const SymbolicHeap& tau);
ReachState reach_of(const SymbolicHeap& tau);
TrackingState tracking_projection(const SymbolicHeap& h, const DefiniteInfo& d);
ReachState reach_projection(const SymbolicHeap& h, const DefiniteInfo& d);

// Reduced heap over free variables 1..arity encoding the state.
SymbolicHeap kernel(const TrackingState& q);
SymbolicHeap kernel(const ReachState& q);

// Replaces each call by the kernel of its state.
SymbolicHeap shrink(const SymbolicHeap& body, const std::vector<TrackingState>& inputs);
SymbolicHeap shrink(const SymbolicHeap& body, const std::vector<ReachState>& inputs);

std::string to_string(const TrackingState& q);
std::string to_string(const ReachState& q);

struct PropertySpec {
    enum Kind {
        HasPointsTo,
        Track,
        Sat,
        Unsat,
        Established,
        NotEstablished,
        Reach,
        GarbageFree,
        NotGarbageFree,
        WeaklyAcyclic,
        NotWeaklyAcyclic,
    };
    Kind kind = Sat;
    // Track: allocated free indices and pure atoms over free variables
    std::vector<std::uint32_t> alloc;
    std::vector<PureAtom> pure;
    // Reach: pairs over 0..alpha; the definite reachability relation must equal them,
    // or only contain them when reach_superset is set
    std::vector<std::pair<std::uint32_t, std::uint32_t>> reach;
    bool reach_superset = false;

    static PropertySpec of(Kind k) {
        PropertySpec s;
        s.kind = k;
        return s;
    }
};

std::string to_string(const PropertySpec& s);

AutomatonPtr build_property_automaton(const PropertySpec& spec, std::uint32_t alpha);

// Tracking automaton with all states final; building block for other constructions.
class TrackingAutomaton;
std::shared_ptr<const TrackingAutomaton> tracking_automaton(std::uint32_t alpha);

class TrackingAutomaton final : public HeapAutomaton {
public:
    explicit TrackingAutomaton(std::uint32_t alpha) : alpha_(alpha) {}
    std::string name() const override { return "track"; }
    std::uint32_t alpha() const override { return alpha_; }
    bool deterministic() const override { return true; }
    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& inputs) const override;
    bool is_final(StateId) const override { return true; }
    std::string describe(StateId q) const override { return to_string(state(q)); }

    const TrackingState& state(StateId q) const { return states_.get(q); }
    StateId id(const TrackingState& s) const { return states_.id(s); }
    // shrink of body by the states of its calls
    SymbolicHeap shrunk(const SymbolicHeap& body, const std::vector<StateId>& inputs) const;

private:
    std::uint32_t alpha_;
    Interner<TrackingState> states_;
};

enum class Mode { ForAll, Exists };

struct PropertyResult {
    bool holds = false;
    std::size_t states_discovered = 0;
};

PropertyResult evaluate_property(const Sid& sid, const SymbolicHeap& phi, const PropertySpec& spec, Mode mode);
bool check_property(const Sid& sid, const SymbolicHeap& phi, const PropertySpec& spec, Mode mode);
std::uint32_t query_alpha(const Sid& sid, const SymbolicHeap& phi);

// The property evaluated on one reduced heap from its definite relations, without automata.
bool property_holds_directly(const PropertySpec& spec, const SymbolicHeap& tau, std::uint32_t alpha);
// Enumerates unfoldings of phi up to max_height and evaluates the property on each.
bool oracle_property(const Sid& sid, const SymbolicHeap& phi, const PropertySpec& spec, Mode mode,
                     std::size_t max_height);

}  // namespace hauto
