#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hauto {

struct Var {
    enum Kind : std::uint8_t { Nil = 0, Free = 1, Bound = 2 };
    Kind kind = Nil;
    std::uint32_t index = 0;

    static Var nil() { return {Nil, 0}; }
    static Var free(std::uint32_t i) { return {Free, i}; }
    static Var bound(std::uint32_t i) { return {Bound, i}; }

    bool is_nil() const { return kind == Nil; }
    bool is_free() const { return kind == Free; }
    bool is_bound() const { return kind == Bound; }

    auto operator<=>(const Var&) const = default;
    bool operator==(const Var&) const = default;
};

struct PureAtom {
    Var lhs, rhs;
    bool eq = true;

    // orientation: lhs <= rhs
    static PureAtom make(Var a, Var b, bool eq);
    auto operator<=>(const PureAtom&) const = default;
    bool operator==(const PureAtom&) const = default;
};

struct PointsTo {
    Var source;
    std::vector<Var> targets;
    auto operator<=>(const PointsTo&) const = default;
    bool operator==(const PointsTo&) const = default;
};

struct PredCall {
    std::string pred;
    std::vector<Var> args;
    auto operator<=>(const PredCall&) const = default;
    bool operator==(const PredCall&) const = default;
};

struct SymbolicHeap {
    std::uint32_t free_count = 0;
    std::uint32_t bound_count = 0;
    std::vector<PointsTo> spatial;
    std::vector<PredCall> calls;
    std::vector<PureAtom> pure;  // sorted, unique

    bool reduced() const { return calls.empty(); }
    void add_pure(Var a, Var b, bool eq);
    void normalize_pure();
    // every variable: nil, free 1..free_count, bound 1..bound_count
    std::vector<Var> variables() const;
    std::size_t var_count() const { return 1 + free_count + bound_count; }

    auto operator<=>(const SymbolicHeap&) const = default;
    bool operator==(const SymbolicHeap&) const = default;
};

// dense index: nil -> 0, free i -> i, bound j -> free_count + j
inline std::size_t dense(const SymbolicHeap& h, Var v) {
    switch (v.kind) {
    case Var::Nil: return 0;
    case Var::Free: return v.index;
    default: return h.free_count + v.index;
    }
}
inline Var from_dense(const SymbolicHeap& h, std::size_t i) {
    if (i == 0) return Var::nil();
    if (i <= h.free_count) return Var::free(static_cast<std::uint32_t>(i));
    return Var::bound(static_cast<std::uint32_t>(i - h.free_count));
}

struct Predicate {
    std::uint32_t arity = 0;
    std::vector<SymbolicHeap> rules;
};

struct Sid {
    // declaration order is kept for deterministic iteration
    std::vector<std::string> order;
    std::map<std::string, Predicate> preds;

    bool has(const std::string& p) const { return preds.count(p) != 0; }
    const Predicate& at(const std::string& p) const { return preds.at(p); }
    void add_rule(const std::string& p, std::uint32_t arity, SymbolicHeap body);
    void declare(const std::string& p, std::uint32_t arity);
    std::size_t rule_count() const;
    std::uint32_t max_arity() const;
};

struct UnfoldingTree {
    std::string pred;
    std::size_t rule = 0;
    std::vector<UnfoldingTree> children;

    std::size_t height() const;
    std::size_t size() const;
};

std::string to_string(Var v);
std::string to_string(const PureAtom& a);
std::string to_string(const SymbolicHeap& h);
std::string to_string(const UnfoldingTree& t, const Sid& sid);

}  // namespace hauto
