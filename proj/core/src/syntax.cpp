#include "hauto/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace hauto {

PureAtom PureAtom::make(Var a, Var b, bool eq) {
    if (b < a) std::swap(a, b);
    return {a, b, eq};
}

void SymbolicHeap::add_pure(Var a, Var b, bool eq) {
    auto at = PureAtom::make(a, b, eq);
    auto it = std::lower_bound(pure.begin(), pure.end(), at);
    if (it == pure.end() || !(*it == at)) pure.insert(it, at);
}

void SymbolicHeap::normalize_pure() {
    for (auto& a : pure) a = PureAtom::make(a.lhs, a.rhs, a.eq);
    std::sort(pure.begin(), pure.end());
    pure.erase(std::unique(pure.begin(), pure.end()), pure.end());
}

std::vector<Var> SymbolicHeap::variables() const {
    std::vector<Var> vs;
    vs.reserve(var_count());
    vs.push_back(Var::nil());
    for (std::uint32_t i = 1; i <= free_count; ++i) vs.push_back(Var::free(i));
    for (std::uint32_t i = 1; i <= bound_count; ++i) vs.push_back(Var::bound(i));
    return vs;
}

void Sid::declare(const std::string& p, std::uint32_t arity) {
    if (!preds.count(p)) {
        order.push_back(p);
        preds[p].arity = arity;
    }
}

void Sid::add_rule(const std::string& p, std::uint32_t arity, SymbolicHeap body) {
    declare(p, arity);
    preds[p].rules.push_back(std::move(body));
}

std::size_t Sid::rule_count() const {
    std::size_t n = 0;
    for (auto& [_, p] : preds) n += p.rules.size();
    return n;
}

std::uint32_t Sid::max_arity() const {
    std::uint32_t m = 0;
    for (auto& [_, p] : preds) m = std::max(m, p.arity);
    return m;
}

std::size_t UnfoldingTree::height() const {
    std::size_t h = 0;
    for (auto& c : children) h = std::max(h, c.height());
    return h + 1;
}

std::size_t UnfoldingTree::size() const {
    std::size_t n = 1;
    for (auto& c : children) n += c.size();
    return n;
}

std::string to_string(Var v) {
    switch (v.kind) {
    case Var::Nil: return "nil";
    case Var::Free: return "x" + std::to_string(v.index);
    default: return "z" + std::to_string(v.index);
    }
}

std::string to_string(const PureAtom& a) {
    return to_string(a.lhs) + (a.eq ? "=" : "!=") + to_string(a.rhs);
}

static void print_args(std::ostream& os, const std::vector<Var>& vs) {
    os << '(';
    for (std::size_t i = 0; i < vs.size(); ++i) os << (i ? ", " : "") << to_string(vs[i]);
    os << ')';
}

std::string to_string(const SymbolicHeap& h) {
    std::ostringstream os;
    if (h.bound_count) {
        os << "ex";
        for (std::uint32_t i = 1; i <= h.bound_count; ++i) os << ' ' << to_string(Var::bound(i));
        os << " . ";
    }
    bool first = true;
    for (auto& p : h.spatial) {
        os << (first ? "" : " * ") << to_string(p.source) << "->";
        print_args(os, p.targets);
        first = false;
    }
    for (auto& c : h.calls) {
        os << (first ? "" : " * ") << c.pred;
        print_args(os, c.args);
        first = false;
    }
    if (first) os << "emp";
    if (!h.pure.empty()) {
        os << " : {";
        for (std::size_t i = 0; i < h.pure.size(); ++i) os << (i ? ", " : "") << to_string(h.pure[i]);
        os << '}';
    }
    return os.str();
}

static void print_tree(std::ostream& os, const UnfoldingTree& t, const Sid& sid, int depth) {
    os << std::string(2 * depth, ' ') << t.pred << " rule " << t.rule;
    if (sid.has(t.pred) && t.rule < sid.at(t.pred).rules.size())
        os << ": " << to_string(sid.at(t.pred).rules[t.rule]);
    os << '\n';
    for (auto& c : t.children) print_tree(os, c, sid, depth + 1);
}

std::string to_string(const UnfoldingTree& t, const Sid& sid) {
    std::ostringstream os;
    print_tree(os, t, sid, 0);
    return os.str();
}

}  // namespace hauto
