#include "hauto/automaton.hpp"

#include <algorithm>
#include <sstream>

#include "hauto/model.hpp"

namespace hauto {

void HeapAutomaton::check_alpha(const SymbolicHeap& body, const std::vector<StateId>& inputs) const {
    if (inputs.size() != body.calls.size()) throw std::invalid_argument(name() + ": input count differs from calls");
    if (body.free_count > alpha())
        throw AlphaViolation(name() + ": heap has " + std::to_string(body.free_count) +
                             " free variables, automaton handles " + std::to_string(alpha()));
    for (auto& c : body.calls)
        if (c.args.size() > alpha()) throw AlphaViolation(name() + ": call " + c.pred + " exceeds alpha");
}

std::vector<StateId> reduced_targets(const HeapAutomaton& a, const SymbolicHeap& tau) {
    if (!tau.reduced()) throw std::invalid_argument("reduced_targets: heap has predicate calls");
    return a.targets(tau, {});
}

bool accepts(const HeapAutomaton& a, const SymbolicHeap& tau) {
    auto ts = reduced_targets(a, tau);
    return std::any_of(ts.begin(), ts.end(), [&](StateId q) { return a.is_final(q); });
}

NonemptyResult decide_nonempty(const Sid& sid, const std::string& pred, const HeapAutomaton& a,
                               NonemptyOptions opt) {
    if (!sid.has(pred)) throw std::invalid_argument("decide_nonempty: unknown predicate " + pred);
    NonemptyResult res;
    std::map<std::string, std::vector<StateId>> found;
    std::map<std::string, std::set<StateId>> seen;
    std::set<std::tuple<std::string, std::size_t, std::vector<StateId>>> processed;

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& name : sid.order) {
            auto& rules = sid.at(name).rules;
            for (std::size_t r = 0; r < rules.size(); ++r) {
                auto& body = rules[r];
                std::vector<std::vector<StateId>> choices;
                bool empty = false;
                for (auto& c : body.calls) {
                    auto it = found.find(c.pred);
                    if (it == found.end() || it->second.empty()) {
                        empty = true;
                        break;
                    }
                    choices.push_back(it->second);
                }
                if (empty) continue;
                std::vector<std::size_t> idx(choices.size(), 0);
                std::vector<StateId> in(choices.size());
                while (true) {
                    for (std::size_t i = 0; i < idx.size(); ++i) in[i] = choices[i][idx[i]];
                    if (processed.emplace(name, r, in).second) {
                        auto ts = a.targets(body, in);
                        if (opt.record_transitions) res.transitions.emplace_back(name, r, in, ts);
                        for (auto q : ts) {
                            if (!seen[name].insert(q).second) continue;
                            found[name].push_back(q);
                            res.order.emplace_back(name, q);
                            res.table[{name, q}] = {r, in};
                            changed = true;
                            if (name == pred && a.is_final(q)) {
                                res.nonempty = true;
                                if (opt.early_exit) return res;
                            }
                        }
                    }
                    std::size_t i = 0;
                    while (i < idx.size() && ++idx[i] == choices[i].size()) idx[i++] = 0;
                    if (i == idx.size()) break;
                }
            }
        }
    }
    return res;
}

std::string pair_name(const std::string& pred, StateId q) { return pred + "_q" + std::to_string(q); }

RefinedSid refine(const Sid& sid, const HeapAutomaton& a) {
    auto res = decide_nonempty(sid, sid.order.empty() ? std::string() : sid.order.front(), a,
                               {.early_exit = false, .record_transitions = true});
    RefinedSid out;
    out.states_discovered = res.states_discovered();
    for (auto& [p, q] : res.order) {
        auto n = pair_name(p, q);
        out.sid.declare(n, sid.at(p).arity);
        out.origin[n] = {p, q};
    }
    for (auto& [p, r, in, ts] : res.transitions) {
        auto body = sid.at(p).rules[r];
        for (std::size_t i = 0; i < body.calls.size(); ++i) body.calls[i].pred = pair_name(body.calls[i].pred, in[i]);
        for (auto q : ts) out.sid.add_rule(pair_name(p, q), sid.at(p).arity, body);
    }
    for (auto& name : sid.order) {
        auto arity = sid.at(name).arity;
        out.sid.declare(name, arity);
        for (auto& [p, q] : res.order)
            if (p == name && a.is_final(q)) out.sid.add_rule(name, arity, call_heap(pair_name(p, q), arity));
    }
    return out;
}

namespace {

UnfoldingTree build_tree(const Sid& sid, const NonemptyResult& r, const std::string& p, StateId q) {
    auto& d = r.table.at({p, q});
    UnfoldingTree t{p, d.rule, {}};
    auto& body = sid.at(p).rules[d.rule];
    for (std::size_t i = 0; i < body.calls.size(); ++i)
        t.children.push_back(build_tree(sid, r, body.calls[i].pred, d.inputs[i]));
    return t;
}

}  // namespace

std::optional<UnfoldingTree> witness_from(const Sid& sid, const std::string& pred, const HeapAutomaton& a,
                                          const NonemptyResult& r) {
    for (auto& [p, q] : r.order) {
        if (p != pred || !a.is_final(q)) continue;
        auto t = build_tree(sid, r, p, q);
        if (!accepts(a, unfold(sid, t))) throw std::logic_error("witness_unfolding: witness rejected on replay");
        return t;
    }
    return std::nullopt;
}

std::optional<UnfoldingTree> witness_unfolding(const Sid& sid, const std::string& pred, const HeapAutomaton& a) {
    return witness_from(sid, pred, a, decide_nonempty(sid, pred, a));
}

std::string wrap_formula(Sid& sid, const SymbolicHeap& phi, const std::string& base) {
    auto name = fresh_pred_name(sid, base);
    sid.add_rule(name, phi.free_count, phi);
    return name;
}

bool exists_accepted(const Sid& sid, const SymbolicHeap& phi, const HeapAutomaton& a) {
    Sid s = sid;
    auto p = wrap_formula(s, phi);
    return decide_nonempty(s, p, a).nonempty;
}

bool all_accepted(const Sid& sid, const SymbolicHeap& phi, const HeapAutomaton& a) {
    struct Borrowed : HeapAutomaton {
        const HeapAutomaton& a;
        explicit Borrowed(const HeapAutomaton& x) : a(x) {}
        std::string name() const override { return a.name(); }
        std::uint32_t alpha() const override { return a.alpha(); }
        bool deterministic() const override { return a.deterministic(); }
        std::vector<StateId> targets(const SymbolicHeap& b, const std::vector<StateId>& in) const override {
            return a.targets(b, in);
        }
        bool is_final(StateId q) const override { return a.is_final(q); }
        std::string describe(StateId q) const override { return a.describe(q); }
    };
    auto c = complement(std::make_shared<Borrowed>(a));
    return !exists_accepted(sid, phi, *c);
}

// ---- combinators ----

namespace {

class SwapComplement final : public HeapAutomaton {
public:
    explicit SwapComplement(AutomatonPtr a) : a_(std::move(a)) {}
    std::string name() const override { return "not(" + a_->name() + ")"; }
    std::uint32_t alpha() const override { return a_->alpha(); }
    bool deterministic() const override { return true; }
    // runs the inner automaton has no transition for end in a sink that this side accepts
    std::vector<StateId> targets(const SymbolicHeap& b, const std::vector<StateId>& in) const override {
        check_alpha(b, in);
        if (std::find(in.begin(), in.end(), kSink) != in.end()) return {kSink};
        auto ts = a_->targets(b, in);
        if (ts.empty()) return {kSink};
        return ts;
    }
    bool is_final(StateId q) const override { return q == kSink || !a_->is_final(q); }
    std::string describe(StateId q) const override { return q == kSink ? "sink" : a_->describe(q); }

private:
    static constexpr StateId kSink = static_cast<StateId>(-2);
    AutomatonPtr a_;
};

class PowersetComplement final : public HeapAutomaton {
public:
    explicit PowersetComplement(AutomatonPtr a) : a_(std::move(a)) {}
    std::string name() const override { return "not(" + a_->name() + ")"; }
    std::uint32_t alpha() const override { return a_->alpha(); }
    bool deterministic() const override { return true; }
    std::vector<StateId> targets(const SymbolicHeap& b, const std::vector<StateId>& in) const override {
        check_alpha(b, in);
        std::vector<std::vector<StateId>> sets;
        for (auto q : in) {
            sets.push_back(sets_.get(q));
            if (sets.back().empty()) return {sets_.id({})};
        }
        std::set<StateId> acc;
        std::vector<std::size_t> idx(sets.size(), 0);
        std::vector<StateId> pick(sets.size());
        while (true) {
            for (std::size_t i = 0; i < idx.size(); ++i) pick[i] = sets[i][idx[i]];
            for (auto q : a_->targets(b, pick)) acc.insert(q);
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == sets[i].size()) idx[i++] = 0;
            if (i == idx.size()) break;
        }
        return {sets_.id(std::vector<StateId>(acc.begin(), acc.end()))};
    }
    bool is_final(StateId q) const override {
        auto& s = sets_.get(q);
        return std::none_of(s.begin(), s.end(), [&](StateId x) { return a_->is_final(x); });
    }
    std::string describe(StateId q) const override {
        std::string s = "{";
        for (auto x : sets_.get(q)) s += (s.size() > 1 ? ", " : "") + a_->describe(x);
        return s + "}";
    }

private:
    AutomatonPtr a_;
    Interner<std::vector<StateId>> sets_;
};

constexpr StateId kPad = static_cast<StateId>(-1);

class Product final : public HeapAutomaton {
public:
    Product(AutomatonPtr a, AutomatonPtr b, bool is_union) : a_(std::move(a)), b_(std::move(b)), union_(is_union) {}
    std::string name() const override {
        return (union_ ? "union(" : "intersection(") + a_->name() + ", " + b_->name() + ")";
    }
    std::uint32_t alpha() const override { return std::min(a_->alpha(), b_->alpha()); }
    bool deterministic() const override { return a_->deterministic() && b_->deterministic(); }
    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        check_alpha(body, in);
        std::vector<StateId> ia, ib;
        bool pa = false, pb = false;
        for (auto q : in) {
            auto [x, y] = pairs_.get(q);
            pa |= x == kPad;
            pb |= y == kPad;
            ia.push_back(x);
            ib.push_back(y);
        }
        std::vector<StateId> ta, tb;
        if (!pa) ta = a_->targets(body, ia);
        if (!pb) tb = b_->targets(body, ib);
        std::vector<StateId> out;
        for (auto x : ta)
            for (auto y : tb) out.push_back(pairs_.id({x, y}));
        if (union_) {
            if (tb.empty())
                for (auto x : ta) out.push_back(pairs_.id({x, kPad}));
            if (ta.empty())
                for (auto y : tb) out.push_back(pairs_.id({kPad, y}));
        }
        return out;
    }
    bool is_final(StateId q) const override {
        auto [x, y] = pairs_.get(q);
        bool fa = x != kPad && a_->is_final(x);
        bool fb = y != kPad && b_->is_final(y);
        return union_ ? (fa || fb) : (fa && fb);
    }
    std::string describe(StateId q) const override {
        auto [x, y] = pairs_.get(q);
        return "(" + (x == kPad ? std::string("_") : a_->describe(x)) + ", " +
               (y == kPad ? std::string("_") : b_->describe(y)) + ")";
    }

private:
    AutomatonPtr a_, b_;
    bool union_;
    Interner<std::pair<StateId, StateId>> pairs_;
};

class Universal final : public HeapAutomaton {
public:
    Universal(std::uint32_t alpha, bool final) : alpha_(alpha), final_(final) {}
    std::string name() const override { return final_ ? "universal" : "empty"; }
    std::uint32_t alpha() const override { return alpha_; }
    bool deterministic() const override { return true; }
    std::vector<StateId> targets(const SymbolicHeap& b, const std::vector<StateId>& in) const override {
        check_alpha(b, in);
        return {0};
    }
    bool is_final(StateId) const override { return final_; }
    std::string describe(StateId) const override { return "*"; }

private:
    std::uint32_t alpha_;
    bool final_;
};

}  // namespace

AutomatonPtr complement(AutomatonPtr a) {
    if (a->deterministic()) return std::make_shared<SwapComplement>(std::move(a));
    return std::make_shared<PowersetComplement>(std::move(a));
}

AutomatonPtr make_union(AutomatonPtr a, AutomatonPtr b) {
    return std::make_shared<Product>(std::move(a), std::move(b), true);
}

AutomatonPtr make_intersection(AutomatonPtr a, AutomatonPtr b) {
    return std::make_shared<Product>(std::move(a), std::move(b), false);
}

AutomatonPtr universal_automaton(std::uint32_t alpha, bool final) { return std::make_shared<Universal>(alpha, final); }

}  // namespace hauto
