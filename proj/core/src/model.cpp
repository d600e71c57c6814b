#include "hauto/model.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace hauto {

namespace {

void check_var(const Sid& sid, const std::string& pred, std::size_t rule, const SymbolicHeap& h, Var v,
               std::vector<Diagnostic>& out) {
    (void)sid;
    bool bad = (v.is_free() && (v.index == 0 || v.index > h.free_count)) ||
               (v.is_bound() && (v.index == 0 || v.index > h.bound_count));
    if (bad)
        out.push_back({Diagnostic::DanglingVariable, pred, rule, "variable " + to_string(v) + " out of range"});
}

void check_body(const Sid& sid, const std::string& pred, std::size_t rule, const SymbolicHeap& h,
                std::vector<Diagnostic>& out) {
    for (auto& p : h.spatial) {
        check_var(sid, pred, rule, h, p.source, out);
        if (p.targets.empty()) out.push_back({Diagnostic::EmptyTargets, pred, rule, "points-to without targets"});
        for (auto v : p.targets) check_var(sid, pred, rule, h, v, out);
    }
    for (auto& c : h.calls) {
        if (!sid.has(c.pred)) {
            out.push_back({Diagnostic::UnknownPredicate, pred, rule, "unknown predicate " + c.pred});
        } else if (sid.at(c.pred).arity != c.args.size()) {
            out.push_back({Diagnostic::ArityMismatch, pred, rule,
                           "call " + c.pred + " has " + std::to_string(c.args.size()) + " arguments, expected " +
                               std::to_string(sid.at(c.pred).arity)});
        }
        for (auto v : c.args) check_var(sid, pred, rule, h, v, out);
    }
    for (auto& a : h.pure) {
        check_var(sid, pred, rule, h, a.lhs, out);
        check_var(sid, pred, rule, h, a.rhs, out);
    }
}

struct Renamer {
    const std::vector<Var>* args;
    std::uint32_t offset;
    Var operator()(Var v) const {
        if (v.is_free()) return (*args)[v.index - 1];
        if (v.is_bound()) return Var::bound(v.index + offset);
        return v;
    }
};

void append_body(SymbolicHeap& out, const SymbolicHeap& body, const std::vector<Var>& args, std::uint32_t offset) {
    Renamer r{&args, offset};
    for (auto& p : body.spatial) {
        PointsTo q{r(p.source), {}};
        q.targets.reserve(p.targets.size());
        for (auto v : p.targets) q.targets.push_back(r(v));
        out.spatial.push_back(std::move(q));
    }
    for (auto& c : body.calls) {
        PredCall d{c.pred, {}};
        for (auto v : c.args) d.args.push_back(r(v));
        out.calls.push_back(std::move(d));
    }
    for (auto& a : body.pure) {
        Var x = r(a.lhs), y = r(a.rhs);
        if (a.eq && x == y) continue;
        out.pure.push_back(PureAtom::make(x, y, a.eq));
    }
}

}  // namespace

std::vector<Diagnostic> validate_sid(const Sid& sid) {
    std::vector<Diagnostic> out;
    for (auto& name : sid.order) {
        auto& p = sid.at(name);
        for (std::size_t i = 0; i < p.rules.size(); ++i) {
            auto& r = p.rules[i];
            if (r.free_count != p.arity)
                out.push_back({Diagnostic::ArityMismatch, name, i,
                               "rule has " + std::to_string(r.free_count) + " free variables, arity is " +
                                   std::to_string(p.arity)});
            check_body(sid, name, i, r, out);
        }
    }
    return out;
}

std::vector<Diagnostic> validate_heap(const Sid& sid, const SymbolicHeap& h) {
    std::vector<Diagnostic> out;
    check_body(sid, "<query>", 0, h, out);
    return out;
}

SymbolicHeap replace_call(const SymbolicHeap& host, std::size_t call_index, const SymbolicHeap& body) {
    if (call_index >= host.calls.size()) throw ModelError("replace_call: call index out of range");
    auto& call = host.calls[call_index];
    if (body.free_count != call.args.size()) throw ModelError("replace_call: arity mismatch for " + call.pred);
    SymbolicHeap out;
    out.free_count = host.free_count;
    out.bound_count = host.bound_count + body.bound_count;
    out.spatial = host.spatial;
    out.pure = host.pure;
    for (std::size_t i = 0; i < host.calls.size(); ++i)
        if (i != call_index) out.calls.push_back(host.calls[i]);
    // body calls go where the replaced call was so subtree order stays aligned
    std::vector<PredCall> tail(out.calls.begin() + static_cast<std::ptrdiff_t>(call_index), out.calls.end());
    out.calls.resize(call_index);
    append_body(out, body, call.args, host.bound_count);
    out.calls.insert(out.calls.end(), tail.begin(), tail.end());
    out.normalize_pure();
    return out;
}

SymbolicHeap replace_calls(const SymbolicHeap& host, const std::vector<SymbolicHeap>& bodies) {
    if (bodies.size() != host.calls.size()) throw ModelError("replace_calls: length mismatch");
    SymbolicHeap out;
    out.free_count = host.free_count;
    out.spatial = host.spatial;
    out.pure = host.pure;
    std::uint32_t offset = host.bound_count;
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        if (bodies[i].free_count != host.calls[i].args.size())
            throw ModelError("replace_calls: arity mismatch for " + host.calls[i].pred);
        append_body(out, bodies[i], host.calls[i].args, offset);
        offset += bodies[i].bound_count;
    }
    out.bound_count = offset;
    out.normalize_pure();
    return out;
}

namespace {

bool renumber(SymbolicHeap& h) {
    std::vector<std::uint32_t> map(h.bound_count + 1, 0);
    std::uint32_t next = 0;
    auto see = [&](Var v) {
        if (v.is_bound() && map[v.index] == 0) map[v.index] = ++next;
    };
    for (auto& p : h.spatial) {
        see(p.source);
        for (auto v : p.targets) see(v);
    }
    for (auto& c : h.calls)
        for (auto v : c.args) see(v);
    for (auto& a : h.pure) {
        see(a.lhs);
        see(a.rhs);
    }
    // unused quantified variables are kept, numbered last
    for (std::uint32_t i = 1; i <= h.bound_count; ++i)
        if (map[i] == 0) map[i] = ++next;
    bool changed = false;
    for (std::uint32_t i = 1; i <= h.bound_count; ++i)
        if (map[i] != i) changed = true;
    if (!changed) return false;
    auto r = [&](Var v) { return v.is_bound() ? Var::bound(map[v.index]) : v; };
    for (auto& p : h.spatial) {
        p.source = r(p.source);
        for (auto& v : p.targets) v = r(v);
    }
    for (auto& c : h.calls)
        for (auto& v : c.args) v = r(v);
    for (auto& a : h.pure) a = PureAtom::make(r(a.lhs), r(a.rhs), a.eq);
    return true;
}

}  // namespace

SymbolicHeap canonicalize(const SymbolicHeap& in) {
    SymbolicHeap h = in;
    std::erase_if(h.pure, [](const PureAtom& a) { return a.eq && a.lhs == a.rhs; });
    for (int round = 0; round < 8; ++round) {
        std::sort(h.spatial.begin(), h.spatial.end());
        h.normalize_pure();
        if (!renumber(h)) break;
    }
    std::sort(h.spatial.begin(), h.spatial.end());
    h.normalize_pure();
    return h;
}

namespace {

SymbolicHeap unfold_rec(const Sid& sid, const UnfoldingTree& t) {
    if (!sid.has(t.pred)) throw ModelError("unfold: unknown predicate " + t.pred);
    auto& p = sid.at(t.pred);
    if (t.rule >= p.rules.size()) throw ModelError("unfold: rule index out of range for " + t.pred);
    auto& body = p.rules[t.rule];
    if (body.calls.size() != t.children.size()) throw ModelError("unfold: child count mismatch at " + t.pred);
    std::vector<SymbolicHeap> kids;
    kids.reserve(t.children.size());
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (t.children[i].pred != body.calls[i].pred)
            throw ModelError("unfold: child predicate mismatch at " + t.pred);
        kids.push_back(unfold_rec(sid, t.children[i]));
    }
    return kids.empty() ? body : replace_calls(body, kids);
}

}  // namespace

SymbolicHeap unfold(const Sid& sid, const UnfoldingTree& tree) { return canonicalize(unfold_rec(sid, tree)); }

namespace {

class Enumerator {
public:
    Enumerator(const Sid& sid, std::size_t cap) : sid_(sid), cap_(cap) {}

    const std::vector<SymbolicHeap>& of(const std::string& pred, std::size_t h) {
        auto key = std::make_pair(pred, h);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::set<SymbolicHeap> acc;
        if (h > 0) {
            for (auto& rule : sid_.at(pred).rules) {
                auto us = instantiate(rule, h - 1);
                acc.insert(us.begin(), us.end());
            }
        }
        return memo_[key] = std::vector<SymbolicHeap>(acc.begin(), acc.end());
    }

    std::set<SymbolicHeap> instantiate(const SymbolicHeap& body, std::size_t h) {
        std::set<SymbolicHeap> out;
        if (body.calls.empty()) {
            bump();
            out.insert(canonicalize(body));
            return out;
        }
        std::vector<const std::vector<SymbolicHeap>*> choices;
        for (auto& c : body.calls) {
            if (!sid_.has(c.pred)) throw ModelError("enumerate: unknown predicate " + c.pred);
            choices.push_back(&of(c.pred, h));
            if (choices.back()->empty()) return out;
        }
        std::vector<std::size_t> idx(choices.size(), 0);
        std::vector<SymbolicHeap> pick(choices.size());
        while (true) {
            bump();
            for (std::size_t i = 0; i < idx.size(); ++i) pick[i] = (*choices[i])[idx[i]];
            out.insert(canonicalize(replace_calls(body, pick)));
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == choices[i]->size()) idx[i++] = 0;
            if (i == idx.size()) break;
        }
        return out;
    }

private:
    void bump() {
        if (++count_ > cap_) throw OracleCapExceeded("unfolding enumeration exceeded cap");
    }
    const Sid& sid_;
    std::size_t cap_;
    std::size_t count_ = 0;
    std::map<std::pair<std::string, std::size_t>, std::vector<SymbolicHeap>> memo_;
};

}  // namespace

std::set<SymbolicHeap> enumerate_unfoldings(const Sid& sid, const SymbolicHeap& start, std::size_t max_height,
                                            EnumerateOptions opt) {
    Enumerator e(sid, opt.cap);
    return e.instantiate(start, max_height);
}

std::set<std::string> nonempty_predicates(const Sid& sid) {
    std::set<std::string> r;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& name : sid.order) {
            if (r.count(name)) continue;
            for (auto& rule : sid.at(name).rules) {
                bool ok = std::all_of(rule.calls.begin(), rule.calls.end(),
                                      [&](const PredCall& c) { return r.count(c.pred) != 0; });
                if (ok) {
                    r.insert(name);
                    changed = true;
                    break;
                }
            }
        }
    }
    return r;
}

SymbolicHeap call_heap(const std::string& pred, std::uint32_t arity) {
    SymbolicHeap h;
    h.free_count = arity;
    PredCall c{pred, {}};
    for (std::uint32_t i = 1; i <= arity; ++i) c.args.push_back(Var::free(i));
    h.calls.push_back(std::move(c));
    return h;
}

std::string fresh_pred_name(const Sid& sid, const std::string& base) {
    if (!sid.has(base)) return base;
    for (int i = 1;; ++i) {
        auto n = base + "_" + std::to_string(i);
        if (!sid.has(n)) return n;
    }
}

}  // namespace hauto
