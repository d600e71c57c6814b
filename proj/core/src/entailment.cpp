#include "hauto/entailment.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <mutex>

#include "hauto/model.hpp"
#include "hauto/pure.hpp"
#include "hauto/zoo.hpp"

namespace hauto {

namespace {

constexpr std::uint32_t kWide = 1u << 16;

SymbolicHeap map_vars(const SymbolicHeap& h, const std::function<Var(Var)>& f) {
    SymbolicHeap r = h;
    for (auto& p : r.spatial) {
        p.source = f(p.source);
        for (auto& t : p.targets) t = f(t);
    }
    for (auto& c : r.calls)
        for (auto& a : c.args) a = f(a);
    for (auto& a : r.pure) a = PureAtom{f(a.lhs), f(a.rhs), a.eq};
    r.normalize_pure();
    return r;
}

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

// Spatial part of h with the closed pure part over the free variables and the variables in cells.
SymbolicHeap closed_part(const SymbolicHeap& h, const DefiniteInfo& d) {
    SymbolicHeap r;
    r.free_count = h.free_count;
    auto dense = [&](Var v) -> std::size_t {
        return v.is_nil() ? 0 : v.is_free() ? v.index : h.free_count + v.index;
    };
    // every variable is replaced by the first one it is equal to: nil, then free, then bound
    auto rep = [&](Var v) {
        if (v.is_nil() || d.eq(dense(v), 0)) return Var::nil();
        for (std::uint32_t i = 1; i <= h.free_count; ++i)
            if (d.eq(dense(v), i)) return Var::free(i);
        for (std::uint32_t j = 1; j <= h.bound_count; ++j)
            if (d.eq(dense(v), dense(Var::bound(j)))) return Var::bound(j);
        return v;
    };
    std::map<std::uint32_t, std::uint32_t> bound;
    auto keep = [&](Var v) {
        v = rep(v);
        if (v.is_bound() && !bound.count(v.index)) bound[v.index] = ++r.bound_count;
    };
    for (auto& p : h.spatial) {
        keep(p.source);
        for (auto t : p.targets) keep(t);
    }
    auto rename = [&](Var v) { return v.is_bound() ? Var::bound(bound.at(v.index)) : v; };
    for (auto& p : h.spatial) {
        PointsTo q{rename(rep(p.source)), {}};
        for (auto t : p.targets) q.targets.push_back(rename(rep(t)));
        r.spatial.push_back(std::move(q));
    }
    // pure atoms keep their free variables, so relations among them survive
    for (auto& a : d.closure(h)) {
        auto l = a.lhs.is_bound() ? rep(a.lhs) : a.lhs, rr = a.rhs.is_bound() ? rep(a.rhs) : a.rhs;
        if (l == rr) continue;
        if ((l.is_bound() && !bound.count(l.index)) || (rr.is_bound() && !bound.count(rr.index))) continue;
        r.add_pure(rename(l), rename(rr), a.eq);
    }
    return canonicalize(r);
}

// ---- representation ----

struct ReprState {
    enum Kind { Small, Big, Unsat };
    Kind kind = Small;
    SymbolicHeap rep;
    TrackingState track;
    auto operator<=>(const ReprState&) const = default;
    bool operator==(const ReprState&) const = default;
};

class ReprAutomaton final : public HeapAutomaton {
public:
    explicit ReprAutomaton(SymbolicHeap rhs) : rhs_(std::move(rhs)), limit_(rhs_.spatial.size()) {}
    std::string name() const override { return "repr(" + to_string(rhs_) + ")"; }
    std::uint32_t alpha() const override { return kWide; }
    bool deterministic() const override { return true; }

    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        check_alpha(body, in);
        std::vector<SymbolicHeap> parts;
        bool big = false;
        for (auto q : in) {
            const auto& s = states_.get(q);
            if (s.kind == ReprState::Unsat) return {states_.id({ReprState::Unsat, {}, {}})};
            if (s.kind == ReprState::Small) {
                parts.push_back(s.rep);
            } else {
                parts.push_back(kernel(s.track));
                big = true;
            }
        }
        auto h = parts.empty() ? body : replace_calls(body, parts);
        auto d = complete(h);
        if (d.inconsistent) return {states_.id({ReprState::Unsat, {}, {}})};
        if (big || h.spatial.size() > limit_) return {states_.id({ReprState::Big, {}, tracking_projection(h, d)})};
        return {states_.id({ReprState::Small, closed_part(h, d), {}})};
    }

    bool is_final(StateId q) const override {
        std::lock_guard<std::mutex> lk(mu_);
        if (auto it = final_.find(q); it != final_.end()) return it->second;
        const auto& s = states_.get(q);
        bool f = s.kind == ReprState::Unsat ||
                 (s.kind == ReprState::Small && s.rep.free_count == rhs_.free_count &&
                  sat_reduced(rhs_, generic_model(s.rep)));
        return final_[q] = f;
    }

    std::string describe(StateId q) const override {
        const auto& s = states_.get(q);
        switch (s.kind) {
        case ReprState::Unsat: return "unsat";
        case ReprState::Big: return "big " + to_string(s.track);
        default: return to_string(s.rep);
        }
    }

private:
    SymbolicHeap rhs_;
    std::size_t limit_;
    Interner<ReprState> states_;
    mutable std::mutex mu_;
    mutable std::map<StateId, bool> final_;
};

// ---- calls ----

class CallAutomaton final : public HeapAutomaton {
public:
    CallAutomaton(AutomatonPtr pred, std::vector<Var> args, std::uint32_t arity, std::uint32_t hidden)
        : pred_(std::move(pred)), args_(std::move(args)), arity_(arity), hidden_(hidden),
          wide_(pred_->alpha() >= kWide) {}
    std::string name() const override { return "call(" + pred_->name() + ")"; }
    std::uint32_t alpha() const override { return kWide; }
    bool deterministic() const override { return false; }

    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        check_alpha(body, in);
        std::vector<StateId> inner;
        for (auto q : in) {
            auto& [root, s] = states_.get(q);
            if (root) return {};
            inner.push_back(s);
        }
        if (body.free_count < hidden_) return {};
        for (auto& c : body.calls)
            if (c.args.size() < hidden_) return {};
        std::vector<StateId> out;
        auto run = [&](const SymbolicHeap& b, bool root) {
            try {
                for (auto t : pred_->targets(b, inner)) push_unique(out, states_.id({root, t}));
            } catch (const AlphaViolation&) {
            }
        };
        // a wide predicate automaton sees the trailing variables too, so pins below the root survive
        run(wide_ ? body : hide(body), false);
        if (body.free_count == arity_) run(rearrange(body), true);
        return out;
    }

    bool is_final(StateId q) const override {
        auto& [root, s] = states_.get(q);
        return root && pred_->is_final(s);
    }
    std::string describe(StateId q) const override {
        auto& [root, s] = states_.get(q);
        return (root ? "root " : "") + pred_->describe(s);
    }

private:
    SymbolicHeap drop_trailing(SymbolicHeap h) const {
        for (auto& c : h.calls) c.args.resize(c.args.size() - hidden_);
        return h;
    }
    SymbolicHeap hide(const SymbolicHeap& body) const {
        if (hidden_ == 0) return body;
        std::uint32_t keep = body.free_count - hidden_, bc = body.bound_count;
        auto h = map_vars(body, [&](Var v) {
            if (v.is_free() && v.index > keep) return Var::bound(bc + v.index - keep);
            return v;
        });
        h.free_count = keep;
        h.bound_count = bc + hidden_;
        return drop_trailing(std::move(h));
    }
    SymbolicHeap rearrange(const SymbolicHeap& body) const {
        std::uint32_t bc = body.bound_count;
        auto h = map_vars(body, [&](Var v) { return v.is_free() ? Var::bound(bc + v.index) : v; });
        h.free_count = static_cast<std::uint32_t>(args_.size());
        h.bound_count = bc + body.free_count;
        for (std::uint32_t l = 0; l < args_.size(); ++l) {
            Var a = args_[l].is_free() ? Var::bound(bc + args_[l].index) : args_[l];
            h.add_pure(Var::free(l + 1), a, true);
        }
        return wide_ ? h : drop_trailing(std::move(h));
    }

    AutomatonPtr pred_;
    std::vector<Var> args_;
    std::uint32_t arity_, hidden_;
    bool wide_;
    Interner<std::pair<bool, StateId>> states_;
};

// ---- pure ----

class PureAutomaton final : public HeapAutomaton {
public:
    PureAutomaton(AutomatonPtr inner, std::vector<PureAtom> pi, std::uint32_t alpha)
        : inner_(std::move(inner)), pi_(std::move(pi)), track_(alpha) {}
    std::string name() const override { return "pure(" + inner_->name() + ")"; }
    std::uint32_t alpha() const override { return std::min(inner_->alpha(), track_.alpha()); }
    bool deterministic() const override { return inner_->deterministic(); }

    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        std::vector<StateId> a, t;
        for (auto q : in) {
            auto& [x, y] = states_.get(q);
            a.push_back(x);
            t.push_back(y);
        }
        auto tq = track_.targets(body, t).at(0);
        std::vector<StateId> out;
        for (auto x : inner_->targets(body, a)) push_unique(out, states_.id({x, tq}));
        return out;
    }

    bool is_final(StateId q) const override {
        auto& [x, y] = states_.get(q);
        if (!inner_->is_final(x)) return false;
        const auto& s = track_.state(y);
        if (s.inconsistent) return true;
        for (auto& at : pi_) {
            for (Var v : {at.lhs, at.rhs})
                if (v.is_bound() || (v.is_free() && v.index > s.arity)) return false;
            if (at.eq && at.lhs == at.rhs) continue;
            if (!std::binary_search(s.pure.begin(), s.pure.end(), PureAtom::make(at.lhs, at.rhs, at.eq))) return false;
        }
        return true;
    }
    std::string describe(StateId q) const override {
        auto& [x, y] = states_.get(q);
        return inner_->describe(x) + " / " + track_.describe(y);
    }

private:
    AutomatonPtr inner_;
    std::vector<PureAtom> pi_;
    TrackingAutomaton track_;
    Interner<std::pair<StateId, StateId>> states_;
};

// ---- separating conjunction ----

class SepconAutomaton final : public HeapAutomaton {
public:
    SepconAutomaton(AutomatonPtr a, AutomatonPtr b) : a_(std::move(a)), b_(std::move(b)) {}
    std::string name() const override { return a_->name() + " * " + b_->name(); }
    std::uint32_t alpha() const override { return std::min(a_->alpha(), b_->alpha()); }
    bool deterministic() const override { return false; }

    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        check_alpha(body, in);
        std::vector<StateId> ia, ib;
        for (auto q : in) {
            auto& [x, y] = states_.get(q);
            ia.push_back(x);
            ib.push_back(y);
        }
        std::size_t s = body.spatial.size();
        if (s > 20) throw std::length_error("sepcon: too many points-to assertions to split");
        std::vector<StateId> out;
        for (std::size_t mask = 0; mask < (std::size_t{1} << s); ++mask) {
            SymbolicHeap l = body, r = body;
            l.spatial.clear();
            r.spatial.clear();
            for (std::size_t i = 0; i < s; ++i) ((mask >> i) & 1 ? l : r).spatial.push_back(body.spatial[i]);
            auto ta = a_->targets(l, ia);
            if (ta.empty()) continue;
            auto tb = b_->targets(r, ib);
            for (auto x : ta)
                for (auto y : tb) push_unique(out, states_.id({x, y}));
        }
        return out;
    }

    bool is_final(StateId q) const override {
        auto& [x, y] = states_.get(q);
        return a_->is_final(x) && b_->is_final(y);
    }
    std::string describe(StateId q) const override {
        auto& [x, y] = states_.get(q);
        return "<" + a_->describe(x) + " | " + b_->describe(y) + ">";
    }

private:
    AutomatonPtr a_, b_;
    Interner<std::pair<StateId, StateId>> states_;
};

// ---- existential ----

class ExistsAutomaton final : public HeapAutomaton {
public:
    explicit ExistsAutomaton(AutomatonPtr inner) : inner_(std::move(inner)) {}
    std::string name() const override { return "ex(" + inner_->name() + ")"; }
    std::uint32_t alpha() const override { return inner_->alpha() - 1; }
    bool deterministic() const override { return false; }

    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        check_alpha(body, in);
        std::vector<StateId> inner;
        int pinned = 0;
        for (auto q : in) {
            auto& [p, s] = states_.get(q);
            pinned += p;
            inner.push_back(s);
        }
        if (pinned > 1) return {};
        auto ext = body;
        ext.free_count += 1;
        Var x = Var::free(ext.free_count);
        for (auto& c : ext.calls) c.args.push_back(x);

        std::vector<StateId> out;
        auto run = [&](const SymbolicHeap& b, bool p) {
            for (auto t : inner_->targets(b, inner)) push_unique(out, states_.id({p, t}));
        };
        run(ext, pinned == 1);
        if (pinned == 1) return out;
        for (Var v : body.variables()) {
            if (v.is_bound()) {
                auto h = map_vars(ext, [&](Var w) {
                    if (!w.is_bound()) return w;
                    if (w.index == v.index) return x;
                    return w.index > v.index ? Var::bound(w.index - 1) : w;
                });
                h.bound_count -= 1;
                run(h, true);
            } else {
                auto h = ext;
                h.add_pure(x, v, true);
                run(h, true);
            }
        }
        return out;
    }

    bool is_final(StateId q) const override {
        auto& [p, s] = states_.get(q);
        return p && inner_->is_final(s);
    }
    std::string describe(StateId q) const override {
        auto& [p, s] = states_.get(q);
        return (p ? "pinned " : "free ") + inner_->describe(s);
    }

private:
    AutomatonPtr inner_;
    Interner<std::pair<bool, StateId>> states_;
};

// ---- sll ----

bool is_path(const Model& m, std::uint32_t from, std::uint32_t to) {
    std::set<std::uint32_t> seen;
    for (std::uint32_t cur = from; cur != to;) {
        auto it = m.heap.find(cur);
        if (it == m.heap.end() || it->second.size() != 1 || !seen.insert(cur).second) return false;
        cur = it->second[0];
    }
    return !m.heap.empty() && seen.size() == m.heap.size();
}

// x_i unconstrained w.r.t. nil: test the shape with x_i set to nil
bool path_to_nil_if_null(const SymbolicHeap& tau, std::uint32_t start, std::uint32_t nulled) {
    auto t = tau;
    t.add_pure(Var::free(nulled), Var::nil(), true);
    if (complete(t).inconsistent) return false;
    auto m = generic_model(t);
    return is_path(m, m.stack[start], 0);
}

SymbolicHeap sll_dead(std::uint32_t k) {
    SymbolicHeap h;
    h.free_count = k;
    h.add_pure(Var::nil(), Var::nil(), false);
    return h;
}

// Contracted form over all free variables: list cells between named locations (nil and the
// free variables) are collapsed into single cells, decided relations among the named ones kept.
// Heaps that can never become part of a segment map to sll_dead().
SymbolicHeap sll_normal_form(const SymbolicHeap& tau) {
    auto k = tau.free_count;
    auto d = complete(tau);
    if (d.inconsistent) return sll_dead(k);
    for (auto& p : tau.spatial)
        if (p.targets.size() != 1) return sll_dead(k);
    auto m = generic_model(tau);
    std::map<std::uint32_t, std::uint32_t> next, indeg;
    for (auto& [l, t] : m.heap) {
        next[l] = t[0];
        if (++indeg[t[0]] > 1) return sll_dead(k);
    }
    std::map<std::uint32_t, Var> name{{0, Var::nil()}};
    for (std::uint32_t i = 1; i <= k; ++i) name.emplace(m.stack[i], Var::free(i));
    SymbolicHeap out;
    out.free_count = k;
    std::set<std::uint32_t> seen;
    std::map<std::uint32_t, std::uint32_t> contracted;
    for (auto& [s, v] : name) {
        if (!next.count(s)) continue;
        seen.insert(s);
        auto cur = next[s];
        while (!name.count(cur)) {
            if (!next.count(cur) || !seen.insert(cur).second) return sll_dead(k);
            cur = next[cur];
        }
        contracted[s] = cur;
        out.spatial.push_back({v, {name.at(cur)}});
    }
    if (seen.size() != next.size()) return sll_dead(k);
    for (auto& [s, t] : contracted) {
        std::set<std::uint32_t> path{s};
        for (auto cur = t; contracted.count(cur); cur = contracted[cur])
            if (!path.insert(cur).second) return sll_dead(k);
    }
    for (std::uint32_t i = 0; i <= k; ++i)
        for (std::uint32_t j = i + 1; j <= k; ++j) {
            Var a = i ? Var::free(i) : Var::nil(), b = Var::free(j);
            if (d.decided(i, j)) out.add_pure(a, b, d.eq(i, j));
        }
    return canonicalize(out);
}

bool is_segment(const SymbolicHeap& nf) {
    if (nf.free_count != 2 || complete(nf).inconsistent) return false;
    auto m = generic_model(nf);
    if (m.heap.empty()) return m.stack[1] == m.stack[2];
    return is_path(m, m.stack[1], m.stack[2]);
}

// States are contracted heaps; each state is its own representation. Heaps of any number of
// free variables are processed, only those with exactly two can be final.
class SllAutomaton final : public HeapAutomaton {
public:
    std::string name() const override { return "sll"; }
    std::uint32_t alpha() const override { return kWide; }
    bool deterministic() const override { return true; }
    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        check_alpha(body, in);
        std::vector<SymbolicHeap> reps;
        for (std::size_t i = 0; i < in.size(); ++i) {
            reps.push_back(states_.get(in[i]));
            if (reps.back().free_count != body.calls[i].args.size())
                throw std::invalid_argument("sll: state arity differs from call arity");
        }
        auto h = reps.empty() ? body : replace_calls(body, reps);
        return {states_.id(sll_normal_form(h))};
    }
    bool is_final(StateId q) const override { return is_segment(states_.get(q)); }
    std::string describe(StateId q) const override {
        auto& h = states_.get(q);
        return (h.free_count == 2 ? to_string(sll_classify(h)) + " " : "") + to_string(h);
    }

private:
    Interner<SymbolicHeap> states_;
};

// ---- Myhill-Nerode ----

class ClassAutomaton final : public HeapAutomaton {
public:
    explicit ClassAutomaton(std::shared_ptr<const EquivalenceClassSpec> c) : c_(std::move(c)) {}
    std::string name() const override { return "classes"; }
    std::uint32_t alpha() const override { return c_->arity(); }
    bool deterministic() const override { return true; }
    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        check_alpha(body, in);
        auto k = c_->arity();
        if (body.free_count != k) throw AlphaViolation("classes: heap arity differs from class arity");
        std::vector<SymbolicHeap> reps;
        for (std::size_t i = 0; i < in.size(); ++i) {
            if (body.calls[i].args.size() != k) throw AlphaViolation("classes: call arity differs from class arity");
            reps.push_back(c_->classes().at(in[i]).representative);
        }
        auto h = reps.empty() ? body : replace_calls(body, reps);
        auto cls = c_->classify(h);
        if (!cls) throw IncompleteClasses("no equivalence class contains " + to_string(canonicalize(h)));
        return {static_cast<StateId>(*cls)};
    }
    bool is_final(StateId q) const override { return c_->classes().at(q).final; }
    std::string describe(StateId q) const override { return c_->classes().at(q).name; }

private:
    std::shared_ptr<const EquivalenceClassSpec> c_;
};

std::vector<SymbolicHeap> unfoldings_of_size(const Sid& sid, const std::string& pred, std::uint32_t arity,
                                             std::size_t cells) {
    std::vector<SymbolicHeap> out;
    for (auto& u : enumerate_unfoldings(sid, call_heap(pred, arity), cells + 2))
        if (u.spatial.size() == cells) out.push_back(u);
    return out;
}

}  // namespace

// ---- public ----

Sid well_determine(const Sid& sid) {
    auto sat = build_property_automaton(PropertySpec::of(PropertySpec::Sat), std::max<std::uint32_t>(1, sid.max_arity()));
    return refine(sid, *sat).sid;
}

AutomatonPtr representation_automaton(const SymbolicHeap& rhs) {
    if (!rhs.reduced()) throw std::invalid_argument("representation_automaton: rhs has predicate calls");
    return std::make_shared<ReprAutomaton>(rhs);
}

AutomatonPtr call_automaton(AutomatonPtr pred, std::vector<Var> args, std::uint32_t arity, std::uint32_t hidden) {
    for (auto& a : args)
        if (a.is_bound() || (a.is_free() && a.index > arity))
            throw std::invalid_argument("call_automaton: argument outside the free variables");
    return std::make_shared<CallAutomaton>(std::move(pred), std::move(args), arity, hidden);
}

AutomatonPtr pure_automaton(AutomatonPtr inner, std::vector<PureAtom> pi, std::uint32_t alpha) {
    return std::make_shared<PureAutomaton>(std::move(inner), std::move(pi), alpha);
}

AutomatonPtr sepcon_automaton(AutomatonPtr a, AutomatonPtr b) {
    return std::make_shared<SepconAutomaton>(std::move(a), std::move(b));
}

AutomatonPtr exists_automaton(AutomatonPtr inner) { return std::make_shared<ExistsAutomaton>(std::move(inner)); }

AutomatonPtr build_entailment_automaton(const SymbolicHeap& rhs, const PredAutomata& preds, std::uint32_t alpha) {
    if (rhs.reduced()) return representation_automaton(rhs);
    for (auto& c : rhs.calls)
        if (!preds.count(c.pred)) throw EntailmentPrecondition("no entailment automaton for predicate " + c.pred);

    if (rhs.spatial.empty() && rhs.bound_count == 0 && rhs.pure.empty() && rhs.calls.size() == 1) {
        auto& c = rhs.calls[0];
        bool identity = c.args.size() == rhs.free_count;
        for (std::uint32_t i = 0; identity && i < c.args.size(); ++i) identity = c.args[i] == Var::free(i + 1);
        if (identity) return preds.at(c.pred);
    }

    std::uint32_t m = rhs.bound_count, n = rhs.free_count + m;
    auto lift = [&](Var v) { return v.is_bound() ? Var::free(rhs.free_count + v.index) : v; };
    AutomatonPtr acc;
    auto add = [&](AutomatonPtr a) { acc = acc ? sepcon_automaton(acc, std::move(a)) : std::move(a); };
    if (!rhs.spatial.empty()) {
        SymbolicHeap sigma;
        sigma.free_count = n;
        for (auto& p : rhs.spatial) {
            PointsTo q{lift(p.source), {}};
            for (auto t : p.targets) q.targets.push_back(lift(t));
            sigma.spatial.push_back(std::move(q));
        }
        add(representation_automaton(sigma));
    }
    for (auto& c : rhs.calls) {
        std::vector<Var> args;
        for (auto a : c.args) args.push_back(lift(a));
        add(call_automaton(preds.at(c.pred), std::move(args), n, m));
    }
    if (!rhs.pure.empty()) {
        std::vector<PureAtom> pi;
        for (auto& a : rhs.pure) pi.push_back(PureAtom::make(lift(a.lhs), lift(a.rhs), a.eq));
        acc = pure_automaton(acc, std::move(pi), alpha + m + 1);
    }
    for (std::uint32_t j = 0; j < m; ++j) acc = exists_automaton(acc);
    return acc;
}

AutomatonPtr sll_entailment_automaton() { return std::make_shared<SllAutomaton>(); }


SymbolicHeap sll_representation(SllState q) {
    SymbolicHeap h;
    h.free_count = 2;
    Var x1 = Var::free(1), x2 = Var::free(2), nil = Var::nil();
    switch (q) {
    case SllState::Eq: h.add_pure(x1, x2, true); break;
    case SllState::Diff:
        h.spatial.push_back({x1, {x2}});
        h.add_pure(x2, nil, false);
        h.add_pure(x2, x1, false);
        break;
    case SllState::Rev:
        h.spatial.push_back({x2, {x1}});
        h.add_pure(x1, nil, false);
        h.add_pure(x2, x1, false);
        break;
    case SllState::Fst: h.spatial.push_back({x1, {nil}}); break;
    case SllState::Snd: h.spatial.push_back({x2, {nil}}); break;
    case SllState::Bot: h.add_pure(x1, x1, false); break;
    }
    return h;
}

SllState sll_classify(const SymbolicHeap& tau) {
    if (tau.free_count != 2 || !tau.reduced()) throw AlphaViolation("sll: expects a reduced heap over x1 x2");
    auto d = complete(tau);
    if (d.inconsistent) return SllState::Bot;
    for (auto& p : tau.spatial)
        if (p.targets.size() != 1) return SllState::Bot;
    if (tau.spatial.empty()) return d.eq(1, 2) ? SllState::Eq : SllState::Bot;
    auto m = generic_model(tau);
    auto a = m.stack[1], b = m.stack[2];
    if (d.neq(2, 0) && is_path(m, a, b)) return SllState::Diff;
    if (d.neq(1, 0) && is_path(m, b, a)) return SllState::Rev;
    if (!d.neq(2, 0) && path_to_nil_if_null(tau, 1, 2)) return SllState::Fst;
    if (!d.neq(1, 0) && path_to_nil_if_null(tau, 2, 1)) return SllState::Snd;
    return SllState::Bot;
}

std::string to_string(SllState q) {
    switch (q) {
    case SllState::Eq: return "q_eq";
    case SllState::Diff: return "q_neq";
    case SllState::Rev: return "q_rev";
    case SllState::Fst: return "q_fst";
    case SllState::Snd: return "q_snd";
    case SllState::Bot: return "q_bot";
    }
    return "?";
}

struct EquivalenceClassSpec::Cache {
    std::mutex mu;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<SymbolicHeap>> by_size;
};

EquivalenceClassSpec::EquivalenceClassSpec(Sid sid, const std::map<std::string, std::set<std::string>>& annotations)
    : sid_(std::move(sid)), cache_(std::make_shared<Cache>()) {
    auto has = [&](const std::string& p, const char* a) {
        auto it = annotations.find(p);
        return it != annotations.end() && it->second.count(a);
    };
    bool first = true;
    for (auto& p : sid_.order) {
        if (has(p, "aux")) continue;
        auto arity = sid_.at(p).arity;
        if (first) arity_ = arity;
        if (arity != arity_) throw std::invalid_argument("classes: predicate " + p + " has a different arity");
        first = false;
        std::optional<SymbolicHeap> best;
        for (std::size_t h = 1; h <= 4 && !best; ++h) {
            for (auto& u : enumerate_unfoldings(sid_, call_heap(p, arity), h)) {
                auto key = [](const SymbolicHeap& x) { return std::make_pair(x.spatial.size(), x.bound_count); };
                if (!best || key(u) < key(*best)) best = u;
            }
        }
        if (!best) throw std::invalid_argument("classes: predicate " + p + " has no unfolding");
        classes_.push_back({p, *best, has(p, "final"), has(p, "sink")});
    }
    if (classes_.empty()) throw std::invalid_argument("classes: no class predicates");
}

bool EquivalenceClassSpec::member(std::size_t cls, const Model& m) const {
    const std::vector<SymbolicHeap>* us;
    {
        std::lock_guard<std::mutex> lk(cache_->mu);
        auto key = std::make_pair(cls, m.heap.size());
        auto it = cache_->by_size.find(key);
        if (it == cache_->by_size.end())
            it = cache_->by_size.emplace(key, unfoldings_of_size(sid_, classes_[cls].name, arity_, m.heap.size())).first;
        us = &it->second;
    }
    for (auto& u : *us)
        if (sat_reduced(u, m)) return true;
    return false;
}

std::optional<std::size_t> EquivalenceClassSpec::classify(const SymbolicHeap& tau) const {
    if (tau.free_count != arity_) return std::nullopt;
    std::optional<std::size_t> sink;
    for (std::size_t i = 0; i < classes_.size() && !sink; ++i)
        if (classes_[i].sink) sink = i;
    if (complete(tau).inconsistent) {
        for (std::size_t i = 0; i < classes_.size(); ++i)
            if (complete(classes_[i].representative).inconsistent) return i;
        return sink;
    }
    auto m = generic_model(tau);
    for (std::size_t i = 0; i < classes_.size(); ++i)
        if (!classes_[i].sink && member(i, m)) return i;
    return sink;
}

AutomatonPtr myhill_nerode_automaton(std::shared_ptr<const EquivalenceClassSpec> classes) {
    return std::make_shared<ClassAutomaton>(std::move(classes));
}

EntailmentResult decide_entailment(const EntailmentQuery& q) {
    if (q.lhs.free_count != q.rhs.free_count)
        throw EntailmentPrecondition("lhs and rhs have different numbers of free variables");
    for (auto* h : {&q.lhs, &q.rhs}) {
        auto diags = validate_heap(q.sid, *h);
        if (!diags.empty()) throw EntailmentPrecondition(diags.front().message);
    }
    auto est = PropertySpec::of(PropertySpec::Established);
    for (auto& p : q.sid.order)
        if (!check_property(q.sid, call_heap(p, q.sid.at(p).arity), est, Mode::ForAll))
            throw EntailmentPrecondition("predicate " + p + " is not established");
    if (!check_property(q.sid, q.lhs, est, Mode::ForAll)) throw EntailmentPrecondition("lhs is not established");
    if (q.strict) {
        for (auto* h : {&q.lhs, &q.rhs})
            for (auto& u : enumerate_unfoldings(q.sid, *h, 3))
                if (!is_determined(u)) throw EntailmentPrecondition("not determined: " + to_string(u));
    }

    Sid omega = q.sid;
    auto name = wrap_formula(omega, q.lhs, "lhs");
    Sid wd = well_determine(omega);
    EntailmentResult res;
    if (!wd.has(name) || wd.at(name).rules.empty()) {
        res.holds = true;
        return res;
    }
    auto alpha = std::max<std::uint32_t>({omega.max_arity(), q.lhs.free_count, 1});
    auto a = complement(build_entailment_automaton(q.rhs, q.pred_automata, alpha));
    auto r = decide_nonempty(wd, name, *a);
    res.holds = !r.nonempty;
    res.states_discovered = r.states_discovered();
    return res;
}

}  // namespace hauto
