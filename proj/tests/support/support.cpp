#include "support.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace hauto::test {

std::string fixture_path(const std::string& name) { return std::string(HAUTO_FIXTURE_DIR) + "/" + name; }

SidDocument fixture(const std::string& name) { return load_document(fixture_path(name)); }

Sid fixture_sid(const std::string& name) { return fixture(name).sid; }

SymbolicHeap heap(const std::string& text, const Sid& sid) {
    auto doc = parse_document(text, "<test>", &sid);
    if (!doc.query) throw std::runtime_error("no query in test heap: " + text);
    return *doc.query;
}

Sid sid_of(const std::string& text) { return parse_document(text, "<test>").sid; }

namespace {

template <class T>
T pick(Rng& rng, T lo, T hi) {
    return std::uniform_int_distribution<T>(lo, hi)(rng);
}

Var any_var(Rng& rng, std::uint32_t fv, std::uint32_t bv) {
    auto i = pick<std::uint32_t>(rng, 0, fv + bv);
    if (i == 0) return Var::nil();
    if (i <= fv) return Var::free(i);
    return Var::bound(i - fv);
}

Var non_nil(Rng& rng, std::uint32_t fv, std::uint32_t bv) {
    if (fv + bv == 0) return Var::nil();
    auto i = pick<std::uint32_t>(rng, 1, fv + bv);
    return i <= fv ? Var::free(i) : Var::bound(i - fv);
}

void add_pure(Rng& rng, SymbolicHeap& h, std::size_t max_pure) {
    auto k = pick<std::size_t>(rng, 0, max_pure);
    for (std::size_t i = 0; i < k; ++i) {
        auto a = any_var(rng, h.free_count, h.bound_count);
        auto b = any_var(rng, h.free_count, h.bound_count);
        if (a == b) continue;
        h.add_pure(a, b, pick<int>(rng, 0, 1) == 0);
    }
}

}  // namespace

SymbolicHeap random_heap(Rng& rng, const HeapShape& s) {
    SymbolicHeap h;
    h.free_count = pick<std::uint32_t>(rng, s.min_free, s.max_free);
    h.bound_count = pick<std::uint32_t>(rng, 0, s.max_bound);
    auto k = pick<std::size_t>(rng, 0, s.max_spatial);
    for (std::size_t i = 0; i < k; ++i) {
        PointsTo p{non_nil(rng, h.free_count, h.bound_count), {}};
        auto f = pick<std::size_t>(rng, s.min_fields, s.max_fields);
        for (std::size_t j = 0; j < f; ++j) p.targets.push_back(any_var(rng, h.free_count, h.bound_count));
        h.spatial.push_back(std::move(p));
    }
    add_pure(rng, h, s.max_pure);
    return h;
}

SymbolicHeap random_body(Rng& rng, const Sid& sid, std::uint32_t arity, const SidShape& s) {
    SymbolicHeap h;
    h.free_count = arity;
    h.bound_count = pick<std::uint32_t>(rng, 0, s.max_bound);
    auto k = pick<std::size_t>(rng, 0, s.max_spatial);
    for (std::size_t i = 0; i < k; ++i) {
        PointsTo p{non_nil(rng, h.free_count, h.bound_count), {}};
        if (p.source.is_nil()) break;
        for (std::size_t j = 0; j < s.fields; ++j) p.targets.push_back(any_var(rng, h.free_count, h.bound_count));
        h.spatial.push_back(std::move(p));
    }
    auto c = pick<std::size_t>(rng, 0, s.max_calls);
    for (std::size_t i = 0; i < c && !sid.order.empty(); ++i) {
        auto& name = sid.order[pick<std::size_t>(rng, 0, sid.order.size() - 1)];
        PredCall call{name, {}};
        for (std::uint32_t j = 0; j < sid.at(name).arity; ++j) call.args.push_back(any_var(rng, h.free_count, h.bound_count));
        h.calls.push_back(std::move(call));
    }
    add_pure(rng, h, s.max_pure);
    return h;
}

Sid random_sid(Rng& rng, const SidShape& s) {
    Sid sid;
    auto n = pick<std::size_t>(rng, 1, s.max_preds);
    for (std::size_t i = 0; i < n; ++i)
        sid.declare("P" + std::to_string(i + 1), pick<std::uint32_t>(rng, 1, s.max_arity));
    for (std::size_t i = 0; i < n; ++i) {
        auto name = "P" + std::to_string(i + 1);
        auto arity = sid.at(name).arity;
        auto rules = pick<std::size_t>(rng, 1, s.max_rules);
        for (std::size_t r = 0; r < rules; ++r) {
            auto shape = s;
            if (r == 0 && i == 0 && s.base_first) shape.max_calls = 0;
            sid.add_rule(name, arity, random_body(rng, sid, arity, shape));
        }
    }
    return sid;
}

SymbolicHeap random_call_body(Rng& rng, std::uint32_t arity, const std::vector<std::uint32_t>& call_arities,
                              const HeapShape& shape) {
    auto h = random_heap(rng, shape);
    h.free_count = arity;
    // re-draw variables so they fit the requested arity
    auto fix = [&](Var& v) {
        if (v.is_free() && v.index > arity) v = arity ? Var::free(pick<std::uint32_t>(rng, 1, arity)) : Var::nil();
    };
    for (auto& p : h.spatial) {
        fix(p.source);
        if (p.source.is_nil()) p.source = h.bound_count ? Var::bound(1) : (arity ? Var::free(1) : Var::nil());
        for (auto& t : p.targets) fix(t);
    }
    h.spatial.erase(std::remove_if(h.spatial.begin(), h.spatial.end(), [](auto& p) { return p.source.is_nil(); }),
                    h.spatial.end());
    auto pure = h.pure;
    h.pure.clear();
    for (auto a : pure) {
        fix(a.lhs);
        fix(a.rhs);
        if (a.lhs != a.rhs) h.add_pure(a.lhs, a.rhs, a.eq);
    }
    for (std::size_t i = 0; i < call_arities.size(); ++i) {
        PredCall c{"P" + std::to_string(i + 1), {}};
        for (std::uint32_t j = 0; j < call_arities[i]; ++j) c.args.push_back(any_var(rng, h.free_count, h.bound_count));
        h.calls.push_back(std::move(c));
    }
    return h;
}

UnfoldingTree random_tree(Rng& rng, const Sid& sid, const std::string& pred, std::size_t max_height) {
    auto& p = sid.at(pred);
    std::vector<std::size_t> ok;
    for (std::size_t r = 0; r < p.rules.size(); ++r)
        if (max_height > 1 || p.rules[r].calls.empty()) ok.push_back(r);
    if (ok.empty()) throw std::runtime_error("random_tree: no rule fits");
    UnfoldingTree t{pred, ok[pick<std::size_t>(rng, 0, ok.size() - 1)], {}};
    for (auto& c : p.rules[t.rule].calls) t.children.push_back(random_tree(rng, sid, c.pred, max_height - 1));
    return t;
}

std::vector<FullModel> brute_models(const SymbolicHeap& tau) {
    std::size_t n = tau.var_count();
    std::vector<FullModel> out;
    std::vector<std::uint32_t> val(n, 0);
    std::function<void(std::size_t, std::uint32_t)> go = [&](std::size_t i, std::uint32_t top) {
        if (i == n) {
            for (auto& a : tau.pure)
                if ((val[dense(tau, a.lhs)] == val[dense(tau, a.rhs)]) != a.eq) return;
            FullModel m{val, {}};
            for (auto& p : tau.spatial) {
                auto s = val[dense(tau, p.source)];
                if (s == 0 || m.heap.count(s)) return;
                std::vector<std::uint32_t> t;
                for (auto v : p.targets) t.push_back(val[dense(tau, v)]);
                m.heap[s] = t;
            }
            out.push_back(std::move(m));
            return;
        }
        for (std::uint32_t v = 0; v <= top + 1; ++v) {
            val[i] = v;
            go(i + 1, std::max(top, v));
        }
    };
    go(1, 0);
    return out;
}

BruteRelations brute_relations(const SymbolicHeap& tau) {
    BruteRelations r;
    r.n = tau.var_count();
    auto n = r.n;
    r.eq.assign(n * n, 1);
    r.neq.assign(n * n, 1);
    r.pts.assign(n * n, 1);
    r.reach.assign(n * n, 1);
    r.alloc.assign(n, 1);
    auto models = brute_models(tau);
    r.satisfiable = !models.empty();
    for (auto& m : models) {
        // reachability over locations by paths of length >= 1
        std::map<std::uint32_t, std::set<std::uint32_t>> succ;
        for (auto& [l, ts] : m.heap) succ[l].insert(ts.begin(), ts.end());
        auto reach_from = [&](std::uint32_t l) {
            std::set<std::uint32_t> seen;
            std::vector<std::uint32_t> stack(succ[l].begin(), succ[l].end());
            while (!stack.empty()) {
                auto x = stack.back();
                stack.pop_back();
                if (!seen.insert(x).second) continue;
                if (auto it = succ.find(x); it != succ.end()) stack.insert(stack.end(), it->second.begin(), it->second.end());
            }
            return seen;
        };
        for (std::size_t a = 0; a < n; ++a) {
            auto va = m.val[a];
            auto cell = m.heap.find(va);
            if (cell == m.heap.end()) r.alloc[a] = 0;
            auto reach = reach_from(va);
            for (std::size_t b = 0; b < n; ++b) {
                auto vb = m.val[b];
                if (va != vb) r.eq[a * n + b] = 0;
                if (va == vb) r.neq[a * n + b] = 0;
                bool pts = cell != m.heap.end() &&
                           std::find(cell->second.begin(), cell->second.end(), vb) != cell->second.end();
                if (!pts) r.pts[a * n + b] = 0;
                if (!reach.count(vb)) r.reach[a * n + b] = 0;
            }
        }
    }
    return r;
}

Model restrict_model(const SymbolicHeap& tau, const FullModel& m) {
    Model out;
    out.stack.assign(m.val.begin(), m.val.begin() + tau.free_count + 1);
    out.heap = m.heap;
    return out;
}

std::size_t pumping_height(const Sid& sid, const SymbolicHeap& phi, const HeapAutomaton& a) {
    Sid s = sid;
    auto q = wrap_formula(s, phi);
    NonemptyOptions opt;
    opt.early_exit = false;
    opt.record_transitions = true;
    auto res = decide_nonempty(s, q, a, opt);
    // least tree height deriving each (predicate, state) pair
    std::map<std::pair<std::string, StateId>, std::size_t> height;
    for (bool changed = true; changed;) {
        changed = false;
        for (auto& [p, rule, in, out] : res.transitions) {
            auto& body = s.at(p).rules[rule];
            std::size_t h = 1;
            bool known = true;
            for (std::size_t i = 0; i < in.size() && known; ++i) {
                auto it = height.find({body.calls[i].pred, in[i]});
                known = it != height.end();
                if (known) h = std::max(h, it->second + 1);
            }
            if (!known) continue;
            for (auto t : out) {
                auto [it, fresh] = height.try_emplace({p, t}, h);
                if (fresh || h < it->second) {
                    it->second = h;
                    changed = true;
                }
            }
        }
    }
    std::size_t best = 1;
    for (auto& [key, h] : height)
        if (key.first == q) best = std::max(best, h);
    return best;
}

std::string check_compositional(const HeapAutomaton& a, const SymbolicHeap& phi,
                                const std::vector<SymbolicHeap>& taus) {
    std::vector<std::vector<StateId>> per_call;
    for (auto& t : taus) per_call.push_back(reduced_targets(a, t));
    std::set<StateId> left;
    std::vector<std::size_t> idx(taus.size(), 0);
    bool empty = std::any_of(per_call.begin(), per_call.end(), [](auto& v) { return v.empty(); });
    while (!empty) {
        std::vector<StateId> in;
        for (std::size_t i = 0; i < idx.size(); ++i) in.push_back(per_call[i][idx[i]]);
        for (auto q : a.targets(phi, in)) left.insert(q);
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == per_call[i].size()) idx[i++] = 0;
        if (i == idx.size()) break;
    }
    auto flat = replace_calls(phi, taus);
    auto rt = reduced_targets(a, flat);
    std::set<StateId> right(rt.begin(), rt.end());
    if (left == right) return {};
    std::ostringstream os;
    os << a.name() << ": phi = " << to_string(phi);
    for (auto& t : taus) os << "\n  tau = " << to_string(t);
    os << "\n  flat = " << to_string(flat) << "\n  via calls:";
    for (auto q : left) os << ' ' << a.describe(q);
    os << "\n  direct:";
    for (auto q : right) os << ' ' << a.describe(q);
    return os.str();
}

static SymbolicHeap perturbed_list(Rng& rng, const Sid& sll, std::size_t max_height);

SymbolicHeap determinize(const SymbolicHeap& tau) {
    auto d = complete(tau);
    auto out = tau;
    if (d.inconsistent) return out;
    auto n = tau.var_count();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (!d.decided(a, b)) out.add_pure(from_dense(tau, a), from_dense(tau, b), false);
    return out;
}

SymbolicHeap random_list_heap(Rng& rng, std::size_t max_height) {
    static const Sid sll = fixture_sid("sll.hrs");
    for (;;) {
        auto h = perturbed_list(rng, sll, max_height);
        if (!complete(h).inconsistent) return h;
    }
}

static SymbolicHeap perturbed_list(Rng& rng, const Sid& sll, std::size_t max_height) {
    auto t = random_tree(rng, sll, "sll", pick<std::size_t>(rng, 1, max_height));
    auto h = unfold(sll, t);
    auto vars = [&] { return any_var(rng, h.free_count, h.bound_count); };
    switch (pick<int>(rng, 0, 5)) {
    case 0:  // redirect one pointer
        if (!h.spatial.empty()) h.spatial[pick<std::size_t>(rng, 0, h.spatial.size() - 1)].targets[0] = vars();
        break;
    case 1:  // extra cell
        h.spatial.push_back({non_nil(rng, h.free_count, h.bound_count), {vars()}});
        break;
    case 2: {  // extra pure atom
        auto a = vars(), b = vars();
        if (a != b) h.add_pure(a, b, pick<int>(rng, 0, 1) == 0);
        break;
    }
    case 3:  // swap the roles of x1 and x2
        for (auto& p : h.spatial) {
            for (Var* v : {&p.source, &p.targets[0]})
                if (v->is_free()) *v = Var::free(3 - v->index);
        }
        {
            auto pure = h.pure;
            h.pure.clear();
            for (auto a : pure) {
                for (Var* v : {&a.lhs, &a.rhs})
                    if (v->is_free()) *v = Var::free(3 - v->index);
                h.add_pure(a.lhs, a.rhs, a.eq);
            }
        }
        break;
    default: break;
    }
    return determinize(canonicalize(h));
}

bool entails_by_models(const Sid& sid, const SymbolicHeap& tau, const SymbolicHeap& phi) {
    auto vs = enumerate_unfoldings(sid, phi, tau.spatial.size() + 2);
    for (auto& m : brute_models(tau)) {
        auto fm = restrict_model(tau, m);
        bool some = std::any_of(vs.begin(), vs.end(), [&](auto& v) { return sat_reduced(v, fm); });
        if (!some) return false;
    }
    return true;
}

std::vector<Reduction> lower_bound_reductions(const Sid& sid, const std::string& p) {
    using K = PropertySpec;
    auto k = sid.at(p).arity;
    PredCall call{p, {}};
    for (std::uint32_t i = 1; i <= k; ++i) call.args.push_back(Var::bound(i));
    std::vector<Reduction> out;

    SymbolicHeap est;
    est.free_count = 1;
    est.bound_count = k + 1;
    est.calls.push_back(call);
    est.add_pure(Var::free(1), Var::nil(), true);
    est.add_pure(Var::bound(k + 1), Var::nil(), false);
    out.push_back({est, K::of(K::Established)});

    SymbolicHeap reach;
    reach.free_count = 2;
    reach.bound_count = k;
    reach.spatial.push_back({Var::free(1), {Var::nil()}});
    reach.calls.push_back(call);
    reach.add_pure(Var::free(2), Var::nil(), false);
    auto rs = K::of(K::Reach);
    rs.reach = {{1, 2}};
    rs.reach_superset = true;
    out.push_back({reach, rs});

    SymbolicHeap ac;
    ac.free_count = 1;
    ac.bound_count = k;
    ac.spatial.push_back({Var::free(1), {Var::free(1)}});
    ac.calls.push_back(call);
    out.push_back({ac, K::of(K::WeaklyAcyclic)});
    return out;
}

}  // namespace hauto::test
