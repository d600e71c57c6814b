#include "hauto/semantics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "hauto/pure.hpp"

namespace hauto {

namespace {

constexpr std::int64_t kUnknown = -1;

class Matcher {
public:
    Matcher(const SymbolicHeap& tau, const Model& m) : tau_(tau), m_(m), vals_(tau.var_count(), kUnknown) {
        vals_[0] = 0;
        for (std::uint32_t i = 1; i <= tau.free_count; ++i) vals_[i] = m.stack[i];
        for (auto& [loc, _] : m.heap) cells_.push_back(loc);
        used_.assign(cells_.size(), 0);
        done_.assign(tau.spatial.size(), 0);
    }

    bool run() { return match(0); }

private:
    std::size_t d(Var v) const { return dense(tau_, v); }

    bool bind(std::size_t var, std::int64_t value, std::vector<std::size_t>& trail) {
        if (vals_[var] == kUnknown) {
            vals_[var] = value;
            trail.push_back(var);
            return true;
        }
        return vals_[var] == value;
    }

    void undo(std::vector<std::size_t>& trail) {
        for (auto v : trail) vals_[v] = kUnknown;
        trail.clear();
    }

    bool try_cell(std::size_t atom, std::size_t cell) {
        auto& p = tau_.spatial[atom];
        auto& tuple = m_.heap.at(cells_[cell]);
        if (tuple.size() != p.targets.size()) return false;
        std::vector<std::size_t> trail;
        bool ok = bind(d(p.source), cells_[cell], trail);
        for (std::size_t k = 0; ok && k < tuple.size(); ++k) ok = bind(d(p.targets[k]), tuple[k], trail);
        if (ok) {
            used_[cell] = 1;
            done_[atom] = 1;
            ok = match(matched_ + 1);
            used_[cell] = 0;
            done_[atom] = 0;
        }
        undo(trail);
        return ok;
    }

    bool match(std::size_t matched) {
        auto saved = matched_;
        matched_ = matched;
        struct Restore {
            std::size_t& ref;
            std::size_t val;
            ~Restore() { ref = val; }
        } restore{matched_, saved};
        if (matched == tau_.spatial.size()) return pure_ok();
        // prefer an atom whose source is already known
        std::size_t pick = tau_.spatial.size();
        for (std::size_t i = 0; i < tau_.spatial.size(); ++i) {
            if (done_[i]) continue;
            if (pick == tau_.spatial.size()) pick = i;
            if (vals_[d(tau_.spatial[i].source)] != kUnknown) {
                pick = i;
                break;
            }
        }
        auto src = vals_[d(tau_.spatial[pick].source)];
        for (std::size_t c = 0; c < cells_.size(); ++c) {
            if (used_[c]) continue;
            if (src != kUnknown && static_cast<std::int64_t>(cells_[c]) != src) continue;
            if (try_cell(pick, c)) return true;
        }
        return false;
    }

    bool pure_ok() const {
        std::size_t n = vals_.size();
        std::vector<std::size_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
            return parent[x] == x ? x : parent[x] = find(parent[x]);
        };
        std::vector<std::int64_t> cval(vals_);
        for (auto& a : tau_.pure) {
            if (!a.eq) continue;
            auto x = find(d(a.lhs)), y = find(d(a.rhs));
            if (x == y) continue;
            if (cval[x] != kUnknown && cval[y] != kUnknown && cval[x] != cval[y]) return false;
            parent[y] = x;
            if (cval[x] == kUnknown) cval[x] = cval[y];
        }
        for (auto& a : tau_.pure) {
            if (a.eq) continue;
            auto x = find(d(a.lhs)), y = find(d(a.rhs));
            if (x == y) return false;
            if (cval[x] != kUnknown && cval[x] == cval[y]) return false;
        }
        return true;
    }

    const SymbolicHeap& tau_;
    const Model& m_;
    std::vector<std::int64_t> vals_;
    std::vector<std::uint32_t> cells_;
    std::vector<char> used_, done_;
    std::size_t matched_ = 0;
};

Model relabel(const Model& m, const std::map<std::uint32_t, std::uint32_t>& ren) {
    Model out;
    out.stack.clear();
    for (auto v : m.stack) out.stack.push_back(v == 0 ? 0 : ren.at(v));
    for (auto& [loc, tuple] : m.heap) {
        std::vector<std::uint32_t> t;
        for (auto v : tuple) t.push_back(v == 0 ? 0 : ren.at(v));
        out.heap[ren.at(loc)] = std::move(t);
    }
    return out;
}

// Names values reachable from `seeds` in breadth-first order, continuing `ren`.
void name_from(const Model& m, std::vector<std::uint32_t> seeds, std::map<std::uint32_t, std::uint32_t>& ren) {
    std::vector<std::uint32_t> queue;
    auto name = [&](std::uint32_t v) {
        if (v == 0 || ren.count(v)) return;
        auto id = static_cast<std::uint32_t>(ren.size() + 1);
        ren[v] = id;
        queue.push_back(v);
    };
    for (auto v : seeds) name(v);
    for (std::size_t i = 0; i < queue.size(); ++i) {
        auto it = m.heap.find(queue[i]);
        if (it == m.heap.end()) continue;
        for (auto t : it->second) name(t);
    }
}

}  // namespace

bool sat_reduced(const SymbolicHeap& tau, const Model& m) {
    if (!tau.reduced()) throw std::invalid_argument("sat_reduced: heap has predicate calls");
    if (m.stack.size() != tau.free_count + 1) throw std::invalid_argument("sat_reduced: stack domain mismatch");
    if (m.heap.count(0)) return false;
    if (m.heap.size() != tau.spatial.size()) return false;
    return Matcher(tau, m).run();
}

Model canonical_model(const Model& m) {
    std::map<std::uint32_t, std::uint32_t> base;
    name_from(m, std::vector<std::uint32_t>(m.stack.begin() + 1, m.stack.end()), base);
    std::vector<std::uint32_t> rest;
    for (auto& [loc, _] : m.heap)
        if (!base.count(loc)) rest.push_back(loc);
    if (rest.empty()) return relabel(m, base);
    std::optional<Model> best;
    auto consider = [&](const std::vector<std::uint32_t>& order) {
        auto ren = base;
        for (auto r : order) name_from(m, {r}, ren);
        auto c = relabel(m, ren);
        if (!best || c < *best) best = std::move(c);
    };
    if (rest.size() <= 6) {
        std::sort(rest.begin(), rest.end());
        do consider(rest);
        while (std::next_permutation(rest.begin(), rest.end()));
    } else {
        consider(rest);
    }
    return *best;
}

std::vector<Model> tight_models_bounded(const SymbolicHeap& tau, ModelSearchOptions opt) {
    if (!tau.reduced()) throw std::invalid_argument("tight_models_bounded: heap has predicate calls");
    std::size_t n = tau.var_count();
    std::uint32_t bound = static_cast<std::uint32_t>(tau.spatial.size() + n);
    std::vector<std::uint32_t> val(n, 0);
    std::vector<std::vector<const PureAtom*>> atoms_at(n);
    for (auto& a : tau.pure) {
        auto i = std::max(dense(tau, a.lhs), dense(tau, a.rhs));
        atoms_at[i].push_back(&a);
    }
    std::set<Model> out;
    std::size_t visited = 0;
    std::function<void(std::size_t, std::uint32_t)> go = [&](std::size_t i, std::uint32_t maxv) {
        if (++visited > opt.cap) throw std::runtime_error("tight_models_bounded: cap exceeded");
        if (i == n) {
            Model m;
            m.stack.assign(val.begin(), val.begin() + tau.free_count + 1);
            for (auto& p : tau.spatial) {
                auto s = val[dense(tau, p.source)];
                if (s == 0 || m.heap.count(s)) return;
                std::vector<std::uint32_t> t;
                for (auto v : p.targets) t.push_back(val[dense(tau, v)]);
                m.heap[s] = std::move(t);
            }
            out.insert(canonical_model(m));
            return;
        }
        for (std::uint32_t v = 0; v <= std::min(maxv + 1, bound); ++v) {
            val[i] = v;
            bool ok = true;
            for (auto* a : atoms_at[i]) {
                bool same = val[dense(tau, a->lhs)] == val[dense(tau, a->rhs)];
                if (same != a->eq) {
                    ok = false;
                    break;
                }
            }
            if (ok) go(i + 1, std::max(maxv, v));
        }
    };
    bool nil_ok = true;
    for (auto* a : atoms_at[0])
        if (!a->eq) nil_ok = false;
    if (nil_ok) go(1, 0);
    return {out.begin(), out.end()};
}

namespace {

Model model_of_blocks(const SymbolicHeap& tau, const DefiniteInfo& d, const std::vector<std::uint32_t>& value_of_cls) {
    Model m;
    m.stack.assign(tau.free_count + 1, 0);
    for (std::uint32_t i = 1; i <= tau.free_count; ++i) m.stack[i] = value_of_cls[d.cls(i)];
    for (auto& p : tau.spatial) {
        std::vector<std::uint32_t> t;
        for (auto v : p.targets) t.push_back(value_of_cls[d.cls(dense(tau, v))]);
        m.heap[value_of_cls[d.cls(dense(tau, p.source))]] = std::move(t);
    }
    return m;
}

}  // namespace

std::vector<Model> models_up_to_iso(const SymbolicHeap& tau) {
    if (!tau.reduced()) throw std::invalid_argument("models_up_to_iso: heap has predicate calls");
    auto d = complete(tau);
    if (d.inconsistent) return {};
    std::vector<std::size_t> classes;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d.cls(i) == i) classes.push_back(i);
    // classes[0] is nil's class (index 0 is always its own root)
    std::vector<std::vector<std::size_t>> blocks{{classes[0]}};
    std::vector<std::uint32_t> value_of_cls(d.size(), 0);
    std::set<Model> out;
    std::function<void(std::size_t)> go = [&](std::size_t k) {
        if (k == classes.size()) {
            for (std::size_t b = 0; b < blocks.size(); ++b)
                for (auto c : blocks[b]) value_of_cls[c] = static_cast<std::uint32_t>(b);
            out.insert(canonical_model(model_of_blocks(tau, d, value_of_cls)));
            return;
        }
        auto c = classes[k];
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            bool ok = std::none_of(blocks[b].begin(), blocks[b].end(), [&](std::size_t e) { return d.neq(c, e); });
            if (!ok) continue;
            blocks[b].push_back(c);
            go(k + 1);
            blocks[b].pop_back();
        }
        blocks.push_back({c});
        go(k + 1);
        blocks.pop_back();
    };
    go(1);
    return {out.begin(), out.end()};
}

Model generic_model(const SymbolicHeap& tau) {
    auto d = complete(tau);
    if (d.inconsistent) throw PreconditionError("generic_model: heap is unsatisfiable");
    std::vector<std::uint32_t> value_of_cls(d.size(), 0);
    std::uint32_t next = 1;
    for (std::size_t i = 1; i < d.size(); ++i)
        if (d.cls(i) == i && d.cls(i) != d.cls(0)) value_of_cls[i] = next++;
    return canonical_model(model_of_blocks(tau, d, value_of_cls));
}

bool is_determined(const SymbolicHeap& tau) {
    auto d = complete(tau);
    if (d.inconsistent) return true;
    for (std::size_t a = 0; a < d.size(); ++a)
        for (std::size_t b = a + 1; b < d.size(); ++b)
            if (!d.decided(a, b)) return false;
    return true;
}

bool entails_reduced(const SymbolicHeap& tau1, const SymbolicHeap& tau2) {
    if (tau1.free_count != tau2.free_count) throw PreconditionError("entails_reduced: free variable count differs");
    if (!is_determined(tau1)) throw PreconditionError("entails_reduced: left-hand side is not determined");
    if (complete(tau1).inconsistent) throw PreconditionError("entails_reduced: left-hand side is unsatisfiable");
    return sat_reduced(tau2, generic_model(tau1));
}

bool entails_all_models(const SymbolicHeap& tau1, const SymbolicHeap& tau2) {
    if (tau1.free_count != tau2.free_count)
        throw PreconditionError("entails_all_models: free variable count differs");
    for (auto& m : models_up_to_iso(tau1))
        if (!sat_reduced(tau2, m)) return false;
    return true;
}

std::string to_string(const Model& m) {
    std::ostringstream os;
    os << "s={";
    for (std::size_t i = 1; i < m.stack.size(); ++i) os << (i > 1 ? ", " : "") << "x" << i << ":" << m.stack[i];
    os << "} h={";
    bool first = true;
    for (auto& [l, t] : m.heap) {
        os << (first ? "" : ", ") << l << "->(";
        for (std::size_t k = 0; k < t.size(); ++k) os << (k ? "," : "") << t[k];
        os << ')';
        first = false;
    }
    os << '}';
    return os.str();
}

}  // namespace hauto
