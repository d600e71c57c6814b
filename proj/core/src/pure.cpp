#include "hauto/pure.hpp"

#include <numeric>
#include <stdexcept>

namespace hauto {

namespace {

struct UnionFind {
    std::vector<std::size_t> p;
    explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    std::size_t find(std::size_t x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        p[b] = a;
    }
};

}  // namespace

DefiniteInfo complete(const SymbolicHeap& tau) {
    if (!tau.reduced()) throw std::invalid_argument("complete: heap has predicate calls");
    DefiniteInfo d;
    std::size_t n = tau.var_count();
    d.n_ = n;
    UnionFind uf(n);
    for (auto& a : tau.pure)
        if (a.eq) uf.unite(dense(tau, a.lhs), dense(tau, a.rhs));
    d.cls_.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.cls_[i] = uf.find(i);

    d.neq_.assign(n * n, 0);
    auto mark = [&](std::size_t a, std::size_t b) {
        a = d.cls_[a];
        b = d.cls_[b];
        if (a == b) d.inconsistent = true;
        d.neq_[a * n + b] = d.neq_[b * n + a] = 1;
    };
    for (auto& a : tau.pure)
        if (!a.eq) mark(dense(tau, a.lhs), dense(tau, a.rhs));
    d.alloc_.assign(n, 0);
    for (std::size_t i = 0; i < tau.spatial.size(); ++i) {
        auto s = dense(tau, tau.spatial[i].source);
        mark(s, 0);
        for (std::size_t j = 0; j < i; ++j) mark(s, dense(tau, tau.spatial[j].source));
        d.alloc_[d.cls_[s]] = 1;
    }
    d.pts_.assign(n * n, 0);
    for (auto& p : tau.spatial) {
        auto s = d.cls_[dense(tau, p.source)];
        for (auto t : p.targets) d.pts_[s * n + d.cls_[dense(tau, t)]] = 1;
    }
    d.reach_ = d.pts_;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (d.reach_[i * n + k])
                for (std::size_t j = 0; j < n; ++j)
                    if (d.reach_[k * n + j]) d.reach_[i * n + j] = 1;
    return d;
}

std::vector<PureAtom> DefiniteInfo::closure(const SymbolicHeap& h) const {
    std::vector<PureAtom> out;
    std::size_t n = size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            if (eq(a, b)) out.push_back(PureAtom::make(from_dense(h, a), from_dense(h, b), true));
            if (neq(a, b)) out.push_back(PureAtom::make(from_dense(h, a), from_dense(h, b), false));
        }
    return out;
}

bool definitely_reaches(const SymbolicHeap& tau, Var x, Var y) {
    auto d = complete(tau);
    auto in_range = [&](Var v) {
        return v.is_nil() || (v.is_free() && v.index >= 1 && v.index <= tau.free_count) ||
               (v.is_bound() && v.index >= 1 && v.index <= tau.bound_count);
    };
    if (!in_range(x) || !in_range(y)) throw std::invalid_argument("definitely_reaches: unknown variable");
    return d.reaches(dense(tau, x), dense(tau, y));
}

}  // namespace hauto
