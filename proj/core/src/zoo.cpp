#include "hauto/zoo.hpp"

#include <algorithm>
#include <sstream>

#include "hauto/model.hpp"

namespace hauto {

TrackingState tracking_projection(const SymbolicHeap& h, const DefiniteInfo& d) {
    TrackingState q;
    q.arity = h.free_count;
    q.inconsistent = d.inconsistent;
    for (std::uint32_t i = 1; i <= h.free_count; ++i)
        if (d.allocated(i)) q.alloc.push_back(i);
    for (std::uint32_t a = 0; a <= h.free_count; ++a)
        for (std::uint32_t b = a; b <= h.free_count; ++b) {
            Var va = from_dense(h, a), vb = from_dense(h, b);
            if (a != b && d.eq(a, b)) q.pure.push_back(PureAtom::make(va, vb, true));
            if (d.neq(a, b)) q.pure.push_back(PureAtom::make(va, vb, false));
        }
    std::sort(q.pure.begin(), q.pure.end());
    return q;
}

ReachState reach_projection(const SymbolicHeap& h, const DefiniteInfo& d) {
    ReachState q;
    q.track = tracking_projection(h, d);
    for (std::uint32_t a = 0; a <= h.free_count; ++a)
        for (std::uint32_t b = 0; b <= h.free_count; ++b)
            if (d.reaches(a, b)) q.reach.emplace_back(a, b);
    return q;
}

TrackingState tracking_of(const SymbolicHeap& tau) { return tracking_projection(tau, complete(tau)); }
ReachState reach_of(const SymbolicHeap& tau) { return reach_projection(tau, complete(tau)); }

namespace {

Var fv(std::uint32_t i) { return i == 0 ? Var::nil() : Var::free(i); }

bool has_eq(const TrackingState& q, std::uint32_t a, std::uint32_t b) {
    auto at = PureAtom::make(fv(a), fv(b), true);
    return std::binary_search(q.pure.begin(), q.pure.end(), at);
}

std::vector<std::uint32_t> minimal_alloc(const TrackingState& q) {
    std::vector<std::uint32_t> out;
    for (auto i : q.alloc) {
        bool minimal = true;
        for (std::uint32_t j = 1; j < i && minimal; ++j)
            if (has_eq(q, i, j)) minimal = false;
        if (minimal) out.push_back(i);
    }
    return out;
}

SymbolicHeap unsat_kernel(std::uint32_t arity) {
    SymbolicHeap h;
    h.free_count = arity;
    h.add_pure(Var::nil(), Var::nil(), false);
    return h;
}

}  // namespace

SymbolicHeap kernel(const TrackingState& q) {
    if (q.inconsistent) return unsat_kernel(q.arity);
    SymbolicHeap h;
    h.free_count = q.arity;
    h.pure = q.pure;
    for (auto i : minimal_alloc(q)) h.spatial.push_back({Var::free(i), {Var::nil()}});
    return h;
}

SymbolicHeap kernel(const ReachState& q) {
    if (q.track.inconsistent) return unsat_kernel(q.track.arity);
    SymbolicHeap h;
    h.free_count = q.track.arity;
    h.pure = q.track.pure;
    bool uses_z = false;
    for (auto i : minimal_alloc(q.track)) {
        PointsTo p{Var::free(i), {}};
        for (std::uint32_t j = 0; j <= q.track.arity; ++j) {
            bool r = std::binary_search(q.reach.begin(), q.reach.end(), std::make_pair(i, j));
            p.targets.push_back(r ? fv(j) : Var::bound(1));
            uses_z |= !r;
        }
        h.spatial.push_back(std::move(p));
    }
    h.bound_count = uses_z ? 1 : 0;
    return h;
}

SymbolicHeap shrink(const SymbolicHeap& body, const std::vector<TrackingState>& inputs) {
    if (inputs.size() != body.calls.size()) throw std::invalid_argument("shrink: length mismatch");
    if (inputs.empty()) return body;
    std::vector<SymbolicHeap> ks;
    for (auto& q : inputs) ks.push_back(kernel(q));
    return replace_calls(body, ks);
}

SymbolicHeap shrink(const SymbolicHeap& body, const std::vector<ReachState>& inputs) {
    if (inputs.size() != body.calls.size()) throw std::invalid_argument("shrink: length mismatch");
    if (inputs.empty()) return body;
    std::vector<SymbolicHeap> ks;
    for (auto& q : inputs) ks.push_back(kernel(q));
    return replace_calls(body, ks);
}

std::string to_string(const TrackingState& q) {
    if (q.inconsistent) return "(unsat/" + std::to_string(q.arity) + ")";
    std::ostringstream os;
    os << "({";
    for (std::size_t i = 0; i < q.alloc.size(); ++i) os << (i ? "," : "") << "x" << q.alloc[i];
    os << "}, {";
    for (std::size_t i = 0; i < q.pure.size(); ++i) os << (i ? ", " : "") << to_string(q.pure[i]);
    os << "})";
    return os.str();
}

std::string to_string(const ReachState& q) {
    std::ostringstream os;
    os << to_string(q.track) << " reach {";
    for (std::size_t i = 0; i < q.reach.size(); ++i)
        os << (i ? ", " : "") << to_string(fv(q.reach[i].first)) << ">" << to_string(fv(q.reach[i].second));
    os << "}";
    return os.str();
}

std::string to_string(const PropertySpec& s) {
    switch (s.kind) {
    case PropertySpec::HasPointsTo: return "has-pts";
    case PropertySpec::Track: return "track";
    case PropertySpec::Sat: return "sat";
    case PropertySpec::Unsat: return "unsat";
    case PropertySpec::Established: return "est";
    case PropertySpec::NotEstablished: return "non-est";
    case PropertySpec::Reach: return s.reach_superset ? "reaches" : "reach";
    case PropertySpec::GarbageFree: return "gf";
    case PropertySpec::NotGarbageFree: return "non-gf";
    case PropertySpec::WeaklyAcyclic: return "acyc";
    case PropertySpec::NotWeaklyAcyclic: return "non-acyc";
    }
    return "?";
}

// ---- automata ----

std::vector<StateId> TrackingAutomaton::targets(const SymbolicHeap& body, const std::vector<StateId>& inputs) const {
    check_alpha(body, inputs);
    auto h = shrunk(body, inputs);
    return {states_.id(tracking_projection(h, complete(h)))};
}

SymbolicHeap TrackingAutomaton::shrunk(const SymbolicHeap& body, const std::vector<StateId>& inputs) const {
    std::vector<TrackingState> qs;
    for (auto q : inputs) qs.push_back(states_.get(q));
    return shrink(body, qs);
}

std::shared_ptr<const TrackingAutomaton> tracking_automaton(std::uint32_t alpha) {
    return std::make_shared<TrackingAutomaton>(alpha);
}

TrackingState track_target(const PropertySpec& spec, std::uint32_t alpha);

namespace {

class ToyAutomaton final : public HeapAutomaton {
public:
    explicit ToyAutomaton(std::uint32_t alpha) : alpha_(alpha) {}
    std::string name() const override { return "has-pts"; }
    std::uint32_t alpha() const override { return alpha_; }
    bool deterministic() const override { return true; }
    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        check_alpha(body, in);
        std::size_t n = body.spatial.size();
        for (auto q : in) n += q;
        return {n > 0 ? 1u : 0u};
    }
    bool is_final(StateId q) const override { return q == 1; }
    std::string describe(StateId q) const override { return std::to_string(q); }

private:
    std::uint32_t alpha_;
};

class TrackFinal final : public HeapAutomaton {
public:
    TrackFinal(std::uint32_t alpha, PropertySpec spec) : track_(alpha), spec_(std::move(spec)) {
        if (spec_.kind == PropertySpec::Track) wanted_ = track_target(spec_, alpha);
    }
    std::string name() const override { return to_string(spec_); }
    std::uint32_t alpha() const override { return track_.alpha(); }
    bool deterministic() const override { return true; }
    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        return track_.targets(body, in);
    }
    bool is_final(StateId q) const override {
        auto& s = track_.state(q);
        switch (spec_.kind) {
        case PropertySpec::Sat: return !s.inconsistent;
        case PropertySpec::Unsat: return s.inconsistent;
        default: return s == wanted_;
        }
    }
    std::string describe(StateId q) const override { return track_.describe(q); }

private:
    TrackingAutomaton track_;
    PropertySpec spec_;
    TrackingState wanted_;
};

enum class Check { Established, GarbageFree, Acyclic };

bool run_check(Check c, const SymbolicHeap& body, const SymbolicHeap& h, const DefiniteInfo& d) {
    std::size_t nv = body.var_count();
    std::size_t nf = body.free_count;
    for (std::size_t v = 0; v < nv; ++v) {
        switch (c) {
        case Check::Established: {
            if (d.allocated(v)) break;
            bool ok = false;
            for (std::size_t f = 0; f <= nf && !ok; ++f) ok = d.eq(v, f);
            if (!ok) return false;
            break;
        }
        case Check::GarbageFree: {
            bool ok = false;
            for (std::size_t f = 0; f <= nf && !ok; ++f) ok = d.eq(v, f) || d.reaches(f, v);
            if (!ok) return false;
            break;
        }
        case Check::Acyclic:
            if (d.reaches(v, v)) return false;
            break;
        }
    }
    (void)h;
    return true;
}

template <class Base>
class Flagged final : public HeapAutomaton {
public:
    Flagged(std::uint32_t alpha, Check check, bool want, PropertySpec::Kind kind)
        : alpha_(alpha), check_(check), want_(want), kind_(kind) {}
    std::string name() const override { return to_string(PropertySpec::of(kind_)); }
    std::uint32_t alpha() const override { return alpha_; }
    bool deterministic() const override { return true; }
    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        check_alpha(body, in);
        std::vector<Base> qs;
        bool flag = true;
        for (auto q : in) {
            auto& [b, f] = states_.get(q);
            qs.push_back(b);
            flag = flag && f;
        }
        auto h = shrink(body, qs);
        auto d = complete(h);
        flag = flag && run_check(check_, body, h, d);
        if (d.inconsistent) flag = check_ != Check::Acyclic;
        Base out;
        if constexpr (std::is_same_v<Base, TrackingState>)
            out = tracking_projection(h, d);
        else
            out = reach_projection(h, d);
        return {states_.id({out, flag})};
    }
    bool is_final(StateId q) const override {
        auto& [b, f] = states_.get(q);
        bool good = f;
        if (check_ == Check::Acyclic) good = f || inconsistent(b);
        return good == want_;
    }
    std::string describe(StateId q) const override {
        auto& [b, f] = states_.get(q);
        return to_string(b) + (f ? " [1]" : " [0]");
    }

private:
    static bool inconsistent(const TrackingState& s) { return s.inconsistent; }
    static bool inconsistent(const ReachState& s) { return s.track.inconsistent; }

    std::uint32_t alpha_;
    Check check_;
    bool want_;
    PropertySpec::Kind kind_;
    Interner<std::pair<Base, bool>> states_;
};

class ReachAutomaton final : public HeapAutomaton {
public:
    ReachAutomaton(std::uint32_t alpha, std::vector<std::pair<std::uint32_t, std::uint32_t>> wanted, bool superset)
        : alpha_(alpha), wanted_(std::move(wanted)), superset_(superset) {
        std::sort(wanted_.begin(), wanted_.end());
        wanted_.erase(std::unique(wanted_.begin(), wanted_.end()), wanted_.end());
    }
    std::string name() const override { return "reach"; }
    std::uint32_t alpha() const override { return alpha_; }
    bool deterministic() const override { return true; }
    std::vector<StateId> targets(const SymbolicHeap& body, const std::vector<StateId>& in) const override {
        check_alpha(body, in);
        std::vector<ReachState> qs;
        for (auto q : in) qs.push_back(states_.get(q));
        auto h = shrink(body, qs);
        return {states_.id(reach_projection(h, complete(h)))};
    }
    bool is_final(StateId q) const override {
        auto& r = states_.get(q).reach;
        if (!superset_) return r == wanted_;
        return std::includes(r.begin(), r.end(), wanted_.begin(), wanted_.end());
    }
    std::string describe(StateId q) const override { return to_string(states_.get(q)); }

private:
    std::uint32_t alpha_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> wanted_;
    bool superset_;
    Interner<ReachState> states_;
};

}  // namespace

AutomatonPtr build_property_automaton(const PropertySpec& spec, std::uint32_t alpha) {
    using K = PropertySpec;
    switch (spec.kind) {
    case K::HasPointsTo: return std::make_shared<ToyAutomaton>(alpha);
    case K::Track:
        for (auto i : spec.alloc)
            if (i == 0 || i > alpha) throw AlphaViolation("track: allocated index out of range");
        [[fallthrough]];
    case K::Sat:
    case K::Unsat: return std::make_shared<TrackFinal>(alpha, spec);
    case K::Established:
        return std::make_shared<Flagged<TrackingState>>(alpha, Check::Established, true, spec.kind);
    case K::NotEstablished:
        return std::make_shared<Flagged<TrackingState>>(alpha, Check::Established, false, spec.kind);
    case K::GarbageFree: return std::make_shared<Flagged<ReachState>>(alpha, Check::GarbageFree, true, spec.kind);
    case K::NotGarbageFree:
        return std::make_shared<Flagged<ReachState>>(alpha, Check::GarbageFree, false, spec.kind);
    case K::WeaklyAcyclic: return std::make_shared<Flagged<ReachState>>(alpha, Check::Acyclic, true, spec.kind);
    case K::NotWeaklyAcyclic:
        return std::make_shared<Flagged<ReachState>>(alpha, Check::Acyclic, false, spec.kind);
    case K::Reach:
        for (auto [a, b] : spec.reach)
            if (a > alpha || b > alpha) throw AlphaViolation("reach: index out of range");
        return std::make_shared<ReachAutomaton>(alpha, spec.reach, spec.reach_superset);
    }
    throw std::invalid_argument("unsupported property");
}

std::uint32_t query_alpha(const Sid& sid, const SymbolicHeap& phi) {
    return std::max<std::uint32_t>({sid.max_arity(), phi.free_count, 1});
}

PropertyResult evaluate_property(const Sid& sid, const SymbolicHeap& phi, const PropertySpec& spec, Mode mode) {
    auto a = build_property_automaton(spec, query_alpha(sid, phi));
    if (mode == Mode::ForAll) a = complement(a);
    Sid s = sid;
    auto p = wrap_formula(s, phi);
    auto r = decide_nonempty(s, p, *a);
    return {mode == Mode::Exists ? r.nonempty : !r.nonempty, r.states_discovered()};
}

bool check_property(const Sid& sid, const SymbolicHeap& phi, const PropertySpec& spec, Mode mode) {
    return evaluate_property(sid, phi, spec, mode).holds;
}

TrackingState track_target(const PropertySpec& spec, std::uint32_t alpha) {
    SymbolicHeap h;
    h.free_count = alpha;
    for (auto i : spec.alloc) h.spatial.push_back({Var::free(i), {Var::nil()}});
    h.pure = spec.pure;
    h.normalize_pure();
    return tracking_of(h);
}

bool property_holds_directly(const PropertySpec& spec, const SymbolicHeap& tau, std::uint32_t alpha) {
    using K = PropertySpec;
    auto d = complete(tau);
    auto reach_pairs = [&] {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> want = spec.reach;
        std::sort(want.begin(), want.end());
        want.erase(std::unique(want.begin(), want.end()), want.end());
        return want;
    };
    switch (spec.kind) {
    case K::HasPointsTo: return !tau.spatial.empty();
    case K::Sat: return !d.inconsistent;
    case K::Unsat: return d.inconsistent;
    case K::Track: return tau.free_count == alpha && tracking_projection(tau, d) == track_target(spec, alpha);
    case K::Established: return run_check(Check::Established, tau, tau, d);
    case K::NotEstablished: return !run_check(Check::Established, tau, tau, d);
    case K::GarbageFree: return run_check(Check::GarbageFree, tau, tau, d);
    case K::NotGarbageFree: return !run_check(Check::GarbageFree, tau, tau, d);
    case K::WeaklyAcyclic: return d.inconsistent || run_check(Check::Acyclic, tau, tau, d);
    case K::NotWeaklyAcyclic: return !(d.inconsistent || run_check(Check::Acyclic, tau, tau, d));
    case K::Reach: {
        auto have = reach_projection(tau, d).reach;
        auto want = reach_pairs();
        if (!spec.reach_superset) return have == want;
        return std::includes(have.begin(), have.end(), want.begin(), want.end());
    }
    }
    return false;
}

bool oracle_property(const Sid& sid, const SymbolicHeap& phi, const PropertySpec& spec, Mode mode,
                     std::size_t max_height) {
    auto alpha = query_alpha(sid, phi);
    for (auto& u : enumerate_unfoldings(sid, phi, max_height)) {
        bool h = property_holds_directly(spec, u, alpha);
        if (mode == Mode::Exists && h) return true;
        if (mode == Mode::ForAll && !h) return false;
    }
    return mode == Mode::ForAll;
}

}  // namespace hauto
