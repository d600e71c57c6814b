#include <doctest.h>

#include <algorithm>

#include "support.hpp"

using namespace hauto;
using namespace hauto::test;

namespace {

using K = PropertySpec;

AutomatonPtr prop(K::Kind k, std::uint32_t alpha) { return build_property_automaton(K::of(k), alpha); }

std::set<SymbolicHeap> unfoldings(const Sid& sid, const std::string& pred, std::size_t h) {
    return enumerate_unfoldings(sid, call_heap(pred, sid.at(pred).arity), h);
}

std::set<SymbolicHeap> accepted(const std::set<SymbolicHeap>& us, const HeapAutomaton& a) {
    std::set<SymbolicHeap> out;
    for (auto& u : us)
        if (accepts(a, u)) out.insert(u);
    return out;
}

}  // namespace

TEST_CASE("membership examples") {
    auto toy = prop(K::HasPointsTo, 2);
    CHECK_FALSE(accepts(*toy, heap("query(a, b) <= emp : {a = b};")));
    CHECK(accepts(*toy, heap("query(a) <= a->(nil);")));
    CHECK_FALSE(accepts(*prop(K::Sat, 2), heap("query() <= emp : {nil != nil};")));
}

TEST_CASE("refining dll by the points-to automaton") {
    auto dll = fixture_sid("dll.hrs");
    auto toy = prop(K::HasPointsTo, 4);
    auto r = refine(dll, *toy);
    CHECK(r.sid.rule_count() == 4);
    REQUIRE(r.sid.at("dll").rules.size() == 1);
    auto& dispatch = r.sid.at("dll").rules[0];
    REQUIRE(dispatch.calls.size() == 1);
    auto full = dispatch.calls[0].pred;
    REQUIRE(r.origin.count(full));
    CHECK(toy->is_final(r.origin[full].second));
    std::string empty;
    for (auto& [n, o] : r.origin)
        if (n != full) empty = n;
    REQUIRE(!empty.empty());
    CHECK_FALSE(toy->is_final(r.origin[empty].second));

    auto& base = r.sid.at(empty).rules;
    REQUIRE(base.size() == 1);
    CHECK(base[0] == dll.at("dll").rules[0]);

    auto& step = r.sid.at(full).rules;
    REQUIRE(step.size() == 2);
    std::set<std::string> callees;
    for (auto& b : step) {
        CHECK(b.spatial.size() == 1);
        REQUIRE(b.calls.size() == 1);
        callees.insert(b.calls[0].pred);
    }
    CHECK(callees == std::set<std::string>{empty, full});
}

TEST_CASE("refining by the universal automaton copies the SID") {
    for (auto name : {"sll.hrs", "dll.hrs", "tll.hrs"}) {
        auto sid = fixture_sid(name);
        auto pred = sid.order.front();
        auto r = refine(sid, *universal_automaton(sid.max_arity(), true));
        CHECK(r.sid.rule_count() == sid.rule_count() + 1);
        for (std::size_t h = 1; h <= 3; ++h) CHECK(unfoldings(r.sid, pred, h + 1) == unfoldings(sid, pred, h));
    }
}

TEST_CASE("property: refinement keeps exactly the accepted unfoldings") {
    for (auto name : {"sll.hrs", "dll.hrs", "tll.hrs", "ls_of_ls.hrs"}) {
        auto sid = fixture_sid(name);
        auto pred = sid.order.front();
        for (auto k : {K::HasPointsTo, K::Sat, K::Established, K::GarbageFree, K::WeaklyAcyclic,
                       K::NotWeaklyAcyclic}) {
            auto a = prop(k, sid.max_arity());
            auto r = refine(sid, *a);
            INFO(name, " ", a->name());
            for (std::size_t h = 1; h <= 4; ++h)
                CHECK(unfoldings(r.sid, pred, h + 1) == accepted(unfoldings(sid, pred, h), *a));
        }
    }
}

TEST_CASE("emptiness examples") {
    auto dll = fixture_sid("dll.hrs");
    auto toy = prop(K::HasPointsTo, 4);
    auto res = decide_nonempty(dll, "dll", *toy);
    CHECK(res.nonempty);
    REQUIRE(res.order.size() == 2);
    CHECK(res.order[0].first == "dll");
    CHECK(res.order[1].first == "dll");
    CHECK_FALSE(toy->is_final(res.order[0].second));
    CHECK(toy->is_final(res.order[1].second));

    auto nobase = sid_of("P(x) <= ex z . x->(z) * P(z);");
    CHECK_FALSE(decide_nonempty(nobase, "P", *prop(K::HasPointsTo, 1)).nonempty);
    CHECK_FALSE(decide_nonempty(nobase, "P", *universal_automaton(1, true)).nonempty);

    auto sll = fixture_sid("sll.hrs");
    CHECK_FALSE(decide_nonempty(sll, "sll", *complement(prop(K::Sat, 2))).nonempty);
}

TEST_CASE("combinator examples") {
    Rng rng(41);
    auto toy = prop(K::HasPointsTo, 3);
    auto not_toy = complement(toy);
    auto both = make_union(toy, not_toy);
    for (int i = 0; i < 20; ++i) {
        auto tau = random_heap(rng);
        CHECK(accepts(*not_toy, tau) == !accepts(*toy, tau));
        CHECK(accepts(*both, tau));
    }
    auto sat_and_toy = make_intersection(prop(K::Sat, 1), prop(K::HasPointsTo, 1));
    CHECK(accepts(*sat_and_toy, heap("query(a) <= a->(nil);")));
    CHECK_FALSE(accepts(*sat_and_toy, heap("query(a) <= emp;")));
    CHECK_FALSE(accepts(*sat_and_toy, heap("query(a) <= a->(nil) : {nil != nil};")));
}

TEST_CASE("exists and forall acceptance") {
    auto sll = fixture_sid("sll.hrs");
    auto phi = call_heap("sll", 2);
    CHECK(exists_accepted(sll, phi, *prop(K::HasPointsTo, 2)));
    CHECK_FALSE(all_accepted(sll, phi, *prop(K::HasPointsTo, 2)));
    CHECK(all_accepted(sll, phi, *prop(K::Sat, 2)));
}

TEST_CASE("witness examples") {
    auto dll = fixture_sid("dll.hrs");
    auto toy = prop(K::HasPointsTo, 4);
    auto w = witness_unfolding(dll, "dll", *toy);
    REQUIRE(w);
    CHECK(w->size() == 2);
    CHECK(unfold(dll, *w).spatial.size() == 1);

    auto sll = fixture_sid("sll.hrs");
    auto t2 = prop(K::HasPointsTo, 2);
    CHECK_FALSE(witness_unfolding(sll, "sll", *make_intersection(t2, complement(t2))));
    CHECK_FALSE(witness_unfolding(sll, "sll", *complement(prop(K::WeaklyAcyclic, 2))));
}

TEST_CASE("property: emptiness, witnesses and bounded search agree") {
    Rng rng(42);
    SidShape shape;
    shape.max_calls = 1;
    for (int i = 0; i < 100; ++i) {
        auto sid = random_sid(rng, shape);
        auto alpha = sid.max_arity();
        for (auto k : {K::HasPointsTo, K::Sat, K::Unsat, K::Established}) {
            auto a = prop(k, alpha);
            auto res = decide_nonempty(sid, "P1", *a);
            auto w = witness_unfolding(sid, "P1", *a);
            CHECK(res.nonempty == w.has_value());
            auto h = pumping_height(sid, call_heap("P1", sid.at("P1").arity), *a);
            bool found = false;
            for (auto& u : unfoldings(sid, "P1", h)) found = found || accepts(*a, u);
            CHECK(found == res.nonempty);
        }
    }
}

TEST_CASE("property: De Morgan laws and complement on random heaps") {
    Rng rng(43);
    std::vector<AutomatonPtr> base{prop(K::HasPointsTo, 3), prop(K::Sat, 3), prop(K::Established, 3),
                                   prop(K::WeaklyAcyclic, 3), prop(K::GarbageFree, 3)};
    for (std::size_t i = 0; i < base.size(); ++i)
        for (std::size_t j = 0; j < base.size(); ++j) {
            auto a = base[i], b = base[j];
            auto lhs = complement(make_union(a, b));
            auto rhs = make_intersection(complement(a), complement(b));
            auto lhs2 = complement(make_intersection(a, b));
            auto rhs2 = make_union(complement(a), complement(b));
            for (int k = 0; k < 50; ++k) {
                auto tau = random_heap(rng);
                bool x = accepts(*a, tau), y = accepts(*b, tau);
                CHECK(accepts(*lhs, tau) == !(x || y));
                CHECK(accepts(*rhs, tau) == !(x || y));
                CHECK(accepts(*lhs2, tau) == !(x && y));
                CHECK(accepts(*rhs2, tau) == !(x && y));
            }
        }
}

TEST_CASE("property: combinators are compositional") {
    Rng rng(44);
    std::vector<AutomatonPtr> as{
        complement(prop(K::Established, 3)),
        make_union(prop(K::HasPointsTo, 3), prop(K::WeaklyAcyclic, 3)),
        make_intersection(prop(K::Sat, 3), prop(K::GarbageFree, 3)),
        universal_automaton(3, true),
    };
    HeapShape shape;
    shape.max_free = 3;
    for (auto& a : as) {
        int failures = 0;
        for (int i = 0; i < 500; ++i) {
            std::vector<std::uint32_t> ar;
            auto calls = std::uniform_int_distribution<int>(0, 2)(rng);
            for (int c = 0; c < calls; ++c) ar.push_back(std::uniform_int_distribution<std::uint32_t>(0, 3)(rng));
            auto phi = random_call_body(rng, std::uniform_int_distribution<std::uint32_t>(0, 3)(rng), ar, shape);
            std::vector<SymbolicHeap> taus;
            for (auto n : ar) {
                HeapShape s = shape;
                s.min_free = s.max_free = n;
                taus.push_back(random_heap(rng, s));
            }
            auto msg = check_compositional(*a, phi, taus);
            if (!msg.empty()) {
                ++failures;
                FAIL_CHECK(msg);
            }
        }
        CHECK_MESSAGE(failures == 0, a->name());
    }
}
