#include <doctest.h>

#include <set>

#include "support.hpp"

using namespace hauto;
using namespace hauto::test;

namespace {

Model model(std::vector<std::uint32_t> stack, std::map<std::uint32_t, std::vector<std::uint32_t>> h) {
    Model m;
    m.stack = std::move(stack);
    m.heap = std::move(h);
    return m;
}

std::set<Model> brute_free_models(const SymbolicHeap& tau) {
    std::set<Model> out;
    for (auto& m : brute_models(tau)) out.insert(canonical_model(restrict_model(tau, m)));
    return out;
}

}  // namespace

TEST_CASE("satisfaction examples") {
    CHECK(sat_reduced(heap("query(a, b) <= emp : {a = b};"), model({0, 5, 5}, {})));
    auto pt = heap("query(a, b) <= a->(b);");
    CHECK(sat_reduced(pt, model({0, 1, 0}, {{1, {0}}})));
    CHECK_FALSE(sat_reduced(pt, model({0, 1, 0}, {{1, {0}}, {2, {0}}})));
    CHECK(sat_reduced(heap("query(a) <= ex z . a->(z) * z->(nil);"), model({0, 1}, {{1, {2}}, {2, {0}}})));
}

TEST_CASE("models up to isomorphism") {
    CHECK(models_up_to_iso(heap("query(a) <= a->(nil);")).size() == 1);
    CHECK(models_up_to_iso(heap("query(a, b) <= emp : {a != b, a != nil, b != nil};")).size() == 1);
    // nil is fixed by isomorphisms, so either side may be nil
    CHECK(models_up_to_iso(heap("query(a, b) <= emp : {a != b};")).size() == 3);
    CHECK(models_up_to_iso(heap("query() <= emp : {nil != nil};")).empty());
}

TEST_CASE("entailment between reduced heaps") {
    auto t = heap("query(a, b) <= a->(b) : {b != nil, a != b};");
    CHECK(entails_reduced(t, t));
    CHECK(entails_reduced(t, heap("query(a, b) <= ex z . a->(z) : {z != nil};")));
    auto e = heap("query(a, b) <= emp : {a = b, a != nil};");
    CHECK_FALSE(entails_reduced(e, heap("query(a, b) <= a->(b);")));
}

TEST_CASE("determinedness counts nil as a variable") {
    CHECK(is_determined(heap("query(a, b) <= emp : {a = b, a != nil};")));
    // a = b may both be nil or not
    auto loose = heap("query(a, b) <= emp : {a = b};");
    CHECK_FALSE(is_determined(loose));
    CHECK(brute_free_models(loose).size() == 2);
    // z may be nil, a itself, or fresh
    auto one = heap("query(a) <= ex z . a->(z);");
    auto two = heap("query(a, b) <= ex z . a->(z);");
    CHECK_FALSE(is_determined(one));
    CHECK_FALSE(is_determined(two));
    CHECK(brute_free_models(one).size() == 3);
    CHECK(brute_free_models(two).size() > 3);
}

TEST_CASE("a dll tail cannot be allocated twice") {
    auto dll = fixture_sid("dll.hrs");
    auto phi = heap("query(a, b, c, d) <= d->(nil) * dll(a, b, c, d) : {a != c};", dll);
    for (auto& u : enumerate_unfoldings(dll, phi, 4)) CHECK(complete(u).inconsistent);
}

TEST_CASE("property: satisfaction depends only on the free part of the stack") {
    Rng rng(31);
    HeapShape shape;
    shape.max_bound = 2;
    for (int i = 0; i < 200; ++i) {
        auto tau = random_heap(rng, shape);
        auto models = brute_models(tau);
        auto expected = brute_free_models(tau);
        for (auto& m : models) CHECK(sat_reduced(tau, restrict_model(tau, m)));
        // random candidate models: accepted exactly when some full model restricts to them
        std::uniform_int_distribution<std::uint32_t> val(0, 3);
        for (int k = 0; k < 10; ++k) {
            Model m;
            m.stack.assign(tau.free_count + 1, 0);
            for (std::uint32_t j = 1; j <= tau.free_count; ++j) m.stack[j] = val(rng);
            for (std::size_t c = 0; c < tau.spatial.size(); ++c) {
                auto loc = val(rng) + 1;
                std::vector<std::uint32_t> t;
                for (std::size_t f = 0; f < tau.spatial[c].targets.size(); ++f) t.push_back(val(rng));
                m.heap[loc] = t;
            }
            INFO(to_string(tau), " ", to_string(m));
            CHECK(sat_reduced(tau, m) == (expected.count(canonical_model(m)) != 0));
        }
    }
}

TEST_CASE("property: canonical unfoldings have the same models as raw ones") {
    Rng rng(32);
    SidShape shape;
    shape.max_preds = 2;
    shape.max_arity = 2;
    shape.max_bound = 1;
    int checked = 0;
    while (checked < 60) {
        auto sid = random_sid(rng, shape);
        if (!nonempty_predicates(sid).count("P1")) continue;
        UnfoldingTree t;
        try {
            t = random_tree(rng, sid, "P1", 2);
        } catch (const std::runtime_error&) {
            continue;
        }
        std::vector<SymbolicHeap> kids;
        auto& rule = sid.at("P1").rules[t.rule];
        for (auto& c : t.children) kids.push_back(unfold(sid, c));
        auto raw = kids.empty() ? rule : replace_calls(rule, kids);
        if (raw.var_count() > 7) continue;
        CHECK(brute_free_models(raw) == brute_free_models(unfold(sid, t)));
        ++checked;
    }
}

TEST_CASE("property: consistency of the completion matches bounded model search") {
    Rng rng(33);
    for (int i = 0; i < 200; ++i) {
        auto tau = random_heap(rng);
        bool sat = !tight_models_bounded(tau).empty();
        CHECK(sat == !complete(tau).inconsistent);
        CHECK(sat == !brute_models(tau).empty());
    }
}

TEST_CASE("property: model enumerations agree and determined heaps have one model") {
    Rng rng(34);
    int determined = 0;
    for (int i = 0; i < 400; ++i) {
        auto tau = random_heap(rng);
        auto bounded = tight_models_bounded(tau);
        auto iso = models_up_to_iso(tau);
        CHECK(std::set<Model>(bounded.begin(), bounded.end()) == std::set<Model>(iso.begin(), iso.end()));
        CHECK(std::set<Model>(bounded.begin(), bounded.end()) == brute_free_models(tau));
        if (is_determined(tau) && !complete(tau).inconsistent) {
            ++determined;
            CHECK(bounded.size() == 1);
            CHECK(sat_reduced(tau, generic_model(tau)));
        }
    }
    CHECK(determined > 10);
}

TEST_CASE("property: entails_reduced agrees with checking every model") {
    Rng rng(35);
    int checked = 0;
    while (checked < 200) {
        auto a = random_heap(rng);
        if (!is_determined(a) || complete(a).inconsistent) continue;
        auto shape = HeapShape{};
        shape.min_free = shape.max_free = a.free_count;
        auto b = random_heap(rng, shape);
        bool all = true;
        for (auto& m : brute_models(a)) all = all && sat_reduced(b, restrict_model(a, m));
        CHECK(entails_reduced(a, b) == all);
        CHECK(entails_all_models(a, b) == all);
        CHECK(entails_reduced(a, a));
        ++checked;
    }
}
