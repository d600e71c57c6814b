#include <benchmark/benchmark.h>

#include <string>

#include "hauto/entailment.hpp"
#include "hauto/model.hpp"
#include "hauto/parser.hpp"
#include "hauto/zoo.hpp"

using namespace hauto;

namespace {

using K = PropertySpec;

Sid fixture(const std::string& name) { return load_document(std::string(HAUTO_FIXTURE_DIR) + "/" + name).sid; }

const char* const kFixtures[] = {"sll.hrs", "dll.hrs", "tll.hrs"};
const K::Kind kKinds[] = {K::Sat, K::Established, K::GarbageFree, K::WeaklyAcyclic};

// n predicates, each passing a swapped or shifted pair down to the next
Sid chain(int n) {
    std::string text;
    for (int i = 1; i < n; ++i) {
        auto p = "P" + std::to_string(i), q = "P" + std::to_string(i + 1);
        text += p + "(x, y) <= ex z . x->(z) * " + q + "(z, y) : {x != y} | " + q + "(y, x);\n";
    }
    text += "P" + std::to_string(n) + "(x, y) <= emp : {x = nil, y != nil};\n";
    return parse_document(text).sid;
}

}  // namespace

static void BM_FixtureProperty(benchmark::State& state) {
    auto sid = fixture(kFixtures[state.range(0)]);
    auto p = sid.order.front();
    auto phi = call_heap(p, sid.at(p).arity);
    auto spec = K::of(kKinds[state.range(1)]);
    for (auto _ : state) benchmark::DoNotOptimize(check_property(sid, phi, spec, Mode::ForAll));
    state.SetLabel(std::string(kFixtures[state.range(0)]) + " " + to_string(spec));
}
BENCHMARK(BM_FixtureProperty)->ArgsProduct({{0, 1, 2}, {0, 1, 2, 3}});

static void BM_RefineDll(benchmark::State& state) {
    auto sid = fixture("dll.hrs");
    auto a = build_property_automaton(K::of(K::HasPointsTo), 4);
    for (auto _ : state) benchmark::DoNotOptimize(refine(sid, *a).sid.rule_count());
}
BENCHMARK(BM_RefineDll);

static void BM_ChainSat(benchmark::State& state) {
    auto sid = chain(static_cast<int>(state.range(0)));
    auto phi = call_heap("P1", 2);
    std::size_t states = 0;
    for (auto _ : state) states = evaluate_property(sid, phi, K::of(K::Sat), Mode::Exists).states_discovered;
    state.counters["states"] = static_cast<double>(states);
}
BENCHMARK(BM_ChainSat)->RangeMultiplier(2)->Range(2, 64);

static void BM_EntailSll(benchmark::State& state) {
    auto sid = fixture("sll.hrs");
    auto lhs = *parse_document("query(a, b) <= ex y . a->(y) * sll(y, b) : {a != b};", "lhs", &sid).query;
    auto rhs = call_heap("sll", 2);
    PredAutomata preds{{"sll", sll_entailment_automaton()}};
    for (auto _ : state) benchmark::DoNotOptimize(decide_entailment(EntailmentQuery{sid, lhs, rhs, preds, false}).holds);
}
BENCHMARK(BM_EntailSll);

BENCHMARK_MAIN();
