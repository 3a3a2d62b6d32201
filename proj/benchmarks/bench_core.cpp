#include <benchmark/benchmark.h>

#include "tme/forest.hpp"
#include "tme/session.hpp"
#include "tme/snapshot.hpp"
#include "tme/token_counter.hpp"

#include <random>
#include <string>

using namespace tme;

namespace {

TaskNode node(std::string slot, std::string value, std::optional<std::string> parent = {},
              std::vector<std::string> deps = {}) {
    TaskNode n;
    n.slot = std::move(slot);
    n.value = std::move(value);
    n.parent = std::move(parent);
    n.dependencies = std::move(deps);
    return n;
}

// Wide task graph: one root per 16 nodes, children underneath, occasional
// dependency edges back to earlier siblings.
Forest build_forest(int nodes) {
    Forest f;
    std::mt19937_64 rng(7);
    std::string root;
    for (int i = 0; i < nodes; ++i) {
        std::string slot = "task." + std::to_string(i);
        if (i % 16 == 0) {
            f.add_node(node(slot, ""));
            root = slot;
        } else {
            std::vector<std::string> deps;
            if (i % 5 == 0 && i > 1)
                deps.push_back("task." + std::to_string(rng() % (i - 1)));
            f.add_node(node(slot, "value " + std::to_string(i), root, deps));
        }
    }
    return f;
}

void BM_AddNodes(benchmark::State& state) {
    for (auto _ : state) {
        Forest f = build_forest(static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(f);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AddNodes)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_UpdateNode(benchmark::State& state) {
    Forest f = build_forest(static_cast<int>(state.range(0)));
    int i = 0;
    for (auto _ : state) {
        f.update_node("task.1", "value " + std::to_string(i++), i);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_UpdateNode)->Range(64, 1024);

void BM_FindNode(benchmark::State& state) {
    Forest f = build_forest(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto hit = f.find_node("value 37");
        benchmark::DoNotOptimize(hit);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FindNode)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_RetrieveSubgraph(benchmark::State& state) {
    Forest f = build_forest(static_cast<int>(state.range(0)));
    ApproximateCounter counter;
    auto cost = prompt_line_cost(counter);
    const std::string focus = "task." + std::to_string(state.range(0) - 1);
    for (auto _ : state) {
        auto sub = f.retrieve_subgraph(focus, cost);
        benchmark::DoNotOptimize(sub);
    }
}
BENCHMARK(BM_RetrieveSubgraph)->Range(64, 1024);

void BM_PropagateDependencies(benchmark::State& state) {
    Forest f = build_forest(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto dependents = f.propagate_dependencies("task.1");
        benchmark::DoNotOptimize(dependents);
    }
}
BENCHMARK(BM_PropagateDependencies)->Range(64, 1024);

void BM_SnapshotRoundtrip(benchmark::State& state) {
    Forest f = build_forest(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        Forest g = load_forest(snapshot(f));
        benchmark::DoNotOptimize(g);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SnapshotRoundtrip)->RangeMultiplier(4)->Range(16, 512)->Complexity();

} // namespace

BENCHMARK_MAIN();
