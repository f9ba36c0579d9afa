#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "respmap/format.hpp"
#include "respmap/report.hpp"
#include "respmap/rules.hpp"

using namespace respmap;

namespace {

std::string fixture_text() {
    std::ifstream in(std::string(RESPMAP_EXAMPLES_DIR) + "/figure2.rmap", std::ios::binary);
    if (!in) throw std::runtime_error("cannot open figure2.rmap");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const ResponsibilityMap& fixture() {
    static const ResponsibilityMap m = *parse_rmap(fixture_text()).map;
    return m;
}

// Every slot held by several of `n` actors, fully meshed channels.
ResponsibilityMap dense_map(int n) {
    auto m = new_map("dense");
    for (int i = 0; i < n; ++i) {
        m = add_actor(m, Actor{"a" + std::to_string(i), "Actor " + std::to_string(i), ActorKind::individual, {}});
    }
    for (std::size_t s = 0; s < kSlotCount; ++s) {
        ActorSet set;
        for (int i = 0; i < n; ++i) {
            if ((i + static_cast<int>(s)) % 3 == 0) set.insert("a" + std::to_string(i));
        }
        m = assign(m, slot_at(s), set.empty() ? Assignment::nobody() : Assignment::assigned(set));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; j += 2) {
            m = add_channel(m, Channel(ChannelEndpoint::actor("a" + std::to_string(i)),
                                       ChannelEndpoint::actor("a" + std::to_string(j)), ChannelKind::feedback));
        }
    }
    return m;
}

void BM_ParseRmap(benchmark::State& state) {
    const std::string text = fixture_text();
    for (auto _ : state) benchmark::DoNotOptimize(parse_rmap(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseRmap);

void BM_ParseInterchange(benchmark::State& state) {
    const std::string doc = emit_interchange(fixture());
    for (auto _ : state) benchmark::DoNotOptimize(parse_interchange(doc));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * doc.size()));
}
BENCHMARK(BM_ParseInterchange);

void BM_AnalyzeFixture(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(analyze(fixture()));
}
BENCHMARK(BM_AnalyzeFixture);

void BM_AnalyzeDense(benchmark::State& state) {
    const auto m = dense_map(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(analyze(m));
}
BENCHMARK(BM_AnalyzeDense)->Arg(6)->Arg(24)->Arg(96);

void BM_EmitRmap(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(emit_rmap(fixture()));
}
BENCHMARK(BM_EmitRmap);

void BM_EmitInterchange(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(emit_interchange(fixture()));
}
BENCHMARK(BM_EmitInterchange);

void BM_RenderStructured(benchmark::State& state) {
    const auto r = analyze(fixture());
    for (auto _ : state) benchmark::DoNotOptimize(render_structured(r));
}
BENCHMARK(BM_RenderStructured);

void BM_ExportGraph(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(export_graph(fixture()));
}
BENCHMARK(BM_ExportGraph);

}  // namespace

BENCHMARK_MAIN();
