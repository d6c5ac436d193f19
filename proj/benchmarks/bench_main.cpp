/*
 * Copyright 2026 The PowerSensor3 Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ps3/analysis.hpp"
#include "ps3/device.hpp"
#include "ps3/protocol.hpp"

namespace {

using namespace ps3;

std::vector<std::uint8_t> device_stream(std::size_t ticks) {
  DeviceOptions o;
  o.loads[0] = ConstantLoad{1.0, 12.0};
  VirtualDevice dev(o);
  std::vector<std::uint8_t> reply, out;
  const std::uint8_t start = static_cast<std::uint8_t>(Command::kStartStream);
  dev.handle_command({&start, 1}, reply);
  for (std::size_t i = 0; i < ticks; ++i) dev.tick(out);
  return out;
}

void BM_DecodeStream(benchmark::State& state) {
  const auto bytes = device_stream(20000);
  std::vector<StreamEvent> events;
  events.reserve(bytes.size() / 2);
  for (auto _ : state) {
    DecoderState st;
    events.clear();
    decode_stream(bytes, st, events);
    benchmark::DoNotOptimize(events.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_DecodeStream);

void BM_DecodeRandomBytes(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<std::uint8_t> bytes(1 << 20);
  for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
  std::vector<StreamEvent> events;
  for (auto _ : state) {
    DecoderState st;
    events.clear();
    decode_stream(bytes, st, events);
    benchmark::DoNotOptimize(events.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_DecodeRandomBytes);

void BM_DeviceTick(benchmark::State& state) {
  DeviceOptions o;
  o.loads[0] = ConstantLoad{1.0, 12.0};
  if (state.range(0) == 0) o.noise = NoiseModel::none();
  VirtualDevice dev(o);
  std::vector<std::uint8_t> reply, out;
  const std::uint8_t start = static_cast<std::uint8_t>(Command::kStartStream);
  dev.handle_command({&start, 1}, reply);
  for (auto _ : state) {
    out.clear();
    dev.tick(out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DeviceTick)->Arg(0)->Arg(1)->ArgName("noise");

void BM_DecimateStats(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(12.0, 0.56);
  std::vector<double> series(131072);
  for (auto& v : series) v = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(decimate_stats(series, state.range(0)));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * series.size()));
}
BENCHMARK(BM_DecimateStats)->Arg(1)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
