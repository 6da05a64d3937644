// Serial reference kernels against the OpenMP versions, plus whole-image
// embed/extract. Set OMP_NUM_THREADS to compare thread counts.

#include <benchmark/benchmark.h>

#include <map>

#include "mimicmark/attacks.hpp"
#include "mimicmark/codec.hpp"
#include "mimicmark/color.hpp"
#include "mimicmark/corpus.hpp"
#include "mimicmark/transforms.hpp"

using namespace mimicmark;

namespace {

const ImageBuffer& image(int edge) {
  static std::map<int, ImageBuffer> cache;
  auto it = cache.find(edge);
  if (it == cache.end()) it = cache.emplace(edge, synth_natural_image(edge, edge, 1)).first;
  return it->second;
}

const PlanarF64& luma(int edge) {
  static std::map<int, PlanarF64> cache;
  auto it = cache.find(edge);
  if (it == cache.end()) it = cache.emplace(edge, luma_plane(image(edge))).first;
  return it->second;
}

template <Subbands (*Fn)(const PlanarF64&)>
void haar_forward(benchmark::State& st) {
  const PlanarF64& p = luma(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(p));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(p.size()));
}

template <PlanarF64 (*Fn)(const Subbands&)>
void haar_inverse(benchmark::State& st) {
  const Subbands s = dwt2_haar(luma(static_cast<int>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(s));
}

template <BlockGrid (*Fn)(const PlanarF64&, int)>
void block_dct(benchmark::State& st) {
  const PlanarF64& p = luma(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(p, static_cast<int>(st.range(1))));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(p.size()));
}

template <ImageBuffer (*Fn)(const ImageBuffer&, double, int)>
void blur(benchmark::State& st) {
  const ImageBuffer& img = image(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(img, 1.0, 5));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(img.pixel_count()));
}

CodecConfig config(Method m) {
  CodecConfig c;
  c.method = m;
  c.key = SecretKey::from_hex("00112233445566778899aabbccddeeff");
  return c;
}

void embed_image(benchmark::State& st) {
  const CodecConfig c = config(static_cast<Method>(st.range(1)));
  const ImageBuffer& img = image(static_cast<int>(st.range(0)));
  const WatermarkPayload p = WatermarkPayload::from_hex("c0ffee42");
  for (auto _ : st) benchmark::DoNotOptimize(embed(img, p, c));
  st.SetLabel(std::string(to_string(c.method)));
}

void extract_image(benchmark::State& st) {
  const CodecConfig c = config(static_cast<Method>(st.range(1)));
  const ImageBuffer marked = embed(image(static_cast<int>(st.range(0))), WatermarkPayload::from_hex("c0ffee42"), c).watermarked;
  for (auto _ : st) benchmark::DoNotOptimize(extract(marked, c));
  st.SetLabel(std::string(to_string(c.method)));
}

}  // namespace

BENCHMARK(haar_forward<reference::dwt2_haar>)->Name("haar_forward/serial")->Arg(512)->Arg(2048);
BENCHMARK(haar_forward<dwt2_haar>)->Name("haar_forward/openmp")->Arg(512)->Arg(2048);
BENCHMARK(haar_inverse<reference::idwt2_haar>)->Name("haar_inverse/serial")->Arg(512)->Arg(2048);
BENCHMARK(haar_inverse<idwt2_haar>)->Name("haar_inverse/openmp")->Arg(512)->Arg(2048);
BENCHMARK(block_dct<reference::forward_block_dct>)->Name("block_dct/serial")->Args({512, 4})->Args({512, 8})->Args({2048, 8});
BENCHMARK(block_dct<forward_block_dct>)->Name("block_dct/openmp")->Args({512, 4})->Args({512, 8})->Args({2048, 8});
BENCHMARK(blur<reference::gaussian_blur>)->Name("gaussian_blur/serial")->Arg(512)->Arg(1024);
BENCHMARK(blur<gaussian_blur>)->Name("gaussian_blur/openmp")->Arg(512)->Arg(1024);
BENCHMARK(embed_image)->Args({512, 0})->Args({512, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(extract_image)->Args({512, 0})->Args({512, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
