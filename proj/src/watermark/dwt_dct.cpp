// Additive spread-spectrum codec in the HL sub-band.
//
// Each payload bit b owns `redundancy` keyed 4x4 tiles of the block DCT of
// the horizontal-detail Haar band. A tile votes for 1 when its mid-band
// coefficients correlate more with pn1 than with pn0. Embedding adds
// gain * pn_b, where the gain is the configured strength plus whatever is
// needed to cancel host interference, so every tile starts with a decision
// margin of at least 8 * strength.

#include <algorithm>
#include <cmath>

#include "codec_common.hpp"
#include "mimicmark/color.hpp"
#include "mimicmark/metrics.hpp"
#include "mimicmark/transforms.hpp"

namespace mimicmark::detail {
namespace {

constexpr int kMaxRefinementPasses = 6;

// <c, pn1 - pn0> over the mid-band; positive favours bit 1.
double decision_statistic(std::span<const double> tile, const KeyStreams& ks) {
  double d = 0.0;
  for (std::size_t m = 0; m < kMidBand4x4.size(); ++m)
    d += tile[static_cast<std::size_t>(kMidBand4x4[m])] * static_cast<double>(ks.pn1[m] - ks.pn0[m]);
  return d;
}

void add_pattern(std::span<double> tile, const KeyStreams& ks, int bit, double gain) {
  const auto& pn = bit ? ks.pn1 : ks.pn0;
  for (std::size_t m = 0; m < kMidBand4x4.size(); ++m)
    tile[static_cast<std::size_t>(kMidBand4x4[m])] += gain * pn[m];
}

// <pn_b, pn1 - pn0> * sign = 8 for orthogonal balanced sequences.
constexpr double kPatternResponse = 8.0;

BlockGrid analyse(const ImageBuffer& img) {
  const Subbands bands = dwt2_haar(luma_plane(img));
  return forward_block_dct(bands.hl, 4);
}

class DwtDctCodec final : public Codec {
 public:
  Method method() const noexcept override { return Method::DwtDct; }

  EmbedResult embed(const ImageBuffer& img, const WatermarkPayload& payload,
                    const CodecConfig& config) const override {
    check_embed_inputs(img, &payload, config);
    const KeyStreams ks = derive_streams(config.key, img.width, img.height, config);
    const double alpha = config.effective_strength();
    const double target = kPatternResponse * alpha;

    const PlanarF64 luma = luma_plane(img);
    Subbands bands = dwt2_haar(luma);
    BlockGrid grid = forward_block_dct(bands.hl, 4);

    const int n = config.payload_length, k = config.redundancy;
    for (int i = 0; i < n; ++i) {
      const int bit = payload[static_cast<std::size_t>(i)];
      const double sign = bit ? 1.0 : -1.0;
      for (int j = 0; j < k; ++j) {
        auto tile = grid.tile(assigned_block(ks, config, i, j));
        const double margin = sign * decision_statistic(tile, ks);
        add_pattern(tile, ks, bit, alpha + std::max(0.0, -margin) / kPatternResponse);
      }
    }

    auto render = [&] {
      inverse_block_dct(grid, bands.hl);
      return with_luma(img, idwt2_haar(bands));
    };
    ImageBuffer out = render();

    // Quantization and clipping can eat into the margin; top up any tile
    // that fell below half of the target and re-render.
    int passes = 0;
    for (; passes < kMaxRefinementPasses; ++passes) {
      const BlockGrid seen = analyse(out);
      bool adjusted = false;
      for (int i = 0; i < n; ++i) {
        const int bit = payload[static_cast<std::size_t>(i)];
        const double sign = bit ? 1.0 : -1.0;
        for (int j = 0; j < k; ++j) {
          const int b = assigned_block(ks, config, i, j);
          const double margin = sign * decision_statistic(seen.tile(b), ks);
          if (margin < 0.5 * target) {
            add_pattern(grid.tile(b), ks, bit, (target - margin) / kPatternResponse);
            adjusted = true;
          }
        }
      }
      if (!adjusted) break;
      out = render();
    }

    EmbedResult r{std::move(out), {}};
    r.stats.psnr = psnr(img, r.watermarked);
    r.stats.blocks_used = n * k;
    r.stats.refinement_passes = passes;
    return r;
  }

  ExtractionResult extract(const ImageBuffer& img, const CodecConfig& config) const override {
    check_embed_inputs(img, nullptr, config);
    const KeyStreams ks = derive_streams(config.key, img.width, img.height, config);
    const BlockGrid grid = analyse(img);
    const int n = config.payload_length, k = config.redundancy;

    ExtractionResult r;
    r.method = Method::DwtDct;
    r.payload_length = n;
    r.bits.resize(static_cast<std::size_t>(n));
    r.confidences.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      int ones = 0;
      for (int j = 0; j < k; ++j)
        if (decision_statistic(grid.tile(assigned_block(ks, config, i, j)), ks) > 0.0) ++ones;
      const int zeros = k - ones;
      r.bits[static_cast<std::size_t>(i)] = ones > zeros ? 1 : 0;
      r.confidences[static_cast<std::size_t>(i)] = static_cast<double>(std::abs(ones - zeros)) / k;
    }
    return r;
  }
};

}  // namespace

std::unique_ptr<Codec> make_dwt_dct_codec() { return std::make_unique<DwtDctCodec>(); }

}  // namespace mimicmark::detail
