// Quantization-index-modulation codec on the LL band.
//
// Luma -> one-level Haar -> LL -> 8x8 block DCT -> SVD. The largest
// singular value of each keyed tile is snapped onto the lattice
// step*(Z + b/2) for its bit b; extraction decodes the nearest lattice and
// takes a majority over the bit's tiles, after undoing any global
// brightness/contrast change estimated from the agreement of the copies.

#include <algorithm>
#include <cmath>

#include "codec_common.hpp"
#include "mimicmark/color.hpp"
#include "mimicmark/metrics.hpp"
#include "mimicmark/transforms.hpp"

namespace mimicmark::detail {
namespace {

constexpr int kMaxRefinementPasses = 8;

struct QimDecision {
  int bit;
  double margin;  // in [0, 1]; 1 = exactly on the bit's lattice
};

QimDecision qim_decode(double sigma, double step) {
  const double pos = sigma / step;
  const double r = pos - std::floor(pos);
  const double dist0 = std::min(r, 1.0 - r);
  const double dist1 = std::abs(r - 0.5);
  return dist1 < dist0 ? QimDecision{1, 2.0 * (dist0 - dist1)} : QimDecision{0, 2.0 * (dist1 - dist0)};
}

// Lattice point of parity `bit` nearest to `sigma`.
double qim_target(double sigma, double step, int bit) {
  const double offset = bit ? 0.5 * step : 0.0;
  return step * std::round((sigma - offset) / step) + offset;
}

double largest_singular_value(std::span<const double> tile) { return svd_block(tile).s[0]; }

// Replace sigma_1 of a tile, keeping its singular vectors.
void set_largest_singular_value(std::span<double> tile, double sigma) {
  SvdResult f = svd_block(tile);
  f.s[0] = sigma;
  const std::vector<double> rebuilt = f.reconstruct();
  std::copy(rebuilt.begin(), rebuilt.end(), tile.begin());
}

BlockGrid analyse(const ImageBuffer& img) {
  const Subbands bands = dwt2_haar(luma_plane(img));
  return forward_block_dct(bands.ll, 8);
}

// sigma_1 of a DC-dominated tile is 16x the mean of its 16x16 pixel
// footprint, so a global luma map s -> g*s + (1-g)*p moves it to
// g*sigma + 16*(1-g)*p.
constexpr double kTileDcGain = 16.0;

struct AmplitudeModel {
  double gain = 1.0;
  double pivot = 0.0;
  double undo(double sigma) const { return (sigma - kTileDcGain * (1.0 - gain) * pivot) / gain; }
};

// Agreement of the redundant copies under a candidate model: sum over bits
// of |sum of signed block margins|. Copies of one bit only line up when the
// model undoes the amplitude change.
double coherence(std::span<const double> sigmas, int n, int k, double step, const AmplitudeModel& m) {
  double score = 0.0;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
      const QimDecision d = qim_decode(m.undo(sigmas[static_cast<std::size_t>(i * k + j)]), step);
      acc += d.bit ? d.margin : -d.margin;
    }
    score += std::abs(acc);
  }
  return score;
}

// Blind estimate of a global brightness (pivot 0) or contrast (pivot at the
// mean luma) change. The identity is kept unless a candidate explains the
// copies strictly better.
AmplitudeModel estimate_amplitude(std::span<const double> sigmas, int n, int k, double step, double mean_luma) {
  constexpr double kMinGain = 0.6, kMaxGain = 1.6;
  constexpr int kCandidates = 600;
  AmplitudeModel best;
  double best_score = coherence(sigmas, n, k, step, best);
  for (double pivot : {0.0, mean_luma}) {
    for (int c = 0; c <= kCandidates; ++c) {
      const double g = kMinGain * std::pow(kMaxGain / kMinGain, static_cast<double>(c) / kCandidates);
      const AmplitudeModel m{g, pivot};
      const double score = coherence(sigmas, n, k, step, m);
      if (score > best_score) {
        best_score = score;
        best = m;
      }
    }
  }
  return best;
}

class DwtDctSvdCodec final : public Codec {
 public:
  Method method() const noexcept override { return Method::DwtDctSvd; }

  EmbedResult embed(const ImageBuffer& img, const WatermarkPayload& payload,
                    const CodecConfig& config) const override {
    if (img.channels != 3)
      throw Error(Errc::GrayscaleRequiresDwtDct, "dwt-dct-svd embeds into the Y channel of a color image");
    check_embed_inputs(img, &payload, config);
    const KeyStreams ks = derive_streams(config.key, img.width, img.height, config);
    const double step = config.effective_strength();
    const int n = config.payload_length, k = config.redundancy;

    const YuvPlanes planes = rgb_to_yuv(img);
    Subbands bands = dwt2_haar(planes.y);
    BlockGrid grid = forward_block_dct(bands.ll, 8);

    // Desired sigma_1 per assigned tile, and the set-point actually written
    // (pre-compensated for what rendering does to it).
    std::vector<double> target(static_cast<std::size_t>(n * k)), setpoint(static_cast<std::size_t>(n * k));
    for (int i = 0; i < n; ++i) {
      const int bit = payload[static_cast<std::size_t>(i)];
      for (int j = 0; j < k; ++j) {
        auto tile = grid.tile(assigned_block(ks, config, i, j));
        const SvdResult f = svd_block(tile);
        double t = qim_target(f.s[0], step, bit);
        // sigma_1 must stay the largest singular value to be found again.
        const double floor_value = f.s.size() > 1 ? f.s[1] + 0.25 * step : 0.0;
        while (t <= floor_value) t += step;
        const std::size_t slot = static_cast<std::size_t>(i * k + j);
        target[slot] = setpoint[slot] = t;
        set_largest_singular_value(tile, t);
      }
    }

    auto render = [&] {
      inverse_block_dct(grid, bands.ll);
      return yuv_to_rgb(idwt2_haar(bands), planes.u, planes.v);
    };
    ImageBuffer out = render();

    // Rendering (rounding, clipping) perturbs sigma_1. Feed the observed
    // error back into the set-point; if a tile keeps missing (clipped
    // region), move its target one lattice period towards the room left.
    int passes = 0;
    std::vector<int> misses(static_cast<std::size_t>(n * k), 0);
    for (; passes < kMaxRefinementPasses; ++passes) {
      const BlockGrid seen = analyse(out);
      bool adjusted = false;
      for (int i = 0; i < n; ++i) {
        const int bit = payload[static_cast<std::size_t>(i)];
        for (int j = 0; j < k; ++j) {
          const int b = assigned_block(ks, config, i, j);
          const std::size_t slot = static_cast<std::size_t>(i * k + j);
          const double observed = largest_singular_value(seen.tile(b));
          const QimDecision d = qim_decode(observed, step);
          if (d.bit == bit && d.margin >= 0.5) continue;
          adjusted = true;
          if (++misses[slot] >= 3) {
            target[slot] += observed < target[slot] ? -step : step;
            if (target[slot] <= 0.0) target[slot] += 2.0 * step;
            setpoint[slot] = target[slot];
            misses[slot] = 0;
          } else {
            setpoint[slot] += target[slot] - observed;
          }
          set_largest_singular_value(grid.tile(b), std::max(setpoint[slot], 0.0));
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
    const PlanarF64 luma = luma_plane(img);
    const BlockGrid grid = forward_block_dct(dwt2_haar(luma).ll, 8);
    const double step = config.effective_strength();
    const int n = config.payload_length, k = config.redundancy;

    std::vector<double> sigmas(static_cast<std::size_t>(n * k));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j)
        sigmas[static_cast<std::size_t>(i * k + j)] = largest_singular_value(grid.tile(assigned_block(ks, config, i, j)));

    double mean_luma = 0.0;
    for (double v : luma.data) mean_luma += v;
    mean_luma /= static_cast<double>(luma.size());
    const AmplitudeModel model = estimate_amplitude(sigmas, n, k, step, mean_luma);

    ExtractionResult r;
    r.method = Method::DwtDctSvd;
    r.payload_length = n;
    r.bits.resize(static_cast<std::size_t>(n));
    r.confidences.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      int ones = 0;
      double signed_margin = 0.0;
      for (int j = 0; j < k; ++j) {
        const QimDecision d = qim_decode(model.undo(sigmas[static_cast<std::size_t>(i * k + j)]), step);
        ones += d.bit;
        signed_margin += d.bit ? d.margin : -d.margin;
      }
      const int bit = 2 * ones > k ? 1 : 0;
      r.bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bit);
      r.confidences[static_cast<std::size_t>(i)] =
          std::clamp((bit ? signed_margin : -signed_margin) / k, 0.0, 1.0);
    }
    return r;
  }
};

}  // namespace

std::unique_ptr<Codec> make_dwt_dct_svd_codec() { return std::make_unique<DwtDctSvdCodec>(); }

}  // namespace mimicmark::detail
