#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "mimicmark/attacks.hpp"
#include "mimicmark/error.hpp"

namespace mimicmark {
namespace {

using Params = std::map<std::string, std::string, std::less<>>;

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

Params split_params(std::string_view body) {
  Params out;
  while (!body.empty()) {
    const std::size_t comma = body.find(',');
    const std::string_view item = body.substr(0, comma);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw Error(Errc::BadParameter, "expected key=value, got '" + std::string(item) + "'");
    out[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return out;
}

double number(const Params& p, std::string_view key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  double v = 0.0;
  const char* first = it->second.data();
  const char* last = first + it->second.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw Error(Errc::BadParameter, "'" + std::string(key) + "' is not a number: " + it->second);
  return v;
}

int integer(const Params& p, std::string_view key, int fallback) {
  const double v = number(p, key, fallback);
  if (v != std::floor(v)) throw Error(Errc::BadParameter, "'" + std::string(key) + "' must be an integer");
  return static_cast<int>(v);
}

// Shortest round-trippable decimal.
std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

const char* const kNames[] = {"jpeg", "gaussian_blur", "brightness", "contrast", "hue",
                              "center_crop", "resize", "rotation", "meme", "overlay"};

}  // namespace

std::string_view AttackSpec::name() const noexcept { return kNames[kind.index()]; }

AttackSpec AttackSpec::parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string name = trim(text.substr(0, colon));
  Params p = colon == std::string_view::npos ? Params{} : split_params(text.substr(colon + 1));

  AttackSpec spec{attack::Jpeg{}, std::nullopt};
  if (auto it = p.find("seed"); it != p.end()) {
    spec.seed = static_cast<std::uint64_t>(number(p, "seed", 0));
    p.erase(it);
  }
  auto known = [&](std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : p) {
      bool ok = false;
      for (auto key : keys) ok = ok || k == key;
      if (!ok) throw Error(Errc::BadParameter, "unknown parameter '" + k + "' for attack '" + name + "'");
    }
  };

  if (name == "jpeg") {
    known({"q"});
    spec.kind = attack::Jpeg{integer(p, "q", attack::Jpeg{}.quality)};
  } else if (name == "gaussian_blur" || name == "blur") {
    known({"sigma", "kernel"});
    spec.kind = attack::GaussianBlur{number(p, "sigma", attack::GaussianBlur{}.sigma),
                                     integer(p, "kernel", attack::GaussianBlur{}.kernel)};
  } else if (name == "brightness") {
    known({"f"});
    spec.kind = attack::Brightness{number(p, "f", attack::Brightness{}.factor)};
  } else if (name == "contrast") {
    known({"f"});
    spec.kind = attack::Contrast{number(p, "f", attack::Contrast{}.factor)};
  } else if (name == "hue") {
    known({"deg"});
    spec.kind = attack::Hue{number(p, "deg", attack::Hue{}.degrees)};
  } else if (name == "center_crop" || name == "crop") {
    known({"keep"});
    spec.kind = attack::CenterCrop{number(p, "keep", attack::CenterCrop{}.keep_ratio)};
  } else if (name == "resize") {
    known({"scale"});
    spec.kind = attack::Resize{number(p, "scale", attack::Resize{}.scale)};
  } else if (name == "rotation" || name == "rotate") {
    known({"deg"});
    spec.kind = attack::Rotation{number(p, "deg", attack::Rotation{}.degrees)};
  } else if (name == "meme") {
    known({"band"});
    spec.kind = attack::Meme{number(p, "band", attack::Meme{}.band_ratio)};
  } else if (name == "overlay") {
    known({"method", "key", "payload", "strength", "redundancy"});
    attack::Overlay o;
    if (!p.count("key") || !p.count("payload"))
      throw Error(Errc::BadParameter, "overlay needs key=<32 hex digits> and payload=<hex>");
    o.config.method = p.count("method") ? parse_method(p.at("method")) : Method::DwtDct;
    o.config.key = SecretKey::from_hex(p.at("key"));
    o.payload = WatermarkPayload::parse(p.at("payload"));
    o.config.payload_length = o.payload.length();
    if (p.count("strength")) o.config.strength = number(p, "strength", 0.0);
    o.config.redundancy = integer(p, "redundancy", kDefaultRedundancy);
    spec.kind = std::move(o);
  } else {
    throw Error(Errc::BadParameter, "unknown attack '" + name + "'");
  }
  spec.validate();
  return spec;
}

std::string AttackSpec::to_string() const {
  std::ostringstream os;
  os << name() << ':';
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, attack::Jpeg>) os << "q=" << a.quality;
        else if constexpr (std::is_same_v<T, attack::GaussianBlur>) os << "sigma=" << fmt(a.sigma) << ",kernel=" << a.kernel;
        else if constexpr (std::is_same_v<T, attack::Brightness>) os << "f=" << fmt(a.factor);
        else if constexpr (std::is_same_v<T, attack::Contrast>) os << "f=" << fmt(a.factor);
        else if constexpr (std::is_same_v<T, attack::Hue>) os << "deg=" << fmt(a.degrees);
        else if constexpr (std::is_same_v<T, attack::CenterCrop>) os << "keep=" << fmt(a.keep_ratio);
        else if constexpr (std::is_same_v<T, attack::Resize>) os << "scale=" << fmt(a.scale);
        else if constexpr (std::is_same_v<T, attack::Rotation>) os << "deg=" << fmt(a.degrees);
        else if constexpr (std::is_same_v<T, attack::Meme>) os << "band=" << fmt(a.band_ratio);
        else {
          os << "method=" << mimicmark::to_string(a.config.method) << ",key=" << a.config.key.to_hex()
             << ",payload=" << a.payload.to_hex();
          if (a.config.strength) os << ",strength=" << fmt(*a.config.strength);
          if (a.config.redundancy != kDefaultRedundancy) os << ",redundancy=" << a.config.redundancy;
        }
      },
      kind);
  if (seed) os << ",seed=" << *seed;
  return os.str();
}

void AttackSpec::validate() const {
  auto bad = [&](const std::string& why) { throw Error(Errc::BadParameter, std::string(name()) + ": " + why); };
  auto finite = [&](double v) {
    if (!std::isfinite(v)) bad("parameters must be finite");
  };
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, attack::Jpeg>) {
          if (a.quality < 1 || a.quality > 100) bad("q must be in 1..100");
        } else if constexpr (std::is_same_v<T, attack::GaussianBlur>) {
          finite(a.sigma);
          if (!(a.sigma > 0.0)) bad("sigma must be > 0");
          if (a.kernel < 1 || a.kernel % 2 == 0) bad("kernel must be a positive odd integer");
        } else if constexpr (std::is_same_v<T, attack::Brightness> || std::is_same_v<T, attack::Contrast>) {
          finite(a.factor);
          if (!(a.factor > 0.0)) bad("f must be > 0");
        } else if constexpr (std::is_same_v<T, attack::Hue>) {
          finite(a.degrees);
          if (a.degrees < -180.0 || a.degrees > 180.0) bad("deg must be in [-180, 180]");
        } else if constexpr (std::is_same_v<T, attack::CenterCrop>) {
          finite(a.keep_ratio);
          if (!(a.keep_ratio > 0.0 && a.keep_ratio <= 1.0)) bad("keep must be in (0, 1]");
        } else if constexpr (std::is_same_v<T, attack::Resize>) {
          finite(a.scale);
          if (!(a.scale > 0.0)) bad("scale must be > 0");
        } else if constexpr (std::is_same_v<T, attack::Rotation>) {
          finite(a.degrees);
        } else if constexpr (std::is_same_v<T, attack::Meme>) {
          finite(a.band_ratio);
          if (!(a.band_ratio > 0.0 && a.band_ratio <= 0.3)) bad("band must be in (0, 0.3]");
        } else {
          a.config.validate();
          if (a.payload.length() != a.config.payload_length) bad("payload length does not match overlay config");
        }
      },
      kind);
}

std::vector<AttackSpec> default_attack_suite() {
  return {AttackSpec{attack::GaussianBlur{}, std::nullopt}, AttackSpec{attack::Brightness{}, std::nullopt},
          AttackSpec{attack::CenterCrop{}, std::nullopt},   AttackSpec{attack::Contrast{}, std::nullopt},
          AttackSpec{attack::Hue{}, std::nullopt},          AttackSpec{attack::Jpeg{}, std::nullopt},
          AttackSpec{attack::Meme{}, std::nullopt},         AttackSpec{attack::Resize{}, std::nullopt},
          AttackSpec{attack::Rotation{}, std::nullopt}};
}

}  // namespace mimicmark
