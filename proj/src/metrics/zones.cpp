#include "groupfeed/metrics/zones.hpp"

#include <cmath>

namespace groupfeed::metrics {

ZoneColor color_of(LevelZone zone) noexcept {
  return zone == LevelZone::Mid ? ZoneColor::Green : ZoneColor::Red;
}

ZoneColor color_of(VolumeZone zone) noexcept {
  switch (zone) {
    case VolumeZone::Silent: return ZoneColor::None;
    case VolumeZone::Mid: return ZoneColor::Green;
    default: return ZoneColor::Red;
  }
}

ZoneColor color_of(EmotionZone zone) noexcept {
  switch (zone) {
    case EmotionZone::Negative: return ZoneColor::Red;
    case EmotionZone::Neutral: return ZoneColor::Yellow;
    default: return ZoneColor::Green;
  }
}

std::string_view to_string(LevelZone zone) noexcept {
  switch (zone) {
    case LevelZone::Low: return "low";
    case LevelZone::Mid: return "mid";
    default: return "high";
  }
}

std::string_view to_string(VolumeZone zone) noexcept {
  switch (zone) {
    case VolumeZone::Silent: return "silent";
    case VolumeZone::Low: return "low";
    case VolumeZone::Mid: return "mid";
    default: return "high";
  }
}

std::string_view to_string(EmotionZone zone) noexcept {
  switch (zone) {
    case EmotionZone::Negative: return "neg";
    case EmotionZone::Neutral: return "neu";
    default: return "pos";
  }
}

std::string_view to_string(ZoneColor color) noexcept {
  switch (color) {
    case ZoneColor::Red: return "red";
    case ZoneColor::Green: return "green";
    case ZoneColor::Yellow: return "yellow";
    default: return "none";
  }
}

std::optional<LevelZone> parse_level_zone(std::string_view s) noexcept {
  if (s == "low") return LevelZone::Low;
  if (s == "mid") return LevelZone::Mid;
  if (s == "high") return LevelZone::High;
  return std::nullopt;
}

std::optional<VolumeZone> parse_volume_zone(std::string_view s) noexcept {
  if (s == "silent") return VolumeZone::Silent;
  if (s == "low") return VolumeZone::Low;
  if (s == "mid") return VolumeZone::Mid;
  if (s == "high") return VolumeZone::High;
  return std::nullopt;
}

std::optional<EmotionZone> parse_emotion_zone(std::string_view s) noexcept {
  if (s == "neg") return EmotionZone::Negative;
  if (s == "neu") return EmotionZone::Neutral;
  if (s == "pos") return EmotionZone::Positive;
  return std::nullopt;
}

void ZoneConfig::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(participation_mid_min) || !finite(participation_mid_max) ||
      !(0.0 < participation_mid_min && participation_mid_min < participation_mid_max &&
        participation_mid_max < 100.0))
    throw ConfigError("participation bounds must satisfy 0 < mid_min < mid_max < 100");
  if (!finite(volume_noise_max) || !finite(volume_low_max) || !finite(volume_mid_max) ||
      !(0.0 <= volume_noise_max && volume_noise_max < volume_low_max &&
        volume_low_max < volume_mid_max && volume_mid_max < 100.0))
    throw ConfigError("volume bounds must satisfy 0 <= noise_max < low_max < mid_max < 100");
  if (!finite(emotion_neutral_min) || !finite(emotion_neutral_max) ||
      !(0.0 < emotion_neutral_min && emotion_neutral_min < emotion_neutral_max &&
        emotion_neutral_max < 100.0))
    throw ConfigError("emotion bounds must satisfy 0 < neutral_min < neutral_max < 100");
  if (!finite(interruption_threshold_s) || interruption_threshold_s <= 0.0)
    throw ConfigError("interruption threshold must be positive");
  if (!finite(participation_window_s) || participation_window_s <= 0.0)
    throw ConfigError("participation window must be positive");
}

LevelZone classify_participation(double pct, const ZoneConfig& cfg) {
  if (pct < cfg.participation_mid_min) return LevelZone::Low;
  if (pct <= cfg.participation_mid_max) return LevelZone::Mid;
  return LevelZone::High;
}

VolumeZone classify_volume(double volume, const ZoneConfig& cfg) {
  if (volume <= cfg.volume_noise_max) return VolumeZone::Silent;
  if (volume <= cfg.volume_low_max) return VolumeZone::Low;
  if (volume <= cfg.volume_mid_max) return VolumeZone::Mid;
  return VolumeZone::High;
}

EmotionZone classify_emotion(double score, const ZoneConfig& cfg) {
  if (score < cfg.emotion_neutral_min) return EmotionZone::Negative;
  if (score <= cfg.emotion_neutral_max) return EmotionZone::Neutral;
  return EmotionZone::Positive;
}

}  // namespace groupfeed::metrics
