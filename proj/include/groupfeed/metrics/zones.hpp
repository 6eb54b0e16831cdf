#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "groupfeed/metrics/types.hpp"

namespace groupfeed::metrics {

enum class LevelZone : std::uint8_t { Low, Mid, High };
enum class VolumeZone : std::uint8_t { Silent, Low, Mid, High };
enum class EmotionZone : std::uint8_t { Negative, Neutral, Positive };

enum class ZoneColor : std::uint8_t { None, Red, Green, Yellow };

ZoneColor color_of(LevelZone zone) noexcept;
ZoneColor color_of(VolumeZone zone) noexcept;
ZoneColor color_of(EmotionZone zone) noexcept;

// Wire/CSV names: "low|mid|high", "silent|low|mid|high", "neg|neu|pos".
std::string_view to_string(LevelZone zone) noexcept;
std::string_view to_string(VolumeZone zone) noexcept;
std::string_view to_string(EmotionZone zone) noexcept;
std::string_view to_string(ZoneColor color) noexcept;

std::optional<LevelZone> parse_level_zone(std::string_view s) noexcept;
std::optional<VolumeZone> parse_volume_zone(std::string_view s) noexcept;
std::optional<EmotionZone> parse_emotion_zone(std::string_view s) noexcept;

/// Band limits and time constants for every feedback feature.
///
/// Participation: Low below `participation_mid_min`, Mid up to and including
/// `participation_mid_max`, High above. The integer bands 0-19/20-30/31-100
/// are the defaults. Volume: Silent up to `volume_noise_max`, then Low/Mid
/// closed above at `volume_low_max` and `volume_mid_max`. Emotion is on the
/// remapped 0..100 scale: Negative below `emotion_neutral_min`, Neutral up to
/// `emotion_neutral_max`, Positive above.
struct ZoneConfig {
  double participation_mid_min = 20.0;
  double participation_mid_max = 30.0;
  double volume_noise_max = 1.0;
  double volume_low_max = 7.0;
  double volume_mid_max = 20.0;
  double emotion_neutral_min = 45.0;
  double emotion_neutral_max = 55.0;
  double interruption_threshold_s = 3.0;
  double participation_window_s = 240.0;

  /// Throws ConfigError unless bounds are strictly increasing and the time
  /// constants are positive.
  void validate() const;

  friend bool operator==(const ZoneConfig&, const ZoneConfig&) = default;
};

LevelZone classify_participation(double pct, const ZoneConfig& cfg = {});
VolumeZone classify_volume(double volume, const ZoneConfig& cfg = {});
EmotionZone classify_emotion(double score, const ZoneConfig& cfg = {});

/// Linear map of the signed valence scale [-100, 100] onto [0, 100].
constexpr double remap_valence(double raw) noexcept { return raw / 2.0 + 50.0; }

}  // namespace groupfeed::metrics
