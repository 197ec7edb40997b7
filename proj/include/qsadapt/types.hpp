#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace qsa {

/// Baseline VR session latency. Anything above it counts as cybersickness.
inline constexpr double kBaselineLatencyMs = 23.5;

enum class Category { QoA, QoS, SecurityDoS, Intrusion };

inline constexpr std::array<Category, 4> kAllCategories = {
    Category::QoA, Category::QoS, Category::SecurityDoS, Category::Intrusion};

std::string_view to_string(Category c);

/// Accepts the canonical names plus the short forms "DoS" and "UA".
std::optional<Category> parse_category(std::string_view s);

/// Throws Error(UnknownAnomalyType) on an unrecognised name.
Category category_from_string(std::string_view s);

enum class Level { Low, Medium, High };

std::string_view to_string(Level l);
/// Short form used in recommendation tables: "L", "M", "H".
std::string_view to_letter(Level l);
std::optional<Level> parse_level(std::string_view s);

}  // namespace qsa
