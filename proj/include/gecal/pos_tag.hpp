#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace gecal {

// Penn Treebank tags used for target selection. Order defines report order.
enum class PosTag : std::uint8_t {
  CC, CD, DT, EX, IN, JJR, JJS, JJ, MD, NNP, NNS, NN, PDT, POS,
  PRP, PRP_DOLLAR, RBR, RBS, RB, RP, VBD, VBG, VBN, VBP, VB, VBZ,
  WDT, WP, WRB, OTHER
};

inline constexpr std::size_t kPosTagCount = 30;

inline constexpr std::array<std::string_view, kPosTagCount> kPosTagNames = {
    "CC",  "CD",  "DT",  "EX",  "IN",  "JJR", "JJS", "JJ",  "MD",  "NNP",
    "NNS", "NN",  "PDT", "POS", "PRP", "PRP$", "RBR", "RBS", "RB",  "RP",
    "VBD", "VBG", "VBN", "VBP", "VB",  "VBZ", "WDT", "WP",  "WRB", "OTHER"};

constexpr std::string_view to_string(PosTag tag) {
  return kPosTagNames[static_cast<std::size_t>(tag)];
}

/// Exact (case-sensitive) tag name lookup; nullopt for tags outside the set.
std::optional<PosTag> parse_pos_tag(std::string_view name);

/// Maps any name to a tag, folding unknown names to OTHER.
PosTag pos_tag_or_other(std::string_view name);

}  // namespace gecal
