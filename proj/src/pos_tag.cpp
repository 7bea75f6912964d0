#include "gecal/pos_tag.hpp"

namespace gecal {

std::optional<PosTag> parse_pos_tag(std::string_view name) {
  for (std::size_t i = 0; i < kPosTagCount; ++i)
    if (kPosTagNames[i] == name) return static_cast<PosTag>(i);
  return std::nullopt;
}

PosTag pos_tag_or_other(std::string_view name) {
  return parse_pos_tag(name).value_or(PosTag::OTHER);
}

}  // namespace gecal
