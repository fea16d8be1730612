#include "sner/tags.hpp"

#include "sner/error.hpp"

namespace sner {

namespace {

constexpr std::array<std::string_view, kNumEntityTypes> kCodes = {"PER", "LOC", "ORG",
                                                                  "DATE", "MISC"};
constexpr std::array<std::string_view, kNumEntityTypes> kNames = {
    "PERSON", "LOCATION", "ORGANIZATION", "DATE", "MISCELLANEOUS"};

}  // namespace

std::string_view entity_code(EntityType e) { return kCodes[static_cast<std::size_t>(e)]; }
std::string_view entity_name(EntityType e) { return kNames[static_cast<std::size_t>(e)]; }

Label Label::from_index(std::size_t index) {
  if (index >= kNumLabels) throw DataError("label index out of range: " + std::to_string(index));
  return Label(static_cast<std::uint8_t>(index));
}

std::optional<Label> Label::parse(std::string_view text) {
  if (text == "O") return outside();
  if (text.size() < 3 || text[1] != '-') return std::nullopt;
  const std::string_view code = text.substr(2);
  for (std::size_t e = 0; e < kNumEntityTypes; ++e) {
    if (code != kCodes[e]) continue;
    const auto type = static_cast<EntityType>(e);
    if (text[0] == 'B') return begin(type);
    if (text[0] == 'I') return inside(type);
    return std::nullopt;
  }
  return std::nullopt;
}

TagKind Label::kind() const {
  if (id_ == 0) return TagKind::Outside;
  return (id_ % 2 == 1) ? TagKind::Begin : TagKind::Inside;
}

std::optional<EntityType> Label::entity() const {
  if (id_ == 0) return std::nullopt;
  return static_cast<EntityType>((id_ - 1) / 2);
}

std::string Label::str() const {
  if (id_ == 0) return "O";
  std::string out = kind() == TagKind::Begin ? "B-" : "I-";
  out += entity_code(*entity());
  return out;
}

const std::array<Label, kNumLabels>& all_labels() {
  static const auto labels = [] {
    std::array<Label, kNumLabels> out{};
    for (std::size_t i = 0; i < kNumLabels; ++i) out[i] = Label::from_index(i);
    return out;
  }();
  return labels;
}

bool transition_allowed(Label prev, Label next) {
  if (next.kind() != TagKind::Inside) return true;
  return prev.kind() != TagKind::Outside && prev.entity() == next.entity();
}

bool start_allowed(Label first) { return first.kind() != TagKind::Inside; }

}  // namespace sner
