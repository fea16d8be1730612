#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sner {

enum class TagKind : std::uint8_t { Outside, Begin, Inside };

enum class EntityType : std::uint8_t { Person, Location, Organization, Date, Misc };

inline constexpr std::size_t kNumEntityTypes = 5;
inline constexpr std::size_t kNumLabels = 11;

// Short code used in tag strings ("PER") and the long name used in reports
// ("PERSON").
std::string_view entity_code(EntityType e);
std::string_view entity_name(EntityType e);

// One of the 11 IOB2 labels. The index order is fixed:
//   0 O, 1 B-PER, 2 I-PER, 3 B-LOC, 4 I-LOC, 5 B-ORG, 6 I-ORG,
//   7 B-DATE, 8 I-DATE, 9 B-MISC, 10 I-MISC
// and is the order used for tie-breaking everywhere.
class Label {
 public:
  constexpr Label() = default;

  static Label outside() { return Label(0); }
  static Label begin(EntityType e) { return Label(1 + 2 * static_cast<std::uint8_t>(e)); }
  static Label inside(EntityType e) { return Label(2 + 2 * static_cast<std::uint8_t>(e)); }
  static Label from_index(std::size_t index);

  // Exact, case-sensitive match against "O", "B-<ENT>", "I-<ENT>".
  static std::optional<Label> parse(std::string_view text);

  std::size_t index() const { return id_; }
  TagKind kind() const;
  std::optional<EntityType> entity() const;
  std::string str() const;

  friend bool operator==(Label, Label) = default;

 private:
  explicit constexpr Label(std::uint8_t id) : id_(id) {}
  std::uint8_t id_ = 0;
};

// Every label of the scheme, in index order.
const std::array<Label, kNumLabels>& all_labels();

// IOB2 legality: I-X may only follow B-X or I-X, and may not open a sentence.
bool transition_allowed(Label prev, Label next);
bool start_allowed(Label first);

}  // namespace sner
