#pragma once

#include <string>
#include <string_view>

#include "dtq/tree.hpp"

namespace dtq {

/// Canonical text: {"leaf":b} or {"var":k,"on0":<tree>,"on1":<tree>}, no
/// whitespace, keys in exactly this order.
std::string serialize(const DecisionTree& tree);

/// Accepts any key order and JSON whitespace; rejects extra or missing keys,
/// non-integer values and leaf labels other than 0/1. Throws ParseError.
DecisionTree parse_tree(std::string_view text);

}  // namespace dtq
