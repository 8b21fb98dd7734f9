#include "dtq/codec.hpp"

#include <limits>

#include <json.hpp>

#include "dtq/errors.hpp"

namespace dtq {

namespace {

void write(const DecisionTree::Node* node, std::string& out) {
  if (node->is_leaf()) {
    out += node->label ? R"({"leaf":1})" : R"({"leaf":0})";
    return;
  }
  out += R"({"var":)";
  out += std::to_string(node->var);
  out += R"(,"on0":)";
  write(node->child(false), out);
  out += R"(,"on1":)";
  write(node->child(true), out);
  out += '}';
}

using json = nlohmann::json;

// JSON pointer of the offending value; the root is shown as "/".
std::string loc(const std::string& where) { return where.empty() ? "/" : where; }

std::uint64_t read_uint(const json& value, const std::string& where, const char* key) {
  if (!value.is_number_integer()) {
    throw ParseError(std::string("'") + key + "' must be a nonnegative integer", loc(where));
  }
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  const auto v = value.get<std::int64_t>();
  if (v < 0) throw ParseError(std::string("'") + key + "' must be nonnegative", loc(where));
  return static_cast<std::uint64_t>(v);
}

DecisionTree tree_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError("expected an object", loc(where));
  if (j.contains("leaf")) {
    if (j.size() != 1) throw ParseError("leaf object must have exactly one key", loc(where));
    const auto bit = read_uint(j.at("leaf"), where + "/leaf", "leaf");
    if (bit > 1) throw ParseError("leaf label must be 0 or 1", where + "/leaf");
    return DecisionTree::leaf(bit == 1);
  }
  for (const char* key : {"var", "on0", "on1"}) {
    if (!j.contains(key)) {
      throw ParseError(std::string("missing key '") + key + "'", loc(where));
    }
  }
  if (j.size() != 3) throw ParseError("unexpected extra key", loc(where));
  const auto var = read_uint(j.at("var"), where + "/var", "var");
  if (var > std::numeric_limits<Var>::max()) throw ParseError("variable index too large", where + "/var");
  auto on0 = tree_from_json(j.at("on0"), where + "/on0");
  auto on1 = tree_from_json(j.at("on1"), where + "/on1");
  return DecisionTree::query(static_cast<Var>(var), std::move(on0), std::move(on1));
}

}  // namespace

std::string serialize(const DecisionTree& tree) {
  std::string out;
  write(tree.node(), out);
  return out;
}

DecisionTree parse_tree(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), "byte " + std::to_string(e.byte));
  }
  return tree_from_json(j, "");
}

}  // namespace dtq
