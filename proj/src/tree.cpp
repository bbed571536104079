#include "tsawf/classifier.hpp"
#include "tsawf/error.hpp"

namespace tsawf {

const std::vector<double>& Tree::leaf(std::span<const double> row) const {
  std::size_t n = 0;
  while (nodes[n].feature >= 0) {
    const auto& node = nodes[n];
    n = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] < node.split ? node.left : node.right);
  }
  return nodes[n].value;
}

namespace {

nlohmann::json node_json(const Tree& t, std::size_t n) {
  const auto& node = t.nodes[n];
  if (node.feature < 0) return {{"leaf", node.value}};
  return {{"feature", node.feature},
          {"split", node.split},
          {"left", node_json(t, static_cast<std::size_t>(node.left))},
          {"right", node_json(t, static_cast<std::size_t>(node.right))}};
}

int node_from_json(Tree& t, const nlohmann::json& j) {
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  if (j.contains("leaf")) {
    t.nodes[id].value = j.at("leaf").get<std::vector<double>>();
    return id;
  }
  t.nodes[id].feature = j.at("feature").get<int>();
  t.nodes[id].split = j.at("split").get<double>();
  const int l = node_from_json(t, j.at("left"));
  const int r = node_from_json(t, j.at("right"));
  t.nodes[id].left = l;
  t.nodes[id].right = r;
  return id;
}

}  // namespace

nlohmann::json Tree::to_json() const { return node_json(*this, 0); }

Tree Tree::from_json(const nlohmann::json& j) {
  Tree t;
  node_from_json(t, j);
  return t;
}

}  // namespace tsawf
