// Copyright 2026 The cpesdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Layered synchrophasor network: PMUs report to PDCs, PDCs to the master.
//
// JSON config:
//
//   {
//     "nodes": [{"id": "pmu1", "layer": "PMU"}, ...],
//     "edges": [{"from": "pmu1", "to": "pdc1"}, ...],
//     "dp_policy": {"PMU": {"sensitivity": 2.0, "epsilon": 1.0}, ...},
//     "attacker": {"pdc1->master": {"gamma": 0.5, "scale": 2.0,
//                                   "start_step": 0, "end_step": 24}}
//   }
//
// A layer's policy states the sensitivity of the value that layer releases;
// the noise scale is sensitivity / epsilon. An attacker's `scale` is the
// Laplace scale it hides behind; when omitted it is taken from the policy of
// the sending node's layer. Steps in [start_step, end_step) are attacked.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cpesdp/adversary.hpp"
#include "cpesdp/laplace.hpp"
#include "cpesdp/solver.hpp"
#include "json.hpp"

namespace cpesdp {

enum class Layer { kPmu = 0, kPdc = 1, kMaster = 2 };

inline const char* ToString(Layer l) {
  switch (l) {
    case Layer::kPmu:
      return "PMU";
    case Layer::kPdc:
      return "PDC";
    case Layer::kMaster:
      return "MASTER";
  }
  return "?";
}

inline Layer ParseLayer(const std::string& s) {
  if (s == "PMU") return Layer::kPmu;
  if (s == "PDC") return Layer::kPdc;
  if (s == "MASTER") return Layer::kMaster;
  throw DomainError("unknown layer '" + s + "'");
}

struct Node {
  std::string id;
  Layer layer;
};

struct Edge {
  std::string from;
  std::string to;
  std::string Id() const { return from + "->" + to; }
};

struct AttackerConfig {
  double gamma = 0.0;
  std::optional<double> scale;
  std::int64_t start_step = 0;
  std::int64_t end_step = std::numeric_limits<std::int64_t>::max();

  bool ActiveAt(std::int64_t step) const {
    return step >= start_step && step < end_step;
  }
};

class GridTopology {
 public:
  static GridTopology Create(std::vector<Node> nodes, std::vector<Edge> edges,
                             std::map<Layer, PrivacyParams> dp_policy = {},
                             std::map<std::string, AttackerConfig> attackers = {}) {
    GridTopology t;
    t.nodes_ = std::move(nodes);
    t.edges_ = std::move(edges);
    t.dp_policy_ = std::move(dp_policy);
    t.attackers_ = std::move(attackers);
    t.Validate();
    return t;
  }

  static GridTopology FromJson(const nlohmann::json& j) {
    std::vector<Node> nodes;
    for (const auto& n : j.at("nodes")) {
      nodes.push_back({n.at("id").get<std::string>(),
                       ParseLayer(n.at("layer").get<std::string>())});
    }
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>()});
    }
    std::map<Layer, PrivacyParams> policy;
    if (j.contains("dp_policy")) {
      for (const auto& [layer, p] : j.at("dp_policy").items()) {
        policy.emplace(ParseLayer(layer),
                       PrivacyParams::Create(p.at("sensitivity").get<double>(),
                                             p.at("epsilon").get<double>()));
      }
    }
    std::map<std::string, AttackerConfig> attackers;
    if (j.contains("attacker")) {
      for (const auto& [edge, a] : j.at("attacker").items()) {
        AttackerConfig cfg;
        cfg.gamma = a.at("gamma").get<double>();
        if (a.contains("scale")) cfg.scale = a.at("scale").get<double>();
        if (a.contains("start_step")) cfg.start_step = a.at("start_step").get<std::int64_t>();
        if (a.contains("end_step")) cfg.end_step = a.at("end_step").get<std::int64_t>();
        attackers.emplace(edge, cfg);
      }
    }
    return Create(std::move(nodes), std::move(edges), std::move(policy),
                  std::move(attackers));
  }

  nlohmann::json ToJson() const {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : nodes_) {
      j["nodes"].push_back({{"id", n.id}, {"layer", ToString(n.layer)}});
    }
    j["edges"] = nlohmann::json::array();
    for (const auto& e : edges_) {
      j["edges"].push_back({{"from", e.from}, {"to", e.to}});
    }
    j["dp_policy"] = nlohmann::json::object();
    for (const auto& [layer, p] : dp_policy_) {
      j["dp_policy"][ToString(layer)] = {{"sensitivity", p.sensitivity()},
                                         {"epsilon", p.epsilon()}};
    }
    j["attacker"] = nlohmann::json::object();
    for (const auto& [edge, a] : attackers_) {
      nlohmann::json aj = {{"gamma", a.gamma},
                           {"start_step", a.start_step},
                           {"end_step", a.end_step}};
      if (a.scale) aj["scale"] = *a.scale;
      j["attacker"][edge] = aj;
    }
    return j;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::map<Layer, PrivacyParams>& dp_policy() const { return dp_policy_; }
  const std::map<std::string, AttackerConfig>& attackers() const {
    return attackers_;
  }

  const Node& node(const std::string& id) const {
    return nodes_[index_.at(id)];
  }

  std::optional<PrivacyParams> PolicyFor(Layer layer) const {
    if (auto it = dp_policy_.find(layer); it != dp_policy_.end()) return it->second;
    return std::nullopt;
  }

  // Outgoing edge of a non-master node.
  const Edge& Uplink(const std::string& id) const {
    return edges_[uplink_.at(id)];
  }

  // Children of `id`, sorted by id.
  const std::vector<std::string>& Children(const std::string& id) const {
    static const std::vector<std::string> kNone;
    if (auto it = children_.find(id); it != children_.end()) return it->second;
    return kNone;
  }

  // Node ids ordered bottom-up (by layer, then id).
  const std::vector<std::string>& EvaluationOrder() const { return order_; }

  std::vector<std::string> PmuIds() const {
    std::vector<std::string> out;
    for (const auto& id : order_) {
      if (node(id).layer == Layer::kPmu) out.push_back(id);
    }
    return out;
  }

  // Attack profile on `edge_id`, centred at zero, or nullopt if the edge is
  // not compromised.
  std::optional<AttackProfile> AttackOn(const std::string& edge_id) const {
    auto it = attackers_.find(edge_id);
    if (it == attackers_.end()) return std::nullopt;
    return attack_profiles_.at(edge_id);
  }

  // Compromised edges whose sender applies no DP (attack on plaintext).
  std::vector<std::string> PlaintextAttackEdges() const {
    std::vector<std::string> out;
    for (const auto& [edge_id, cfg] : attackers_) {
      const Edge& e = edges_[edge_index_.at(edge_id)];
      if (!PolicyFor(node(e.from).layer)) out.push_back(edge_id);
    }
    return out;
  }

  GridTopology WithoutAttackers() const {
    return Create(nodes_, edges_, dp_policy_, {});
  }

 private:
  void Validate() {
    if (nodes_.empty()) throw DomainError("topology has no nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].id.empty()) throw DomainError("node id must be non-empty");
      if (!index_.emplace(nodes_[i].id, i).second) {
        throw DomainError("duplicate node id '" + nodes_[i].id + "'");
      }
    }
    if (dp_policy_.contains(Layer::kMaster)) {
      throw DomainError("MASTER layer releases nothing upstream; no DP policy allowed");
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      if (!index_.contains(e.from) || !index_.contains(e.to)) {
        throw DomainError("edge " + e.Id() + " references an unknown node");
      }
      if (node(e.from).layer >= node(e.to).layer) {
        throw DomainError("edge " + e.Id() + " does not go up a layer");
      }
      if (!uplink_.emplace(e.from, i).second) {
        throw DomainError("node '" + e.from + "' has more than one parent");
      }
      edge_index_.emplace(e.Id(), i);
      children_[e.to].push_back(e.from);
    }
    bool has_pmu = false;
    for (const auto& n : nodes_) {
      has_pmu |= n.layer == Layer::kPmu;
      if (n.layer != Layer::kMaster && !uplink_.contains(n.id)) {
        throw DomainError("node '" + n.id + "' does not reach MASTER");
      }
      if (n.layer != Layer::kPmu && !children_.contains(n.id)) {
        throw DomainError("node '" + n.id + "' aggregates no children");
      }
    }
    if (!has_pmu) throw DomainError("topology has no PMU");
    for (auto& [id, kids] : children_) std::sort(kids.begin(), kids.end());

    // Layers strictly increase along edges, so following uplinks from a PMU
    // terminates; it must end at a MASTER.
    for (const auto& n : nodes_) {
      std::string cur = n.id;
      while (node(cur).layer != Layer::kMaster) cur = Uplink(cur).to;
    }

    order_.clear();
    for (const auto& n : nodes_) order_.push_back(n.id);
    std::sort(order_.begin(), order_.end(), [this](const auto& a, const auto& b) {
      const Layer la = node(a).layer, lb = node(b).layer;
      return la != lb ? la < lb : a < b;
    });

    for (const auto& [edge_id, cfg] : attackers_) {
      auto it = edge_index_.find(edge_id);
      if (it == edge_index_.end()) {
        throw DomainError("attacker on unknown edge '" + edge_id + "'");
      }
      if (cfg.start_step > cfg.end_step) {
        throw DomainError("attacker on '" + edge_id + "' has an empty interval");
      }
      const Edge& e = edges_[it->second];
      double scale = 0.0;
      if (cfg.scale) {
        scale = *cfg.scale;
      } else if (auto p = PolicyFor(node(e.from).layer)) {
        scale = p->scale();
      } else {
        throw DomainError("attacker on '" + edge_id +
                          "' needs an explicit scale: no DP below it");
      }
      attack_profiles_.emplace(
          edge_id, AttackProfile::FromBudget(PrivacyParams::FromScale(scale), cfg.gamma));
    }
  }

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::map<Layer, PrivacyParams> dp_policy_;
  std::map<std::string, AttackerConfig> attackers_;

  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::size_t> uplink_;
  std::map<std::string, std::size_t> edge_index_;
  std::map<std::string, std::vector<std::string>> children_;
  std::map<std::string, AttackProfile> attack_profiles_;
  std::vector<std::string> order_;
};

}  // namespace cpesdp
