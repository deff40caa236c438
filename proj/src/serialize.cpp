#include "pwalloc/serialize.hpp"

#include <cstdio>
#include <sstream>

namespace pwalloc {

namespace {

Json point(Point p) { return Json::array({p.x, p.y}); }

Point read_point(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("a point is a [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

const char* kind_name(EdgeKind k) { return k == EdgeKind::directed ? "directed" : "undirected"; }

const char* step_name(StepKind k) {
  switch (k) {
    case StepKind::solo:
      return "solo";
    case StepKind::joint:
      return "joint";
    case StepKind::conditional:
      return "conditional";
  }
  return "?";
}

std::string node_label(int node, int n) {
  return node >= n ? std::to_string(node - n + 1) + "*" : std::to_string(node + 1);
}

}  // namespace

Json to_json(const NetworkInstance& instance) {
  Json positions = Json::array();
  for (const auto& p : instance.positions) positions.push_back(point(p));
  return Json{{"n", instance.size()},
              {"c", instance.correlation},
              {"sigma2", instance.variance},
              {"seed", instance.seed},
              {"generator", std::string(kGeneratorName)},
              {"resample_count", instance.resample_count},
              {"positions", positions},
              {"sink", point(instance.sink)},
              {"gains", instance.gains}};
}

NetworkInstance instance_from_json(const Json& j) {
  try {
    NetworkInstance out;
    for (const auto& p : j.at("positions")) out.positions.push_back(read_point(p));
    if (j.contains("n") && j.at("n").get<int>() != out.size()) {
      throw std::invalid_argument("n disagrees with the number of positions");
    }
    out.correlation = j.at("c").get<double>();
    out.variance = j.value("sigma2", 1.0);
    out.seed = j.value("seed", std::uint64_t{0});
    out.resample_count = j.value("resample_count", 0);
    if (j.contains("sink")) out.sink = read_point(j.at("sink"));
    if (j.contains("gains")) {
      out.gains = j.at("gains").get<std::vector<double>>();
    } else {
      for (const auto& p : out.positions) {
        const double d = distance(p, out.sink);
        out.gains.push_back(1.0 / (d * d));
      }
    }
    validate(out);
    return out;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed instance JSON: ") + e.what());
  }
}

Json to_json(const MixedGraph& graph) {
  Json tails = Json::array(), heads = Json::array(), weights = Json::array(),
       kinds = Json::array();
  for (const auto& e : graph.edges()) {
    tails.push_back(e.tail);
    heads.push_back(e.head);
    weights.push_back(e.weight);
    kinds.push_back(kind_name(e.kind));
  }
  return Json{{"regular_count", graph.regular_count()},
              {"tails", tails},
              {"heads", heads},
              {"weights", weights},
              {"kind", kinds}};
}

Json witness_to_json(const std::vector<WitnessEdge>& witness, const NetworkInstance& instance) {
  const int n = instance.size();
  Json out = Json::array();
  for (const auto& e : witness) {
    const bool starred = e.tail >= n;
    const int tail_pos = starred ? e.head : e.tail;
    out.push_back(Json{{"tail", e.tail},
                       {"head", e.head},
                       {"kind", kind_name(e.kind)},
                       {"weight", e.weight},
                       {"starred_tail", starred},
                       {"tail_xy", point(instance.positions.at(static_cast<std::size_t>(tail_pos)))},
                       {"head_xy", point(instance.positions.at(static_cast<std::size_t>(e.head)))}});
  }
  return out;
}

Json to_json(const RateAssignment& a, const NetworkInstance& instance) {
  return Json{{"method", a.method},
              {"rates", a.rates},
              {"witness_edges", witness_to_json(a.witness, instance)},
              {"sum", a.sum()}};
}

Json to_json(const PowerAssignment& a, const NetworkInstance& instance) {
  return Json{{"method", a.method},
              {"rates", a.rates},
              {"powers", a.powers},
              {"witness_edges", witness_to_json(a.witness, instance)},
              {"sum", a.sum()},
              {"sum_rate", a.sum_rate()},
              {"exact", a.exact},
              {"feasible", a.feasible}};
}

Json to_json(const DecodeSchedule& schedule) {
  Json out = Json::array();
  for (const auto& s : schedule) {
    Json step{{"step", step_name(s.kind)}, {"node", s.node}};
    if (s.kind != StepKind::solo) step["other"] = s.other;
    out.push_back(step);
  }
  return out;
}

std::string witness_to_dot(const std::string& name, const std::vector<WitnessEdge>& witness,
                           const NetworkInstance& instance) {
  const int n = instance.size();
  std::ostringstream os;
  os << "digraph \"" << name << "\" {\n";
  os << "  sink [shape=box, pos=\"" << format_number(instance.sink.x) << ','
     << format_number(instance.sink.y) << "!\"];\n";
  for (int i = 0; i < n; ++i) {
    const auto& p = instance.positions[static_cast<std::size_t>(i)];
    os << "  \"" << node_label(i, n) << "\" [pos=\"" << format_number(p.x) << ','
       << format_number(p.y) << "!\"];\n";
  }
  for (const auto& e : witness) {
    if (e.tail >= n) {
      os << "  \"" << node_label(e.tail, n) << "\" [shape=point];\n";
    }
    os << "  \"" << node_label(e.tail, n) << "\" -> \"" << node_label(e.head, n)
       << "\" [label=\"" << format_number(e.weight) << '"';
    if (e.kind == EdgeKind::undirected) os << ", dir=none";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

}  // namespace pwalloc
