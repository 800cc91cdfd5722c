#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "ssfp/error.hpp"
#include "ssfp/instances/instances.hpp"

namespace ssfp::instances {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError("expected an object", path);
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError("missing field", path.empty() ? key : path + "." + key);
  return *it;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ValidationError("expected an integer", path);
  return j.get<int>();
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError("expected a number", path);
  return j.get<double>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError("expected an array", path);
  return j;
}

std::vector<int> int_list(const json& j, const std::string& path) {
  std::vector<int> out;
  const json& arr = as_array(j, path);
  for (size_t i = 0; i < arr.size(); ++i) out.push_back(as_int(arr[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<int>> groups_of(const json& j, const std::string& path) {
  std::vector<std::vector<int>> out;
  const json& arr = as_array(j, path);
  for (size_t i = 0; i < arr.size(); ++i) out.push_back(int_list(arr[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Vertex vertex_of(const Graph& g, int label, const std::string& path) {
  auto v = g.vertex_with_label(label);
  if (!v) throw ValidationError("unknown vertex " + std::to_string(label), path);
  return *v;
}

Instance parse_stage(const json& j, const std::string& path, const std::shared_ptr<const Graph>& graph,
                     const std::shared_ptr<const PipeCatalog>& pipes, double default_multiplier) {
  std::vector<std::vector<Vertex>> groups;
  const auto raw = groups_of(field(j, "groups", path), path + ".groups");
  for (size_t k = 0; k < raw.size(); ++k) {
    std::vector<Vertex> g;
    for (int label : raw[k]) g.push_back(vertex_of(*graph, label, path + ".groups[" + std::to_string(k) + "]"));
    groups.push_back(std::move(g));
  }
  std::vector<PipeId> feasible = int_list(field(j, "feasible_pipes", path), path + ".feasible_pipes");
  std::vector<EdgeId> admissible;
  const json& adm = field(j, "admissible_edges", path);
  if (adm.is_string()) {
    if (adm.get<std::string>() != "all") throw ValidationError("expected \"all\" or a list", path + ".admissible_edges");
    admissible.resize(static_cast<size_t>(graph->num_edges()));
    std::iota(admissible.begin(), admissible.end(), 0);
  } else {
    admissible = int_list(adm, path + ".admissible_edges");
  }
  double multiplier = default_multiplier;
  if (j.contains("multiplier")) multiplier = as_number(j["multiplier"], path + ".multiplier");
  TerminalGroups terms = [&] {
    try {
      return TerminalGroups(graph->num_vertices(), std::move(groups));
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), path + ".groups");
    }
  }();
  try {
    return Instance(graph, pipes, std::move(terms), std::move(feasible), std::move(admissible), multiplier);
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), path);
  }
}

json stage_json(const Instance& inst) {
  const Graph& g = inst.graph();
  json out = json::object();
  json groups = json::array();
  for (const auto& grp : inst.terminals().groups()) {
    json arr = json::array();
    for (Vertex v : grp) arr.push_back(g.label(v));
    groups.push_back(arr);
  }
  out["groups"] = groups;
  out["feasible_pipes"] = std::vector<int>(inst.feasible_pipes().begin(), inst.feasible_pipes().end());
  if (static_cast<int>(inst.admissible_edges().size()) == g.num_edges()) {
    out["admissible_edges"] = "all";
  } else {
    out["admissible_edges"] = std::vector<int>(inst.admissible_edges().begin(), inst.admissible_edges().end());
  }
  out["multiplier"] = inst.cost_multiplier();
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

TwoStageInstance parse_instance_json(const std::string& text) {
  const json doc = parse_text(text);
  const json& gj = field(doc, "graph", "");
  const int n = as_int(field(gj, "num_vertices", "graph"), "graph.num_vertices");
  std::vector<int> labels;
  if (gj.contains("labels")) labels = int_list(gj["labels"], "graph.labels");
  std::shared_ptr<const Graph> graph;
  {
    // Edges are given by label; build a throwaway graph to translate them.
    const Graph lookup(n, {}, labels);
    std::vector<Edge> edges;
    const json& ej = as_array(field(gj, "edges", "graph"), "graph.edges");
    for (size_t i = 0; i < ej.size(); ++i) {
      const std::string p = "graph.edges[" + std::to_string(i) + "]";
      const std::vector<int> uv = int_list(ej[i], p);
      if (uv.size() != 2) throw ValidationError("an edge has two endpoints", p);
      Vertex a = vertex_of(lookup, uv[0], p);
      Vertex b = vertex_of(lookup, uv[1], p);
      if (a > b) std::swap(a, b);
      edges.push_back({a, b});
    }
    graph = std::make_shared<const Graph>(n, std::move(edges), labels);
  }

  const json& pj = field(doc, "pipes", "");
  const int np = as_int(field(pj, "num_types", "pipes"), "pipes.num_types");
  const json& per_edge = as_array(field(field(pj, "base_costs", "pipes"), "per_edge", "pipes.base_costs"),
                                  "pipes.base_costs.per_edge");
  std::vector<std::vector<double>> costs;
  for (size_t e = 0; e < per_edge.size(); ++e) {
    const std::string p = "pipes.base_costs.per_edge[" + std::to_string(e) + "]";
    std::vector<double> row;
    for (size_t q = 0; q < as_array(per_edge[e], p).size(); ++q)
      row.push_back(as_number(per_edge[e][q], p + "[" + std::to_string(q) + "]"));
    costs.push_back(std::move(row));
  }
  if (static_cast<int>(costs.size()) != graph->num_edges())
    throw ValidationError("expected one cost row per edge", "pipes.base_costs.per_edge");
  auto pipes = std::make_shared<const PipeCatalog>(np, costs);

  TwoStageInstance ts;
  ts.first_stage = parse_stage(field(doc, "first_stage", ""), "first_stage", graph, pipes, 1.0);
  if (doc.contains("scenarios")) {
    const json& sj = as_array(doc["scenarios"], "scenarios");
    for (size_t s = 0; s < sj.size(); ++s) {
      const std::string p = "scenarios[" + std::to_string(s) + "]";
      ts.scenarios.push_back(parse_stage(sj[s], p, graph, pipes, 1.0));
      ts.probabilities.push_back(as_number(field(sj[s], "probability", p), p + ".probability"));
    }
  }
  if (doc.contains("existing")) {
    const json& ex = as_array(doc["existing"], "existing");
    for (size_t i = 0; i < ex.size(); ++i) {
      const std::string p = "existing[" + std::to_string(i) + "]";
      const std::vector<int> pe = int_list(ex[i], p);
      if (pe.size() != 2) throw ValidationError("expected [pipe, edge]", p);
      ts.existing.insert({pe[0], pe[1]});
    }
  }
  ts.first_stage.validate();
  if (!ts.scenarios.empty()) ts.validate();
  return ts;
}

std::string instance_to_json(const TwoStageInstance& ts) {
  const Graph& g = ts.first_stage.graph();
  const PipeCatalog& pc = ts.first_stage.pipes();
  json doc = json::object();
  json gj = json::object();
  gj["num_vertices"] = g.num_vertices();
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({g.label(e.u), g.label(e.v)});
  gj["edges"] = edges;
  if (g.has_custom_labels()) gj["labels"] = std::vector<int>(g.labels().begin(), g.labels().end());
  doc["graph"] = gj;
  json per_edge = json::array();
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    json row = json::array();
    for (PipeId p = 1; p <= pc.num_types(); ++p) row.push_back(pc.base_cost(p, e));
    per_edge.push_back(row);
  }
  doc["pipes"] = {{"num_types", pc.num_types()}, {"base_costs", {{"per_edge", per_edge}}}};
  doc["first_stage"] = stage_json(ts.first_stage);
  json scen = json::array();
  for (size_t s = 0; s < ts.scenarios.size(); ++s) {
    json sj = stage_json(ts.scenarios[s]);
    sj["probability"] = ts.probabilities.at(s);
    scen.push_back(sj);
  }
  doc["scenarios"] = scen;
  json ex = json::array();
  for (const EdgePipe& pe : ts.existing) ex.push_back({pe.pipe, pe.edge});
  doc["existing"] = ex;
  return doc.dump(2) + "\n";
}

TwoStageInstance load_instance(const std::filesystem::path& path) { return parse_instance_json(read_file(path)); }

void save_instance(const TwoStageInstance& instance, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << instance_to_json(instance);
  if (!out) throw ValidationError("write failed for " + path.string());
}

int RealisticTerminals::num_terminals(int scenario) const {
  const Stage& st = scenario < 0 ? first_stage : scenarios.at(static_cast<size_t>(scenario));
  std::set<int> all;
  for (const auto& g : st.groups) all.insert(g.begin(), g.end());
  return static_cast<int>(all.size());
}

RealisticTerminals parse_realistic_terminals(const std::string& text) {
  const json doc = parse_text(text);
  RealisticTerminals out;
  out.num_vertices = as_int(field(doc, "num_vertices", ""), "num_vertices");
  out.forbidden = int_list(field(doc, "forbidden", ""), "forbidden");
  const json& ratios = as_array(field(doc, "pipe_ratios", ""), "pipe_ratios");
  for (size_t i = 0; i < ratios.size(); ++i) out.pipe_ratios.push_back(as_number(ratios[i], "pipe_ratios[" + std::to_string(i) + "]"));
  out.multiplier = as_number(field(doc, "multiplier", ""), "multiplier");
  auto stage = [](const json& j, const std::string& path, bool scenario) {
    RealisticTerminals::Stage st;
    st.groups = groups_of(field(j, "groups", path), path + ".groups");
    st.pipes = int_list(field(j, "feasible_pipes", path), path + ".feasible_pipes");
    const json& r = field(j, "restricted", path);
    if (!r.is_boolean()) throw ValidationError("expected a boolean", path + ".restricted");
    st.restricted = r.get<bool>();
    if (scenario) st.probability = as_number(field(j, "probability", path), path + ".probability");
    return st;
  };
  out.first_stage = stage(field(doc, "first_stage", ""), "first_stage", false);
  const json& sj = as_array(field(doc, "scenarios", ""), "scenarios");
  for (size_t s = 0; s < sj.size(); ++s) out.scenarios.push_back(stage(sj[s], "scenarios[" + std::to_string(s) + "]", true));
  return out;
}

RealisticTerminals load_realistic_terminals(const std::filesystem::path& path) {
  return parse_realistic_terminals(read_file(path));
}

TwoStageInstance realistic_instance(const RealisticTerminals& data, std::shared_ptr<const Graph> graph,
                                    const std::vector<double>& edge_costs) {
  if (!graph) throw ValidationError("a graph is required");
  for (int room = 1; room <= data.num_vertices; ++room) {
    if (!graph->vertex_with_label(room)) throw ValidationError("room " + std::to_string(room) + " is missing", "graph");
  }
  auto pipes = std::make_shared<const PipeCatalog>(PipeCatalog::scaled(edge_costs, data.pipe_ratios));
  std::vector<char> closed(static_cast<size_t>(graph->num_vertices()) + 1, 0);
  for (int room : data.forbidden) closed[static_cast<size_t>(vertex_of(*graph, room, "forbidden"))] = 1;
  std::vector<EdgeId> all(static_cast<size_t>(graph->num_edges()));
  std::iota(all.begin(), all.end(), 0);
  std::vector<EdgeId> open;
  for (EdgeId e : all) {
    const Edge& ed = graph->edge(e);
    if (!closed[static_cast<size_t>(ed.u)] && !closed[static_cast<size_t>(ed.v)]) open.push_back(e);
  }
  auto make = [&](const RealisticTerminals::Stage& st, double multiplier, const std::string& path) {
    std::vector<std::vector<Vertex>> groups;
    for (const auto& g : st.groups) {
      std::vector<Vertex> vs;
      for (int room : g) vs.push_back(vertex_of(*graph, room, path + ".groups"));
      groups.push_back(std::move(vs));
    }
    return Instance(graph, pipes, TerminalGroups(graph->num_vertices(), std::move(groups)), st.pipes,
                    st.restricted ? open : all, multiplier);
  };
  TwoStageInstance ts;
  ts.first_stage = make(data.first_stage, 1.0, "first_stage");
  for (size_t s = 0; s < data.scenarios.size(); ++s) {
    ts.scenarios.push_back(make(data.scenarios[s], data.multiplier, "scenarios[" + std::to_string(s) + "]"));
    ts.probabilities.push_back(data.scenarios[s].probability);
  }
  ts.validate();
  return ts;
}

}  // namespace ssfp::instances
