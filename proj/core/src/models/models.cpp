#include "ssfp/models/models.hpp"

#include <string>
#include <vector>

#include "ssfp/error.hpp"
#include "ssfp/feasibility.hpp"

namespace ssfp::models {

namespace {

using milp::Sense;
using milp::Term;
using milp::VarId;

std::string join(std::initializer_list<long long> parts) {
  std::string out;
  for (long long p : parts) {
    out += '_';
    out += std::to_string(p);
  }
  return out;
}

// Adds one stage (first stage or a scenario copy) to a model under
// construction. Names carry vertex labels and the stage suffix.
class StageBuilder {
 public:
  StageBuilder(milp::Model& m, BuiltModel& out, const Instance& inst, int stage)
      : m_(m), out_(out), inst_(inst), g_(inst.graph()), stage_(stage),
        suffix_(stage == 0 ? std::string() : "_s" + std::to_string(stage)),
        arcs_(inst.admissible_arcs()) {
    arc_slot_.assign(static_cast<size_t>(g_.num_arcs()), -1);
    for (size_t i = 0; i < arcs_.size(); ++i) arc_slot_[static_cast<size_t>(arcs_[i])] = static_cast<int>(i);
  }

  // x variables for every (pipe, edge). `existing` pairs are fixed to 1 at
  // zero cost; `charge` says whether other pairs carry the stage price.
  void add_x(const EdgePipeSet& existing, bool charge) {
    const int np = inst_.pipes().num_types();
    x_.assign(static_cast<size_t>(np * g_.num_edges()), VarId{});
    for (int p = 1; p <= np; ++p) {
      for (EdgeId e = 0; e < g_.num_edges(); ++e) {
        const std::string name = "x" + join({p, lab(g_.edge(e).u), lab(g_.edge(e).v)}) + suffix_;
        const bool fixed = existing.contains({p, e});
        const double c = (charge && !fixed) ? inst_.cost(p, e) : 0.0;
        const VarId v = m_.add_continuous(name, fixed ? 1.0 : 0.0, 1.0, c);
        m_.set_implied_integer(v);
        x_[idx(p, e)] = v;
        const XKey key{stage_, p, e};
        out_.x_vars.emplace_back(v, key);
        out_.extraction.emplace(name, key);
      }
    }
  }

  VarId x(PipeId p, EdgeId e) const { return x_[idx(p, e)]; }

  void add_undirected() {
    const auto& terms = inst_.terminals();
    const auto pipes = inst_.feasible_pipes();
    const std::vector<Vertex> sinks = terms.non_root_terminals();
    // f[t][p][arc slot]
    std::vector<std::vector<std::vector<VarId>>> f(sinks.size());
    for (size_t ti = 0; ti < sinks.size(); ++ti) {
      f[ti].resize(pipes.size());
      for (size_t pi = 0; pi < pipes.size(); ++pi) {
        for (ArcId a : arcs_) {
          const Arc arc = g_.arc(a);
          f[ti][pi].push_back(m_.add_binary(
              "f" + join({lab(sinks[ti]), pipes[pi], lab(arc.tail), lab(arc.head)}) + suffix_));
        }
      }
    }
    for (size_t ti = 0; ti < sinks.size(); ++ti) {
      const Vertex t = sinks[ti];
      const Vertex r = terms.root(terms.group_of(t));
      for (Vertex v = 1; v <= g_.num_vertices(); ++v) {
        std::vector<Term> row;
        for (size_t pi = 0; pi < pipes.size(); ++pi) {
          for (ArcId a : g_.out_arcs(v)) {
            if (slot(a) >= 0) row.push_back({f[ti][pi][static_cast<size_t>(slot(a))], 1.0});
          }
          for (ArcId a : g_.in_arcs(v)) {
            if (slot(a) >= 0) row.push_back({f[ti][pi][static_cast<size_t>(slot(a))], -1.0});
          }
        }
        const double rhs = v == r ? 1.0 : (v == t ? -1.0 : 0.0);
        m_.add_constraint("flow" + join({lab(t), lab(v)}) + suffix_, std::move(row), Sense::kEqual, rhs);
      }
    }
    for (size_t ti = 0; ti < sinks.size(); ++ti) {
      for (size_t pi = 0; pi < pipes.size(); ++pi) {
        for (EdgeId e : inst_.admissible_edges()) {
          const Edge& ed = g_.edge(e);
          m_.add_constraint("cap" + join({lab(sinks[ti]), pipes[pi], lab(ed.u), lab(ed.v)}) + suffix_,
                            {{f[ti][pi][static_cast<size_t>(slot(2 * e))], 1.0},
                             {f[ti][pi][static_cast<size_t>(slot(2 * e + 1))], 1.0},
                             {x(pipes[pi], e), -1.0}},
                            Sense::kLessEqual, 0.0);
        }
      }
    }
  }

  void add_directed() {
    const auto& terms = inst_.terminals();
    const auto pipes = inst_.feasible_pipes();
    const int K = terms.num_groups();
    const size_t na = arcs_.size();
    const size_t np = pipes.size();
    auto ai = [&](size_t pi, size_t s) { return pi * na + s; };

    std::vector<std::vector<Vertex>> sinks(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) sinks[static_cast<size_t>(k)] = terms.terminals_from(k);

    // f[k][t index][pipe * arcs + slot]
    std::vector<std::vector<std::vector<VarId>>> f(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) {
      for (Vertex t : sinks[static_cast<size_t>(k)]) {
        std::vector<VarId> vars;
        vars.reserve(np * na);
        for (size_t pi = 0; pi < np; ++pi) {
          for (ArcId a : arcs_) {
            const Arc arc = g_.arc(a);
            vars.push_back(m_.add_binary("fD" + join({k + 1, lab(t), pipes[pi], lab(arc.tail), lab(arc.head)}) + suffix_));
          }
        }
        f[static_cast<size_t>(k)].push_back(std::move(vars));
      }
    }
    std::vector<std::vector<VarId>> yk(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) {
      for (size_t pi = 0; pi < np; ++pi) {
        for (ArcId a : arcs_) {
          const Arc arc = g_.arc(a);
          const VarId v = m_.add_continuous("yk" + join({k + 1, pipes[pi], lab(arc.tail), lab(arc.head)}) + suffix_, 0.0, 1.0);
          m_.set_implied_integer(v);
          yk[static_cast<size_t>(k)].push_back(v);
        }
      }
    }
    std::vector<VarId> y;
    for (size_t pi = 0; pi < np; ++pi) {
      for (ArcId a : arcs_) {
        const Arc arc = g_.arc(a);
        const VarId v = m_.add_continuous("y" + join({pipes[pi], lab(arc.tail), lab(arc.head)}) + suffix_, 0.0, 1.0);
        m_.set_implied_integer(v);
        y.push_back(v);
      }
    }
    // z[k][l] for l >= k
    std::vector<std::vector<VarId>> z(static_cast<size_t>(K), std::vector<VarId>(static_cast<size_t>(K)));
    for (int k = 0; k < K; ++k) {
      for (int l = k; l < K; ++l) z[static_cast<size_t>(k)][static_cast<size_t>(l)] = m_.add_binary("z" + join({k + 1, l + 1}) + suffix_);
    }
    auto Z = [&](int k, int l) { return z[static_cast<size_t>(k)][static_cast<size_t>(l)]; };

    // Terms for sum over pipes and in/out admissible arcs at v of vars[pi*na+slot].
    auto add_arc_terms = [&](std::vector<Term>& row, const std::vector<VarId>& vars, std::span<const ArcId> at, double coef) {
      for (size_t pi = 0; pi < np; ++pi) {
        for (ArcId a : at) {
          if (slot(a) >= 0) row.push_back({vars[ai(pi, static_cast<size_t>(slot(a)))], coef});
        }
      }
    };

    // Conservation, with the root of k sending z_kl units to every sink of group l.
    for (int k = 0; k < K; ++k) {
      const Vertex r = terms.root(k);
      for (size_t ti = 0; ti < sinks[static_cast<size_t>(k)].size(); ++ti) {
        const Vertex t = sinks[static_cast<size_t>(k)][ti];
        const int l = terms.group_of(t);
        const auto& fv = f[static_cast<size_t>(k)][ti];
        for (Vertex v = 1; v <= g_.num_vertices(); ++v) {
          std::vector<Term> row;
          add_arc_terms(row, fv, g_.out_arcs(v), 1.0);
          add_arc_terms(row, fv, g_.in_arcs(v), -1.0);
          if (v == r) row.push_back({Z(k, l), -1.0});
          if (v == t) row.push_back({Z(k, l), 1.0});
          m_.add_constraint("cons" + join({k + 1, lab(t), lab(v)}) + suffix_, std::move(row), Sense::kEqual, 0.0);
        }
      }
    }
    // f activates y_k.
    for (int k = 0; k < K; ++k) {
      for (size_t ti = 0; ti < sinks[static_cast<size_t>(k)].size(); ++ti) {
        const Vertex t = sinks[static_cast<size_t>(k)][ti];
        for (size_t pi = 0; pi < np; ++pi) {
          for (size_t s = 0; s < na; ++s) {
            const Arc arc = g_.arc(arcs_[s]);
            m_.add_constraint("act" + join({k + 1, lab(t), pipes[pi], lab(arc.tail), lab(arc.head)}) + suffix_,
                              {{f[static_cast<size_t>(k)][ti][ai(pi, s)], 1.0}, {yk[static_cast<size_t>(k)][ai(pi, s)], -1.0}},
                              Sense::kLessEqual, 0.0);
          }
        }
      }
    }
    // Each arc belongs to at most one arborescence.
    for (size_t pi = 0; pi < np; ++pi) {
      for (size_t s = 0; s < na; ++s) {
        const Arc arc = g_.arc(arcs_[s]);
        std::vector<Term> row;
        for (int k = 0; k < K; ++k) row.push_back({yk[static_cast<size_t>(k)][ai(pi, s)], 1.0});
        row.push_back({y[ai(pi, s)], -1.0});
        m_.add_constraint("share" + join({pipes[pi], lab(arc.tail), lab(arc.head)}) + suffix_, std::move(row), Sense::kLessEqual, 0.0);
      }
    }
    // One orientation per installed edge.
    for (size_t pi = 0; pi < np; ++pi) {
      for (EdgeId e : inst_.admissible_edges()) {
        const Edge& ed = g_.edge(e);
        m_.add_constraint("orient" + join({pipes[pi], lab(ed.u), lab(ed.v)}) + suffix_,
                          {{y[ai(pi, static_cast<size_t>(slot(2 * e)))], 1.0},
                           {y[ai(pi, static_cast<size_t>(slot(2 * e + 1)))], 1.0},
                           {x(pipes[pi], e), -1.0}},
                          Sense::kLessEqual, 0.0);
      }
    }
    for (int k = 0; k < K; ++k) {
      std::vector<Term> row;
      for (int l = 0; l <= k; ++l) row.push_back({Z(l, k), 1.0});
      m_.add_constraint("rootone" + join({k + 1}) + suffix_, std::move(row), Sense::kEqual, 1.0);
    }
    for (int k = 1; k + 1 < K; ++k) {
      for (int l = k + 1; l < K; ++l) {
        m_.add_constraint("rootown" + join({k + 1, l + 1}) + suffix_, {{Z(k, k), 1.0}, {Z(k, l), -1.0}},
                          Sense::kGreaterEqual, 0.0);
      }
    }
    for (Vertex v = 1; v <= g_.num_vertices(); ++v) {
      std::vector<Term> row;
      add_arc_terms(row, y, g_.in_arcs(v), 1.0);
      m_.add_constraint("indeg" + join({lab(v)}) + suffix_, std::move(row), Sense::kLessEqual, 1.0);
    }
    // No arborescence of k enters a terminal of an earlier group.
    for (int k = 1; k < K; ++k) {
      for (int j = 0; j < k; ++j) {
        for (Vertex t : terms.group(j)) {
          std::vector<Term> row;
          add_arc_terms(row, yk[static_cast<size_t>(k)], g_.in_arcs(t), 1.0);
          m_.add_constraint("early" + join({k + 1, lab(t)}) + suffix_, std::move(row), Sense::kEqual, 0.0);
        }
      }
    }
    for (int k = 0; k < K; ++k) {
      for (size_t ti = 0; ti < sinks[static_cast<size_t>(k)].size(); ++ti) {
        const Vertex t = sinks[static_cast<size_t>(k)][ti];
        std::vector<Term> row;
        add_arc_terms(row, f[static_cast<size_t>(k)][ti], g_.out_arcs(t), 1.0);
        m_.add_constraint("sink" + join({k + 1, lab(t)}) + suffix_, std::move(row), Sense::kEqual, 0.0);
      }
    }
    for (Vertex v : terms.steiner_vertices()) {
      std::vector<Term> row;
      add_arc_terms(row, y, g_.in_arcs(v), 1.0);
      add_arc_terms(row, y, g_.out_arcs(v), -1.0);
      m_.add_constraint("balance" + join({lab(v)}) + suffix_, std::move(row), Sense::kLessEqual, 0.0);
    }
    for (int k = 0; k < K; ++k) {
      std::vector<char> skip(static_cast<size_t>(g_.num_vertices()) + 1, 0);
      for (Vertex t : sinks[static_cast<size_t>(k)]) skip[static_cast<size_t>(t)] = 1;
      for (Vertex v = 1; v <= g_.num_vertices(); ++v) {
        if (skip[static_cast<size_t>(v)]) continue;
        std::vector<Term> row;
        add_arc_terms(row, yk[static_cast<size_t>(k)], g_.in_arcs(v), 1.0);
        add_arc_terms(row, yk[static_cast<size_t>(k)], g_.out_arcs(v), -1.0);
        m_.add_constraint("balancek" + join({k + 1, lab(v)}) + suffix_, std::move(row), Sense::kLessEqual, 0.0);
      }
    }
    // Arborescence k may enter root l only when it serves group l.
    for (int k = 0; k + 1 < K; ++k) {
      for (int l = k + 1; l < K; ++l) {
        const Vertex rl = terms.root(l);
        for (size_t pi = 0; pi < np; ++pi) {
          std::vector<Term> row;
          for (ArcId a : g_.in_arcs(rl)) {
            if (slot(a) >= 0) row.push_back({yk[static_cast<size_t>(k)][ai(pi, static_cast<size_t>(slot(a)))], 1.0});
          }
          row.push_back({Z(k, l), -1.0});
          m_.add_constraint("rootuse" + join({k + 1, l + 1, pipes[pi]}) + suffix_, std::move(row), Sense::kLessEqual, 0.0);
        }
      }
    }
  }

 private:
  size_t idx(PipeId p, EdgeId e) const {
    return static_cast<size_t>(e) * static_cast<size_t>(inst_.pipes().num_types()) + static_cast<size_t>(p - 1);
  }
  int slot(ArcId a) const { return arc_slot_[static_cast<size_t>(a)]; }
  long long lab(Vertex v) const { return g_.label(v); }

  milp::Model& m_;
  BuiltModel& out_;
  const Instance& inst_;
  const Graph& g_;
  int stage_;
  std::string suffix_;
  std::vector<ArcId> arcs_;
  std::vector<int> arc_slot_;
  std::vector<VarId> x_;
};

void add_formulation(StageBuilder& b, Flow flow) {
  if (flow == Flow::kUndirected) {
    b.add_undirected();
  } else {
    b.add_directed();
  }
}

std::string model_name(ModelKind kind) { return to_string(kind); }

void finish(BuiltModel& out) {
  out.stats = {out.milp.num_variables(), out.milp.num_constraints()};
}

BuiltModel build_two_stage(const TwoStageInstance& ts, Optimization opt, Flow flow) {
  if (ts.scenarios.empty()) throw ValidationError("at least one scenario is required", "scenarios");
  if (opt == Optimization::kSO && ts.probabilities.size() != ts.scenarios.size())
    throw ValidationError("expected one probability per scenario", "probabilities");
  check_pair_ids(ts.first_stage, ts.existing, "existing");

  BuiltModel out;
  out.kind = {opt, flow};
  out.num_scenarios = ts.num_scenarios();
  out.milp = milp::Model(model_name(out.kind));
  milp::Model& m = out.milp;

  StageBuilder first(m, out, ts.first_stage, 0);
  first.add_x(ts.existing, true);
  add_formulation(first, flow);

  const int np = ts.first_stage.pipes().num_types();
  const int ne = ts.first_stage.graph().num_edges();
  std::vector<std::vector<Term>> retrofit(ts.scenarios.size());
  for (size_t s = 0; s < ts.scenarios.size(); ++s) {
    const Instance& sc = ts.scenarios[s];
    StageBuilder b(m, out, sc, static_cast<int>(s) + 1);
    b.add_x({}, false);
    add_formulation(b, flow);
    const std::string suffix = "_s" + std::to_string(s + 1);
    for (int p = 1; p <= np; ++p) {
      for (EdgeId e = 0; e < ne; ++e) {
        const Edge& ed = sc.graph().edge(e);
        m.add_constraint("link" + join({p, sc.graph().label(ed.u), sc.graph().label(ed.v)}) + suffix,
                         {{b.x(p, e), 1.0}, {first.x(p, e), -1.0}}, Sense::kGreaterEqual, 0.0);
        if (ts.existing.contains({p, e})) continue;
        const double c = sc.cost(p, e);
        retrofit[s].push_back({b.x(p, e), c});
        retrofit[s].push_back({first.x(p, e), -c});
      }
    }
  }

  if (opt == Optimization::kRO) {
    const VarId d = m.add_continuous("d", 0.0, milp::kInfinity, 1.0);
    for (size_t s = 0; s < retrofit.size(); ++s) {
      std::vector<Term> row = retrofit[s];
      for (Term& t : row) t.coef = -t.coef;
      row.push_back({d, 1.0});
      m.add_constraint("epi_s" + std::to_string(s + 1), std::move(row), Sense::kGreaterEqual, 0.0);
    }
  } else {
    for (size_t s = 0; s < retrofit.size(); ++s) {
      const double rho = ts.probabilities[s];
      for (const Term& t : retrofit[s]) {
        const milp::Variable& v = m.variable(t.var);
        m.set_objective(t.var, v.objective + rho * t.coef);
      }
    }
  }
  finish(out);
  return out;
}

long long sum_sizes(const TerminalGroups& terms, int from) {
  long long n = 0;
  for (int l = from; l < terms.num_groups(); ++l) n += static_cast<long long>(terms.group(l).size());
  return n;
}

}  // namespace

BuiltModel build_do(const Instance& instance, Flow flow, const EdgePipeSet& existing) {
  check_pair_ids(instance, existing, "existing");
  BuiltModel out;
  out.kind = {Optimization::kDO, flow};
  out.milp = milp::Model(model_name(out.kind));
  StageBuilder b(out.milp, out, instance, 0);
  b.add_x(existing, true);
  add_formulation(b, flow);
  finish(out);
  return out;
}

BuiltModel build_do_u(const Instance& instance, const EdgePipeSet& existing) {
  return build_do(instance, Flow::kUndirected, existing);
}

BuiltModel build_do_d(const Instance& instance, const EdgePipeSet& existing) {
  return build_do(instance, Flow::kDirected, existing);
}

BuiltModel build_ro(const TwoStageInstance& two_stage, Flow flow) {
  return build_two_stage(two_stage, Optimization::kRO, flow);
}

BuiltModel build_so(const TwoStageInstance& two_stage, Flow flow) {
  return build_two_stage(two_stage, Optimization::kSO, flow);
}

BuiltModel build(const TwoStageInstance& two_stage, ModelKind kind) {
  switch (kind.optimization) {
    case Optimization::kDO:
      return build_do(two_stage.first_stage, kind.flow, two_stage.existing);
    case Optimization::kRO:
      return build_ro(two_stage, kind.flow);
    case Optimization::kSO:
      return build_so(two_stage, kind.flow);
  }
  throw ValidationError("unknown model kind");
}

ExtractedSolution extract(const BuiltModel& model, const std::vector<double>& values, const EdgePipeSet& existing) {
  if (values.size() != static_cast<size_t>(model.milp.num_variables()))
    throw ValidationError("solution length does not match the model");
  std::vector<EdgePipeSet> stages(static_cast<size_t>(model.num_scenarios) + 1);
  for (const auto& [var, key] : model.x_vars) {
    if (values[static_cast<size_t>(var.index)] > 0.5) stages[static_cast<size_t>(key.stage)].insert({key.pipe, key.edge});
  }
  ExtractedSolution out;
  out.first_stage = stages[0].minus(existing);
  for (size_t s = 1; s < stages.size(); ++s) out.recourse.push_back(stages[s].minus(stages[0]).minus(existing));
  return out;
}

SizeStats predicted_size(const Instance& instance, Flow flow) {
  const TerminalGroups& terms = instance.terminals();
  const long long V = instance.graph().num_vertices();
  const long long xs = static_cast<long long>(instance.pipes().num_types()) * instance.graph().num_edges();
  const long long pf = static_cast<long long>(instance.feasible_pipes().size());
  const long long ea = static_cast<long long>(instance.admissible_edges().size());
  const long long aa = 2 * ea;
  const long long K = terms.num_groups();
  if (flow == Flow::kUndirected) {
    const long long n = static_cast<long long>(terms.non_root_terminals().size());
    return {xs + n * pf * aa, n * V + n * pf * ea};
  }
  long long c = 0;  // sinks summed over k
  for (int k = 0; k < K; ++k) c += sum_sizes(terms, k) - 1;
  const long long total = sum_sizes(terms, 0);
  SizeStats s;
  s.variables = xs + c * pf * aa + K * pf * aa + pf * aa + K * (K + 1) / 2;
  long long rows = c * V + c * pf * aa + pf * aa + pf * ea + K + V + c + (V - total);
  for (long long k = 2; k <= K - 1; ++k) rows += K - k;
  for (int k = 1; k < K; ++k) rows += sum_sizes(terms, 0) - sum_sizes(terms, k);
  for (int k = 0; k < K; ++k) rows += V - (sum_sizes(terms, k) - 1);
  for (long long k = 1; k < K; ++k) rows += (K - k) * pf;
  s.constraints = rows;
  return s;
}

SizeStats predicted_size(const TwoStageInstance& two_stage, ModelKind kind) {
  SizeStats s = predicted_size(two_stage.first_stage, kind.flow);
  if (kind.optimization == Optimization::kDO) return s;
  const long long xs =
      static_cast<long long>(two_stage.first_stage.pipes().num_types()) * two_stage.first_stage.graph().num_edges();
  for (const Instance& sc : two_stage.scenarios) {
    const SizeStats t = predicted_size(sc, kind.flow);
    s.variables += t.variables;
    s.constraints += t.constraints + xs;
  }
  if (kind.optimization == Optimization::kRO) {
    s.variables += 1;
    s.constraints += two_stage.num_scenarios();
  }
  return s;
}

}  // namespace ssfp::models
