#include <algorithm>

#include "textcirc/extensions.hpp"

namespace textcirc {

bool has_extension_pieces(const TextDiagram& d) {
  for (const auto& n : d.nodes) {
    if (!n.alive) continue;
    switch (n.kind) {
      case NodeKind::IngMark:
      case NodeKind::PossIn:
      case NodeKind::PossOut:
      case NodeKind::PsvOpen:
      case NodeKind::PsvClose:
        return true;
      default:
        break;
    }
  }
  for (const auto& w : d.wires)
    if (w.alive && (w.type == WireType::PossLink || w.type == WireType::TvpPsv)) return true;
  return false;
}

namespace {

struct Ext {
  TextDiagram d;
  RewriteTrace trace;
  ValidationReport report;

  int new_node(NodeKind kind, std::string token, int ins, int outs, int region) {
    DiagNode n;
    n.kind = kind;
    n.token = std::move(token);
    n.in_wires.assign(ins, kNoWire);
    n.out_wires.assign(outs, kNoWire);
    n.region = region;
    return d.add_node(std::move(n));
  }

  void retarget(int wire, PortRef to) {
    d.wires[wire].to = to;
    if (to.node >= 0) d.nodes[to.node].in_wires[to.port] = wire;
  }
  void resource(int wire, PortRef from) {
    d.wires[wire].from = from;
    if (from.node >= 0) d.nodes[from.node].out_wires[from.port] = wire;
  }
  int connect(WireType type, PortRef from, PortRef to) {
    int w = d.add_wire(DiagWire{type, from, to, false, true});
    if (from.node >= 0) d.nodes[from.node].out_wires[from.port] = w;
    if (to.node >= 0) d.nodes[to.node].in_wires[to.port] = w;
    return w;
  }

  // Bypasses a one-NP-in/one-NP-out node (in port ip, out port op).
  void bypass(int node, int ip, int op) {
    int win = d.nodes[node].in_wires[ip];
    int wout = d.nodes[node].out_wires[op];
    PortRef to = d.wires[wout].to;
    d.wires[wout].alive = false;
    retarget(win, to);
    d.nodes[node].alive = false;
  }

  int count_kind(NodeKind k) {
    int n = 0;
    for (const auto& node : d.nodes)
      if (node.alive && node.kind == k) ++n;
    return n;
  }

  // Follows the noun wire from `wire` past attributive nodes and through the
  // first verb-bearing node; returns the wire just below it.
  int below_role(int wire) {
    int guard = 0;
    while (wire >= 0 && ++guard < 10000) {
      PortRef to = d.wires[wire].to;
      if (to.node < 0) return wire;  // bare noun: no verb consumes it
      const DiagNode& n = d.nodes[to.node];
      switch (n.kind) {
        case NodeKind::AdjIntro:
        case NodeKind::AdjIsIntro:
        case NodeKind::IngMark:
        case NodeKind::PossIn:
          wire = n.out_wires[0];
          continue;
        case NodeKind::PossOut:
        case NodeKind::ScopeEnterL:
        case NodeKind::ScopeEnterR:
        case NodeKind::ScopeExitL:
        case NodeKind::ScopeExitR:
          wire = n.out_wires[0];
          continue;
        case NodeKind::LinkOut:
          return wire;  // occurrence ends before any verb
        case NodeKind::IvIntro:
          return n.out_wires[0];
        case NodeKind::TvIntro:
          return n.out_wires[to.port == 0 ? 0 : 2];
        case NodeKind::AdpIv:
        case NodeKind::AdpTv:
          return n.out_wires[1];
        case NodeKind::ScvIntro:
        case NodeKind::PsvOpen:
          return n.out_wires[to.port];
        default:
          return wire;
      }
    }
    return wire;
  }

  void run_ing() {
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      DiagNode& n = d.nodes[i];
      if (!n.alive || n.kind != NodeKind::IngMark) continue;
      int before = count_kind(NodeKind::IngMark);
      // The gerund acts as its underlying intransitive verb.
      int iv = new_node(NodeKind::IvIntro, "", 1, 2, n.region);
      int vl = new_node(NodeKind::VLabel, n.token, 1, 0, n.region);
      connect(WireType::IVP, PortRef{iv, 1}, PortRef{vl, 0});
      int win = n.in_wires[0];
      int wout = n.out_wires[0];
      retarget(win, PortRef{iv, 0});
      resource(wout, PortRef{iv, 0});
      n.alive = false;
      trace.steps.push_back(TraceStep{RewriteRule::IngReduce,
                                      {static_cast<int>(i), iv},
                                      before,
                                      count_kind(NodeKind::IngMark)});
    }
  }

  void run_possessive() {
    for (std::size_t wi = 0; wi < d.wires.size(); ++wi) {
      if (!d.wires[wi].alive || d.wires[wi].type != WireType::PossLink) continue;
      int before = 0;
      for (const auto& w : d.wires)
        if (w.alive && w.type == WireType::PossLink) ++before;

      const DiagWire link = d.wires[wi];
      int po = link.from.node;  // PossOut
      int pi = link.to.node;    // PossIn
      if (po < 0 || pi < 0) {
        report.add(ErrorCode::DanglingPossessive, "possessive link wire has a loose end");
        return;
      }
      // Insertion points: after the sentence gates of possessor and
      // possessed.
      int wp = below_role(d.nodes[po].out_wires[0]);
      int wq = below_role(d.nodes[pi].out_wires[0]);
      if (wp == wq) {
        report.add(ErrorCode::DanglingPossessive,
                   "possessor and possessed share one noun wire");
        return;
      }
      int region = -1;  // the OWNS gate composes at the top level
      int tv = new_node(NodeKind::TvIntro, "", 2, 3, region);
      int vl = new_node(NodeKind::VLabel, Lexicon::kOwns, 1, 0, region);
      connect(WireType::TVP, PortRef{tv, 1}, PortRef{vl, 0});
      // Splice possessor into in0/out0, possessed into in1/out2.
      PortRef wp_to = d.wires[wp].to;
      retarget(wp, PortRef{tv, 0});
      connect(WireType::NP, PortRef{tv, 0}, wp_to);
      PortRef wq_to = d.wires[wq].to;
      retarget(wq, PortRef{tv, 1});
      connect(WireType::NP, PortRef{tv, 2}, wq_to);
      // The link pieces vanish.
      d.wires[wi].alive = false;
      bypass(po, 0, 0);
      bypass(pi, 1, 0);
      int after = before - 1;
      trace.steps.push_back(
          TraceStep{RewriteRule::PossessiveReduce, {po, pi, tv}, before, after});
    }
    // Any remaining PossIn without a link is a dangling possessive.
    for (const auto& n : d.nodes) {
      if (n.alive && n.kind == NodeKind::PossIn) {
        int w = n.in_wires[0];
        if (w < 0 || !d.wires[w].alive)
          report.add(ErrorCode::DanglingPossessive, "possessed noun phrase has no possessor");
      }
    }
  }

  void run_passive(const Lexicon& lexicon) {
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      if (!d.nodes[i].alive || d.nodes[i].kind != NodeKind::PsvOpen) continue;
      int before = count_kind(NodeKind::PsvOpen);
      const DiagNode open = d.nodes[i];

      // Chase the passive verb chain down to its participle.
      std::vector<int> chain;
      int w = open.out_wires[2];
      int close = -1;
      while (w >= 0) {
        PortRef to = d.wires[w].to;
        if (to.node < 0) break;
        if (d.nodes[to.node].kind == NodeKind::PsvClose) {
          close = to.node;
          break;
        }
        chain.push_back(to.node);
        // AdvTv / AdpTv nodes pass the verb wire through port 0.
        w = d.nodes[to.node].out_wires[0];
      }
      if (close < 0) {
        report.add(ErrorCode::UnknownPassiveForm, "passive cluster has no participle");
        return;
      }
      auto active = lexicon.active_of(d.nodes[close].token);
      if (!active.has_value()) {
        report.add(ErrorCode::UnknownPassiveForm,
                   "participle '" + d.nodes[close].token + "' has no active form");
        return;
      }

      // Active transitive verb: the agent becomes the subject, the surface
      // subject the object.
      int region = open.region;
      int tv = new_node(NodeKind::TvIntro, "", 2, 3, region);
      int vl = new_node(NodeKind::VLabel, *active, 1, 0, region);
      // Re-type the verb chain onto a TVP wire and move it out of the
      // passive region.
      PortRef vtail{tv, 1};
      for (int nd : chain) {
        d.nodes[nd].region = region;
        int win = d.nodes[nd].in_wires[0];
        d.wires[win].alive = false;
        connect(WireType::TVP, vtail, PortRef{nd, 0});
        vtail = PortRef{nd, 0};
        // Noun wires of AdpTv nodes keep their ports.
      }
      int last = connect(WireType::TVP, vtail, PortRef{vl, 0});
      (void)last;
      d.nodes[close].alive = false;

      // Swap subject and object.
      int sub_in = open.in_wires[1], sub_out = open.out_wires[1];   // agent
      int obj_in = open.in_wires[0], obj_out = open.out_wires[0];   // surface subject
      retarget(sub_in, PortRef{tv, 0});
      resource(sub_out, PortRef{tv, 0});
      retarget(obj_in, PortRef{tv, 1});
      resource(obj_out, PortRef{tv, 2});
      d.nodes[i].alive = false;

      for (auto& r : d.regions)
        if (r.alive && r.owner == static_cast<int>(i)) r.alive = false;
      trace.steps.push_back(TraceStep{RewriteRule::PassiveReduce,
                                      {static_cast<int>(i), tv},
                                      before,
                                      count_kind(NodeKind::PsvOpen)});
    }
  }
};

}  // namespace

RewriteResult reduce_ing(const TextDiagram& d) {
  Ext e{d, {}, {}};
  e.run_ing();
  return RewriteResult{std::move(e.d), std::move(e.trace), std::move(e.report)};
}

RewriteResult reduce_possessive(const TextDiagram& d) {
  Ext e{d, {}, {}};
  e.run_possessive();
  return RewriteResult{std::move(e.d), std::move(e.trace), std::move(e.report)};
}

RewriteResult reduce_passive(const TextDiagram& d, const Lexicon& lexicon) {
  Ext e{d, {}, {}};
  e.run_passive(lexicon);
  return RewriteResult{std::move(e.d), std::move(e.trace), std::move(e.report)};
}

RewriteResult reduce_extensions(const TextDiagram& d, const Lexicon& lexicon) {
  RewriteResult out = reduce_passive(d, lexicon);
  if (!out.ok()) return out;
  RewriteResult poss = reduce_possessive(out.diagram);
  for (auto& s : poss.trace.steps) out.trace.steps.push_back(s);
  if (!poss.ok()) {
    out.report.merge(poss.report);
    return out;
  }
  RewriteResult ing = reduce_ing(poss.diagram);
  for (auto& s : ing.trace.steps) out.trace.steps.push_back(s);
  out.report.merge(ing.report);
  out.diagram = std::move(ing.diagram);
  return out;
}

}  // namespace textcirc
