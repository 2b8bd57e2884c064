#include <functional>
#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "textcirc/diagram.hpp"

namespace textcirc {

const char* wire_type_name(WireType t) {
  switch (t) {
    case WireType::NP: return "NP";
    case WireType::IVP: return "IVP";
    case WireType::TVP: return "TVP";
    case WireType::AdpAnc: return "adp";
    case WireType::PronLink: return "pron";
    case WireType::TvpPsv: return "TVPpsv";
    case WireType::PossLink: return "poss";
  }
  return "?";
}

const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::IvIntro: return "iv-intro";
    case NodeKind::TvIntro: return "tv-intro";
    case NodeKind::AdjIntro: return "adj";
    case NodeKind::AdjIsIntro: return "is-adj";
    case NodeKind::AdvIv: return "adv-iv";
    case NodeKind::AdvTv: return "adv-tv";
    case NodeKind::AdpIv: return "adp-iv";
    case NodeKind::AdpTv: return "adp-tv";
    case NodeKind::VLabel: return "v-label";
    case NodeKind::ScvIntro: return "scv-intro";
    case NodeKind::CnjIntro: return "cnj-intro";
    case NodeKind::ScopeEnterL: return "enter-l";
    case NodeKind::ScopeExitL: return "exit-l";
    case NodeKind::ScopeEnterR: return "enter-r";
    case NodeKind::ScopeExitR: return "exit-r";
    case NodeKind::LinkOut: return "link-out";
    case NodeKind::LinkIn: return "link-in";
    case NodeKind::PsvOpen: return "psv-open";
    case NodeKind::PsvClose: return "psv-close";
    case NodeKind::PossOut: return "poss-out";
    case NodeKind::PossIn: return "poss-in";
    case NodeKind::IngMark: return "ing";
    case NodeKind::AdvBlock: return "adv-block";
    case NodeKind::AdpBlock: return "adp-block";
    case NodeKind::GateNode: return "gate";
    case NodeKind::BoxNode: return "box";
  }
  return "?";
}

const char* region_kind_name(ScopeRegion::Kind k) {
  switch (k) {
    case ScopeRegion::Kind::ScvComplement: return "scv";
    case ScopeRegion::Kind::CnjLeft: return "cnj-left";
    case ScopeRegion::Kind::CnjRight: return "cnj-right";
    case ScopeRegion::Kind::Passive: return "passive";
  }
  return "?";
}

int TextDiagram::add_node(DiagNode node) {
  nodes.push_back(std::move(node));
  return static_cast<int>(nodes.size() - 1);
}

int TextDiagram::add_wire(DiagWire wire) {
  wires.push_back(wire);
  return static_cast<int>(wires.size() - 1);
}

int TextDiagram::add_region(ScopeRegion region) {
  region.id = static_cast<int>(regions.size());
  regions.push_back(region);
  return region.id;
}

bool TextDiagram::region_contains(int region, int maybe_inner) const {
  while (maybe_inner != -1) {
    if (maybe_inner == region) return true;
    maybe_inner = regions[maybe_inner].parent;
  }
  return region == -1;
}

int TextDiagram::region_depth(int region) const {
  int depth = 0;
  while (region != -1) {
    region = regions[region].parent;
    ++depth;
  }
  return depth;
}

namespace {

bool crossing_node(NodeKind k) {
  return k == NodeKind::ScopeEnterL || k == NodeKind::ScopeExitL ||
         k == NodeKind::ScopeEnterR || k == NodeKind::ScopeExitR;
}

}  // namespace

ValidationReport validate_diagram(const TextDiagram& d) {
  ValidationReport report;

  // Port bookkeeping: every live wire connects existing ports, port tables
  // point back at the wire.
  for (std::size_t wi = 0; wi < d.wires.size(); ++wi) {
    const DiagWire& w = d.wires[wi];
    if (!w.alive) continue;
    auto check_end = [&](const PortRef& p, bool is_from) {
      if (p.node == kBoundaryIn || p.node == kBoundaryOut) {
        if (w.type != WireType::NP)
          report.add(ErrorCode::TypeMismatch, "boundary port with non-NP wire");
        return;
      }
      if (p.node < 0 || p.node >= static_cast<int>(d.nodes.size()) || !d.nodes[p.node].alive) {
        report.add(ErrorCode::TypeMismatch, "wire attached to missing node");
        return;
      }
      const auto& table = is_from ? d.nodes[p.node].out_wires : d.nodes[p.node].in_wires;
      if (p.port < 0 || p.port >= static_cast<int>(table.size()) ||
          table[p.port] != static_cast<int>(wi)) {
        std::ostringstream msg;
        msg << "node " << p.node << " port table disagrees with wire " << wi;
        report.add(ErrorCode::TypeMismatch, msg.str());
      }
    };
    check_end(w.from, true);
    check_end(w.to, false);
    if (w.reflexive && w.type != WireType::PronLink)
      report.add(ErrorCode::TypeMismatch, "reflexive flag on a non-link wire");
  }

  // Region tree sanity.
  for (const auto& r : d.regions) {
    if (!r.alive) continue;
    int p = r.parent;
    int guard = 0;
    while (p != -1) {
      if (p < 0 || p >= static_cast<int>(d.regions.size()) ||
          ++guard > static_cast<int>(d.regions.size())) {
        report.add(ErrorCode::ScopeLeak, "region parent chain is broken");
        break;
      }
      p = d.regions[p].parent;
    }
  }

  // Scope obstacle rule: a wire may connect nodes in different regions only
  // if it is an NP wire passing through an enter/exit node, or a pronominal
  // link (links are exempt from the obstacle rule).
  for (const auto& w : d.wires) {
    if (!w.alive) continue;
    if (w.type == WireType::PronLink || w.type == WireType::PossLink) continue;
    int from_region = w.from.node >= 0 ? d.nodes[w.from.node].region : -1;
    int to_region = w.to.node >= 0 ? d.nodes[w.to.node].region : -1;
    if (from_region == to_region) continue;
    if (w.type != WireType::NP) {
      report.add(ErrorCode::ScopeLeak,
                 std::string(wire_type_name(w.type)) + " wire crosses a scope border");
      continue;
    }
    // NP crossing: one endpoint must be a crossing node lying in the inner
    // region of the two.
    bool ok = false;
    if (w.from.node >= 0 && crossing_node(d.nodes[w.from.node].kind)) ok = true;
    if (w.to.node >= 0 && crossing_node(d.nodes[w.to.node].kind)) ok = true;
    // Boundary-attached segments may also step one region in/out through the
    // crossing node itself.
    if (!ok)
      report.add(ErrorCode::ScopeLeak, "NP wire crosses a scope border outside enter/exit");
  }

  // Labeled inputs match outputs by referent.
  std::multiset<Ref> in_refs, out_refs;
  for (const auto& p : d.inputs) in_refs.insert(p.ref);
  for (const auto& p : d.outputs) out_refs.insert(p.ref);
  if (in_refs != out_refs)
    report.add(ErrorCode::UnbalancedNP,
               "dangling input and output noun wires disagree by referent");

  // Acyclicity over nodes, ignoring flagged reflexive links.
  std::size_t n = d.nodes.size();
  std::vector<std::vector<int>> succ(n);
  std::vector<int> indeg(n, 0);
  for (const auto& w : d.wires) {
    if (!w.alive || w.reflexive) continue;
    if (w.from.node >= 0 && w.to.node >= 0) {
      succ[w.from.node].push_back(w.to.node);
      ++indeg[w.to.node];
    }
  }
  std::vector<int> ready;
  std::size_t seen = 0, alive = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!d.nodes[i].alive) continue;
    ++alive;
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  }
  while (!ready.empty()) {
    int i = ready.back();
    ready.pop_back();
    if (!d.nodes[i].alive) continue;
    ++seen;
    for (int j : succ[i])
      if (--indeg[j] == 0) ready.push_back(j);
  }
  if (seen != alive)
    report.add(ErrorCode::CycleDetected, "diagram has a cycle not flagged as reflexive");

  return report;
}

std::string diagram_dump(const TextDiagram& d) {
  std::ostringstream out;
  out << "diagram nodes=" << d.nodes.size() << " wires=" << d.wires.size()
      << " regions=" << d.regions.size() << "\n";
  for (std::size_t i = 0; i < d.inputs.size(); ++i) {
    out << "in " << i << " ref=" << d.inputs[i].ref << " label="
        << (d.inputs[i].label.empty() ? "-" : d.inputs[i].label)
        << (d.inputs[i].in_scope ? " [i]" : " [o]") << "\n";
  }
  for (std::size_t i = 0; i < d.outputs.size(); ++i)
    out << "out " << i << " ref=" << d.outputs[i].ref << "\n";
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    const DiagNode& nd = d.nodes[i];
    if (!nd.alive) continue;
    out << "node " << i << " " << node_kind_name(nd.kind);
    if (!nd.token.empty()) out << " '" << nd.token << "'";
    if (nd.region >= 0) out << " region=" << nd.region;
    if (!nd.mod_tokens.empty()) {
      out << " mods=[";
      for (std::size_t k = 0; k < nd.mod_tokens.size(); ++k)
        out << (k ? " " : "") << nd.mod_tokens[k];
      out << "]";
    }
    if (!nd.refl_pairs.empty()) {
      out << " refl=";
      for (auto [a, b] : nd.refl_pairs) out << "(" << a << " " << b << ")";
    }
    out << "\n";
  }
  for (std::size_t i = 0; i < d.wires.size(); ++i) {
    const DiagWire& w = d.wires[i];
    if (!w.alive) continue;
    auto end = [&](const PortRef& p) {
      std::ostringstream s;
      if (p.node == kBoundaryIn) s << "IN." << p.port;
      else if (p.node == kBoundaryOut) s << "OUT." << p.port;
      else s << p.node << "." << p.port;
      return s.str();
    };
    out << "wire " << i << " " << wire_type_name(w.type) << " " << end(w.from) << " -> "
        << end(w.to) << (w.reflexive ? " refl" : "") << "\n";
  }
  for (const auto& r : d.regions) {
    if (!r.alive) continue;
    out << "region " << r.id << " " << region_kind_name(r.kind) << " parent=" << r.parent
        << " owner=" << r.owner << "\n";
  }
  return out.str();
}

std::string diagram_dot(const TextDiagram& d) {
  std::ostringstream out;
  out << "digraph textdiagram {\n  rankdir=TB;\n";
  // Regions become nested clusters; emit nodes grouped by region.
  std::map<int, std::vector<int>> by_region;
  for (std::size_t i = 0; i < d.nodes.size(); ++i)
    if (d.nodes[i].alive) by_region[d.nodes[i].region].push_back(static_cast<int>(i));

  auto color_of = [](NodeKind k) {
    switch (k) {
      case NodeKind::GateNode:
      case NodeKind::BoxNode: return "black";
      case NodeKind::LinkOut:
      case NodeKind::LinkIn: return "orange";
      case NodeKind::ScvIntro:
      case NodeKind::CnjIntro: return "blue";
      case NodeKind::PsvOpen:
      case NodeKind::PsvClose:
      case NodeKind::PossOut:
      case NodeKind::PossIn:
      case NodeKind::IngMark: return "purple";
      default: return "gray30";
    }
  };

  std::function<void(int, int)> emit_region = [&](int region, int depth) {
    std::string pad(static_cast<std::size_t>(depth) * 2 + 2, ' ');
    for (const auto& r : d.regions) {
      if (!r.alive || r.parent != region) continue;
      out << pad << "subgraph cluster_r" << r.id << " {\n"
          << pad << "label=\"" << region_kind_name(r.kind) << "\"; style=dashed;\n";
      emit_region(r.id, depth + 1);
      out << pad << "}\n";
    }
    for (int i : by_region[region]) {
      const DiagNode& nd = d.nodes[i];
      out << pad << "n" << i << " [shape=box color=" << color_of(nd.kind) << " label=\""
          << node_kind_name(nd.kind);
      if (!nd.token.empty()) out << "\\n" << nd.token;
      out << "\"];\n";
    }
  };
  // The -1 "region" is the top level.
  for (std::size_t i = 0; i < d.inputs.size(); ++i) {
    out << "  in" << i << " [shape=plaintext label=\""
        << (d.inputs[i].label.empty() ? "?" : d.inputs[i].label) << "\"];\n";
  }
  for (std::size_t i = 0; i < d.outputs.size(); ++i)
    out << "  out" << i << " [shape=point];\n";
  emit_region(-1, 0);

  for (std::size_t i = 0; i < d.wires.size(); ++i) {
    const DiagWire& w = d.wires[i];
    if (!w.alive) continue;
    auto name = [&](const PortRef& p, bool from) {
      std::ostringstream s;
      if (p.node == kBoundaryIn) s << "in" << p.port;
      else if (p.node == kBoundaryOut) s << "out" << p.port;
      else s << "n" << p.node;
      (void)from;
      return s.str();
    };
    const char* style = w.type == WireType::PronLink || w.type == WireType::PossLink
                            ? "dashed" : "solid";
    out << "  " << name(w.from, true) << " -> " << name(w.to, false) << " [style=" << style
        << " label=\"" << wire_type_name(w.type) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace textcirc
