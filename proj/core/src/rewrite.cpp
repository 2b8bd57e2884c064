#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "textcirc/extensions.hpp"
#include "textcirc/rewrite.hpp"
#include "textcirc/rng.hpp"

namespace textcirc {

const char* rewrite_rule_name(RewriteRule rule) {
  switch (rule) {
    case RewriteRule::LinkElim1: return "link-elim-1";
    case RewriteRule::LinkElim2: return "link-elim-2";
    case RewriteRule::LinkElimTwistL: return "link-elim-twist-l";
    case RewriteRule::LinkElimTwistR: return "link-elim-twist-r";
    case RewriteRule::ReflexIntro: return "reflex-intro";
    case RewriteRule::ReflexAssoc: return "reflex-assoc";
    case RewriteRule::ReflexIdentity: return "reflex-identity";
    case RewriteRule::ReflexSplit: return "reflex-split";
    case RewriteRule::ReflexSlide: return "reflex-slide";
    case RewriteRule::IsElimination: return "is-elimination";
    case RewriteRule::AdvGather: return "adv-gather";
    case RewriteRule::AdvAssoc: return "adv-assoc";
    case RewriteRule::AdpIVAncilla: return "adp-iv-ancilla";
    case RewriteRule::AdpTVAncilla: return "adp-tv-ancilla";
    case RewriteRule::AdpGather: return "adp-gather";
    case RewriteRule::AdpAssoc: return "adp-assoc";
    case RewriteRule::AdpAdvOrder: return "adp-adv-order";
    case RewriteRule::GateContract: return "gate-contract";
    case RewriteRule::ScvReduce: return "scv-reduce";
    case RewriteRule::CnjReduce: return "cnj-reduce";
    case RewriteRule::CnjSharedReduce: return "cnj-shared-reduce";
    case RewriteRule::ScopeCap: return "scope-cap";
    case RewriteRule::ExistsIntro: return "exists-intro";
    case RewriteRule::AmpersandReduce: return "ampersand-reduce";
    case RewriteRule::PassiveReduce: return "passive-reduce";
    case RewriteRule::PossessiveReduce: return "possessive-reduce";
    case RewriteRule::IngReduce: return "ing-reduce";
  }
  return "?";
}

std::string RewriteTrace::to_string() const {
  std::ostringstream out;
  for (const auto& step : steps) {
    out << rewrite_rule_name(step.rule);
    for (int id : step.nodes) out << " " << id;
    out << " [" << step.measure_before << " -> " << step.measure_after << "]\n";
  }
  return out.str();
}

namespace {

struct Match {
  RewriteRule rule;
  std::vector<int> ids;
};

using Picker = std::function<int(const std::vector<Match>&)>;

bool is_crossing(NodeKind k) {
  return k == NodeKind::ScopeEnterL || k == NodeKind::ScopeExitL ||
         k == NodeKind::ScopeEnterR || k == NodeKind::ScopeExitR;
}

bool is_enter(NodeKind k) {
  return k == NodeKind::ScopeEnterL || k == NodeKind::ScopeEnterR;
}
bool is_exit(NodeKind k) {
  return k == NodeKind::ScopeExitL || k == NodeKind::ScopeExitR;
}

// NP flow through a node: the out port continuing the wire that enters at
// in_port.  Reflexive pairs (0-based, earlier position first) forward the
// flow to the class's last position.
int np_out_for(const DiagNode& n, int in_port) {
  switch (n.kind) {
    case NodeKind::IvIntro:
    case NodeKind::AdjIntro:
    case NodeKind::AdjIsIntro:
    case NodeKind::IngMark:
    case NodeKind::ScopeEnterL:
    case NodeKind::ScopeExitL:
    case NodeKind::ScopeEnterR:
    case NodeKind::ScopeExitR:
    case NodeKind::LinkIn:
    case NodeKind::LinkOut:
    case NodeKind::PossOut:
      return 0;
    case NodeKind::TvIntro:
      return in_port == 0 ? 0 : 2;
    case NodeKind::AdpIv:
    case NodeKind::AdpTv:
      return in_port == 1 ? 1 : -1;
    case NodeKind::AdpBlock:
      return in_port >= 1 ? in_port : -1;
    case NodeKind::PsvOpen:
      return in_port;  // 0 -> 0, 1 -> 1
    case NodeKind::PossIn:
      return in_port == 1 ? 0 : -1;
    case NodeKind::ScvIntro:
    case NodeKind::GateNode:
    case NodeKind::BoxNode: {
      int pos = in_port;
      bool moved = true;
      while (moved) {
        moved = false;
        for (auto [i, j] : n.refl_pairs) {
          if (i == pos) {
            pos = j;
            moved = true;
          }
        }
      }
      return pos;
    }
    default:
      return -1;
  }
}

struct Engine {
  TextDiagram d;
  RewriteTrace trace;
  ValidationReport report;
  Picker picker;
  bool stop = false;

  explicit Engine(TextDiagram diagram) : d(std::move(diagram)) {}

  void fail(ErrorCode code, const std::string& message) {
    report.add(code, message);
    stop = true;
  }

  void step(RewriteRule rule, std::vector<int> ids, int before, int after) {
    trace.steps.push_back(TraceStep{rule, std::move(ids), before, after});
  }

  int pick(const std::vector<Match>& matches) {
    if (!picker) return 0;
    int k = picker(matches);
    return k >= 0 && k < static_cast<int>(matches.size()) ? k : 0;
  }

  void kill_wire(int w) {
    if (w >= 0) d.wires[w].alive = false;
  }

  void retarget(int wire, PortRef to) {
    d.wires[wire].to = to;
    if (to.node >= 0) d.nodes[to.node].in_wires[to.port] = wire;
  }

  void resource(int wire, PortRef from) {
    d.wires[wire].from = from;
    if (from.node >= 0) d.nodes[from.node].out_wires[from.port] = wire;
  }

  // Drops wires left hanging on dead nodes.
  void sweep() {
    for (auto& w : d.wires) {
      if (!w.alive) continue;
      if ((w.from.node >= 0 && !d.nodes[w.from.node].alive) ||
          (w.to.node >= 0 && !d.nodes[w.to.node].alive))
        w.alive = false;
    }
  }

  bool reaches(int from_node, int to_node) {
    if (from_node == to_node) return true;
    std::vector<int> stack{from_node};
    std::vector<bool> seen(d.nodes.size(), false);
    while (!stack.empty()) {
      int n = stack.back();
      stack.pop_back();
      if (n == to_node) return true;
      if (n < 0 || seen[n]) continue;
      seen[n] = true;
      for (int w : d.nodes[n].out_wires) {
        if (w < 0 || !d.wires[w].alive || d.wires[w].reflexive) continue;
        if (d.wires[w].to.node >= 0) stack.push_back(d.wires[w].to.node);
      }
    }
    return false;
  }

  // --- stage 1: pronominal links -------------------------------------------

  int live_links() {
    int n = 0;
    for (const auto& w : d.wires)
      if (w.alive && w.type == WireType::PronLink) ++n;
    return n;
  }

  std::vector<Match> link_matches() {
    std::vector<Match> reflexive, regular;
    for (std::size_t i = 0; i < d.wires.size(); ++i) {
      const DiagWire& w = d.wires[i];
      if (!w.alive || w.type != WireType::PronLink) continue;
      if (w.reflexive)
        reflexive.push_back(Match{RewriteRule::ReflexIntro, {static_cast<int>(i)}});
      else
        regular.push_back(Match{RewriteRule::LinkElim1, {static_cast<int>(i)}});
    }
    // Policy: reflexive pronoun box introductions come before the other
    // eliminations.
    return reflexive.empty() ? regular : reflexive;
  }

  void apply_link(const Match& m) {
    int before = live_links();
    int wid = m.ids[0];
    const DiagWire link = d.wires[wid];
    int lo = link.from.node;  // LinkOut
    int li = link.to.node;    // LinkIn
    if (lo < 0 || li < 0 || d.nodes[lo].kind != NodeKind::LinkOut ||
        d.nodes[li].kind != NodeKind::LinkIn) {
      fail(ErrorCode::CyclicLink, "pronominal link wire is not between link nodes");
      return;
    }
    int w_in = d.nodes[lo].in_wires[0];
    int w_out = d.nodes[li].out_wires[0];
    PortRef source = d.wires[w_in].from;
    PortRef target = d.wires[w_out].to;

    if (m.rule == RewriteRule::ReflexIntro) {
      // One-wire gates on the identification path slide below the cluster
      // (they are read after the verb in text).
      int cursor = w_out;
      std::vector<int> sliders;
      while (d.wires[cursor].to.node >= 0) {
        int n = d.wires[cursor].to.node;
        NodeKind k = d.nodes[n].kind;
        if (k == NodeKind::AdjIntro || k == NodeKind::AdjIsIntro || k == NodeKind::IngMark ||
            k == NodeKind::IvIntro) {
          sliders.push_back(n);
          cursor = d.nodes[n].out_wires[0];
          continue;
        }
        break;
      }
      PortRef final_target = d.wires[cursor].to;
      if (final_target.node < 0) {
        fail(ErrorCode::CyclicLink, "reflexive link does not reach a gate cluster");
        return;
      }
      int target_node = final_target.node;
      int out_port = np_out_for(d.nodes[target_node], final_target.port);
      if (out_port < 0 || out_port >= static_cast<int>(d.nodes[target_node].out_wires.size())) {
        fail(ErrorCode::CyclicLink, "reflexive link enters a port with no continuation");
        return;
      }
      if (!sliders.empty()) {
        int cont = d.nodes[target_node].out_wires[out_port];
        int first = sliders.front();
        int last = sliders.back();
        int tail_out = d.nodes[last].out_wires[0];
        kill_wire(d.nodes[first].in_wires[0]);
        if (cont >= 0) {
          PortRef cont_to = d.wires[cont].to;
          retarget(cont, PortRef{first, 0});
          retarget(tail_out, cont_to);
        } else {
          kill_wire(tail_out);
        }
      }
      d.nodes[lo].alive = false;
      d.nodes[li].alive = false;
      kill_wire(wid);
      if (static_cast<int>(sliders.size()) > 0 || w_out >= 0) kill_wire(w_out);
      kill_wire(d.nodes[li].in_wires[0]);
      kill_wire(w_in);
      int e = d.add_wire(DiagWire{WireType::NP, source, final_target, true, true});
      if (source.node >= 0) d.nodes[source.node].out_wires[source.port] = e;
      d.nodes[target_node].in_wires[final_target.port] = e;
      step(RewriteRule::ReflexIntro, {wid}, before, live_links());
      return;
    }

    // Plain elimination: sequential composition of the two segments.
    if (target.node >= 0 && source.node >= 0 && reaches(target.node, source.node)) {
      fail(ErrorCode::CyclicLink, "pronominal link would compose forward into its own past");
      return;
    }
    d.nodes[lo].alive = false;
    d.nodes[li].alive = false;
    kill_wire(wid);
    kill_wire(w_out);
    retarget(w_in, target);
    step(RewriteRule::LinkElim1, {wid}, before, live_links());
  }

  void eliminate_links_stage() {
    while (!stop) {
      auto matches = link_matches();
      if (matches.empty()) return;
      apply_link(matches[static_cast<std::size_t>(pick(matches))]);
    }
  }

  // --- stage 2: reflexive shrinking ------------------------------------------

  int group_boxes() {
    int n = 0;
    for (const auto& node : d.nodes)
      if (node.alive && node.kind == NodeKind::BoxNode && node.box &&
          node.box->kind == Instance::Kind::ReflexGroup)
        ++n;
    return n;
  }

  void shrink_stage() {
    while (!stop) {
      int target = -1;
      for (std::size_t ni = 0; ni < d.nodes.size(); ++ni) {
        const DiagNode& node = d.nodes[ni];
        if (node.alive && node.kind == NodeKind::BoxNode && node.box &&
            node.box->kind == Instance::Kind::ReflexGroup) {
          target = static_cast<int>(ni);
          break;
        }
      }
      if (target < 0) return;
      expand_group(target);
    }
  }

  // Recasts one reflexive group box into per-gate boxes: nested groups fuse
  // (associativity), sequential gates split into their own boxes, gates left
  // without identified wires slide out / lose the box.
  void expand_group(int ni) {
    int before = group_boxes();
    const DiagNode node = d.nodes[ni];
    const Instance& group = *node.box;
    if (!group.group) {
      fail(ErrorCode::CyclicLink, "reflexive group box without content");
      return;
    }
    TextCircuit inner = normalize_circuit(*group.group);  // fuses nested groups
    if (inner.wires.size() != group.pos_args.size()) {
      fail(ErrorCode::CyclicLink, "reflexive group arguments do not match its wires");
      return;
    }
    if (group.group->instances.size() != inner.instances.size())
      step(RewriteRule::ReflexAssoc, {ni}, before, before);

    std::vector<int> tail(node.in_wires.size());
    for (std::size_t p = 0; p < node.in_wires.size(); ++p) tail[p] = node.in_wires[p];

    for (std::size_t k = 0; k < inner.instances.size(); ++k) {
      Instance mapped = inner.instances[k];
      for (int& a : mapped.pos_args) a = group.pos_args[a];  // local wire -> box port
      std::vector<int> ports = mapped.distinct_args();
      mapped.reflexive = mapped.has_repeats();

      Instance boxed = mapped;
      std::map<int, int> local;
      for (std::size_t p = 0; p < ports.size(); ++p) local[ports[p]] = static_cast<int>(p);
      for (int& a : boxed.pos_args) a = local[a];

      DiagNode nn;
      nn.kind = NodeKind::BoxNode;
      nn.region = node.region;
      for (auto [i, j] : boxed.reflexive_pairs()) nn.refl_pairs.push_back({i - 1, j - 1});
      nn.box = std::make_shared<const Instance>(std::move(boxed));
      nn.in_wires.assign(ports.size(), kNoWire);
      nn.out_wires.assign(ports.size(), kNoWire);
      int id = d.add_node(std::move(nn));
      for (std::size_t p = 0; p < ports.size(); ++p) {
        retarget(tail[ports[p]], PortRef{id, static_cast<int>(p)});
        int out = d.add_wire(DiagWire{WireType::NP, PortRef{id, static_cast<int>(p)},
                                      PortRef{kBoundaryOut, -1}, false, true});
        d.nodes[id].out_wires[p] = out;
        tail[ports[p]] = out;
      }
      RewriteRule rule = mapped.has_repeats()
                             ? RewriteRule::ReflexSplit
                             : (ports.size() == 1 ? RewriteRule::ReflexSlide
                                                  : RewriteRule::ReflexIdentity);
      step(rule, {ni, id}, before, before);
    }
    for (std::size_t p = 0; p < node.out_wires.size(); ++p) {
      int old_out = node.out_wires[p];
      if (old_out < 0) continue;
      PortRef from = d.wires[tail[p]].from;
      kill_wire(tail[p]);
      resource(old_out, from);
    }
    d.nodes[ni].alive = false;
    sweep();
    step(RewriteRule::ReflexIdentity, {ni}, before, group_boxes());
  }

  // --- stage 3: gate normalisation -------------------------------------------

  bool adv_ish(NodeKind k) {
    return k == NodeKind::AdvIv || k == NodeKind::AdvTv || k == NodeKind::AdvBlock;
  }
  bool adp_raw(NodeKind k) { return k == NodeKind::AdpIv || k == NodeKind::AdpTv; }

  // The node below `n` on its verb wire.
  int below_on_v(int n) {
    for (int w : d.nodes[n].out_wires) {
      if (w < 0 || !d.wires[w].alive) continue;
      WireType t = d.wires[w].type;
      if (t == WireType::IVP || t == WireType::TVP || t == WireType::TvpPsv)
        return d.wires[w].to.node;
    }
    return -1;
  }

  // Strictly decreasing across every gate-normalisation rule: weighted node
  // counts plus adverb-above-adposition inversions.
  int modifier_measure() {
    int n = 0;
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      const DiagNode& node = d.nodes[i];
      if (!node.alive) continue;
      switch (node.kind) {
        case NodeKind::AdjIsIntro: n += 2; break;
        case NodeKind::AdjIntro: n += 1; break;
        case NodeKind::AdvIv:
        case NodeKind::AdvTv:
        case NodeKind::AdvBlock:
        case NodeKind::AdpBlock:
        case NodeKind::VLabel: n += 1; break;
        case NodeKind::AdpIv:
        case NodeKind::AdpTv: n += 2; break;
        case NodeKind::IvIntro:
        case NodeKind::TvIntro: n += 1; break;
        case NodeKind::ScvIntro:
          if (node.token.empty()) n += 1;
          break;
        default: break;
      }
      // Inversions below intro nodes.
      if (node.kind == NodeKind::IvIntro || node.kind == NodeKind::TvIntro ||
          (node.kind == NodeKind::ScvIntro && node.token.empty()) ||
          node.kind == NodeKind::PsvOpen) {
        std::vector<NodeKind> chain;
        int cur = below_on_v(static_cast<int>(i));
        while (cur >= 0) {
          chain.push_back(d.nodes[cur].kind);
          if (d.nodes[cur].kind == NodeKind::VLabel ||
              d.nodes[cur].kind == NodeKind::PsvClose)
            break;
          cur = below_on_v(cur);
        }
        for (std::size_t a = 0; a < chain.size(); ++a)
          for (std::size_t b = a + 1; b < chain.size(); ++b)
            if (adv_ish(chain[a]) && (chain[b] == NodeKind::AdpBlock || adp_raw(chain[b])))
              ++n;
      }
    }
    return n;
  }

  std::vector<Match> gate_matches() {
    std::vector<Match> out;
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      const DiagNode& n = d.nodes[i];
      if (!n.alive) continue;
      int id = static_cast<int>(i);
      switch (n.kind) {
        case NodeKind::AdjIsIntro:
          out.push_back(Match{RewriteRule::IsElimination, {id}});
          break;
        case NodeKind::AdpIv:
          out.push_back(Match{RewriteRule::AdpIVAncilla, {id}});
          break;
        case NodeKind::AdpTv:
          out.push_back(Match{RewriteRule::AdpTVAncilla, {id}});
          break;
        case NodeKind::AdvIv:
        case NodeKind::AdvTv:
        case NodeKind::AdvBlock: {
          int b = below_on_v(id);
          if (b >= 0 && adv_ish(d.nodes[b].kind))
            out.push_back(Match{RewriteRule::AdvGather, {id, b}});
          else if (b >= 0 && d.nodes[b].kind == NodeKind::AdpBlock)
            out.push_back(Match{RewriteRule::AdpAdvOrder, {id, b}});
          break;
        }
        case NodeKind::AdpBlock: {
          int b = below_on_v(id);
          if (b >= 0 && d.nodes[b].kind == NodeKind::AdpBlock)
            out.push_back(Match{RewriteRule::AdpGather, {id, b}});
          break;
        }
        case NodeKind::AdjIntro:
          out.push_back(Match{RewriteRule::GateContract, {id}});
          break;
        case NodeKind::IvIntro:
        case NodeKind::TvIntro:
        case NodeKind::ScvIntro: {
          if (n.kind == NodeKind::ScvIntro && !n.token.empty()) break;  // contracted
          if (contractible_chain(id)) out.push_back(Match{RewriteRule::GateContract, {id}});
          break;
        }
        default:
          break;
      }
    }
    return out;
  }

  // intro -> [AdpBlock]? -> [adverb node]? -> VLabel
  bool contractible_chain(int id) {
    int cur = below_on_v(id);
    bool saw_adp = false, saw_adv = false;
    while (cur >= 0) {
      NodeKind k = d.nodes[cur].kind;
      if (k == NodeKind::AdpBlock) {
        if (saw_adp || saw_adv) return false;
        saw_adp = true;
      } else if (adv_ish(k)) {
        if (saw_adv) return false;
        saw_adv = true;
      } else if (k == NodeKind::VLabel) {
        return true;
      } else {
        return false;
      }
      cur = below_on_v(cur);
    }
    return false;
  }

  void apply_gate(const Match& m) {
    int before = modifier_measure();
    switch (m.rule) {
      case RewriteRule::IsElimination:
        d.nodes[m.ids[0]].kind = NodeKind::AdjIntro;
        break;
      case RewriteRule::AdpIVAncilla:
      case RewriteRule::AdpTVAncilla: {
        DiagNode& n = d.nodes[m.ids[0]];
        n.kind = NodeKind::AdpBlock;
        n.mod_tokens = {n.token};
        n.token.clear();
        break;
      }
      case RewriteRule::AdvGather: {
        DiagNode& upper = d.nodes[m.ids[0]];
        DiagNode& lower = d.nodes[m.ids[1]];
        // Adverbs read top-down.
        std::vector<std::string> mods =
            upper.kind == NodeKind::AdvBlock ? upper.mod_tokens
                                             : std::vector<std::string>{upper.token};
        if (lower.kind == NodeKind::AdvBlock)
          mods.insert(mods.end(), lower.mod_tokens.begin(), lower.mod_tokens.end());
        else
          mods.push_back(lower.token);
        upper.kind = NodeKind::AdvBlock;
        upper.token.clear();
        upper.mod_tokens = std::move(mods);
        bypass_below(m.ids[0], m.ids[1]);
        break;
      }
      case RewriteRule::AdpGather: {
        merge_adp(m.ids[0], m.ids[1]);
        break;
      }
      case RewriteRule::AdpAdvOrder:
        swap_on_v(m.ids[0], m.ids[1]);
        break;
      case RewriteRule::GateContract:
        contract(m.ids[0]);
        break;
      default:
        break;
    }
    step(m.rule, m.ids, before, modifier_measure());
  }

  // Removes `lower` from the V wire below `upper`.
  void bypass_below(int upper, int lower) {
    int uv_out = d.nodes[upper].out_wires[0];
    int lv_out = d.nodes[lower].out_wires[0];
    PortRef to = d.wires[lv_out].to;
    kill_wire(lv_out);
    retarget(uv_out, to);
    d.nodes[lower].alive = false;
  }

  // Two adjacent adposition blocks; the lower one is textually earlier, so
  // its tokens and noun ports come first.
  void merge_adp(int upper, int lower) {
    DiagNode& u = d.nodes[upper];
    DiagNode& l = d.nodes[lower];
    std::vector<std::string> mods = l.mod_tokens;
    mods.insert(mods.end(), u.mod_tokens.begin(), u.mod_tokens.end());
    std::vector<int> np_in, np_out;
    for (std::size_t p = 1; p < l.in_wires.size(); ++p) np_in.push_back(l.in_wires[p]);
    for (std::size_t p = 1; p < u.in_wires.size(); ++p) np_in.push_back(u.in_wires[p]);
    for (std::size_t p = 1; p < l.out_wires.size(); ++p) np_out.push_back(l.out_wires[p]);
    for (std::size_t p = 1; p < u.out_wires.size(); ++p) np_out.push_back(u.out_wires[p]);

    bypass_below(upper, lower);
    l.alive = false;
    u.mod_tokens = std::move(mods);
    u.in_wires.resize(1);
    u.out_wires.resize(1);
    for (std::size_t k = 0; k < np_in.size(); ++k) {
      u.in_wires.push_back(kNoWire);
      u.out_wires.push_back(kNoWire);
      if (np_in[k] >= 0) retarget(np_in[k], PortRef{upper, static_cast<int>(k) + 1});
      if (np_out[k] >= 0) resource(np_out[k], PortRef{upper, static_cast<int>(k) + 1});
    }
  }

  void swap_on_v(int adv, int adp) {
    int in_a = d.nodes[adv].in_wires[0];
    int a_out = d.nodes[adv].out_wires[0];  // adv -> adp
    int b_out = d.nodes[adp].out_wires[0];
    PortRef below = d.wires[b_out].to;
    retarget(in_a, PortRef{adp, 0});
    resource(a_out, PortRef{adp, 0});
    retarget(a_out, PortRef{adv, 0});
    resource(b_out, PortRef{adv, 0});
    retarget(b_out, below);
  }

  void contract(int intro) {
    DiagNode& n = d.nodes[intro];
    if (n.kind == NodeKind::AdjIntro) {
      DiagNode gate;
      gate.kind = NodeKind::GateNode;
      gate.region = n.region;
      gate.core.kind = GateCore::Kind::Adj;
      gate.core.token = n.token;
      gate.in_wires.assign(1, kNoWire);
      gate.out_wires.assign(1, kNoWire);
      int id = d.add_node(std::move(gate));
      if (n.in_wires[0] >= 0) retarget(n.in_wires[0], PortRef{id, 0});
      if (n.out_wires[0] >= 0) resource(n.out_wires[0], PortRef{id, 0});
      n.alive = false;
      convert_backedges(id);
      return;
    }

    std::vector<int> chain;
    int cur = below_on_v(intro);
    while (cur >= 0) {
      chain.push_back(cur);
      if (d.nodes[cur].kind == NodeKind::VLabel) break;
      cur = below_on_v(cur);
    }
    const DiagNode& label = d.nodes[chain.back()];

    GateCore core;
    core.kind = label.token == Lexicon::kExists ? GateCore::Kind::Exists : GateCore::Kind::Verb;
    core.token = label.token;
    core.verb_arity = n.kind == NodeKind::TvIntro ? 2 : 1;

    std::vector<int> np_in, np_out;
    if (n.kind == NodeKind::TvIntro) {
      np_in = {n.in_wires[0], n.in_wires[1]};
      np_out = {n.out_wires[0], n.out_wires[2]};
    } else {
      np_in = {n.in_wires[0]};
      np_out = {n.out_wires[0]};
    }
    for (int nd : chain) {
      const DiagNode& node = d.nodes[nd];
      if (node.kind == NodeKind::AdpBlock) {
        core.adpositions = node.mod_tokens;
        for (std::size_t p = 1; p < node.in_wires.size(); ++p) {
          np_in.push_back(node.in_wires[p]);
          np_out.push_back(node.out_wires[p]);
        }
      } else if (node.kind == NodeKind::AdvBlock) {
        core.adverbs = node.mod_tokens;
      } else if (node.kind == NodeKind::AdvIv || node.kind == NodeKind::AdvTv) {
        core.adverbs = {node.token};
      }
    }

    DiagNode made;
    made.region = n.region;
    if (n.kind == NodeKind::ScvIntro) {
      made.kind = NodeKind::ScvIntro;
      made.token = core.token;
      made.core = core;
    } else {
      made.kind = NodeKind::GateNode;
      made.core = std::move(core);
    }
    made.in_wires.assign(np_in.size(), kNoWire);
    made.out_wires.assign(np_out.size(), kNoWire);
    int id = d.add_node(std::move(made));
    for (std::size_t p = 0; p < np_in.size(); ++p) {
      if (np_in[p] >= 0) retarget(np_in[p], PortRef{id, static_cast<int>(p)});
      if (np_out[p] >= 0) resource(np_out[p], PortRef{id, static_cast<int>(p)});
    }
    if (n.kind == NodeKind::ScvIntro) {
      for (auto& r : d.regions)
        if (r.alive && r.owner == intro) r.owner = id;
    }
    for (int nd : chain) d.nodes[nd].alive = false;
    n.alive = false;
    sweep();
    convert_backedges(id);
  }

  // Flagged identification edges between two ports of one node become
  // reflexive position pairs (0-based, earlier first).
  void convert_backedges(int id) {
    DiagNode& n = d.nodes[id];
    for (std::size_t out_p = 0; out_p < n.out_wires.size(); ++out_p) {
      int w = n.out_wires[out_p];
      if (w < 0 || !d.wires[w].alive || !d.wires[w].reflexive) continue;
      if (d.wires[w].to.node != id) continue;
      int in_p = d.wires[w].to.port;
      n.refl_pairs.push_back({static_cast<int>(out_p), in_p});
      kill_wire(w);
      n.out_wires[out_p] = kNoWire;
      n.in_wires[in_p] = kNoWire;
    }
  }

  void gate_stage() {
    while (!stop) {
      auto matches = gate_matches();
      if (matches.empty()) return;
      apply_gate(matches[static_cast<std::size_t>(pick(matches))]);
    }
  }

  // --- stage 4: scope reduction -----------------------------------------------

  int live_regions() {
    int n = 0;
    for (const auto& r : d.regions)
      if (r.alive) ++n;
    return n;
  }

  bool region_ready(int rid) {
    for (const auto& r : d.regions)
      if (r.alive && r.parent == rid) return false;
    for (const auto& n : d.nodes) {
      if (!n.alive || n.region != rid) continue;
      if (n.kind != NodeKind::GateNode && n.kind != NodeKind::BoxNode && !is_crossing(n.kind))
        return false;
    }
    return true;
  }

  std::vector<Match> scope_matches() {
    std::vector<Match> out;
    std::set<int> claimed;
    for (const auto& r : d.regions) {
      if (!r.alive || claimed.count(r.id)) continue;
      if (r.kind == ScopeRegion::Kind::ScvComplement) {
        if (region_ready(r.id)) out.push_back(Match{RewriteRule::ScvReduce, {r.id}});
      } else if (r.kind == ScopeRegion::Kind::CnjLeft) {
        int partner = -1;
        for (const auto& q : d.regions)
          if (q.alive && q.owner == r.owner && q.kind == ScopeRegion::Kind::CnjRight)
            partner = q.id;
        if (partner >= 0 && region_ready(r.id) && region_ready(partner)) {
          out.push_back(Match{RewriteRule::CnjReduce, {r.id, partner}});
          claimed.insert(partner);
        }
      }
    }
    return out;
  }

  struct WireInfo {
    Ref ref = 0;
    std::string label;
    bool known = false;
  };

  std::vector<WireInfo> propagate_refs() {
    std::vector<WireInfo> info(d.wires.size());
    for (std::size_t i = 0; i < d.inputs.size(); ++i) {
      int w = -1;
      for (std::size_t k = 0; k < d.wires.size(); ++k) {
        if (d.wires[k].alive && d.wires[k].from.node == kBoundaryIn &&
            d.wires[k].from.port == static_cast<int>(i))
          w = static_cast<int>(k);
      }
      int guard = 0;
      while (w >= 0 && d.wires[w].alive && ++guard < 100000) {
        info[w].ref = d.inputs[i].ref;
        info[w].label = d.inputs[i].label;
        info[w].known = true;
        PortRef to = d.wires[w].to;
        if (to.node < 0) break;
        int out = np_out_for(d.nodes[to.node], to.port);
        if (out < 0 || out >= static_cast<int>(d.nodes[to.node].out_wires.size())) break;
        w = d.nodes[to.node].out_wires[out];
      }
    }
    return info;
  }

  struct RegionCircuit {
    TextCircuit circuit;           // local wires, one per crossing referent
    std::vector<int> entry_wires;  // outer wire above each crossing
    std::vector<int> exit_wires;   // outer wire below
    std::vector<Ref> refs;
    std::vector<int> member_nodes;
    bool untouched_wire = false;   // some wire meets no gate in the hole
  };

  bool build_region_circuit(int rid, const std::vector<WireInfo>& winfo, RegionCircuit& out) {
    std::vector<int> enters;
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      const DiagNode& n = d.nodes[i];
      if (n.alive && n.region == rid && is_enter(n.kind)) enters.push_back(static_cast<int>(i));
    }
    std::map<Ref, int> local_of_ref;
    std::vector<std::vector<int>> wire_events;

    for (int enter : enters) {
      int w_above = d.nodes[enter].in_wires[0];
      if (w_above < 0 || !winfo[w_above].known) return false;
      Ref ref = winfo[w_above].ref;

      int local;
      auto it = local_of_ref.find(ref);
      if (it == local_of_ref.end()) {
        local = static_cast<int>(out.circuit.wires.size());
        local_of_ref[ref] = local;
        NounWire wire;
        wire.ref = static_cast<Ref>(local);
        wire.label = winfo[w_above].label;
        out.circuit.wires.push_back(wire);
        out.refs.push_back(ref);
        out.entry_wires.push_back(w_above);
        out.exit_wires.push_back(-1);
        wire_events.push_back({});
      } else {
        local = it->second;
      }
      out.member_nodes.push_back(enter);

      int w = d.nodes[enter].out_wires[0];
      int guard = 0;
      while (w >= 0 && ++guard < 10000) {
        PortRef to = d.wires[w].to;
        if (to.node < 0) return false;
        const DiagNode& n = d.nodes[to.node];
        if (is_exit(n.kind) && n.region == rid) {
          out.exit_wires[local] = n.out_wires[0];
          out.member_nodes.push_back(to.node);
          break;
        }
        if (n.kind == NodeKind::GateNode || n.kind == NodeKind::BoxNode) {
          wire_events[local].push_back(to.node);
        } else if (!is_crossing(n.kind)) {
          return false;
        }
        int outp = np_out_for(n, to.port);
        if (outp < 0) return false;
        w = n.out_wires[outp];
      }
    }

    std::map<int, int> inst_of_node;
    for (std::size_t k = 0; k < wire_events.size(); ++k) {
      if (wire_events[k].empty()) out.untouched_wire = true;
      for (int nd : wire_events[k]) {
        if (inst_of_node.count(nd)) continue;
        inst_of_node[nd] = static_cast<int>(out.circuit.instances.size());
        out.circuit.instances.push_back(node_instance(nd));
        out.member_nodes.push_back(nd);
      }
    }
    out.circuit.events.resize(out.circuit.wires.size());
    for (std::size_t k = 0; k < wire_events.size(); ++k) {
      for (int nd : wire_events[k]) {
        int idx = inst_of_node[nd];
        auto& ev = out.circuit.events[k];
        if (std::find(ev.begin(), ev.end(), idx) == ev.end()) ev.push_back(idx);
      }
    }

    // Rewrite instance pos_args from node ports to local wires, matching by
    // referent.
    for (auto& [nd, idx] : inst_of_node) {
      Instance& inst = out.circuit.instances[idx];
      const DiagNode& n = d.nodes[nd];
      std::vector<int> port_to_local(std::max(n.in_wires.size(), n.out_wires.size()), -1);
      for (std::size_t p = 0; p < port_to_local.size(); ++p) {
        int w = p < n.in_wires.size() ? n.in_wires[p] : kNoWire;
        if (w < 0 && p < n.out_wires.size()) w = n.out_wires[p];
        if (w < 0 || !winfo[w].known) continue;
        auto it = local_of_ref.find(winfo[w].ref);
        if (it != local_of_ref.end()) port_to_local[p] = it->second;
      }
      // Vacated reflexive ports inherit their class representative.
      for (auto [a, b] : n.refl_pairs) {
        if (port_to_local[b] < 0) port_to_local[b] = port_to_local[a];
        if (port_to_local[a] < 0) port_to_local[a] = port_to_local[b];
      }
      for (int& arg : inst.pos_args) {
        if (arg < 0 || arg >= static_cast<int>(port_to_local.size()) || port_to_local[arg] < 0)
          return false;
        arg = port_to_local[arg];
      }
      inst.reflexive = inst.reflexive || inst.has_repeats();
    }
    return true;
  }

  Instance node_instance(int nd) {
    const DiagNode& n = d.nodes[nd];
    Instance inst;
    if (n.kind == NodeKind::GateNode) {
      inst.kind = Instance::Kind::Gate;
      inst.gate = n.core;
      int k = inst.gate.arg_count();
      inst.pos_args.resize(k);
      for (int p = 0; p < k; ++p) inst.pos_args[p] = p;
      for (auto [i, j] : n.refl_pairs) {
        inst.pos_args[j] = inst.pos_args[i];
        inst.reflexive = true;
      }
    } else {
      inst = *n.box;  // pos_args already index the node's ports
    }
    return inst;
  }

  // ref -> box port collector shared by both scope reductions.
  struct Binder {
    std::vector<Ref> refs;
    std::vector<int> in_w, out_w;
    std::vector<int> pos_args;
    bool shared = false;

    void bind(Ref r, int in_wire, int out_wire) {
      for (std::size_t p = 0; p < refs.size(); ++p) {
        if (refs[p] == r) {
          shared = true;
          if (out_wire >= 0) out_w[p] = out_wire;  // flow continues here
          pos_args.push_back(static_cast<int>(p));
          return;
        }
      }
      refs.push_back(r);
      in_w.push_back(in_wire);
      out_w.push_back(out_wire);
      pos_args.push_back(static_cast<int>(refs.size()) - 1);
    }
  };

  // Referent of a head node's port, following vacated reflexive ports to
  // their class representative.
  bool head_port_ref(const DiagNode& n, std::size_t p, const std::vector<WireInfo>& winfo,
                     Ref& out) {
    int w = p < n.in_wires.size() ? n.in_wires[p] : kNoWire;
    if (w < 0 && p < n.out_wires.size()) w = n.out_wires[p];
    if (w >= 0 && winfo[w].known) {
      out = winfo[w].ref;
      return true;
    }
    for (auto [a, b] : n.refl_pairs) {
      if (static_cast<std::size_t>(b) == p) return head_port_ref(n, a, winfo, out);
      if (static_cast<std::size_t>(a) == p) return head_port_ref(n, b, winfo, out);
    }
    return false;
  }

  void finish_box(Instance inst, const Binder& bind, int region, int before,
                  const std::vector<int>& dead_regions,
                  const std::vector<const RegionCircuit*>& parts, RewriteRule rule) {
    inst.reflexive = inst.has_repeats();
    DiagNode box;
    box.kind = NodeKind::BoxNode;
    box.region = region;
    for (auto [i, j] : inst.reflexive_pairs()) box.refl_pairs.push_back({i - 1, j - 1});
    box.box = std::make_shared<const Instance>(std::move(inst));
    box.in_wires.assign(bind.refs.size(), kNoWire);
    box.out_wires.assign(bind.refs.size(), kNoWire);
    int id = d.add_node(std::move(box));
    for (std::size_t p = 0; p < bind.refs.size(); ++p) {
      if (bind.in_w[p] >= 0) retarget(bind.in_w[p], PortRef{id, static_cast<int>(p)});
      if (bind.out_w[p] >= 0) resource(bind.out_w[p], PortRef{id, static_cast<int>(p)});
    }
    for (const RegionCircuit* rc : parts) {
      for (int nd : rc->member_nodes) d.nodes[nd].alive = false;
      if (rc->untouched_wire)
        step(RewriteRule::ExistsIntro, {dead_regions.front()}, before, before);
    }
    for (int rid : dead_regions) d.regions[rid].alive = false;
    sweep();
    step(rule, dead_regions, before, live_regions());
    step(RewriteRule::ScopeCap, dead_regions, live_regions(), live_regions());
  }

  void apply_scope(const Match& m) {
    int before = live_regions();
    auto winfo = propagate_refs();

    if (m.rule == RewriteRule::ScvReduce) {
      int rid = m.ids[0];
      RegionCircuit rc;
      if (!build_region_circuit(rid, winfo, rc)) {
        fail(ErrorCode::ScopeLeak, "complement region is not reducible");
        return;
      }
      int head = d.regions[rid].owner;
      const DiagNode hn = d.nodes[head];

      Binder bind;
      for (std::size_t p = 0; p < hn.in_wires.size(); ++p) {
        Ref r = 0;
        if (!head_port_ref(hn, p, winfo, r)) {
          fail(ErrorCode::ScopeLeak, "complement head port has no referent");
          return;
        }
        bind.bind(r, hn.in_wires[p], p < hn.out_wires.size() ? hn.out_wires[p] : kNoWire);
      }
      for (std::size_t k = 0; k < rc.refs.size(); ++k)
        bind.bind(rc.refs[k], rc.entry_wires[k], rc.exit_wires[k]);

      Instance inst;
      inst.kind = Instance::Kind::Scv;
      inst.token = hn.token;
      inst.adpositions = hn.core.adpositions;
      inst.adverbs = hn.core.adverbs;
      inst.hole = std::make_shared<const TextCircuit>(rc.circuit);
      inst.pos_args = bind.pos_args;

      d.nodes[head].alive = false;
      finish_box(std::move(inst), bind, hn.region, before, {rid}, {&rc},
                 RewriteRule::ScvReduce);
      return;
    }

    int rl = m.ids[0], rr = m.ids[1];
    RegionCircuit lc, rc;
    if (!build_region_circuit(rl, winfo, lc) || !build_region_circuit(rr, winfo, rc)) {
      fail(ErrorCode::ScopeLeak, "conjunct region is not reducible");
      return;
    }
    int head = d.regions[rl].owner;
    Binder bind;
    for (std::size_t k = 0; k < lc.refs.size(); ++k)
      bind.bind(lc.refs[k], lc.entry_wires[k], lc.exit_wires[k]);
    for (std::size_t k = 0; k < rc.refs.size(); ++k)
      bind.bind(rc.refs[k], rc.entry_wires[k], rc.exit_wires[k]);

    Instance inst;
    inst.kind = Instance::Kind::Cnj;
    inst.token = d.nodes[head].token;
    inst.left = std::make_shared<const TextCircuit>(lc.circuit);
    inst.right = std::make_shared<const TextCircuit>(rc.circuit);
    inst.pos_args = bind.pos_args;

    RewriteRule rule = bind.shared ? RewriteRule::CnjSharedReduce : RewriteRule::CnjReduce;
    d.nodes[head].alive = false;
    finish_box(std::move(inst), bind, d.nodes[head].region, before, {rl, rr}, {&lc, &rc}, rule);
  }

  void scope_stage() {
    while (!stop) {
      auto matches = scope_matches();
      if (matches.empty()) return;
      apply_scope(matches[static_cast<std::size_t>(pick(matches))]);
    }
  }

  // --- extraction ---------------------------------------------------------------

  bool extract(TextCircuit& out) {
    auto winfo = propagate_refs();
    std::map<Ref, int> wire_of_ref;
    for (const auto& in : d.inputs) {
      if (wire_of_ref.count(in.ref)) continue;
      wire_of_ref[in.ref] = static_cast<int>(out.wires.size());
      NounWire w;
      w.ref = in.ref;
      w.label = in.label;
      out.wires.push_back(w);
    }
    out.events.resize(out.wires.size());

    std::map<int, int> inst_of_node;
    for (std::size_t i = 0; i < d.inputs.size(); ++i) {
      int w = -1;
      for (std::size_t k = 0; k < d.wires.size(); ++k) {
        if (d.wires[k].alive && d.wires[k].from.node == kBoundaryIn &&
            d.wires[k].from.port == static_cast<int>(i))
          w = static_cast<int>(k);
      }
      int wire_index = wire_of_ref[d.inputs[i].ref];
      int guard = 0;
      while (w >= 0 && ++guard < 100000) {
        PortRef to = d.wires[w].to;
        if (to.node < 0) break;
        const DiagNode& n = d.nodes[to.node];
        if (n.kind == NodeKind::GateNode || n.kind == NodeKind::BoxNode) {
          auto it = inst_of_node.find(to.node);
          int idx;
          if (it == inst_of_node.end()) {
            Instance inst = node_instance(to.node);
            std::vector<int> port_wire(std::max(n.in_wires.size(), n.out_wires.size()), -1);
            for (std::size_t p = 0; p < port_wire.size(); ++p) {
              int pw = p < n.in_wires.size() ? n.in_wires[p] : kNoWire;
              if (pw < 0 && p < n.out_wires.size()) pw = n.out_wires[p];
              if (pw >= 0 && winfo[pw].known) port_wire[p] = wire_of_ref[winfo[pw].ref];
            }
            for (auto [a, b] : n.refl_pairs) {
              if (port_wire[b] < 0) port_wire[b] = port_wire[a];
              if (port_wire[a] < 0) port_wire[a] = port_wire[b];
            }
            for (int& arg : inst.pos_args) {
              if (arg < 0 || arg >= static_cast<int>(port_wire.size()) || port_wire[arg] < 0) {
                report.add(ErrorCode::TypeMismatch, "instance port not bound to a noun wire");
                return false;
              }
              arg = port_wire[arg];
            }
            inst.reflexive = inst.reflexive || inst.has_repeats();
            idx = static_cast<int>(out.instances.size());
            out.instances.push_back(std::move(inst));
            inst_of_node[to.node] = idx;
          } else {
            idx = it->second;
          }
          auto& ev = out.events[wire_index];
          if (std::find(ev.begin(), ev.end(), idx) == ev.end()) ev.push_back(idx);
        } else if (!is_crossing(n.kind)) {
          report.add(ErrorCode::TypeMismatch,
                     std::string("unreduced node in final diagram: ") + node_kind_name(n.kind));
          return false;
        }
        int op = np_out_for(n, to.port);
        if (op < 0 || op >= static_cast<int>(n.out_wires.size())) break;
        w = n.out_wires[op];
      }
    }
    return true;
  }

  void run_stages() {
    eliminate_links_stage();
    if (!stop) shrink_stage();
    if (!stop) gate_stage();
    if (!stop) scope_stage();
  }
};

Picker make_picker(const RewriteOptions& opts) {
  if (!opts.shuffle) return nullptr;
  auto rng = std::make_shared<Rng>(opts.shuffle_seed);
  return [rng](const std::vector<Match>& matches) {
    return rng->below(static_cast<int>(matches.size()));
  };
}

}  // namespace

RewriteResult eliminate_links(const TextDiagram& d, const RewriteOptions& opts) {
  Engine e(d);
  e.picker = make_picker(opts);
  e.eliminate_links_stage();
  return RewriteResult{std::move(e.d), std::move(e.trace), std::move(e.report)};
}

RewriteResult shrink_reflexive(const TextDiagram& d, const RewriteOptions& opts) {
  Engine e(d);
  e.picker = make_picker(opts);
  e.shrink_stage();
  return RewriteResult{std::move(e.d), std::move(e.trace), std::move(e.report)};
}

RewriteResult normalise_gates(const TextDiagram& d, const RewriteOptions& opts) {
  Engine e(d);
  e.picker = make_picker(opts);
  e.gate_stage();
  return RewriteResult{std::move(e.d), std::move(e.trace), std::move(e.report)};
}

RewriteResult reduce_scopes(const TextDiagram& d, const RewriteOptions& opts) {
  Engine e(d);
  e.picker = make_picker(opts);
  e.scope_stage();
  return RewriteResult{std::move(e.d), std::move(e.trace), std::move(e.report)};
}

CompileResult to_circuit(const TextDiagram& d, const RewriteOptions& opts) {
  CompileResult result;
  TextDiagram cur = d;
  if (has_extension_pieces(cur)) {
    // The lexicon-free extension reductions; passive voice needs compile().
    RewriteResult poss = reduce_possessive(cur);
    if (!poss.ok()) {
      result.report = std::move(poss.report);
      return result;
    }
    for (auto& s : poss.trace.steps) result.trace.steps.push_back(s);
    RewriteResult ing = reduce_ing(poss.diagram);
    if (!ing.ok()) {
      result.report = std::move(ing.report);
      return result;
    }
    for (auto& s : ing.trace.steps) result.trace.steps.push_back(s);
    cur = std::move(ing.diagram);
  }
  Engine e(std::move(cur));
  e.picker = make_picker(opts);
  e.run_stages();
  if (!e.stop) e.extract(result.circuit);
  for (auto& s : e.trace.steps) result.trace.steps.push_back(std::move(s));
  result.report.merge(e.report);
  return result;
}

CompileResult compile(const HybridText& text, const RewriteOptions& opts) {
  TextDiagram d = from_text(text);
  CompileResult result;
  if (has_extension_pieces(d)) {
    RewriteResult ext = reduce_extensions(d, text.lexicon);
    if (!ext.ok()) {
      result.report = std::move(ext.report);
      return result;
    }
    result.trace = std::move(ext.trace);
    d = std::move(ext.diagram);
  }
  CompileResult core = to_circuit(d, opts);
  for (auto& s : core.trace.steps) result.trace.steps.push_back(std::move(s));
  result.circuit = std::move(core.circuit);
  result.report.merge(core.report);
  return result;
}

bool replay_trace(const TextDiagram& initial, const RewriteTrace& trace, TextDiagram* out) {
  auto pickable = [](RewriteRule r) {
    switch (r) {
      case RewriteRule::ReflexIntro:
      case RewriteRule::LinkElim1:
      case RewriteRule::IsElimination:
      case RewriteRule::AdpIVAncilla:
      case RewriteRule::AdpTVAncilla:
      case RewriteRule::AdvGather:
      case RewriteRule::AdpGather:
      case RewriteRule::AdpAdvOrder:
      case RewriteRule::GateContract:
      case RewriteRule::ScvReduce:
      case RewriteRule::CnjReduce:
      case RewriteRule::CnjSharedReduce:
        return true;
      default:
        return false;
    }
  };
  std::vector<const TraceStep*> script;
  for (const auto& s : trace.steps)
    if (pickable(s.rule)) script.push_back(&s);

  std::size_t cursor = 0;
  bool faithful = true;
  Engine e(initial);
  e.picker = [&](const std::vector<Match>& matches) -> int {
    if (cursor >= script.size()) {
      faithful = false;
      return 0;
    }
    const TraceStep& want = *script[cursor];
    for (std::size_t k = 0; k < matches.size(); ++k) {
      bool rule_ok = matches[k].rule == want.rule ||
                     (matches[k].rule == RewriteRule::CnjReduce &&
                      want.rule == RewriteRule::CnjSharedReduce);
      if (rule_ok && matches[k].ids == want.nodes) {
        ++cursor;
        return static_cast<int>(k);
      }
    }
    faithful = false;
    ++cursor;
    return 0;
  };
  e.run_stages();
  if (out != nullptr) *out = std::move(e.d);
  return faithful && !e.stop;
}

std::set<CanonicalCircuit> enumerate_orders(const TextDiagram& d, int max_orders,
                                            ValidationReport* report) {
  std::set<CanonicalCircuit> results;
  std::vector<std::vector<int>> scripts{{}};
  int runs = 0;
  while (!scripts.empty() && runs < max_orders) {
    std::vector<int> script = std::move(scripts.back());
    scripts.pop_back();
    ++runs;

    std::size_t cursor = 0;
    std::vector<std::pair<std::size_t, int>> branch_points;
    Engine e(d);
    e.picker = [&](const std::vector<Match>& matches) -> int {
      int choice = 0;
      if (cursor < script.size()) choice = script[cursor];
      else if (matches.size() > 1)
        branch_points.push_back({cursor, static_cast<int>(matches.size())});
      ++cursor;
      return choice;
    };
    e.run_stages();
    TextCircuit c;
    if (!e.stop && e.extract(c)) {
      results.insert(canonicalise(c));
    } else if (report != nullptr) {
      report->merge(e.report);
    }
    for (const auto& [at, n] : branch_points) {
      for (int k = 1; k < n; ++k) {
        std::vector<int> next = script;
        next.resize(at, 0);
        next.push_back(k);
        scripts.push_back(std::move(next));
      }
    }
  }
  return results;
}

}  // namespace textcirc
