#include <map>
#include <set>

#include "textcirc/diagram.hpp"

namespace textcirc {

namespace {

// Chain role of one noun occurrence.
struct OccPlan {
  Ref ref = 0;
  std::string label;    // set on chain heads / unlinked nouns
  bool first = true;    // starts its referent's wire (labeled input)
  bool last = true;     // ends it (dangling output)
  int chain = -1;       // identification chain index, -1 if unlinked
  int chain_pos = 0;
  bool reflexive_prev = false;   // same item and clause as predecessor
  NounOccurrence next;           // address of the next chain occurrence
};

class Builder {
public:
  explicit Builder(const HybridText& text) : text_(text) { plan(); }

  TextDiagram build() {
    for (std::size_t i = 0; i < text_.items.size(); ++i) {
      item_ = static_cast<int>(i);
      next_occ_ = 0;
      build_s(text_.items[i], -1);
      close_item();
    }
    connect_possessives();
    return std::move(d_);
  }

private:
  void plan() {
    std::vector<std::vector<LeafInfo>> leaves;
    for (std::size_t i = 0; i < text_.items.size(); ++i)
      leaves.push_back(noun_leaves(text_.items[i], static_cast<int>(i)));
    Referents refs = assign_referents(text_);

    plans_.resize(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      plans_[i].resize(leaves[i].size());
      for (std::size_t j = 0; j < leaves[i].size(); ++j) {
        plans_[i][j].ref = refs.by_occurrence[i][j];
        plans_[i][j].label = refs.labels[refs.by_occurrence[i][j]];
      }
    }
    int chain_index = 0;
    for (const auto& link : text_.links) {
      if (link.kind == LinkKind::Possessive) {
        if (link.chain.size() == 2) poss_links_.push_back(link);
        continue;
      }
      for (std::size_t k = 0; k < link.chain.size(); ++k) {
        const auto& occ = link.chain[k];
        OccPlan& p = plans_[occ.item][occ.index];
        p.chain = chain_index;
        p.chain_pos = static_cast<int>(k);
        p.first = k == 0;
        p.last = k + 1 == link.chain.size();
        if (!p.last) p.next = link.chain[k + 1];
        if (k > 0) {
          const auto& prev = link.chain[k - 1];
          p.reflexive_prev = prev.item == occ.item &&
                             leaves[prev.item][prev.index].clause ==
                                 leaves[occ.item][occ.index].clause;
        }
        if (!p.first) p.label.clear();  // label lives on the chain head only
      }
      ++chain_index;
    }
    for (const auto& link : poss_links_) possessors_.insert({link.chain[0].item,
                                                             link.chain[0].index});
  }

  // --- graph helpers ------------------------------------------------------

  int new_node(NodeKind kind, std::string token, int ins, int outs, int region) {
    DiagNode n;
    n.kind = kind;
    n.token = std::move(token);
    n.in_wires.assign(ins, kNoWire);
    n.out_wires.assign(outs, kNoWire);
    n.region = region;
    return d_.add_node(std::move(n));
  }

  int connect(WireType type, PortRef from, PortRef to) {
    int w = d_.add_wire(DiagWire{type, from, to, false, true});
    if (from.node >= 0) d_.nodes[from.node].out_wires[from.port] = w;
    if (to.node >= 0) d_.nodes[to.node].in_wires[to.port] = w;
    return w;
  }

  int lca_region(int a, int b) const {
    auto depth = [&](int r) { return r == -1 ? 0 : d_.region_depth(r); };
    int da = depth(a), db = depth(b);
    while (da > db) { a = d_.regions[a].parent; --da; }
    while (db > da) { b = d_.regions[b].parent; --db; }
    while (a != b) {
      a = d_.regions[a].parent;
      b = d_.regions[b].parent;
    }
    return a;
  }

  NodeKind enter_kind(int region) const {
    return d_.regions[region].kind == ScopeRegion::Kind::CnjLeft ? NodeKind::ScopeEnterR
                                                                 : NodeKind::ScopeEnterL;
  }
  NodeKind exit_kind(int region) const {
    return d_.regions[region].kind == ScopeRegion::Kind::CnjLeft ? NodeKind::ScopeExitR
                                                                 : NodeKind::ScopeExitL;
  }

  // Extends an NP wire across region borders from `from` to `to`, exiting up
  // to their junction and entering down again, one crossing node per border.
  PortRef route(PortRef port, int from, int to) {
    if (from == to) return port;
    int m = lca_region(from, to);
    for (int r = from; r != m; r = d_.regions[r].parent) {
      int n = new_node(exit_kind(r), "", 1, 1, r);
      connect(WireType::NP, port, PortRef{n, 0});
      port = PortRef{n, 0};
    }
    std::vector<int> down;
    for (int r = to; r != m; r = d_.regions[r].parent) down.push_back(r);
    for (auto it = down.rbegin(); it != down.rend(); ++it) {
      int n = new_node(enter_kind(*it), "", 1, 1, *it);
      connect(WireType::NP, port, PortRef{n, 0});
      port = PortRef{n, 0};
    }
    return port;
  }

  // --- noun phrases -------------------------------------------------------

  PortRef build_np(const DNode& np, int role_region) {
    int occ = next_occ_++;
    const OccPlan& p = plans_[item_][occ];

    // Crossing wrappers keep the attributive tower one region further out
    // per wrapper.
    const DNode* cur = &np;
    int tower_region = role_region;
    while (cur->head == Head::CrossL || cur->head == Head::CrossR) {
      tower_region = tower_region == -1 ? -1 : d_.regions[tower_region].parent;
      cur = &cur->kids[0];
    }

    PortRef port;
    int port_region;
    if (p.first) {
      port = PortRef{kBoundaryIn, static_cast<int>(d_.inputs.size())};
      port_region = -1;  // noun labels live outside every phrase scope
      BoundaryPort in;
      in.ref = p.ref;
      in.label = p.label;
      in.in_scope = role_region != -1 && tower_region == role_region;
      d_.inputs.push_back(in);
    } else {
      int lca = lca_region(chain_region_[p.chain], role_region);
      int n = new_node(NodeKind::LinkIn, "", 1, 1, lca);
      int segment = p.chain_pos - 1;
      auto key = std::make_pair(p.chain, segment);
      auto it = pending_.find(key);
      int w;
      if (it != pending_.end()) {
        w = it->second;
        d_.wires[w].to = PortRef{n, 0};
        d_.nodes[n].in_wires[0] = w;
        pending_.erase(it);
      } else {
        w = d_.add_wire(DiagWire{WireType::PronLink, PortRef{kBoundaryIn, -1},
                                 PortRef{n, 0}, false, true});
        d_.nodes[n].in_wires[0] = w;
        pending_[key] = w;
      }
      if (p.reflexive_prev) d_.wires[w].reflexive = true;
      port = PortRef{n, 0};
      port_region = lca;
    }

    if (possessors_.count({item_, occ}) > 0) {
      int n = new_node(NodeKind::PossOut, "", 1, 2, port_region);
      connect(WireType::NP, port, PortRef{n, 0});
      poss_sources_[{item_, occ}] = PortRef{n, 1};
      port = PortRef{n, 0};
    }

    port = route(port, port_region, tower_region);
    port = build_tower(*cur, port, tower_region);
    port = route(port, tower_region, role_region);

    occ_region_[{item_, occ}] = role_region;
    if (p.chain >= 0) chain_region_[p.chain] = role_region;
    bottoms_[occ] = port;  // identity until a role node takes over
    bottom_region_[occ] = role_region;
    return port;
  }

  PortRef build_tower(const DNode& np, PortRef port, int region) {
    switch (np.head) {
      case Head::Word:
      case Head::Who:
      case Head::Blank:
      case Head::Pron:
        return port;
      case Head::Adj:
      case Head::AdjFold: {
        int n = new_node(NodeKind::AdjIntro, np.token, 1, 1, region);
        connect(WireType::NP, port, PortRef{n, 0});
        return build_tower(np.kids[0], PortRef{n, 0}, region);
      }
      case Head::Ing: {
        int n = new_node(NodeKind::IngMark, np.token, 1, 1, region);
        connect(WireType::NP, port, PortRef{n, 0});
        return build_tower(np.kids[0], PortRef{n, 0}, region);
      }
      case Head::Poss: {
        // in [PossLink, NP] out [NP]
        int n = new_node(NodeKind::PossIn, "", 2, 1, region);
        connect(WireType::NP, port, PortRef{n, 1});
        possessed_nodes_[{item_, next_occ_ - 1}] = n;
        return build_tower(np.kids[0], PortRef{n, 0}, region);
      }
      case Head::RelWho:
      case Head::RelThat: {
        PortRef out = build_tower(np.kids[0], port, region);
        // The clause's occurrences follow the spine's in yield order, so it
        // is built right here.
        build_s(np.kids[1], region);
        return out;
      }
      default:
        return port;
    }
  }

  void set_bottom(int occ, PortRef port) { bottoms_[occ] = port; }

  // --- verb towers --------------------------------------------------------

  void build_vp(const DNode& vp, PortRef parent, WireType vtype, int region) {
    switch (vp.head) {
      case Head::V: {
        int n = new_node(NodeKind::VLabel, vp.token, 1, 0, region);
        connect(vtype, parent, PortRef{n, 0});
        return;
      }
      case Head::VPsv: {
        int n = new_node(NodeKind::PsvClose, vp.token, 1, 0, region);
        connect(vtype, parent, PortRef{n, 0});
        return;
      }
      case Head::Adv: {
        NodeKind kind = vtype == WireType::IVP ? NodeKind::AdvIv : NodeKind::AdvTv;
        int n = new_node(kind, vp.token, 1, 1, region);
        connect(vtype, parent, PortRef{n, 0});
        build_vp(vp.kids[0], PortRef{n, 0}, vtype, region);
        return;
      }
      case Head::AdpV: {
        NodeKind kind = vtype == WireType::IVP ? NodeKind::AdpIv : NodeKind::AdpTv;
        int n = new_node(kind, vp.token, 2, 2, region);
        connect(vtype, parent, PortRef{n, 0});
        build_vp(vp.kids[0], PortRef{n, 0}, vtype, region);
        int occ = next_occ_;
        PortRef np = build_np(vp.kids[1], region);
        connect(WireType::NP, np, PortRef{n, 1});
        set_bottom(occ, PortRef{n, 1});
        return;
      }
      default:
        return;
    }
  }

  void build_tvo(const DNode& tvo, PortRef tvp_parent, int tv_intro, int region) {
    switch (tvo.head) {
      case Head::Obj: {
        build_vp(tvo.kids[0], tvp_parent, WireType::TVP, region);
        int occ = next_occ_;
        PortRef np = build_np(tvo.kids[1], region);
        connect(WireType::NP, np, PortRef{tv_intro, 1});
        set_bottom(occ, PortRef{tv_intro, 2});
        return;
      }
      case Head::AdpO: {
        int n = new_node(NodeKind::AdpTv, tvo.token, 2, 2, region);
        connect(WireType::TVP, tvp_parent, PortRef{n, 0});
        build_tvo(tvo.kids[0], PortRef{n, 0}, tv_intro, region);
        int occ = next_occ_;
        PortRef np = build_np(tvo.kids[1], region);
        connect(WireType::NP, np, PortRef{n, 1});
        set_bottom(occ, PortRef{n, 1});
        return;
      }
      default:
        return;
    }
  }

  // --- sentences ----------------------------------------------------------

  void build_s(const DNode& s, int region) {
    switch (s.head) {
      case Head::SIv: {
        int n = new_node(NodeKind::IvIntro, "", 1, 2, region);
        int occ = next_occ_;
        PortRef subj = build_np(s.kids[0], region);
        connect(WireType::NP, subj, PortRef{n, 0});
        set_bottom(occ, PortRef{n, 0});
        build_vp(s.kids[1], PortRef{n, 1}, WireType::IVP, region);
        break;
      }
      case Head::STv: {
        // in [NP, NP]; out [NP, TVP, NP]
        int n = new_node(NodeKind::TvIntro, "", 2, 3, region);
        int occ = next_occ_;
        PortRef subj = build_np(s.kids[0], region);
        connect(WireType::NP, subj, PortRef{n, 0});
        set_bottom(occ, PortRef{n, 0});
        build_tvo(s.kids[1], PortRef{n, 1}, n, region);
        break;
      }
      case Head::SIs: {
        NodeKind kind =
            s.kids[1].head == Head::PredIng ? NodeKind::IngMark : NodeKind::AdjIsIntro;
        int n = new_node(kind, s.kids[1].token, 1, 1, region);
        int occ = next_occ_;
        PortRef subj = build_np(s.kids[0], region);
        connect(WireType::NP, subj, PortRef{n, 0});
        set_bottom(occ, PortRef{n, 0});
        break;
      }
      case Head::SScv: {
        int n = new_node(NodeKind::ScvIntro, "", 1, 2, region);
        int occ = next_occ_;
        PortRef subj = build_np(s.kids[0], region);
        connect(WireType::NP, subj, PortRef{n, 0});
        set_bottom(occ, PortRef{n, 0});
        build_vp(s.kids[1], PortRef{n, 1}, WireType::IVP, region);
        int r = d_.add_region(
            ScopeRegion{0, region, ScopeRegion::Kind::ScvComplement, n, true});
        build_body(s.kids[2].kids[0], r);
        break;
      }
      case Head::SCnj: {
        int n = new_node(NodeKind::CnjIntro, s.token, 0, 0, region);
        int rl = d_.add_region(ScopeRegion{0, region, ScopeRegion::Kind::CnjLeft, n, true});
        build_body(s.kids[0].kids[0], rl);
        int rr = d_.add_region(ScopeRegion{0, region, ScopeRegion::Kind::CnjRight, n, true});
        build_body(s.kids[1].kids[0], rr);
        break;
      }
      case Head::SAmp: {
        for (const DNode& part : s.kids) build_s(part, region);
        break;
      }
      case Head::SPsv: {
        // in [NP, NP]; out [NP, NP, TvpPsv]; position 0 is the surface
        // subject, i.e. the underlying object.
        int n = new_node(NodeKind::PsvOpen, "", 2, 3, region);
        int r = d_.add_region(ScopeRegion{0, region, ScopeRegion::Kind::Passive, n, true});
        int occ = next_occ_;
        PortRef subj = build_np(s.kids[0], region);
        connect(WireType::NP, subj, PortRef{n, 0});
        set_bottom(occ, PortRef{n, 0});
        build_vp(s.kids[1], PortRef{n, 2}, WireType::TvpPsv, r);
        int agent_occ = next_occ_;
        PortRef agent = build_np(s.kids[2], region);
        connect(WireType::NP, agent, PortRef{n, 1});
        set_bottom(agent_occ, PortRef{n, 1});
        break;
      }
      case Head::SNp: {
        build_np(s.kids[0], region);  // an identity wire
        break;
      }
      case Head::SSpecial: {
        build_np(s.kids[0], region);
        build_s(s.kids[1], region);
        build_s(s.kids[2], region);
        break;
      }
      default:
        break;
    }
  }

  void build_body(const DNode& body, int region) {
    if (body.head == Head::SAmp) {
      for (const DNode& part : body.kids) build_s(part, region);
    } else {
      build_s(body, region);
    }
  }

  // --- item close ---------------------------------------------------------

  void close_item() {
    int count = next_occ_;
    for (int occ = 0; occ < count; ++occ) {
      const OccPlan& p = plans_[item_][occ];
      PortRef port = bottoms_[occ];
      int region = bottom_region_[occ];
      if (p.last) {
        port = route(port, region, -1);
        connect(WireType::NP, port, PortRef{kBoundaryOut, static_cast<int>(d_.outputs.size())});
        BoundaryPort bp;
        bp.ref = p.ref;
        d_.outputs.push_back(bp);
        continue;
      }
      // Junction with the next occurrence: inside the innermost region both
      // live in (in-scope links stay inside the hole), outside otherwise.
      int next_region = -1;
      if (p.next.item == item_) {
        auto it = occ_region_.find({p.next.item, p.next.index});
        if (it != occ_region_.end()) next_region = it->second;
      }
      int lca = lca_region(region, next_region);
      port = route(port, region, lca);
      int n = new_node(NodeKind::LinkOut, "", 1, 1, lca);
      connect(WireType::NP, port, PortRef{n, 0});
      auto key = std::make_pair(p.chain, p.chain_pos);
      auto it = pending_.find(key);
      if (it != pending_.end()) {
        int w = it->second;
        d_.wires[w].from = PortRef{n, 0};
        d_.nodes[n].out_wires[0] = w;
        pending_.erase(it);
      } else {
        int w = d_.add_wire(DiagWire{WireType::PronLink, PortRef{n, 0},
                                     PortRef{kBoundaryOut, -1}, false, true});
        d_.nodes[n].out_wires[0] = w;
        pending_[key] = w;
      }
    }
    bottoms_.clear();
    bottom_region_.clear();
  }

  void connect_possessives() {
    for (const auto& link : poss_links_) {
      auto from = poss_sources_.find({link.chain[0].item, link.chain[0].index});
      auto to = possessed_nodes_.find({link.chain[1].item, link.chain[1].index});
      if (from == poss_sources_.end() || to == possessed_nodes_.end()) continue;
      connect(WireType::PossLink, from->second, PortRef{to->second, 0});
    }
  }

  const HybridText& text_;
  TextDiagram d_;
  std::vector<std::vector<OccPlan>> plans_;
  std::vector<PronominalLink> poss_links_;
  std::set<std::pair<int, int>> possessors_;

  int item_ = 0;
  int next_occ_ = 0;
  std::map<std::pair<int, int>, int> pending_;      // (chain, segment) -> link wire
  std::map<int, int> chain_region_;                 // chain -> last role region
  std::map<std::pair<int, int>, int> occ_region_;   // (item, occ) -> role region
  std::map<int, PortRef> bottoms_;
  std::map<int, int> bottom_region_;
  std::map<std::pair<int, int>, int> possessed_nodes_;
  std::map<std::pair<int, int>, PortRef> poss_sources_;
};

}  // namespace

TextDiagram from_text(const HybridText& text) {
  Builder builder(text);
  return builder.build();
}

}  // namespace textcirc
