#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "textcirc/grammar_ops.hpp"

namespace textcirc {

namespace {

// Path from an item root to a target node, as child indices.
bool find_path(const DNode& node, const DNode* target, std::vector<int>& path) {
  if (&node == target) return true;
  for (std::size_t i = 0; i < node.kids.size(); ++i) {
    path.push_back(static_cast<int>(i));
    if (find_path(node.kids[i], target, path)) return true;
    path.pop_back();
  }
  return false;
}

DNode* node_at(DNode& root, const std::vector<int>& path, std::size_t depth) {
  DNode* n = &root;
  for (std::size_t i = 0; i < depth; ++i) n = &n->kids[path[i]];
  return n;
}

const DNode* node_at(const DNode& root, const std::vector<int>& path, std::size_t depth) {
  const DNode* n = &root;
  for (std::size_t i = 0; i < depth; ++i) n = &n->kids[path[i]];
  return n;
}

bool is_np_wrapper(Head h) {
  return h == Head::Adj || h == Head::AdjFold || h == Head::Ing || h == Head::Poss ||
         h == Head::RelWho || h == Head::RelThat || h == Head::CrossL || h == Head::CrossR;
}

// Depth of the noun-phrase root containing the leaf at path end: ascend
// through spine wrappers (always child 0).
std::size_t np_root_depth(const DNode& root, const std::vector<int>& path) {
  std::size_t depth = path.size();
  while (depth > 0) {
    const DNode* parent = node_at(root, path, depth - 1);
    if (is_np_wrapper(parent->head) && path[depth - 1] == 0) {
      --depth;
      continue;
    }
    break;
  }
  return depth;
}

// Noun leaves contained in a subtree.
int subtree_leaves(const DNode& n) {
  if (is_noun_leaf(n.head)) return 1;
  int total = 0;
  for (const DNode& k : n.kids) total += subtree_leaves(k);
  return total;
}

struct FusePair {
  int item_a = -1, item_b = -1;
  NounOccurrence occ_a, occ_b;
  bool found = false;
};

// The first pair of chain occurrences spanning two consecutive items.
FusePair select_pair(const PronominalLink& link) {
  FusePair p;
  for (std::size_t k = 1; k < link.chain.size(); ++k) {
    if (link.chain[k].item == link.chain[k - 1].item + 1) {
      p.occ_a = link.chain[k - 1];
      p.occ_b = link.chain[k];
      p.item_a = p.occ_a.item;
      p.item_b = p.occ_b.item;
      p.found = true;
      return p;
    }
  }
  return p;
}

bool precondition(ValidationReport* report, bool condition, const std::string& message) {
  if (!condition && report != nullptr)
    report->add(ErrorCode::PreconditionViolation, message);
  return condition;
}

int link_index(const HybridText& text, const PronominalLink& link) {
  for (std::size_t i = 0; i < text.links.size(); ++i)
    if (text.links[i].chain == link.chain && text.links[i].kind == link.kind)
      return static_cast<int>(i);
  return -1;
}

using OccMap = std::function<bool(NounOccurrence&)>;  // false drops the occurrence

void remap_links(HybridText& text, const OccMap& map) {
  for (auto& link : text.links) {
    std::vector<NounOccurrence> chain;
    for (auto occ : link.chain) {
      if (map(occ)) chain.push_back(occ);
    }
    std::sort(chain.begin(), chain.end());
    link.chain = std::move(chain);
  }
  // Chains can lose placeholder occurrences during decomposition; drop the
  // ones that no longer link anything.
  text.links.erase(std::remove_if(text.links.begin(), text.links.end(),
                                  [](const PronominalLink& l) { return l.chain.size() < 2; }),
                   text.links.end());
}

struct Located {
  const LeafInfo* a = nullptr;
  const LeafInfo* b = nullptr;
  std::vector<LeafInfo> leaves_a, leaves_b;
};

bool locate_pair(const HybridText& text, const FusePair& pair, Located& out) {
  out.leaves_a = noun_leaves(text.items[pair.item_a], pair.item_a);
  out.leaves_b = noun_leaves(text.items[pair.item_b], pair.item_b);
  if (pair.occ_a.index >= static_cast<int>(out.leaves_a.size())) return false;
  if (pair.occ_b.index >= static_cast<int>(out.leaves_b.size())) return false;
  out.a = &out.leaves_a[pair.occ_a.index];
  out.b = &out.leaves_b[pair.occ_b.index];
  return true;
}

// Shared tail of the two plain relative-pronoun rules: wrap the antecedent's
// noun phrase in item_a with `clause`, delete item_b, remap links.
HybridText attach_clause(const HybridText& text, const FusePair& pair, const LeafInfo& antecedent,
                         DNode clause, Head wrapper, const PronominalLink& link,
                         ValidationReport* report) {
  std::vector<int> path;
  if (!precondition(report, find_path(text.items[pair.item_a], antecedent.node, path),
                    "cannot locate earlier occurrence"))
    return text;
  std::size_t root_depth = np_root_depth(text.items[pair.item_a], path);

  // Leaves of the wrapped noun phrase keep their indices; the clause's
  // leaves follow them.
  int insert_after = -1;
  {
    const DNode* np_root = node_at(text.items[pair.item_a], path, root_depth);
    for (const auto& leaf : noun_leaves(text.items[pair.item_a], pair.item_a)) {
      std::vector<int> p2;
      if (find_path(*np_root, leaf.node, p2)) insert_after = leaf.occ.index;
    }
  }
  int clause_len = subtree_leaves(clause);

  HybridText out = text;
  DNode& host = out.items[pair.item_a];
  DNode* np_root = node_at(host, path, root_depth);
  DNode wrapped(wrapper);
  wrapped.kids.push_back(std::move(*np_root));
  wrapped.kids.push_back(std::move(clause));
  *np_root = std::move(wrapped);
  out.items.erase(out.items.begin() + pair.item_b);

  remap_links(out, [&](NounOccurrence& occ) {
    if (occ.item == pair.item_a && occ.index > insert_after)
      occ.index += clause_len;
    else if (occ.item == pair.item_b) {
      occ.item = pair.item_a;
      occ.index = insert_after + 1 + occ.index;
    } else if (occ.item > pair.item_b) {
      occ.item -= 1;
    }
    return true;
  });

  PronominalLink moved = link;
  for (auto& occ : moved.chain) {
    if (occ.item == pair.item_a && occ.index > insert_after)
      occ.index += clause_len;
    else if (occ.item == pair.item_b) {
      occ.item = pair.item_a;
      occ.index = insert_after + 1 + occ.index;
    } else if (occ.item > pair.item_b) {
      occ.item -= 1;
    }
  }
  std::sort(moved.chain.begin(), moved.chain.end());
  int li = link_index(out, moved);
  if (li >= 0) out.links[li].fuse = PronominalLink::FusePlan::None;
  return out;
}

}  // namespace

HybridText fuse_subject_relative(const HybridText& text, const PronominalLink& link,
                                 ValidationReport* report) {
  if (!precondition(report, link_index(text, link) >= 0, "link not present in text"))
    return text;
  FusePair pair = select_pair(link);
  if (!precondition(report, pair.found, "chain joins no two consecutive items")) return text;
  Located loc;
  if (!precondition(report, locate_pair(text, pair, loc), "occurrence out of range")) return text;
  if (!precondition(report, loc.b->subject && loc.b->clause == &text.items[pair.item_b],
                    "later occurrence must be the subject of its sentence"))
    return text;
  if (!precondition(report,
                    !(loc.a->subject && loc.a->clause == &text.items[pair.item_a]),
                    "earlier occurrence is a subject; use the special subject-relative rule"))
    return text;

  DNode clause = text.items[pair.item_b];
  std::vector<int> path;
  if (!precondition(report, find_path(text.items[pair.item_b], loc.b->node, path),
                    "cannot locate later occurrence"))
    return text;
  // The rule replaces the subject noun itself; adjectives on it stay in the
  // clause and keep acting on the shared referent.
  *node_at(clause, path, path.size()) = DNode(Head::Who);
  return attach_clause(text, pair, *loc.a, std::move(clause), Head::RelWho, link, report);
}

HybridText fuse_object_relative(const HybridText& text, const PronominalLink& link,
                                ValidationReport* report) {
  if (!precondition(report, link_index(text, link) >= 0, "link not present in text"))
    return text;
  FusePair pair = select_pair(link);
  if (!precondition(report, pair.found, "chain joins no two consecutive items")) return text;
  Located loc;
  if (!precondition(report, locate_pair(text, pair, loc), "occurrence out of range")) return text;
  if (!precondition(report, !loc.b->subject, "later occurrence must fill an object position"))
    return text;
  if (!precondition(report, !loc.a->subject, "earlier occurrence must fill an object position"))
    return text;

  DNode clause = text.items[pair.item_b];
  std::vector<int> path;
  if (!precondition(report, find_path(text.items[pair.item_b], loc.b->node, path),
                    "cannot locate later occurrence"))
    return text;
  *node_at(clause, path, path.size()) = DNode(Head::Blank);
  return attach_clause(text, pair, *loc.a, std::move(clause), Head::RelThat, link, report);
}

HybridText fuse_subject_relative_special(const HybridText& text, const PronominalLink& link,
                                         ValidationReport* report) {
  if (!precondition(report, link_index(text, link) >= 0, "link not present in text"))
    return text;
  FusePair pair = select_pair(link);
  if (!precondition(report, pair.found, "chain joins no two consecutive items")) return text;
  Located loc;
  if (!precondition(report, locate_pair(text, pair, loc), "occurrence out of range")) return text;
  if (!precondition(report, loc.b->subject && loc.b->clause == &text.items[pair.item_b],
                    "later occurrence must be the subject of its sentence"))
    return text;
  if (!precondition(report, loc.a->subject && loc.a->clause == &text.items[pair.item_a],
                    "earlier occurrence must be the subject of its sentence"))
    return text;

  const DNode& s1 = text.items[pair.item_a];
  const DNode& s2 = text.items[pair.item_b];

  std::vector<int> subj_path;
  if (!precondition(report, find_path(s1, loc.a->node, subj_path),
                    "cannot locate earlier occurrence"))
    return text;
  std::size_t subj_root = np_root_depth(s1, subj_path);
  DNode np_iso = *node_at(s1, subj_path, subj_root);
  int iso_len = subtree_leaves(np_iso);
  int s1_len = subtree_leaves(s1);

  // A copular source folds its predicate onto the isolated noun (innermost,
  // so the gate order on the wire is unchanged) and leaves a bare WHO.
  bool folded = s1.head == Head::SIs;
  DNode c1(Head::SNp);
  if (folded) {
    const DNode& pred = s1.kids[1];
    DNode* spot = &np_iso;
    while (!is_noun_leaf(spot->head) && !spot->kids.empty()) spot = &spot->kids[0];
    DNode fold(pred.head == Head::PredIng ? Head::Ing : Head::AdjFold, pred.token);
    fold.kids.push_back(std::move(*spot));
    *spot = std::move(fold);
    c1.kids.push_back(DNode(Head::Who));
  } else {
    c1 = s1;
    *node_at(c1, subj_path, subj_root) = DNode(Head::Who);
  }
  int c1_len = subtree_leaves(c1);

  DNode c2 = s2;
  {
    std::vector<int> path;
    if (!precondition(report, find_path(s2, loc.b->node, path), "cannot locate later occurrence"))
      return text;
    *node_at(c2, path, path.size()) = DNode(Head::Blank);
  }

  HybridText out = text;
  DNode fused(Head::SSpecial);
  fused.kids.push_back(std::move(np_iso));
  fused.kids.push_back(std::move(c1));
  fused.kids.push_back(std::move(c2));
  out.items[pair.item_a] = std::move(fused);
  out.items.erase(out.items.begin() + pair.item_b);

  // New yield: isolated noun (indices unchanged), the WHO clause, then the
  // blanked second sentence.  In the folded case the WHO is fresh; in the
  // unfolded case S1's non-subject leaves shift right by one (the WHO
  // replaces the subject but the isolated copy precedes it).
  auto map = [&](NounOccurrence& occ) {
    if (occ.item == pair.item_a) {
      if (occ.index >= iso_len) occ.index += folded ? 1 : 1;
    } else if (occ.item == pair.item_b) {
      occ.item = pair.item_a;
      occ.index = iso_len + c1_len + occ.index;
    } else if (occ.item > pair.item_b) {
      occ.item -= 1;
    }
    return true;
  };
  remap_links(out, map);

  PronominalLink moved = link;
  std::vector<NounOccurrence> chain;
  for (auto occ : moved.chain) {
    map(occ);
    chain.push_back(occ);
  }
  if (folded) chain.push_back(NounOccurrence{pair.item_a, iso_len});  // the WHO
  std::sort(chain.begin(), chain.end());
  moved.chain = std::move(chain);
  int li = link_index(out, PronominalLink{link.kind, moved.chain, link.fuse});
  if (li >= 0) {
    out.links[li].fuse = PronominalLink::FusePlan::None;
  } else {
    // The WHO splice changed the chain; find the original mapped chain and
    // extend it.
    for (auto& l : out.links) {
      if (l.kind != link.kind) continue;
      std::vector<NounOccurrence> base = moved.chain;
      base.erase(std::remove(base.begin(), base.end(), NounOccurrence{pair.item_a, iso_len}),
                 base.end());
      if (l.chain == base) {
        l.chain = moved.chain;
        l.fuse = PronominalLink::FusePlan::None;
        break;
      }
    }
  }
  return out;
}

ValidationReport check_fusion_order(const HybridText& text) {
  ValidationReport report;

  std::vector<std::vector<LeafInfo>> leaves;
  for (std::size_t i = 0; i < text.items.size(); ++i)
    leaves.push_back(noun_leaves(text.items[i], static_cast<int>(i)));
  auto locate = [&](const NounOccurrence& occ) -> const LeafInfo* {
    if (occ.item < 0 || occ.item >= static_cast<int>(leaves.size())) return nullptr;
    if (occ.index < 0 || occ.index >= static_cast<int>(leaves[occ.item].size())) return nullptr;
    return &leaves[occ.item][occ.index];
  };

  // A reflexive pronoun lives inside one simple constituent.  In a fused
  // item the constituents are the pieces the fusion glued together, so a
  // reflexive spanning two of them could only have been introduced after
  // the fusion, which the grammar forbids unless the source was simple.
  for (const auto& link : text.links) {
    if (link.kind != LinkKind::Reflexive || link.chain.size() != 2) continue;
    const LeafInfo* a = locate(link.chain[0]);
    const LeafInfo* b = locate(link.chain[1]);
    if (a == nullptr || b == nullptr) continue;
    if (a->occ.item == b->occ.item && a->clause != b->clause) {
      report.add(ErrorCode::UngrammaticalFusion,
                 "reflexive pronoun spans two constituents of a fused sentence", a->occ.item);
    }
  }

  // Planned fusions: at most one relative-pronoun rule per sentence pair,
  // and the pair must still be two separate sentences.
  std::map<std::pair<int, int>, int> pair_plans;
  for (const auto& link : text.links) {
    if (link.fuse == PronominalLink::FusePlan::None) continue;
    FusePair pair = select_pair(link);
    if (!pair.found) {
      int item = link.chain.empty() ? -1 : link.chain.front().item;
      report.add(ErrorCode::UngrammaticalFusion,
                 "planned relative-pronoun fusion targets an already-fused pair", item);
      continue;
    }
    ++pair_plans[{pair.item_a, pair.item_b}];
  }
  for (const auto& [items, count] : pair_plans) {
    if (count > 1) {
      std::ostringstream msg;
      msg << "subject- and object-relative rules cannot both apply to sentences " << items.first
          << " and " << items.second;
      report.add(ErrorCode::UngrammaticalFusion, msg.str(), items.first);
    }
  }
  return report;
}

namespace {

const DNode* find_head(const DNode& n, Head head) {
  if (n.head == head) return &n;
  for (const DNode& k : n.kids) {
    const DNode* r = find_head(k, head);
    if (r != nullptr) return r;
  }
  return nullptr;
}

std::string occurrence_label(const Referents& refs, const NounOccurrence& occ) {
  if (occ.item < 0 || occ.item >= static_cast<int>(refs.by_occurrence.size())) return {};
  if (occ.index < 0 || occ.index >= static_cast<int>(refs.by_occurrence[occ.item].size()))
    return {};
  return refs.labels[refs.by_occurrence[occ.item][occ.index]];
}

// Undo one special fusion at item i; returns true on change.
bool unfuse_special(HybridText& text, int i) {
  DNode item = text.items[i];
  if (item.head != Head::SSpecial || item.kids.size() != 3) return false;
  Referents refs = assign_referents(text);

  DNode np = item.kids[0];
  const DNode& c1 = item.kids[1];
  DNode c2 = item.kids[2];
  int iso_len = subtree_leaves(np);
  int c1_len = subtree_leaves(c1);

  std::string label = occurrence_label(refs, NounOccurrence{i, 0});
  bool folded = c1.head == Head::SNp && !c1.kids.empty() && c1.kids[0].head == Head::Who;

  DNode s1;
  if (folded) {
    // Innermost fold becomes the copular predicate again; any outer folds
    // stay as plain attributive adjectives (equal circuit either way).
    DNode* spot = &np;
    DNode* innermost_fold = nullptr;
    while (!is_noun_leaf(spot->head) && !spot->kids.empty()) {
      if (spot->head == Head::AdjFold) innermost_fold = spot;
      spot = &spot->kids[0];
    }
    if (innermost_fold != nullptr) {
      Head pred_head = innermost_fold->head == Head::Ing ? Head::PredIng : Head::PredAdj;
      std::string pred_token = innermost_fold->token;
      *innermost_fold = innermost_fold->kids[0];
      DNode fixup = np;  // retag remaining folds
      std::function<void(DNode&)> retag = [&](DNode& n) {
        if (n.head == Head::AdjFold) n.head = Head::Adj;
        for (auto& k : n.kids) retag(k);
      };
      retag(fixup);
      s1 = DNode(Head::SIs);
      s1.kids.push_back(std::move(fixup));
      s1.kids.push_back(DNode(pred_head, std::move(pred_token)));
    } else {
      s1 = DNode(Head::SNp);
      s1.kids.push_back(std::move(np));
    }
  } else {
    s1 = c1;
    const DNode* who = find_head(s1, Head::Who);
    std::vector<int> path;
    if (who != nullptr && find_path(s1, who, path)) *node_at(s1, path, path.size()) = np;
  }

  {
    const DNode* blank = find_head(c2, Head::Blank);
    std::vector<int> path;
    if (blank != nullptr && find_path(c2, blank, path))
      *node_at(c2, path, path.size()) = DNode(Head::Word, label);
  }

  text.items[i] = std::move(s1);
  text.items.insert(text.items.begin() + i + 1, std::move(c2));

  remap_links(text, [&](NounOccurrence& occ) {
    if (occ.item == i) {
      if (occ.index < iso_len) return true;  // isolated noun keeps its slot in S1
      if (occ.index == iso_len) return false;  // the WHO slot vanishes
      if (occ.index < iso_len + c1_len) {
        occ.index -= 1;  // clause leaves shift left by the removed WHO
        return true;
      }
      occ.item = i + 1;
      occ.index -= iso_len + c1_len;
      return true;
    }
    if (occ.item > i) occ.item += 1;
    return true;
  });
  return true;
}

// Undo one relative clause attachment in item i; returns true on change.
bool unfuse_rel(HybridText& text, int i) {
  const DNode& item = text.items[i];
  const DNode* rel = find_head(item, Head::RelWho);
  bool who_style = rel != nullptr;
  if (rel == nullptr) rel = find_head(item, Head::RelThat);
  if (rel == nullptr || rel->kids.size() != 2) return false;

  Referents refs = assign_referents(text);
  std::vector<int> path;
  find_path(item, rel, path);

  auto item_leaves = noun_leaves(item, i);
  const DNode* spine = &rel->kids[0];
  const DNode* clause = &rel->kids[1];
  int spine_last = -1, clause_first = -1, clause_last = -1;
  for (const auto& leaf : item_leaves) {
    std::vector<int> p2;
    if (find_path(*spine, leaf.node, p2)) spine_last = leaf.occ.index;
    p2.clear();
    if (find_path(*clause, leaf.node, p2)) {
      if (clause_first < 0) clause_first = leaf.occ.index;
      clause_last = leaf.occ.index;
    }
  }
  if (spine_last < 0 || clause_first < 0) return false;

  std::string label = occurrence_label(refs, NounOccurrence{i, spine_last});

  DNode new_clause = *clause;
  {
    const DNode* ph = find_head(new_clause, who_style ? Head::Who : Head::Blank);
    std::vector<int> p2;
    if (ph != nullptr && find_path(new_clause, ph, p2))
      *node_at(new_clause, p2, p2.size()) = DNode(Head::Word, label);
  }

  DNode host = item;
  {
    DNode* spot = node_at(host, path, path.size());
    DNode spine_copy = spot->kids[0];
    *spot = std::move(spine_copy);
  }

  int clause_len = clause_last - clause_first + 1;
  text.items[i] = std::move(host);
  text.items.insert(text.items.begin() + i + 1, std::move(new_clause));

  remap_links(text, [&](NounOccurrence& occ) {
    if (occ.item == i) {
      if (occ.index >= clause_first && occ.index <= clause_last) {
        occ.item = i + 1;
        occ.index -= clause_first;
      } else if (occ.index > clause_last) {
        occ.index -= clause_len;
      }
    } else if (occ.item > i) {
      occ.item += 1;
    }
    return true;
  });
  return true;
}

}  // namespace

HybridText decompose_relative_pronouns(const HybridText& text) {
  HybridText out = text;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < out.items.size(); ++i) {
      if (unfuse_special(out, static_cast<int>(i)) || unfuse_rel(out, static_cast<int>(i))) {
        changed = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace textcirc
