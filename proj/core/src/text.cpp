#include "textcirc/text.hpp"

#include <algorithm>

namespace textcirc {

const char* head_name(Head head) {
  switch (head) {
    case Head::Word: return "word";
    case Head::Who: return "who";
    case Head::Blank: return "blank";
    case Head::Pron: return "pron";
    case Head::Adj: return "adj";
    case Head::AdjFold: return "adjf";
    case Head::Ing: return "ing";
    case Head::Poss: return "poss";
    case Head::RelWho: return "rel-who";
    case Head::RelThat: return "rel-that";
    case Head::CrossL: return "xl";
    case Head::CrossR: return "xr";
    case Head::V: return "v";
    case Head::VPsv: return "vp";
    case Head::Adv: return "adv";
    case Head::AdpV: return "adpv";
    case Head::Obj: return "o";
    case Head::AdpO: return "adpo";
    case Head::SIv: return "iv";
    case Head::STv: return "tv";
    case Head::SIs: return "is";
    case Head::SScv: return "scv";
    case Head::SCnj: return "cnj";
    case Head::SAmp: return "amp";
    case Head::SPsv: return "psv";
    case Head::SNp: return "np!";
    case Head::SSpecial: return "who!";
    case Head::Scope: return "scope";
    case Head::PredAdj: return "padj";
    case Head::PredIng: return "ping";
  }
  return "?";
}

const char* link_kind_name(LinkKind k) {
  switch (k) {
    case LinkKind::Regular: return "regular";
    case LinkKind::Reflexive: return "reflexive";
    case LinkKind::Possessive: return "possessive";
  }
  return "?";
}

bool DNode::operator==(const DNode& other) const {
  return head == other.head && token == other.token && kids == other.kids;
}

bool is_noun_leaf(Head head) {
  return head == Head::Word || head == Head::Who || head == Head::Blank || head == Head::Pron;
}

namespace detail {

// Yield pieces.  Crossed noun phrases are represented as markers that the
// enclosing scope splices to its outside; one wrapper crosses one border.
struct Piece {
  enum class Kind { Token, Leaf, CrossedL, CrossedR };
  Kind kind = Kind::Token;
  std::string text;
  const DNode* leaf = nullptr;
  bool subject = false;
  int scope_depth = 0;
  const DNode* clause = nullptr;
  std::vector<Piece> sub;  // CrossedL / CrossedR payload
};

struct WalkCtx {
  bool subject_position = false;
  int scope_depth = 0;
  const DNode* clause = nullptr;
};

void walk(const DNode& node, const WalkCtx& ctx, std::vector<Piece>& out);

void token_piece(std::string text, const WalkCtx& ctx, std::vector<Piece>& out) {
  Piece p;
  p.kind = Piece::Kind::Token;
  p.text = std::move(text);
  p.scope_depth = ctx.scope_depth;
  out.push_back(std::move(p));
}

void leaf_piece(const DNode& node, std::string text, const WalkCtx& ctx, std::vector<Piece>& out) {
  Piece p;
  p.kind = Piece::Kind::Leaf;
  p.text = std::move(text);
  p.leaf = &node;
  p.subject = ctx.subject_position;
  p.scope_depth = ctx.scope_depth;
  p.clause = ctx.clause;
  out.push_back(std::move(p));
}

void walk_scope(const DNode& scope, bool scv_style, const WalkCtx& outer, std::vector<Piece>& out) {
  WalkCtx inner = outer;
  inner.subject_position = false;
  inner.scope_depth = outer.scope_depth + 1;

  std::vector<Piece> body;
  if (!scope.kids.empty()) {
    const DNode& s = scope.kids.front();
    if (s.head == Head::SAmp && scv_style) {
      // [&] directly under a complement scope: every part re-opened with
      // [THAT] ("AND ALSO THAT").
      bool first = true;
      for (const DNode& part : s.kids) {
        if (!first) {
          token_piece("[&]", inner, body);
          token_piece("[THAT]", inner, body);
        }
        first = false;
        walk(part, inner, body);
      }
    } else {
      walk(s, inner, body);
    }
  }

  // Splice crossed noun phrases across this border, peeling one wrapper
  // level; doubly wrapped phrases surface again at the next scope out.
  std::vector<Piece> left, core, right;
  for (Piece& p : body) {
    if (p.kind == Piece::Kind::CrossedL) {
      for (Piece& q : p.sub) left.push_back(std::move(q));
    } else if (p.kind == Piece::Kind::CrossedR) {
      for (Piece& q : p.sub) right.push_back(std::move(q));
    } else {
      core.push_back(std::move(p));
    }
  }
  for (Piece& p : left) out.push_back(std::move(p));
  if (scv_style) token_piece("[THAT]", outer, out);
  for (Piece& p : core) out.push_back(std::move(p));
  for (Piece& p : right) out.push_back(std::move(p));
}

void walk(const DNode& node, const WalkCtx& ctx0, std::vector<Piece>& out) {
  WalkCtx ctx = ctx0;
  switch (node.head) {
    case Head::SIv:
    case Head::STv:
    case Head::SIs:
    case Head::SScv:
    case Head::SCnj:
    case Head::SPsv:
    case Head::SNp:
    case Head::SSpecial:
      ctx.clause = &node;
      break;
    default:
      break;
  }
  WalkCtx plain = ctx;
  plain.subject_position = false;
  switch (node.head) {
    case Head::Word:
      leaf_piece(node, node.token, ctx, out);
      return;
    case Head::Who:
      leaf_piece(node, "WHO", ctx, out);
      return;
    case Head::Blank:
      leaf_piece(node, "␣", ctx, out);
      return;
    case Head::Pron:
      // Fixed surface table; agreement is not modelled.
      leaf_piece(node, ctx.subject_position ? "SHE" : "HIM", ctx, out);
      return;
    case Head::Adj:
    case Head::AdjFold:
      token_piece(node.token, ctx, out);
      if (!node.kids.empty()) walk(node.kids[0], ctx, out);
      return;
    case Head::Ing:
      token_piece(node.token + "-ING", ctx, out);
      if (!node.kids.empty()) walk(node.kids[0], ctx, out);
      return;
    case Head::Poss:
      token_piece("HIS", ctx, out);
      if (!node.kids.empty()) walk(node.kids[0], ctx, out);
      return;
    case Head::RelWho:
      if (node.kids.size() == 2) {
        walk(node.kids[0], ctx, out);
        walk(node.kids[1], plain, out);
      }
      return;
    case Head::RelThat:
      if (node.kids.size() == 2) {
        walk(node.kids[0], ctx, out);
        token_piece("THAT", plain, out);
        walk(node.kids[1], plain, out);
      }
      return;
    case Head::CrossL:
    case Head::CrossR: {
      Piece p;
      p.kind = node.head == Head::CrossL ? Piece::Kind::CrossedL : Piece::Kind::CrossedR;
      p.scope_depth = ctx.scope_depth;
      WalkCtx moved = ctx;
      moved.scope_depth = ctx.scope_depth > 0 ? ctx.scope_depth - 1 : 0;
      if (!node.kids.empty()) walk(node.kids[0], moved, p.sub);
      out.push_back(std::move(p));
      return;
    }
    case Head::V:
    case Head::VPsv:
      token_piece(node.token, ctx, out);
      return;
    case Head::Adv:
      token_piece(node.token, ctx, out);
      if (!node.kids.empty()) walk(node.kids[0], ctx, out);
      return;
    case Head::AdpV:
      if (node.kids.size() == 2) {
        walk(node.kids[0], ctx, out);
        token_piece(node.token, ctx, out);
        walk(node.kids[1], plain, out);
      }
      return;
    case Head::Obj:
      if (node.kids.size() == 2) {
        walk(node.kids[0], ctx, out);
        walk(node.kids[1], plain, out);
      }
      return;
    case Head::AdpO:
      if (node.kids.size() == 2) {
        walk(node.kids[0], ctx, out);
        token_piece(node.token, ctx, out);
        walk(node.kids[1], plain, out);
      }
      return;
    case Head::SIv:
    case Head::STv:
      if (node.kids.size() == 2) {
        WalkCtx subj = ctx;
        subj.subject_position = true;
        walk(node.kids[0], subj, out);
        walk(node.kids[1], plain, out);
      }
      return;
    case Head::SIs:
      if (node.kids.size() == 2) {
        WalkCtx subj = ctx;
        subj.subject_position = true;
        walk(node.kids[0], subj, out);
        token_piece("IS", ctx, out);
        walk(node.kids[1], plain, out);
      }
      return;
    case Head::SScv:
      if (node.kids.size() == 3) {
        WalkCtx subj = ctx;
        subj.subject_position = true;
        walk(node.kids[0], subj, out);
        walk(node.kids[1], plain, out);
        walk_scope(node.kids[2], /*scv_style=*/true, plain, out);
      }
      return;
    case Head::SCnj:
      if (node.kids.size() == 2) {
        walk_scope(node.kids[0], /*scv_style=*/false, plain, out);
        token_piece(node.token, ctx, out);
        walk_scope(node.kids[1], /*scv_style=*/false, plain, out);
      }
      return;
    case Head::SAmp: {
      bool first = true;
      for (const DNode& part : node.kids) {
        if (!first) token_piece("[&]", ctx, out);
        first = false;
        walk(part, plain, out);
      }
      return;
    }
    case Head::SPsv:
      if (node.kids.size() == 3) {
        WalkCtx subj = ctx;
        subj.subject_position = true;
        walk(node.kids[0], subj, out);
        token_piece("IS", ctx, out);
        walk(node.kids[1], plain, out);
        token_piece("BY", ctx, out);
        walk(node.kids[2], plain, out);
      }
      return;
    case Head::SNp:
      if (!node.kids.empty()) {
        WalkCtx subj = ctx;
        subj.subject_position = true;
        walk(node.kids[0], subj, out);
      }
      return;
    case Head::SSpecial:
      if (node.kids.size() == 3) {
        WalkCtx subj = ctx;
        subj.subject_position = true;
        walk(node.kids[0], subj, out);
        token_piece("!", ctx, out);
        walk(node.kids[1], plain, out);
        walk(node.kids[2], plain, out);
      }
      return;
    case Head::Scope:
      // Bare scope outside SScv/SCnj; treated as an scv-style region.
      walk_scope(node, /*scv_style=*/true, plain, out);
      return;
    case Head::PredAdj:
      token_piece(node.token, ctx, out);
      return;
    case Head::PredIng:
      token_piece(node.token + "-ING", ctx, out);
      return;
  }
}

void splice_markers(std::vector<Piece>& in, std::vector<Piece>& out) {
  for (Piece& p : in) {
    if (p.kind == Piece::Kind::CrossedL || p.kind == Piece::Kind::CrossedR) {
      // Crossed marker surviving to the top (no enclosing scope); spliced in
      // place, validate() flags the text separately.
      splice_markers(p.sub, out);
    } else {
      out.push_back(std::move(p));
    }
  }
}

std::vector<Piece> flatten(const Derivation& item) {
  std::vector<Piece> raw;
  WalkCtx ctx;
  walk(item, ctx, raw);
  std::vector<Piece> flat;
  splice_markers(raw, flat);
  return flat;
}

}  // namespace detail

std::vector<LeafInfo> noun_leaves(const Derivation& item, int item_index) {
  std::vector<LeafInfo> leaves;
  for (const auto& piece : detail::flatten(item)) {
    if (piece.kind != detail::Piece::Kind::Leaf) continue;
    LeafInfo info;
    info.node = piece.leaf;
    info.occ.item = item_index;
    info.occ.index = static_cast<int>(leaves.size());
    info.in_scope = piece.scope_depth > 0;
    info.subject = piece.subject;
    info.clause = piece.clause;
    leaves.push_back(info);
  }
  return leaves;
}

std::vector<std::string> yield_pieces(const Derivation& item) {
  std::vector<std::string> tokens;
  for (const auto& piece : detail::flatten(item)) tokens.push_back(piece.text);
  return tokens;
}

Referents assign_referents(const HybridText& text) {
  Referents result;
  std::vector<std::vector<LeafInfo>> leaves;
  leaves.reserve(text.items.size());
  for (std::size_t i = 0; i < text.items.size(); ++i)
    leaves.push_back(noun_leaves(text.items[i], static_cast<int>(i)));

  result.by_occurrence.resize(text.items.size());
  constexpr Ref kUnset = ~Ref{0};
  for (std::size_t i = 0; i < leaves.size(); ++i)
    result.by_occurrence[i].assign(leaves[i].size(), kUnset);

  auto occ_ok = [&](const NounOccurrence& occ) {
    return occ.item >= 0 && occ.item < static_cast<int>(leaves.size()) && occ.index >= 0 &&
           occ.index < static_cast<int>(leaves[occ.item].size());
  };

  // Identification chains share a referent; possessive links relate two
  // referents and do not merge them.
  for (const auto& link : text.links) {
    if (link.kind == LinkKind::Possessive) continue;
    Ref id = result.count();
    std::string label;
    for (const auto& occ : link.chain) {
      if (!occ_ok(occ)) continue;
      if (label.empty() && leaves[occ.item][occ.index].node->head == Head::Word)
        label = leaves[occ.item][occ.index].node->token;
      result.by_occurrence[occ.item][occ.index] = id;
    }
    result.labels.push_back(label);
  }
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (std::size_t j = 0; j < leaves[i].size(); ++j) {
      if (result.by_occurrence[i][j] != kUnset) continue;
      result.by_occurrence[i][j] = result.count();
      const DNode* node = leaves[i][j].node;
      result.labels.push_back(node->head == Head::Word ? node->token : std::string());
    }
  }
  return result;
}

}  // namespace textcirc
