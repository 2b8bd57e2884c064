#include <map>
#include <set>
#include <sstream>

#include "textcirc/grammar_ops.hpp"

namespace textcirc {

namespace {

class Validator {
public:
  Validator(const HybridText& text) : text_(text), lex_(text.lexicon) {}

  ValidationReport run() {
    for (std::size_t i = 0; i < text_.items.size(); ++i) {
      item_ = static_cast<int>(i);
      collect_possessed(text_.items[i]);
      check_item(text_.items[i]);
    }
    check_links();
    return report_;
  }

private:
  enum class Phase { Left, Core, Right };

  // Border-crossing element: a crossed noun phrase, or solid material.
  struct Elem {
    enum class Kind { Solid, MoveL, MoveR };
    Kind kind = Kind::Solid;
    std::vector<Elem> sub;  // content of a crossed phrase, one level peeled
  };

  void fail(ErrorCode code, const std::string& message) { report_.add(code, message, item_); }

  void expect_class(const std::string& token, WordClass cls, const char* what) {
    if (!lex_.is(token, cls)) {
      fail(ErrorCode::UnknownToken,
           std::string(what) + " '" + token + "' is not a " + word_class_name(cls) + " token");
    }
  }

  bool expect_kids(const DNode& n, std::size_t count) {
    if (n.kids.size() != count) {
      std::ostringstream msg;
      msg << "(" << head_name(n.head) << ") expects " << count << " parts, has " << n.kids.size();
      fail(ErrorCode::RuleMismatch, msg.str());
      return false;
    }
    return true;
  }

  void check_item(const DNode& item) {
    switch (item.head) {
      case Head::SIv:
      case Head::STv:
      case Head::SIs:
      case Head::SScv:
      case Head::SCnj:
      case Head::SAmp:
      case Head::SPsv:
      case Head::SNp:
      case Head::SSpecial:
        break;
      default:
        fail(ErrorCode::RuleMismatch,
             std::string("top-level item must be a sentence form, got (") + head_name(item.head) + ")");
        return;
    }
    std::vector<Elem> elems;
    check_s(item, false, elems);
    for (const Elem& e : elems) {
      if (e.kind != Elem::Kind::Solid)
        fail(ErrorCode::ScopeViolation, "crossed noun phrase outside any phrase scope");
    }
  }

  // Every check_* appends the yield-order crossing elements of the node.

  void check_s(const DNode& n, bool inside_amp, std::vector<Elem>& out) {
    switch (n.head) {
      case Head::SIv:
        if (!expect_kids(n, 2)) return;
        check_np(n.kids[0], out);
        check_vp(n.kids[1], WordClass::IV, out);
        return;
      case Head::STv:
        if (!expect_kids(n, 2)) return;
        check_np(n.kids[0], out);
        check_tvo(n.kids[1], out);
        return;
      case Head::SIs:
        if (!expect_kids(n, 2)) return;
        check_np(n.kids[0], out);
        if (n.kids[1].head == Head::PredAdj) {
          expect_class(n.kids[1].token, WordClass::ADJ, "predicate adjective");
        } else if (n.kids[1].head == Head::PredIng) {
          expect_class(n.kids[1].token, WordClass::IV, "gerund predicate");
        } else {
          fail(ErrorCode::RuleMismatch, "IS predicate must be (padj W) or (ping W)");
        }
        return;
      case Head::SScv:
        if (!expect_kids(n, 3)) return;
        check_np(n.kids[0], out);
        check_vp(n.kids[1], WordClass::SCV, out);
        check_scope(n.kids[2], out);
        return;
      case Head::SCnj:
        if (!expect_kids(n, 2)) return;
        expect_class(n.token, WordClass::CNJ, "conjunction");
        check_scope(n.kids[0], out);
        check_scope(n.kids[1], out);
        return;
      case Head::SAmp: {
        if (n.kids.size() < 2) {
          fail(ErrorCode::RuleMismatch, "(amp) needs at least two sentences");
          return;
        }
        if (inside_amp) {
          fail(ErrorCode::RuleMismatch, "(amp) parts must be plain sentences, not nested (amp)");
          return;
        }
        for (const DNode& part : n.kids) check_s(part, true, out);
        return;
      }
      case Head::SPsv:
        if (!expect_kids(n, 3)) return;
        check_np(n.kids[0], out);
        check_psvc(n.kids[1], out);
        check_np(n.kids[2], out);
        return;
      case Head::SNp:
        if (!expect_kids(n, 1)) return;
        check_np(n.kids[0], out);
        return;
      case Head::SSpecial: {
        if (!expect_kids(n, 3)) return;
        check_np(n.kids[0], out);
        // c1: sentence whose subject is the WHO placeholder (a bare (np! (who))
        // when the source sentence folded away entirely).
        check_s(n.kids[1], false, out);
        if (subject_leaf(n.kids[1]) == nullptr || subject_leaf(n.kids[1])->head != Head::Who)
          fail(ErrorCode::RuleMismatch, "(who!) clause must have a WHO subject");
        check_s(n.kids[2], false, out);
        if (subject_leaf(n.kids[2]) == nullptr || subject_leaf(n.kids[2])->head != Head::Blank)
          fail(ErrorCode::RuleMismatch, "(who!) second sentence must have a blank subject");
        return;
      }
      default:
        fail(ErrorCode::RuleMismatch,
             std::string("expected a sentence form, got (") + head_name(n.head) + ")");
        return;
    }
  }

  // The noun leaf filling a sentence's subject position, if any.
  static const DNode* subject_leaf(const DNode& s) {
    const DNode* np = nullptr;
    switch (s.head) {
      case Head::SIv:
      case Head::STv:
      case Head::SIs:
      case Head::SScv:
      case Head::SPsv:
      case Head::SNp:
        if (!s.kids.empty()) np = &s.kids[0];
        break;
      default:
        return nullptr;
    }
    while (np != nullptr) {
      switch (np->head) {
        case Head::Word:
        case Head::Who:
        case Head::Blank:
        case Head::Pron:
          return np;
        case Head::Adj:
        case Head::AdjFold:
        case Head::Ing:
        case Head::Poss:
        case Head::CrossL:
        case Head::CrossR:
          np = np->kids.empty() ? nullptr : &np->kids[0];
          break;
        case Head::RelWho:
        case Head::RelThat:
          np = np->kids.empty() ? nullptr : &np->kids[0];
          break;
        default:
          return nullptr;
      }
    }
    return nullptr;
  }

  void check_np(const DNode& n, std::vector<Elem>& out) {
    switch (n.head) {
      case Head::Word:
        expect_class(n.token, WordClass::N, "noun");
        out.push_back(Elem{});
        return;
      case Head::Who:
      case Head::Blank:
      case Head::Pron:
        out.push_back(Elem{});
        return;
      case Head::Adj:
      case Head::AdjFold:
        expect_class(n.token, WordClass::ADJ, "adjective");
        if (expect_kids(n, 1)) check_np(n.kids[0], out);
        return;
      case Head::Ing:
        expect_class(n.token, WordClass::IV, "gerund");
        if (expect_kids(n, 1)) check_np(n.kids[0], out);
        return;
      case Head::Poss:
        if (expect_kids(n, 1)) check_np(n.kids[0], out);
        return;
      case Head::RelWho: {
        if (!expect_kids(n, 2)) return;
        check_np(n.kids[0], out);
        check_s(n.kids[1], false, out);
        const DNode* subj = subject_leaf(n.kids[1]);
        if (subj == nullptr || subj->head != Head::Who)
          fail(ErrorCode::RuleMismatch, "WHO clause must have a WHO subject");
        return;
      }
      case Head::RelThat: {
        if (!expect_kids(n, 2)) return;
        check_np(n.kids[0], out);
        check_s(n.kids[1], false, out);
        if (count_leaves(n.kids[1], Head::Blank) != 1)
          fail(ErrorCode::RuleMismatch, "THAT clause must contain exactly one blank");
        const DNode* subj = subject_leaf(n.kids[1]);
        if (subj != nullptr && subj->head == Head::Blank)
          fail(ErrorCode::RuleMismatch, "THAT clause blank must fill an object position");
        return;
      }
      case Head::CrossL:
      case Head::CrossR: {
        if (!expect_kids(n, 1)) return;
        std::vector<Elem> sub;
        check_np(n.kids[0], sub);
        Elem e;
        e.kind = n.head == Head::CrossL ? Elem::Kind::MoveL : Elem::Kind::MoveR;
        e.sub = std::move(sub);
        out.push_back(std::move(e));
        return;
      }
      default:
        fail(ErrorCode::RuleMismatch,
             std::string("expected a noun phrase, got (") + head_name(n.head) + ")");
        return;
    }
  }

  // IVP-shaped phrases: intransitive verbs, sentential-complement verbs and
  // their adverb/adposition towers.
  void check_vp(const DNode& n, WordClass terminal, std::vector<Elem>& out) {
    switch (n.head) {
      case Head::V:
        expect_class(n.token, terminal, "verb");
        return;
      case Head::Adv:
        expect_class(n.token, WordClass::ADV, "adverb");
        if (expect_kids(n, 1)) check_vp(n.kids[0], terminal, out);
        return;
      case Head::AdpV:
        if (!expect_kids(n, 2)) return;
        expect_class(n.token, WordClass::ADP, "adposition");
        check_vp(n.kids[0], terminal, out);
        check_np(n.kids[1], out);
        return;
      default:
        fail(ErrorCode::RuleMismatch,
             std::string("expected a verb phrase, got (") + head_name(n.head) + ")");
        return;
    }
  }

  void check_tvp(const DNode& n, std::vector<Elem>& out) {
    switch (n.head) {
      case Head::V:
        expect_class(n.token, WordClass::TV, "verb");
        return;
      case Head::Adv:
        expect_class(n.token, WordClass::ADV, "adverb");
        if (expect_kids(n, 1)) check_tvp(n.kids[0], out);
        return;
      default:
        fail(ErrorCode::RuleMismatch,
             std::string("expected a transitive verb phrase, got (") + head_name(n.head) + ")");
        return;
    }
  }

  void check_tvo(const DNode& n, std::vector<Elem>& out) {
    switch (n.head) {
      case Head::Obj:
        if (!expect_kids(n, 2)) return;
        check_tvp(n.kids[0], out);
        check_np(n.kids[1], out);
        return;
      case Head::AdpO:
        if (!expect_kids(n, 2)) return;
        expect_class(n.token, WordClass::ADP, "adposition");
        check_tvo(n.kids[0], out);
        check_np(n.kids[1], out);
        return;
      default:
        fail(ErrorCode::RuleMismatch,
             std::string("expected a verb-object phrase, got (") + head_name(n.head) + ")");
        return;
    }
  }

  void check_psvc(const DNode& n, std::vector<Elem>& out) {
    switch (n.head) {
      case Head::VPsv:
        if (!lex_.active_of(n.token).has_value())
          fail(ErrorCode::UnknownPassiveForm,
               "participle '" + n.token + "' has no registered active form");
        return;
      case Head::Adv:
        expect_class(n.token, WordClass::ADV, "adverb");
        if (expect_kids(n, 1)) check_psvc(n.kids[0], out);
        return;
      case Head::AdpV:
        if (!expect_kids(n, 2)) return;
        expect_class(n.token, WordClass::ADP, "adposition");
        check_psvc(n.kids[0], out);
        check_np(n.kids[1], out);
        return;
      default:
        // In particular a nested (psv ...) — the passive construction cannot
        // be applied repeatedly.
        fail(ErrorCode::RuleMismatch,
             std::string("expected a passive verb cluster, got (") + head_name(n.head) + ")");
        return;
    }
  }

  void check_scope(const DNode& n, std::vector<Elem>& out) {
    if (n.head != Head::Scope) {
      fail(ErrorCode::RuleMismatch,
           std::string("expected (scope ...), got (") + head_name(n.head) + ")");
      return;
    }
    if (!expect_kids(n, 1)) return;
    std::vector<Elem> body;
    check_s(n.kids[0], false, body);

    // A noun phrase may cross the border only while adjacent to it: movers
    // to the left form a prefix, movers to the right a suffix.
    Phase phase = Phase::Left;
    std::vector<Elem> movedL, movedR;
    for (Elem& e : body) {
      switch (e.kind) {
        case Elem::Kind::MoveL:
          if (phase != Phase::Left)
            fail(ErrorCode::ScopeViolation,
                 "noun phrase cannot reach the left scope border to cross it");
          for (Elem& s : e.sub) movedL.push_back(std::move(s));
          break;
        case Elem::Kind::MoveR:
          phase = Phase::Right;
          for (Elem& s : e.sub) movedR.push_back(std::move(s));
          break;
        case Elem::Kind::Solid:
          if (phase == Phase::Right)
            fail(ErrorCode::ScopeViolation,
                 "noun phrase cannot reach the right scope border to cross it");
          phase = Phase::Core;
          break;
      }
    }
    // Crossed phrases live one level out; doubly wrapped ones keep moving.
    for (Elem& e : movedL) out.push_back(std::move(e));
    out.push_back(Elem{});  // the scope itself is solid material
    for (Elem& e : movedR) out.push_back(std::move(e));
  }

  static int count_leaves(const DNode& n, Head head) {
    int total = n.head == head ? 1 : 0;
    for (const DNode& k : n.kids) total += count_leaves(k, head);
    return total;
  }

  void check_links() {
    std::vector<std::vector<LeafInfo>> leaves;
    for (std::size_t i = 0; i < text_.items.size(); ++i)
      leaves.push_back(noun_leaves(text_.items[i], static_cast<int>(i)));

    auto locate = [&](const NounOccurrence& occ) -> const LeafInfo* {
      if (occ.item < 0 || occ.item >= static_cast<int>(leaves.size())) return nullptr;
      if (occ.index < 0 || occ.index >= static_cast<int>(leaves[occ.item].size())) return nullptr;
      return &leaves[occ.item][occ.index];
    };

    std::set<std::pair<int, int>> seen_in_chain;
    std::set<const DNode*> possessed_covered;
    item_ = -1;

    for (std::size_t li = 0; li < text_.links.size(); ++li) {
      const PronominalLink& link = text_.links[li];
      std::ostringstream where;
      where << "link " << li;

      if (link.chain.size() < 2) {
        report_.add(ErrorCode::BadLink, where.str() + ": chain needs at least two occurrences");
        continue;
      }
      bool addresses_ok = true;
      for (const auto& occ : link.chain) {
        if (locate(occ) == nullptr) {
          std::ostringstream msg;
          msg << where.str() << ": no noun occurrence (" << occ.item << " " << occ.index << ")";
          report_.add(ErrorCode::BadLink, msg.str());
          addresses_ok = false;
        }
      }
      if (!addresses_ok) continue;
      for (std::size_t k = 1; k < link.chain.size(); ++k) {
        if (!(link.chain[k - 1] < link.chain[k]))
          report_.add(ErrorCode::BadLink, where.str() + ": occurrences must be textually ordered");
      }

      if (link.kind == LinkKind::Possessive) {
        if (link.chain.size() != 2) {
          report_.add(ErrorCode::BadLink, where.str() + ": possessive link joins exactly two nouns");
          continue;
        }
        const LeafInfo* possessed = locate(link.chain[1]);
        if (!possessed_np(*possessed)) {
          report_.add(ErrorCode::BadLink,
                      where.str() + ": possessive target is not a (poss ...) noun phrase");
        } else {
          possessed_covered.insert(possessed->node);
        }
        continue;
      }

      // Identification chain (regular or reflexive).
      for (const auto& occ : link.chain) {
        if (!seen_in_chain.insert({occ.item, occ.index}).second) {
          std::ostringstream msg;
          msg << where.str() << ": occurrence (" << occ.item << " " << occ.index
              << ") already in another chain";
          report_.add(ErrorCode::BadLink, msg.str());
        }
      }
      const LeafInfo* head_leaf = locate(link.chain.front());
      if (head_leaf->node->head != Head::Word)
        report_.add(ErrorCode::BadLink, where.str() + ": chain head must be a labeled noun");
      if (link.kind == LinkKind::Reflexive) {
        if (link.chain.size() != 2) {
          report_.add(ErrorCode::BadLink, where.str() + ": reflexive link joins exactly two nouns");
        } else {
          const LeafInfo* a = locate(link.chain[0]);
          const LeafInfo* b = locate(link.chain[1]);
          if (a->occ.item != b->occ.item || a->clause != b->clause)
            report_.add(ErrorCode::BadLink,
                        where.str() + ": reflexive nouns must share one simple sentence");
        }
      }
    }

    // Placeholder leaves only make sense as chain members; possessive noun
    // phrases need their possessor.
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      for (const LeafInfo& leaf : leaves[i]) {
        Head h = leaf.node->head;
        if ((h == Head::Who || h == Head::Blank || h == Head::Pron) &&
            seen_in_chain.find({leaf.occ.item, leaf.occ.index}) == seen_in_chain.end()) {
          report_.add(ErrorCode::BadLink, "pronoun placeholder not covered by any chain",
                      static_cast<int>(i), leaf.occ.index);
        }
      }
      collect_dangling_poss(text_.items[i], leaves[i], possessed_covered, static_cast<int>(i));
    }
  }

  bool possessed_np(const LeafInfo& leaf) const {
    return possessed_leaves_.count(leaf.node) > 0;
  }

  void collect_possessed(const DNode& n) {
    if (n.head == Head::Poss && !n.kids.empty()) {
      const DNode* leaf = &n.kids[0];
      while (leaf != nullptr && !is_noun_leaf(leaf->head))
        leaf = leaf->kids.empty() ? nullptr : &leaf->kids[0];
      if (leaf != nullptr) possessed_leaves_.insert(leaf);
    }
    for (const DNode& k : n.kids) collect_possessed(k);
  }

  void collect_dangling_poss(const DNode& item, const std::vector<LeafInfo>& leaves,
                             const std::set<const DNode*>& covered, int item_index) {
    (void)leaves;
    walk_poss(item, covered, item_index);
  }

  void walk_poss(const DNode& n, const std::set<const DNode*>& covered, int item_index) {
    if (n.head == Head::Poss && !n.kids.empty()) {
      const DNode* leaf = &n.kids[0];
      while (leaf != nullptr && !is_noun_leaf(leaf->head))
        leaf = leaf->kids.empty() ? nullptr : &leaf->kids[0];
      if (leaf != nullptr && covered.find(leaf) == covered.end())
        report_.add(ErrorCode::DanglingPossessive,
                    "possessed noun phrase has no possessive link", item_index);
    }
    for (const DNode& k : n.kids) walk_poss(k, covered, item_index);
  }

  const HybridText& text_;
  const Lexicon& lex_;
  ValidationReport report_;
  int item_ = -1;
  std::set<const DNode*> possessed_leaves_;
};

}  // namespace

ValidationReport validate(const HybridText& text) {
  Validator validator(text);
  ValidationReport report = validator.run();
  report.merge(check_fusion_order(text));
  return report;
}

}  // namespace textcirc
