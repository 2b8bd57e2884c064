#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "textcirc/lexicon.hpp"

namespace textcirc {

// Derivation trees are kept deliberately loose: a node is a head tag, an
// optional word token and a child list.  Ill-formed trees are representable
// (e.g. parsed from a damaged .hgt file, or built by hand in a test) and are
// caught by validate() rather than by the type system.
enum class Head {
  // noun layer
  Word,   // token
  Who,    // subject relative pronoun placeholder
  Blank,  // removed noun, rendered as an open-box blank
  Pron,   // regular pronoun standing for a later occurrence of a chain
  Adj,     // token + [np]
  AdjFold, // token + [np]; adjective folded in by the special subject-relative fusion
  Ing,     // token + [np]; gerund verb used attributively (extension)
  Poss,    // [np]; possessed noun phrase (extension)
  RelWho,  // [np, clause]; clause = sentence whose subject is Who
  RelThat, // [np, clause]; clause = sentence containing the Blank object
  CrossL,  // [np]; noun phrase moved leftward across its scope border
  CrossR,  // [np]; noun phrase moved rightward across its scope border
  // verb layer
  V,     // token; IV/TV/SCV terminal
  VPsv,  // token; passive participle terminal (extension)
  Adv,   // token + [vp]
  AdpV,  // [vp] + token + [np]; adposition on an IVP-like phrase
  Obj,   // [tvp, np]; transitive verb phrase with its object
  AdpO,  // [tvo] + token + [np]; adposition on a TVP·NP pair
  // sentence layer
  SIv,      // [np, ivp]
  STv,      // [np, tvo]
  SIs,      // [np, pred]
  SScv,     // [np, scvp, scope]
  SCnj,     // token + [scope, scope]
  SAmp,     // [s, s, ...]; the contentless conjunction [&]
  SPsv,     // [np, psvc, np]; passive sentence (extension)
  SNp,      // [np]; bare noun phrase item
  SSpecial, // [np, c1, c2]; special subject-relative fusion
  Scope,    // [s]; phrase scope region
  PredAdj,  // token; IS-predicate adjective
  PredIng,  // token; IS-predicate gerund (extension)
};

const char* head_name(Head head);

struct DNode {
  Head head;
  std::string token;
  std::vector<DNode> kids;

  DNode() : head(Head::Word) {}
  DNode(Head h) : head(h) {}
  DNode(Head h, std::string tok) : head(h), token(std::move(tok)) {}
  DNode(Head h, std::string tok, std::vector<DNode> k)
      : head(h), token(std::move(tok)), kids(std::move(k)) {}
  DNode(Head h, std::vector<DNode> k) : head(h), kids(std::move(k)) {}

  bool operator==(const DNode& other) const;
};

using Derivation = DNode;

// Addresses one noun leaf (Word/Who/Blank/Pron) by its position in the
// yield of a top-level item.  Crossed noun phrases count at their surface
// position, i.e. outside the brackets they were moved across.
struct NounOccurrence {
  int item = 0;
  int index = 0;
  friend bool operator==(const NounOccurrence& a, const NounOccurrence& b) {
    return a.item == b.item && a.index == b.index;
  }
  friend bool operator<(const NounOccurrence& a, const NounOccurrence& b) {
    return a.item != b.item ? a.item < b.item : a.index < b.index;
  }
};

enum class LinkKind { Regular, Reflexive, Possessive };

const char* link_kind_name(LinkKind k);

// A multiarrow: all occurrences in the chain denote one referent, earliest
// first.  fuse marks a planned relative-pronoun fusion on this chain, which
// check_fusion_order vets before the fusion ops run.
struct PronominalLink {
  LinkKind kind = LinkKind::Regular;
  std::vector<NounOccurrence> chain;
  enum class FusePlan { None, Subject, Object };
  FusePlan fuse = FusePlan::None;
};

using Ref = std::uint32_t;

struct HybridText {
  Lexicon lexicon;
  std::vector<Derivation> items;
  std::vector<PronominalLink> links;

  bool empty() const { return items.empty(); }
};

// --- occurrence and leaf utilities ------------------------------------

struct LeafInfo {
  const DNode* node = nullptr;   // the noun leaf itself
  NounOccurrence occ;
  bool in_scope = false;         // lies inside at least one scope region
  bool subject = false;          // fills a subject position
  const DNode* clause = nullptr; // nearest enclosing sentence-layer node
};

// Noun leaves of one item in yield order.
std::vector<LeafInfo> noun_leaves(const Derivation& item, int item_index);

// Surface tokens of one item in yield order (crossed noun phrases at their
// moved positions, artefact tokens included).
std::vector<std::string> yield_pieces(const Derivation& item);

// Referent ids for every occurrence of the text: linked occurrences share
// the chain's id, every other Word leaf gets a fresh one.  Position [i][j]
// is the id of occurrence j of item i; ids are dense from 0.
struct Referents {
  std::vector<std::vector<Ref>> by_occurrence;
  std::vector<std::string> labels;  // indexed by referent id
  Ref count() const { return static_cast<Ref>(labels.size()); }
};

Referents assign_referents(const HybridText& text);

bool is_noun_leaf(Head head);

}  // namespace textcirc
