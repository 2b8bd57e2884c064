#pragma once

#include <string>
#include <vector>

#include "textcirc/circuit.hpp"
#include "textcirc/text.hpp"

namespace textcirc {

// Typed port-graph IR between grammar and circuits.  Only connectivity is
// represented; planar data (wire crossings, horizontal placement) does not
// exist here.
enum class WireType { NP, IVP, TVP, AdpAnc, PronLink, TvpPsv, PossLink };

const char* wire_type_name(WireType t);

enum class NodeKind {
  IvIntro,     // in [NP]            out [NP, IVP]
  TvIntro,     // in [NP, NP]        out [NP, TVP, NP]
  AdjIntro,    // in [NP]            out [NP]          token = adjective
  AdjIsIntro,  // in [NP]            out [NP]          copular IS + adjective
  AdvIv,       // in [IVP]           out [IVP]
  AdvTv,       // in [TVP]           out [TVP]
  AdpIv,       // in [IVP, NP]       out [IVP, NP]     extra noun enters from the top
  AdpTv,       // in [TVP, NP]       out [TVP, NP]
  VLabel,      // in [IVP|TVP|TvpPsv]                  verb terminal
  ScvIntro,    // in [NP]            out [NP, IVP]     owns a complement region
  CnjIntro,    //                                       owns left and right regions
  ScopeEnterL, // in [NP]            out [NP]          wire enters a right-phrase region
  ScopeExitL,  // in [NP]            out [NP]
  ScopeEnterR, // in [NP]            out [NP]          wire enters a left-phrase region
  ScopeExitR,  // in [NP]            out [NP]
  LinkOut,     // in [NP]            out [PronLink]
  LinkIn,      // in [PronLink]      out [NP]
  // extensions
  PsvOpen,     // in [NP, NP]        out [NP, NP, TvpPsv]   owns a passive region
  PsvClose,    // in [TvpPsv]                           token = participle
  PossOut,     // in [NP]            out [NP, PossLink]
  PossIn,      // in [PossLink, NP]  out [NP]
  IngMark,     // in [NP]            out [NP]          token = IV verb in ADJ position
  // rewrite products
  AdvBlock,    // in [IVP|TVP]       out [same]        gathered adverb list
  AdpBlock,    // in [IVP|TVP]+NPs   out [same]        gathered adposition list (ancilla form)
  GateNode,    // in [NP × args]     out [NP × args]   normal-form gate
  BoxNode,     // in [NP × args]     out [NP × args]   finished Scv/Cnj/reflexive-group box
};

const char* node_kind_name(NodeKind k);

constexpr int kBoundaryIn = -1;
constexpr int kBoundaryOut = -2;
constexpr int kNoWire = -1;

struct PortRef {
  int node = kBoundaryIn;
  int port = 0;
};

struct DiagWire {
  WireType type = WireType::NP;
  PortRef from;  // producer
  PortRef to;    // consumer
  bool reflexive = false;  // PronLink identifying two wires of one sentence
  bool alive = true;
};

struct DiagNode {
  NodeKind kind = NodeKind::IvIntro;
  std::string token;
  std::vector<int> in_wires;   // wire ids per in-port, kNoWire when vacant
  std::vector<int> out_wires;  // wire ids per out-port
  int region = -1;             // innermost containing region
  bool alive = true;

  // AdvBlock / AdpBlock payloads, textual order.
  std::vector<std::string> mod_tokens;
  // GateNode payload.
  GateCore core;
  // Identified argument-position pairs (reflexive pronoun box around this
  // gate/box); positions are 0-based.  For a pair (i, j) the ports of
  // position j are vacant and the position aliases position i.
  std::vector<std::pair<int, int>> refl_pairs;
  // BoxNode payload; pos_args index this node's port positions.
  std::shared_ptr<const Instance> box;
};

struct ScopeRegion {
  enum class Kind { ScvComplement, CnjLeft, CnjRight, Passive };
  int id = 0;
  int parent = -1;
  Kind kind = Kind::ScvComplement;
  int owner = -1;  // ScvIntro / CnjIntro / PsvOpen node
  bool alive = true;
};

const char* region_kind_name(ScopeRegion::Kind k);

struct BoundaryPort {
  Ref ref = 0;
  std::string label;     // empty on outputs and unlabeled chain segments
  bool in_scope = false; // subscript i/o: noun introduced inside a phrase scope
};

struct TextDiagram {
  std::vector<DiagNode> nodes;
  std::vector<DiagWire> wires;
  std::vector<ScopeRegion> regions;
  std::vector<BoundaryPort> inputs;
  std::vector<BoundaryPort> outputs;

  int add_node(DiagNode node);
  int add_wire(DiagWire wire);
  int add_region(ScopeRegion region);

  bool region_contains(int region, int maybe_inner) const;  // reflexive on equal ids
  int region_depth(int region) const;
};

// Enforces the diagram conventions: port typing, region nesting, NP-only
// border crossings through enter/exit nodes, balanced labeled boundary,
// acyclicity modulo flagged reflexive links.
ValidationReport validate_diagram(const TextDiagram& d);

// Translation of validated hybrid text; one wire segment per noun
// occurrence, pronominal links as PronLink chains, scope brackets as
// regions with enter/exit crossings.
TextDiagram from_text(const HybridText& text);

// DOT rendering with regions as clusters and nodes coloured by kind.
std::string diagram_dot(const TextDiagram& d);

// Line-oriented debug dump (stable across runs).
std::string diagram_dump(const TextDiagram& d);

}  // namespace textcirc
