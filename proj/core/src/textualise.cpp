#include <algorithm>
#include <map>

#include "textcirc/grammar_ops.hpp"
#include "textcirc/rewrite.hpp"
#include "textcirc/textualise.hpp"

namespace textcirc {

std::vector<Slice> slice(const TextCircuit& c) {
  // Earliest-possible layering; within a layer everything is parallel.
  std::vector<int> layer(c.instances.size(), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& seq : c.events) {
      for (std::size_t k = 1; k < seq.size(); ++k) {
        if (layer[seq[k]] < layer[seq[k - 1]] + 1) {
          layer[seq[k]] = layer[seq[k - 1]] + 1;
          changed = true;
        }
      }
    }
  }
  int depth = 0;
  for (int l : layer) depth = std::max(depth, l);
  std::vector<Slice> out(static_cast<std::size_t>(depth));
  for (std::size_t i = 0; i < c.instances.size(); ++i)
    out[layer[i] - 1].instances.push_back(static_cast<int>(i));
  return out;
}

namespace {

class Textualiser {
public:
  explicit Textualiser(const TextCircuit& c) : c_(canonical_form(c)) {}

  HybridText run() {
    for (const auto& s : slice(c_)) {
      std::vector<DNode> parts;
      for (int id : s.instances) parts.push_back(clause(c_, c_.instances[id]));
      push_item(std::move(parts));
    }
    // Wires touching nothing still carry a referent: they EXIST.
    for (std::size_t w = 0; w < c_.wires.size(); ++w) {
      if (w < c_.events.size() && !c_.events[w].empty()) continue;
      std::vector<DNode> parts;
      parts.push_back(exists_clause(label_of(c_, static_cast<int>(w)),
                                    c_.wires[w].ref));
      push_item(std::move(parts));
    }
    make_links();
    return std::move(text_);
  }

private:
  void push_item(std::vector<DNode> parts) {
    if (parts.empty()) return;
    if (parts.size() == 1) {
      text_.items.push_back(std::move(parts[0]));
    } else {
      DNode amp(Head::SAmp);
      amp.kids = std::move(parts);
      text_.items.push_back(std::move(amp));
    }
  }

  std::string label_of(const TextCircuit& c, int wire) {
    if (!c.wires[wire].label.empty()) return c.wires[wire].label;
    return "N" + std::to_string(c.wires[wire].ref);
  }

  // Emits a noun leaf and records its referent in emission (= yield) order.
  DNode noun(const TextCircuit& c, int wire) {
    refs_emitted_.push_back(c.wires[wire].ref);
    std::string label = label_of(c, wire);
    lex(label, WordClass::N);
    return DNode(Head::Word, label);
  }

  void lex(const std::string& token, WordClass cls) {
    if (token == Lexicon::kExists || token == Lexicon::kOwns) return;
    text_.lexicon.add(token, cls);
  }

  DNode exists_clause(const std::string& label, Ref ref) {
    lex(label, WordClass::N);
    refs_emitted_.push_back(ref);
    DNode s(Head::SIv);
    s.kids.push_back(DNode(Head::Word, label));
    DNode v(Head::V, Lexicon::kExists);
    s.kids.push_back(std::move(v));
    return s;
  }

  // Verb cluster: adverbs outermost-first, then adposition wraps whose noun
  // order follows the gate's extra arguments.
  DNode verb_phrase(const TextCircuit& c, const GateCore& core,
                    const std::vector<int>& adp_wires) {
    DNode vp(Head::V, core.token);
    for (auto it = core.adverbs.rbegin(); it != core.adverbs.rend(); ++it) {
      lex(*it, WordClass::ADV);
      DNode adv(Head::Adv, *it);
      adv.kids.push_back(std::move(vp));
      vp = std::move(adv);
    }
    for (std::size_t k = 0; k < core.adpositions.size(); ++k) {
      lex(core.adpositions[k], WordClass::ADP);
      DNode adp(Head::AdpV, core.adpositions[k]);
      adp.kids.push_back(std::move(vp));
      adp.kids.push_back(noun(c, adp_wires[k]));
      vp = std::move(adp);
    }
    return vp;
  }

  DNode clause(const TextCircuit& c, const Instance& inst) {
    switch (inst.kind) {
      case Instance::Kind::Gate: {
        const GateCore& g = inst.gate;
        if (g.kind == GateCore::Kind::Adj) {
          lex(g.token, WordClass::ADJ);
          DNode s(Head::SIs);
          s.kids.push_back(noun(c, inst.pos_args[0]));
          s.kids.push_back(DNode(Head::PredAdj, g.token));
          return s;
        }
        if (g.kind == GateCore::Kind::Exists) {
          return exists_clause(label_of(c, inst.pos_args[0]),
                               c.wires[inst.pos_args[0]].ref);
        }
        if (g.verb_arity == 1) {
          lex(g.token, WordClass::IV);
          DNode s(Head::SIv);
          s.kids.push_back(noun(c, inst.pos_args[0]));
          std::vector<int> adp_wires(inst.pos_args.begin() + 1, inst.pos_args.end());
          s.kids.push_back(verb_phrase(c, g, adp_wires));
          return s;
        }
        lex(g.token, WordClass::TV);
        DNode s(Head::STv);
        s.kids.push_back(noun(c, inst.pos_args[0]));
        DNode tvp(Head::V, g.token);
        for (auto it = g.adverbs.rbegin(); it != g.adverbs.rend(); ++it) {
          lex(*it, WordClass::ADV);
          DNode adv(Head::Adv, *it);
          adv.kids.push_back(std::move(tvp));
          tvp = std::move(adv);
        }
        DNode tvo(Head::Obj);
        tvo.kids.push_back(std::move(tvp));
        tvo.kids.push_back(noun(c, inst.pos_args[1]));
        for (std::size_t k = 0; k < g.adpositions.size(); ++k) {
          lex(g.adpositions[k], WordClass::ADP);
          DNode adp(Head::AdpO, g.adpositions[k]);
          adp.kids.push_back(std::move(tvo));
          adp.kids.push_back(noun(c, inst.pos_args[2 + k]));
          tvo = std::move(adp);
        }
        s.kids.push_back(std::move(tvo));
        return s;
      }
      case Instance::Kind::Scv: {
        lex(inst.token, WordClass::SCV);
        DNode s(Head::SScv);
        s.kids.push_back(noun(c, inst.pos_args[0]));
        GateCore head;
        head.token = inst.token;
        head.adverbs = inst.adverbs;
        head.adpositions = inst.adpositions;
        std::vector<int> adp_wires(inst.pos_args.begin() + 1,
                                   inst.pos_args.begin() + 1 +
                                       static_cast<int>(inst.adpositions.size()));
        s.kids.push_back(verb_phrase(c, head, adp_wires));
        DNode scope(Head::Scope);
        int base = 1 + static_cast<int>(inst.adpositions.size());
        scope.kids.push_back(body(*inst.hole, inst, base, c));
        s.kids.push_back(std::move(scope));
        return s;
      }
      case Instance::Kind::Cnj: {
        lex(inst.token, WordClass::CNJ);
        DNode s(Head::SCnj, inst.token);
        DNode l(Head::Scope), r(Head::Scope);
        l.kids.push_back(body(*inst.left, inst, 0, c));
        r.kids.push_back(
            body(*inst.right, inst, static_cast<int>(inst.left->wires.size()), c));
        s.kids.push_back(std::move(l));
        s.kids.push_back(std::move(r));
        return s;
      }
      case Instance::Kind::ReflexGroup:
        // canonical_form dissolved these.
        return DNode(Head::SNp, {DNode(Head::Word, "?")});
    }
    return DNode(Head::SNp, {DNode(Head::Word, "?")});
  }

  // A hole's contents: every slice's clauses joined by [&] in order, then an
  // EXISTS clause per wire that touches no gate.
  DNode body(const TextCircuit& hole, const Instance& owner, int base,
             const TextCircuit& enclosing) {
    // Rebind the hole onto outer wires so emitted nouns carry outer refs.
    TextCircuit bound = hole;
    for (std::size_t i = 0; i < bound.wires.size(); ++i) {
      int outer = owner.pos_args[base + static_cast<int>(i)];
      bound.wires[i].ref = enclosing.wires[outer].ref;
      if (bound.wires[i].label.empty()) bound.wires[i].label = enclosing.wires[outer].label;
    }
    std::vector<DNode> parts;
    for (const auto& s : slice(bound)) {
      for (int id : s.instances) parts.push_back(clause(bound, bound.instances[id]));
    }
    for (std::size_t w = 0; w < bound.wires.size(); ++w) {
      if (w < bound.events.size() && !bound.events[w].empty()) continue;
      parts.push_back(exists_clause(label_of(bound, static_cast<int>(w)),
                                    bound.wires[w].ref));
    }
    if (parts.size() == 1) return std::move(parts[0]);
    DNode amp(Head::SAmp);
    amp.kids = std::move(parts);
    return amp;
  }

  // Chains mirror the connectivity: one maximal chain per referent that
  // occurs more than once, in textual order.
  void make_links() {
    // Occurrence addresses in emission order.
    std::vector<NounOccurrence> addresses;
    std::vector<const DNode*> clauses;
    for (std::size_t i = 0; i < text_.items.size(); ++i) {
      for (const auto& leaf : noun_leaves(text_.items[i], static_cast<int>(i))) {
        addresses.push_back(leaf.occ);
        clauses.push_back(leaf.clause);
      }
    }
    std::map<Ref, std::vector<std::size_t>> by_ref;
    for (std::size_t k = 0; k < refs_emitted_.size() && k < addresses.size(); ++k)
      by_ref[refs_emitted_[k]].push_back(k);
    for (const auto& [ref, where] : by_ref) {
      (void)ref;
      if (where.size() < 2) continue;
      PronominalLink link;
      for (std::size_t k : where) link.chain.push_back(addresses[k]);
      std::sort(link.chain.begin(), link.chain.end());
      link.kind = LinkKind::Regular;
      if (link.chain.size() == 2 && where.size() == 2 &&
          addresses[where[0]].item == addresses[where[1]].item &&
          clauses[where[0]] == clauses[where[1]])
        link.kind = LinkKind::Reflexive;
      text_.links.push_back(std::move(link));
    }
    std::sort(text_.links.begin(), text_.links.end(),
              [](const PronominalLink& a, const PronominalLink& b) {
                return a.chain.front() < b.chain.front();
              });
  }

  TextCircuit c_;
  HybridText text_;
  std::vector<Ref> refs_emitted_;
};

}  // namespace

HybridText textualise(const TextCircuit& c) {
  Textualiser t(c);
  return t.run();
}

bool equiv(const HybridText& t1, const HybridText& t2, ValidationReport* report) {
  ValidationReport r1 = validate(t1);
  ValidationReport r2 = validate(t2);
  if (!r1.ok() || !r2.ok()) {
    if (report != nullptr) {
      report->merge(r1);
      report->merge(r2);
    }
    return false;
  }
  CompileResult c1 = compile(t1);
  CompileResult c2 = compile(t2);
  if (!c1.ok() || !c2.ok()) {
    if (report != nullptr) {
      report->merge(c1.report);
      report->merge(c2.report);
    }
    return false;
  }
  return equal(c1.circuit, c2.circuit);
}

}  // namespace textcirc
