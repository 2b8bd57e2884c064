#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "textcirc/circuit.hpp"

namespace textcirc {

bool operator==(const GateCore& a, const GateCore& b) {
  return a.kind == b.kind && a.token == b.token &&
         (a.kind != GateCore::Kind::Verb || a.verb_arity == b.verb_arity) &&
         a.adverbs == b.adverbs && a.adpositions == b.adpositions;
}

int Instance::positions() const {
  switch (kind) {
    case Kind::Gate:
      return gate.arg_count();
    case Kind::Scv:
      return 1 + static_cast<int>(adpositions.size()) +
             (hole ? static_cast<int>(hole->wires.size()) : 0);
    case Kind::Cnj:
      return (left ? static_cast<int>(left->wires.size()) : 0) +
             (right ? static_cast<int>(right->wires.size()) : 0);
    case Kind::ReflexGroup:
      return group ? static_cast<int>(group->wires.size()) : 0;
  }
  return 0;
}

std::vector<int> Instance::distinct_args() const {
  std::vector<int> out;
  for (int w : pos_args) {
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  }
  return out;
}

bool Instance::has_repeats() const {
  return distinct_args().size() != pos_args.size();
}

std::vector<std::pair<int, int>> Instance::reflexive_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t j = 1; j < pos_args.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (pos_args[i] == pos_args[j]) {
        pairs.push_back({static_cast<int>(i) + 1, static_cast<int>(j) + 1});
        break;  // record each position once, against its first alias
      }
    }
  }
  return pairs;
}

int TextCircuit::wire_of_ref(Ref ref) const {
  for (std::size_t i = 0; i < wires.size(); ++i)
    if (wires[i].ref == ref) return static_cast<int>(i);
  return -1;
}

int TextCircuit::push(Instance inst) {
  int id = static_cast<int>(instances.size());
  auto args = inst.distinct_args();
  instances.push_back(std::move(inst));
  if (events.size() < wires.size()) events.resize(wires.size());
  for (int w : args) events[w].push_back(id);
  return id;
}

namespace {

void check_sub(const TextCircuit& outer, const Instance& inst, const TextCircuit& sub,
               int base_pos, const char* what, ValidationReport& report) {
  for (std::size_t i = 0; i < sub.wires.size(); ++i) {
    int pos = base_pos + static_cast<int>(i);
    if (pos >= static_cast<int>(inst.pos_args.size())) break;
    int w = inst.pos_args[pos];
    if (w < 0 || w >= static_cast<int>(outer.wires.size())) continue;
    if (!sub.wires[i].label.empty() && !outer.wires[w].label.empty() &&
        sub.wires[i].label != outer.wires[w].label) {
      report.add(ErrorCode::WireOrderViolation,
                 std::string(what) + " wire '" + sub.wires[i].label +
                     "' bound to outer wire '" + outer.wires[w].label + "'");
    }
  }
  report.merge(validate_circuit(sub));
}

}  // namespace

ValidationReport validate_circuit(const TextCircuit& c) {
  ValidationReport report;

  std::set<Ref> refs;
  for (const auto& w : c.wires) {
    if (!refs.insert(w.ref).second)
      report.add(ErrorCode::DuplicateArg, "referent id not unique within circuit");
  }

  if (c.events.size() != c.wires.size() && !(c.events.empty() && c.instances.empty())) {
    report.add(ErrorCode::WireOrderViolation, "event table size does not match wire count");
    return report;
  }

  for (std::size_t i = 0; i < c.instances.size(); ++i) {
    const Instance& inst = c.instances[i];
    std::ostringstream where;
    where << "instance " << i;

    if (static_cast<int>(inst.pos_args.size()) != inst.positions()) {
      report.add(ErrorCode::WireOrderViolation,
                 where.str() + ": argument list does not match its positions");
      continue;
    }
    for (int w : inst.pos_args) {
      if (w < 0 || w >= static_cast<int>(c.wires.size()))
        report.add(ErrorCode::WireOrderViolation, where.str() + ": argument wire out of range");
    }
    if (inst.has_repeats() && !inst.reflexive)
      report.add(ErrorCode::DuplicateArg,
                 where.str() + ": same wire twice without a reflexive pronoun box");
    if (inst.kind == Instance::Kind::Gate) {
      if (inst.gate.kind == GateCore::Kind::Exists &&
          (!inst.gate.adverbs.empty() || !inst.gate.adpositions.empty()))
        report.add(ErrorCode::WireOrderViolation, where.str() + ": EXISTS takes no modifiers");
      if (inst.gate.kind == GateCore::Kind::Verb &&
          (inst.gate.verb_arity < 1 || inst.gate.verb_arity > 2))
        report.add(ErrorCode::WireOrderViolation, where.str() + ": verb arity must be 1 or 2");
    }
    if (inst.kind == Instance::Kind::Scv) {
      if (!inst.hole) {
        report.add(ErrorCode::WireOrderViolation, where.str() + ": missing hole circuit");
      } else {
        check_sub(c, inst, *inst.hole, 1 + static_cast<int>(inst.adpositions.size()),
                  "hole", report);
      }
    }
    if (inst.kind == Instance::Kind::Cnj) {
      if (!inst.left || !inst.right) {
        report.add(ErrorCode::WireOrderViolation, where.str() + ": missing conjunct circuit");
      } else {
        check_sub(c, inst, *inst.left, 0, "left conjunct", report);
        check_sub(c, inst, *inst.right, static_cast<int>(inst.left->wires.size()),
                  "right conjunct", report);
      }
    }
    if (inst.kind == Instance::Kind::ReflexGroup) {
      if (!inst.group)
        report.add(ErrorCode::WireOrderViolation, where.str() + ": missing group circuit");
      else
        check_sub(c, inst, *inst.group, 0, "reflexive group", report);
    }
  }
  if (!report.ok()) return report;

  // Event table consistency.
  std::vector<std::map<int, int>> appearances(c.instances.size());
  for (std::size_t w = 0; w < c.events.size(); ++w) {
    for (int id : c.events[w]) {
      if (id < 0 || id >= static_cast<int>(c.instances.size())) {
        report.add(ErrorCode::WireOrderViolation, "event refers to unknown instance");
        return report;
      }
      ++appearances[id][static_cast<int>(w)];
    }
  }
  for (std::size_t i = 0; i < c.instances.size(); ++i) {
    auto distinct = c.instances[i].distinct_args();
    std::map<int, int> expected;
    for (int w : distinct) expected[w] = 1;
    if (appearances[i] != expected) {
      std::ostringstream msg;
      msg << "instance " << i << " event entries disagree with its arguments";
      report.add(ErrorCode::WireOrderViolation, msg.str());
    }
  }
  if (!report.ok()) return report;

  // Per-wire orders must embed in one DAG.
  std::vector<std::vector<int>> succ(c.instances.size());
  std::vector<int> indeg(c.instances.size(), 0);
  for (const auto& seq : c.events) {
    for (std::size_t k = 1; k < seq.size(); ++k) {
      succ[seq[k - 1]].push_back(seq[k]);
      ++indeg[seq[k]];
    }
  }
  std::vector<int> ready;
  for (std::size_t i = 0; i < c.instances.size(); ++i)
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  std::size_t seen = 0;
  while (!ready.empty()) {
    int i = ready.back();
    ready.pop_back();
    ++seen;
    for (int j : succ[i])
      if (--indeg[j] == 0) ready.push_back(j);
  }
  if (seen != c.instances.size())
    report.add(ErrorCode::CycleDetected, "per-wire event orders form a cycle");
  return report;
}

namespace {

Instance remap_instance(const Instance& inst, const std::vector<int>& wire_map) {
  Instance out = inst;
  for (int& w : out.pos_args) w = wire_map[w];
  return out;
}

}  // namespace

TextCircuit compose_seq(const TextCircuit& a, const TextCircuit& b) {
  TextCircuit out;
  out.wires = a.wires;
  std::vector<int> map_b(b.wires.size(), -1);
  for (std::size_t i = 0; i < b.wires.size(); ++i) {
    int w = out.wire_of_ref(b.wires[i].ref);
    if (w < 0) {
      w = static_cast<int>(out.wires.size());
      out.wires.push_back(b.wires[i]);
    }
    map_b[i] = w;
  }
  out.events.resize(out.wires.size());
  std::vector<int> id_a;  // identity map for a
  for (std::size_t i = 0; i < a.wires.size(); ++i) id_a.push_back(static_cast<int>(i));
  for (const auto& inst : a.instances) out.push(remap_instance(inst, id_a));
  for (const auto& inst : b.instances) out.push(remap_instance(inst, map_b));
  return out;
}

TextCircuit compose_par(const TextCircuit& a, const TextCircuit& b, ValidationReport* report) {
  for (const auto& wb : b.wires) {
    if (a.wire_of_ref(wb.ref) >= 0) {
      if (report != nullptr)
        report->add(ErrorCode::ReferentClash,
                    "parallel composition requires disjoint referents ('" + wb.label + "')");
      return a;
    }
  }
  return compose_seq(a, b);
}

}  // namespace textcirc
