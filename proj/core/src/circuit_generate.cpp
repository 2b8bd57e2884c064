#include <algorithm>

#include "textcirc/circuit.hpp"
#include "textcirc/rng.hpp"

namespace textcirc {

namespace {

struct FreeGen {
  Rng& rng;
  const FreeGenerateConfig& cfg;
  std::vector<std::string> nouns, ivs, tvs, adjs, advs, adps, scvs, cnjs;

  GateCore gen_gate_core() {
    GateCore core;
    int kind = rng.below(adjs.empty() ? 2 : 3);
    if (kind == 2) {
      core.kind = GateCore::Kind::Adj;
      core.token = rng.pick(adjs);
      return core;
    }
    core.kind = GateCore::Kind::Verb;
    if (kind == 0 && !ivs.empty()) {
      core.verb_arity = 1;
      core.token = rng.pick(ivs);
    } else {
      core.verb_arity = 2;
      core.token = rng.pick(tvs);
    }
    int mods = rng.below(cfg.max_modifiers + 1);
    for (int m = 0; m < mods; ++m) {
      if (!advs.empty() && rng.per_mille(500)) core.adverbs.push_back(rng.pick(advs));
      else if (!adps.empty()) core.adpositions.push_back(rng.pick(adps));
    }
    return core;
  }

  // Picks n distinct wires; repeats appear only when `reflexive`.
  std::vector<int> pick_args(int wire_count, int n, bool reflexive) {
    std::vector<int> pool;
    for (int i = 0; i < wire_count; ++i) pool.push_back(i);
    rng.shuffle(pool);
    std::vector<int> args(pool.begin(), pool.begin() + std::min<std::size_t>(n, pool.size()));
    while (static_cast<int>(args.size()) < n)
      args.push_back(args.empty() ? 0 : args[rng.below(static_cast<int>(args.size()))]);
    if (reflexive && args.size() >= 2) {
      // Identify two positions.
      int i = rng.below(static_cast<int>(args.size()));
      int j = rng.below(static_cast<int>(args.size()));
      while (j == i) j = rng.below(static_cast<int>(args.size()));
      args[j] = args[i];
    }
    return args;
  }

  TextCircuit gen(int max_wires, int max_instances, int depth, Ref ref_base) {
    TextCircuit c;
    int n_wires = 1 + rng.below(std::max(1, max_wires));
    for (int w = 0; w < n_wires; ++w) {
      NounWire wire;
      wire.ref = ref_base + static_cast<Ref>(w);
      wire.label = rng.pick(nouns);
      c.wires.push_back(wire);
    }
    c.events.resize(c.wires.size());
    // Deliberately gateless wires exercise the EXISTS path downstream.
    if (n_wires > 1 && rng.per_mille(cfg.untouched_wire_per_mille)) --n_wires;

    int n_inst = rng.below(max_instances + 1);
    if (depth == 0 && n_inst == 0) n_inst = 1;
    for (int i = 0; i < n_inst; ++i) {
      bool boxed = depth < cfg.max_hole_depth && rng.per_mille(cfg.box_per_mille);
      if (boxed && !scvs.empty() && rng.per_mille(600)) {
        Instance inst;
        inst.kind = Instance::Kind::Scv;
        inst.token = rng.pick(scvs);
        if (!adps.empty() && rng.per_mille(250)) inst.adpositions.push_back(rng.pick(adps));
        int hole_wires = 1 + rng.below(std::max(1, std::min(3, n_wires)));
        TextCircuit hole =
            gen(hole_wires, std::max(1, max_instances / 2), depth + 1, 1000 * (depth + 1));
        // Bind: subject + adpositions + hole wires, all distinct outer wires
        // when possible.
        int need = 1 + static_cast<int>(inst.adpositions.size()) +
                   static_cast<int>(hole.wires.size());
        if (need > n_wires) {
          // Identified positions turn it into a reflexive box.
          inst.reflexive = true;
        }
        inst.pos_args = pick_args(n_wires, need, false);
        if (inst.has_repeats()) inst.reflexive = true;
        // Hole wire labels follow their outer binding.
        int base = 1 + static_cast<int>(inst.adpositions.size());
        TextCircuit bound = hole;
        for (std::size_t hw = 0; hw < bound.wires.size(); ++hw)
          bound.wires[hw].label = c.wires[inst.pos_args[base + hw]].label;
        inst.hole = std::make_shared<const TextCircuit>(std::move(bound));
        c.push(std::move(inst));
        continue;
      }
      if (boxed && !cnjs.empty()) {
        Instance inst;
        inst.kind = Instance::Kind::Cnj;
        inst.token = rng.pick(cnjs);
        int nl = 1 + rng.below(2), nr = 1 + rng.below(2);
        if (nl + nr > n_wires && n_wires >= 2) { nl = 1; nr = 1; }
        if (nl + nr > n_wires) continue;
        TextCircuit left = gen(nl, std::max(1, max_instances / 2), depth + 1, 2000 * (depth + 1));
        TextCircuit right =
            gen(nr, std::max(1, max_instances / 2), depth + 1, 3000 * (depth + 1));
        bool share = rng.per_mille(300) && n_wires >= 2;
        int need = static_cast<int>(left.wires.size() + right.wires.size());
        inst.pos_args = pick_args(n_wires, need, share);
        if (inst.has_repeats()) inst.reflexive = true;
        TextCircuit lb = left, rb = right;
        for (std::size_t w = 0; w < lb.wires.size(); ++w)
          lb.wires[w].label = c.wires[inst.pos_args[w]].label;
        for (std::size_t w = 0; w < rb.wires.size(); ++w)
          rb.wires[w].label = c.wires[inst.pos_args[lb.wires.size() + w]].label;
        inst.left = std::make_shared<const TextCircuit>(std::move(lb));
        inst.right = std::make_shared<const TextCircuit>(std::move(rb));
        c.push(std::move(inst));
        continue;
      }
      Instance inst;
      inst.kind = Instance::Kind::Gate;
      inst.gate = gen_gate_core();
      bool reflexive =
          inst.gate.arg_count() >= 2 && rng.per_mille(cfg.reflexive_per_mille);
      if (inst.gate.arg_count() > n_wires) reflexive = true;
      inst.pos_args = pick_args(n_wires, inst.gate.arg_count(), reflexive);
      inst.reflexive = inst.has_repeats();
      c.push(std::move(inst));
    }
    return c;
  }
};

// Rewrites every sub-circuit's wire labels to match its outer binding,
// recursively.
void fix_sub_labels(TextCircuit& c) {
  for (auto& inst : c.instances) {
    auto rebind = [&](std::shared_ptr<const TextCircuit>& sub, int base) {
      if (!sub) return;
      TextCircuit copy = *sub;
      for (std::size_t w = 0; w < copy.wires.size(); ++w)
        copy.wires[w].label = c.wires[inst.pos_args[base + static_cast<int>(w)]].label;
      fix_sub_labels(copy);
      sub = std::make_shared<const TextCircuit>(std::move(copy));
    };
    if (inst.kind == Instance::Kind::Scv)
      rebind(inst.hole, 1 + static_cast<int>(inst.adpositions.size()));
    if (inst.kind == Instance::Kind::Cnj) {
      int left_size = inst.left ? static_cast<int>(inst.left->wires.size()) : 0;
      rebind(inst.left, 0);
      rebind(inst.right, left_size);
    }
    if (inst.kind == Instance::Kind::ReflexGroup) rebind(inst.group, 0);
  }
}

}  // namespace

TextCircuit free_generate(std::uint64_t seed, const FreeGenerateConfig& config) {
  Rng rng(seed);
  FreeGen gen{rng, config};
  for (const auto& [word, cls] : config.lexicon.entries()) {
    if (word == Lexicon::kExists || word == Lexicon::kOwns) continue;
    switch (cls) {
      case WordClass::N: gen.nouns.push_back(word); break;
      case WordClass::IV: gen.ivs.push_back(word); break;
      case WordClass::TV: gen.tvs.push_back(word); break;
      case WordClass::ADJ: gen.adjs.push_back(word); break;
      case WordClass::ADV: gen.advs.push_back(word); break;
      case WordClass::ADP: gen.adps.push_back(word); break;
      case WordClass::SCV: gen.scvs.push_back(word); break;
      case WordClass::CNJ: gen.cnjs.push_back(word); break;
    }
  }
  if (gen.nouns.empty() || gen.tvs.empty()) return TextCircuit{};
  TextCircuit c = gen.gen(config.max_wires, config.max_instances, 0, 0);
  fix_sub_labels(c);
  return c;
}

}  // namespace textcirc
