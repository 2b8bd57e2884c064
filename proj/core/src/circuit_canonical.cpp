#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>

#include "textcirc/circuit.hpp"

namespace textcirc {

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// Deterministic linearization consistent with every per-wire event order;
// smallest instance id first among the ready ones.
std::vector<int> topo_order(const TextCircuit& c) {
  std::size_t n = c.instances.size();
  std::vector<std::vector<int>> succ(n);
  std::vector<int> indeg(n, 0);
  for (const auto& seq : c.events) {
    for (std::size_t k = 1; k < seq.size(); ++k) {
      succ[seq[k - 1]].push_back(seq[k]);
      ++indeg[seq[k]];
    }
  }
  std::vector<int> out;
  std::vector<bool> done(n, false);
  while (out.size() < n) {
    int pick = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && indeg[i] == 0) {
        pick = static_cast<int>(i);
        break;
      }
    }
    if (pick < 0) break;  // cyclic; validate_circuit reports it
    done[pick] = true;
    out.push_back(pick);
    for (int j : succ[pick]) --indeg[j];
  }
  return out;
}

std::vector<int> layer_of(const TextCircuit& c) {
  std::vector<int> layer(c.instances.size(), 1);
  for (int id : topo_order(c)) {
    for (const auto& seq : c.events) {
      for (std::size_t k = 1; k < seq.size(); ++k) {
        if (seq[k] == id) layer[id] = std::max(layer[id], layer[seq[k - 1]] + 1);
      }
    }
  }
  return layer;
}

struct CanonResult {
  TextCircuit circuit;
  std::vector<int> wire_perm;  // old wire index -> new wire index
};

CanonResult canonical_impl(const TextCircuit& c);
TextCircuit normalize(const TextCircuit& c);

// Re-emits one instance into `out`, wire-mapped, dissolving EXISTS gates and
// reflexive groups and putting sub-circuits into canonical form.
void emit_normalized(TextCircuit& out, const Instance& inst, const std::vector<int>& wire_map) {
  if (inst.kind == Instance::Kind::Gate && inst.gate.kind == GateCore::Kind::Exists) {
    return;  // an identity wire
  }
  if (inst.kind == Instance::Kind::ReflexGroup) {
    TextCircuit g = normalize(*inst.group);
    for (int id : topo_order(g)) {
      std::vector<int> inner_map(g.wires.size());
      for (std::size_t i = 0; i < g.wires.size(); ++i)
        inner_map[i] = wire_map[inst.pos_args[i]];
      emit_normalized(out, g.instances[id], inner_map);
    }
    return;
  }
  Instance copy = inst;
  for (int& w : copy.pos_args) w = wire_map[w];
  if (copy.kind == Instance::Kind::Scv && copy.hole) {
    CanonResult hole = canonical_impl(normalize(*copy.hole));
    int base = 1 + static_cast<int>(copy.adpositions.size());
    std::vector<int> args = copy.pos_args;
    for (std::size_t i = 0; i < hole.wire_perm.size(); ++i)
      args[base + hole.wire_perm[i]] = copy.pos_args[base + i];
    copy.pos_args = std::move(args);
    copy.hole = std::make_shared<const TextCircuit>(std::move(hole.circuit));
  }
  if (copy.kind == Instance::Kind::Cnj && copy.left && copy.right) {
    CanonResult l = canonical_impl(normalize(*copy.left));
    CanonResult r = canonical_impl(normalize(*copy.right));
    std::vector<int> args = copy.pos_args;
    int rbase = static_cast<int>(copy.left->wires.size());
    for (std::size_t i = 0; i < l.wire_perm.size(); ++i)
      args[l.wire_perm[i]] = copy.pos_args[i];
    for (std::size_t i = 0; i < r.wire_perm.size(); ++i)
      args[rbase + r.wire_perm[i]] = copy.pos_args[rbase + i];
    copy.pos_args = std::move(args);
    copy.left = std::make_shared<const TextCircuit>(std::move(l.circuit));
    copy.right = std::make_shared<const TextCircuit>(std::move(r.circuit));
  }
  copy.reflexive = copy.has_repeats();
  out.push(std::move(copy));
}

TextCircuit normalize(const TextCircuit& c) {
  TextCircuit out;
  out.wires = c.wires;
  out.events.resize(out.wires.size());
  std::vector<int> identity(c.wires.size());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
  for (int id : topo_order(c)) emit_normalized(out, c.instances[id], identity);
  return out;
}

std::string instance_base_color(const Instance& inst) {
  std::ostringstream s;
  switch (inst.kind) {
    case Instance::Kind::Gate: {
      s << "g:";
      switch (inst.gate.kind) {
        case GateCore::Kind::Adj: s << "adj"; break;
        case GateCore::Kind::Verb: s << "v" << inst.gate.verb_arity; break;
        case GateCore::Kind::Exists: s << "exists"; break;
      }
      s << ":" << inst.gate.token;
      for (const auto& a : inst.gate.adverbs) s << ":adv=" << a;
      for (const auto& a : inst.gate.adpositions) s << ":adp=" << a;
      break;
    }
    case Instance::Kind::Scv:
      s << "scv:" << inst.token;
      for (const auto& a : inst.adverbs) s << ":adv=" << a;
      for (const auto& a : inst.adpositions) s << ":adp=" << a;
      // Sub-circuits are already canonical here.
      s << ":hole=" << (inst.hole ? serialize_circuit(*inst.hole) : std::string());
      break;
    case Instance::Kind::Cnj:
      s << "cnj:" << inst.token;
      s << ":left=" << (inst.left ? serialize_circuit(*inst.left) : std::string());
      s << ":right=" << (inst.right ? serialize_circuit(*inst.right) : std::string());
      break;
    case Instance::Kind::ReflexGroup:
      s << "group:" << (inst.group ? serialize_circuit(*inst.group) : std::string());
      break;
  }
  if (inst.reflexive) {
    s << ":refl";
    for (auto [i, j] : inst.reflexive_pairs()) s << "(" << i << " " << j << ")";
  }
  return s.str();
}

// Iterative colour refinement; ties left after stabilization are
// automorphisms, for which any consistent order serializes identically.
CanonResult canonical_impl(const TextCircuit& c) {
  std::size_t nw = c.wires.size(), ni = c.instances.size();
  std::vector<int> layer = layer_of(c);
  std::vector<int> topo = topo_order(c);
  std::vector<int> topo_pos(ni, 0);
  for (std::size_t k = 0; k < topo.size(); ++k) topo_pos[topo[k]] = static_cast<int>(k);

  std::vector<std::string> wcolor(nw), icolor(ni), ibase(ni);
  for (std::size_t w = 0; w < nw; ++w) wcolor[w] = c.wires[w].label;
  for (std::size_t i = 0; i < ni; ++i) ibase[i] = instance_base_color(c.instances[i]);

  auto positions_of = [&](int inst, int wire) {
    std::string s;
    const auto& args = c.instances[inst].pos_args;
    for (std::size_t p = 0; p < args.size(); ++p)
      if (args[p] == wire) s += "." + std::to_string(p);
    return s;
  };

  std::size_t rounds = nw + ni + 2;
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<std::string> icolor2(ni), wcolor2(nw);
    for (std::size_t i = 0; i < ni; ++i) {
      std::ostringstream s;
      s << ibase[i] << "|L" << layer[i];
      for (int w : c.instances[i].pos_args) s << "|" << wcolor[w];
      icolor2[i] = hex64(fnv1a(s.str()));
    }
    for (std::size_t w = 0; w < nw; ++w) {
      std::ostringstream s;
      s << c.wires[w].label;
      for (int e : c.events[w]) s << "|" << icolor2[e] << positions_of(e, static_cast<int>(w));
      wcolor2[w] = hex64(fnv1a(s.str()));
    }
    bool stable = (r > 0 && icolor2 == icolor && wcolor2 == wcolor);
    icolor = std::move(icolor2);
    wcolor = std::move(wcolor2);
    if (stable) break;
  }

  // Canonical instance order: layered, then colour, then original topo
  // position for remaining (automorphic) ties.
  std::vector<int> iorder(ni);
  for (std::size_t i = 0; i < ni; ++i) iorder[i] = static_cast<int>(i);
  std::sort(iorder.begin(), iorder.end(), [&](int a, int b) {
    if (layer[a] != layer[b]) return layer[a] < layer[b];
    if (icolor[a] != icolor[b]) return icolor[a] < icolor[b];
    return topo_pos[a] < topo_pos[b];
  });
  std::vector<int> irank(ni, 0);
  for (std::size_t k = 0; k < iorder.size(); ++k) irank[iorder[k]] = static_cast<int>(k);

  // Canonical wire order: first event, then first position there, then
  // label/colour; untouched wires go last, by label.
  auto wire_key = [&](int w) {
    int first = static_cast<int>(ni) + 1;
    int pos = 0;
    if (!c.events.empty() && !c.events[w].empty()) {
      first = irank[c.events[w].front()];
      const auto& args = c.instances[c.events[w].front()].pos_args;
      for (std::size_t p = 0; p < args.size(); ++p) {
        if (args[p] == w) {
          pos = static_cast<int>(p);
          break;
        }
      }
    }
    return std::make_tuple(first, pos, c.wires[w].label, wcolor[w], w);
  };
  std::vector<int> worder(nw);
  for (std::size_t w = 0; w < nw; ++w) worder[w] = static_cast<int>(w);
  std::sort(worder.begin(), worder.end(),
            [&](int a, int b) { return wire_key(a) < wire_key(b); });

  CanonResult result;
  result.wire_perm.assign(nw, 0);
  for (std::size_t k = 0; k < worder.size(); ++k)
    result.wire_perm[worder[k]] = static_cast<int>(k);
  for (int w : worder) result.circuit.wires.push_back(c.wires[w]);
  result.circuit.events.resize(nw);
  for (int id : iorder) {
    Instance copy = c.instances[id];
    for (int& w : copy.pos_args) w = result.wire_perm[w];
    result.circuit.push(std::move(copy));
  }
  return result;
}

}  // namespace

TextCircuit normalize_circuit(const TextCircuit& c) { return normalize(c); }

TextCircuit canonical_form(const TextCircuit& c) {
  return canonical_impl(normalize(c)).circuit;
}

CanonicalCircuit canonicalise(const TextCircuit& c) {
  return CanonicalCircuit{serialize_circuit(canonical_form(c))};
}

// --- connectivity equality (independent of canonicalise) -----------------

namespace {

bool circuits_equal(const TextCircuit& a, const TextCircuit& b,
                    const std::vector<std::vector<int>>& allowed);

bool instances_match(const TextCircuit& a, const TextCircuit& b, int ia, int ib,
                     const std::vector<int>& wmap) {
  const Instance& x = a.instances[ia];
  const Instance& y = b.instances[ib];
  if (x.kind != y.kind) return false;
  if (x.pos_args.size() != y.pos_args.size()) return false;
  for (std::size_t p = 0; p < x.pos_args.size(); ++p)
    if (wmap[x.pos_args[p]] != y.pos_args[p]) return false;
  if (x.reflexive != y.reflexive) return false;
  switch (x.kind) {
    case Instance::Kind::Gate:
      return x.gate == y.gate;
    case Instance::Kind::Scv: {
      if (x.token != y.token || x.adpositions != y.adpositions || x.adverbs != y.adverbs)
        return false;
      if (!x.hole || !y.hole) return x.hole == y.hole;
      // Hole wires must correspond so that their outer bindings agree.
      int base = 1 + static_cast<int>(x.adpositions.size());
      std::vector<std::vector<int>> allowed(x.hole->wires.size());
      for (std::size_t i = 0; i < x.hole->wires.size(); ++i)
        for (std::size_t j = 0; j < y.hole->wires.size(); ++j)
          if (wmap[x.pos_args[base + i]] == y.pos_args[base + j])
            allowed[i].push_back(static_cast<int>(j));
      return circuits_equal(*x.hole, *y.hole, allowed);
    }
    case Instance::Kind::Cnj: {
      if (x.token != y.token) return false;
      if (!x.left || !y.left || !x.right || !y.right) return false;
      int rbase_x = static_cast<int>(x.left->wires.size());
      int rbase_y = static_cast<int>(y.left->wires.size());
      if (rbase_x != rbase_y) return false;
      std::vector<std::vector<int>> allowed_l(x.left->wires.size());
      for (std::size_t i = 0; i < x.left->wires.size(); ++i)
        for (std::size_t j = 0; j < y.left->wires.size(); ++j)
          if (wmap[x.pos_args[i]] == y.pos_args[j]) allowed_l[i].push_back(static_cast<int>(j));
      if (!circuits_equal(*x.left, *y.left, allowed_l)) return false;
      std::vector<std::vector<int>> allowed_r(x.right->wires.size());
      for (std::size_t i = 0; i < x.right->wires.size(); ++i)
        for (std::size_t j = 0; j < y.right->wires.size(); ++j)
          if (wmap[x.pos_args[rbase_x + i]] == y.pos_args[rbase_y + j])
            allowed_r[i].push_back(static_cast<int>(j));
      return circuits_equal(*x.right, *y.right, allowed_r);
    }
    case Instance::Kind::ReflexGroup:
      return false;  // normalized away before matching
  }
  return false;
}

bool verify_mapping(const TextCircuit& a, const TextCircuit& b, const std::vector<int>& wmap) {
  std::vector<int> imap(a.instances.size(), -1);
  std::vector<bool> hit(b.instances.size(), false);
  for (std::size_t w = 0; w < a.wires.size(); ++w) {
    const auto& ea = a.events[w];
    const auto& eb = b.events[wmap[w]];
    if (ea.size() != eb.size()) return false;
    for (std::size_t k = 0; k < ea.size(); ++k) {
      if (imap[ea[k]] == -1) {
        if (hit[eb[k]]) return false;
        imap[ea[k]] = eb[k];
        hit[eb[k]] = true;
      } else if (imap[ea[k]] != eb[k]) {
        return false;
      }
    }
  }
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    if (imap[i] == -1) return false;  // unreachable for valid circuits
    if (!instances_match(a, b, static_cast<int>(i), imap[i], wmap)) return false;
  }
  return true;
}

bool assign_wires(const TextCircuit& a, const TextCircuit& b,
                  const std::vector<std::vector<int>>& allowed, std::vector<int>& wmap,
                  std::vector<bool>& used, std::size_t next) {
  if (next == a.wires.size()) return verify_mapping(a, b, wmap);
  for (int cand : allowed[next]) {
    if (used[cand]) continue;
    wmap[next] = cand;
    used[cand] = true;
    if (assign_wires(a, b, allowed, wmap, used, next + 1)) return true;
    used[cand] = false;
    wmap[next] = -1;
  }
  return false;
}

bool circuits_equal(const TextCircuit& a, const TextCircuit& b,
                    const std::vector<std::vector<int>>& seed_allowed) {
  if (a.wires.size() != b.wires.size()) return false;
  if (a.instances.size() != b.instances.size()) return false;

  std::vector<std::vector<int>> allowed(a.wires.size());
  for (std::size_t i = 0; i < a.wires.size(); ++i) {
    for (std::size_t j = 0; j < b.wires.size(); ++j) {
      if (a.wires[i].label != b.wires[j].label) continue;
      if (a.events[i].size() != b.events[j].size()) continue;
      if (i < seed_allowed.size()) {
        const auto& seeds = seed_allowed[i];
        if (std::find(seeds.begin(), seeds.end(), static_cast<int>(j)) == seeds.end()) continue;
      }
      allowed[i].push_back(static_cast<int>(j));
    }
    if (allowed[i].empty() && !a.wires.empty()) return false;
  }
  std::vector<int> wmap(a.wires.size(), -1);
  std::vector<bool> used(b.wires.size(), false);
  if (a.wires.empty()) return verify_mapping(a, b, wmap);
  return assign_wires(a, b, allowed, wmap, used, 0);
}

}  // namespace

bool equal(const TextCircuit& a, const TextCircuit& b) {
  TextCircuit na = normalize(a);
  TextCircuit nb = normalize(b);
  std::vector<std::vector<int>> no_seed;
  no_seed.resize(0);
  // Full candidate sets; seeding only restricts when non-empty per wire.
  std::vector<std::vector<int>> all(na.wires.size());
  for (std::size_t i = 0; i < na.wires.size(); ++i)
    for (std::size_t j = 0; j < nb.wires.size(); ++j) all[i].push_back(static_cast<int>(j));
  return circuits_equal(na, nb, all);
}

}  // namespace textcirc
