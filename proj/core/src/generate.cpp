#include <algorithm>

#include "textcirc/grammar_ops.hpp"
#include "textcirc/rng.hpp"

namespace textcirc {

Lexicon demo_lexicon() {
  Lexicon lex;
  for (const char* w : {"ALICE", "BOB", "CLAIRE", "DENNIS", "DEE", "BEER", "FLOWERS", "SOCKS"})
    lex.add(w, WordClass::N);
  for (const char* w : {"RUNS", "DANCES", "DRINKS", "LAUGHS", "SLEEPS"})
    lex.add(w, WordClass::IV);
  for (const char* w : {"LIKES", "HATES", "GIVES", "THROWS", "PICKS", "SHOWS"})
    lex.add(w, WordClass::TV);
  for (const char* w : {"DRUNK", "SOBER", "HAPPY", "KEEN"})
    lex.add(w, WordClass::ADJ);
  for (const char* w : {"QUICKLY", "CLUMSILY", "DEEPLY", "HAPPILY"})
    lex.add(w, WordClass::ADV);
  for (const char* w : {"TO", "TOWARDS", "WITH", "ABOUT", "AT", "FOR"})
    lex.add(w, WordClass::ADP);
  for (const char* w : {"SEES", "THINKS", "HEARS", "TELLS"})
    lex.add(w, WordClass::SCV);
  for (const char* w : {"SO", "WHILE", "BECAUSE"})
    lex.add(w, WordClass::CNJ);
  lex.add_passive("LIKES", "LIKED");
  lex.add_passive("HATES", "HATED");
  lex.add_passive("GIVES", "GIVEN");
  return lex;
}

namespace {

struct Gen {
  Rng& rng;
  const GenerateConfig& cfg;
  std::vector<std::string> nouns, ivs, tvs, adjs, advs, adps, scvs, cnjs;

  int decayed(int per_mille, int depth) const {
    for (int i = 0; i < depth; ++i) per_mille /= 2;
    return per_mille;
  }

  DNode gen_np(int depth) {
    DNode leaf(Head::Word, rng.pick(nouns));
    DNode np = std::move(leaf);
    while (!adjs.empty() && rng.per_mille(decayed(cfg.grow_per_mille, depth + 1))) {
      DNode adj(Head::Adj, rng.pick(adjs));
      adj.kids.push_back(std::move(np));
      np = std::move(adj);
    }
    return np;
  }

  // IVP-shaped cluster around `verb`; adverbs and adpositions interleave the
  // way the derivation happens to grow them.
  DNode gen_vp(const std::string& verb, int depth) {
    DNode vp(Head::V, verb);
    while (rng.per_mille(decayed(cfg.grow_per_mille, depth + 1))) {
      if (!advs.empty() && rng.per_mille(500)) {
        DNode adv(Head::Adv, rng.pick(advs));
        adv.kids.push_back(std::move(vp));
        vp = std::move(adv);
      } else if (!adps.empty()) {
        DNode adp(Head::AdpV, rng.pick(adps));
        adp.kids.push_back(std::move(vp));
        adp.kids.push_back(gen_np(depth + 1));
        vp = std::move(adp);
      } else {
        break;
      }
    }
    return vp;
  }

  DNode gen_tvo(int depth) {
    DNode tvp(Head::V, rng.pick(tvs));
    while (!advs.empty() && rng.per_mille(decayed(cfg.grow_per_mille, depth + 2))) {
      DNode adv(Head::Adv, rng.pick(advs));
      adv.kids.push_back(std::move(tvp));
      tvp = std::move(adv);
    }
    DNode tvo(Head::Obj);
    tvo.kids.push_back(std::move(tvp));
    tvo.kids.push_back(gen_np(depth + 1));
    while (!adps.empty() && rng.per_mille(decayed(cfg.grow_per_mille, depth + 2))) {
      DNode adp(Head::AdpO, rng.pick(adps));
      adp.kids.push_back(std::move(tvo));
      adp.kids.push_back(gen_np(depth + 1));
      tvo = std::move(adp);
    }
    return tvo;
  }

  DNode gen_simple(int depth) {
    int kind = rng.below(adjs.empty() ? 2 : 3);
    if (kind == 0 && !ivs.empty()) {
      DNode s(Head::SIv);
      s.kids.push_back(gen_np(depth));
      s.kids.push_back(gen_vp(rng.pick(ivs), depth));
      return s;
    }
    if (kind == 1 && !tvs.empty()) {
      DNode s(Head::STv);
      s.kids.push_back(gen_np(depth));
      s.kids.push_back(gen_tvo(depth));
      return s;
    }
    DNode s(Head::SIs);
    s.kids.push_back(gen_np(depth));
    s.kids.push_back(DNode(Head::PredAdj, rng.pick(adjs)));
    return s;
  }

  DNode gen_s(int depth) {
    bool compound = depth + 1 < cfg.max_depth &&
                    rng.per_mille(decayed(cfg.compound_per_mille, depth));
    if (!compound) return gen_simple(depth);
    int kind = rng.below(cnjs.empty() ? 1 : (scvs.empty() ? 2 : 3));
    if (kind != 1 && !scvs.empty()) {
      DNode s(Head::SScv);
      s.kids.push_back(gen_np(depth));
      s.kids.push_back(gen_vp(rng.pick(scvs), depth + 1));
      DNode scope(Head::Scope);
      DNode inner = gen_s(depth + 1);
      // Occasionally move the inner subject across the left border.
      if (rng.per_mille(300)) {
        DNode* subj = subject_slot(inner);
        if (subj != nullptr) {
          DNode crossed(Head::CrossL);
          crossed.kids.push_back(std::move(*subj));
          *subj = std::move(crossed);
        }
      }
      scope.kids.push_back(std::move(inner));
      s.kids.push_back(std::move(scope));
      return s;
    }
    if (kind == 1 && !cnjs.empty()) {
      DNode s(Head::SCnj, rng.pick(cnjs));
      for (int side = 0; side < 2; ++side) {
        DNode scope(Head::Scope);
        scope.kids.push_back(gen_s(depth + 1));
        s.kids.push_back(std::move(scope));
      }
      return s;
    }
    DNode s(Head::SAmp);
    s.kids.push_back(gen_simple(depth));
    s.kids.push_back(gen_simple(depth));
    return s;
  }

  static DNode* subject_slot(DNode& s) {
    switch (s.head) {
      case Head::SIv:
      case Head::STv:
      case Head::SIs:
      case Head::SScv:
        return s.kids.empty() ? nullptr : &s.kids[0];
      default:
        return nullptr;
    }
  }
};

}  // namespace

HybridText generate(std::uint64_t seed, const GenerateConfig& config) {
  Rng rng(seed);
  HybridText text;
  text.lexicon = config.lexicon;

  Gen gen{rng, config};
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
  if (gen.nouns.empty() || (gen.ivs.empty() && gen.tvs.empty() && gen.adjs.empty())) {
    // Callers check with validate(); an empty text is the only total answer.
    return text;
  }

  int n_items = 1 + rng.below(std::max(1, config.max_sentences));
  for (int i = 0; i < n_items; ++i) text.items.push_back(gen.gen_s(0));

  // Links: occurrence groups, textually ordered and pairwise disjoint.
  std::vector<LeafInfo> all;
  for (std::size_t i = 0; i < text.items.size(); ++i) {
    auto leaves = noun_leaves(text.items[i], static_cast<int>(i));
    all.insert(all.end(), leaves.begin(), leaves.end());
  }
  std::vector<bool> used(all.size(), false);
  int links_left = config.max_links;
  int attempts = config.max_links * 4;
  while (links_left > 0 && attempts-- > 0 && all.size() >= 2) {
    if (rng.per_mille(config.reflexive_per_mille)) {
      // Same-clause pair: the reflexive pronoun case.
      int a = rng.below(static_cast<int>(all.size()));
      int b = -1;
      for (std::size_t k = 0; k < all.size(); ++k) {
        if (static_cast<int>(k) != a && !used[k] && !used[a] &&
            all[k].occ.item == all[a].occ.item && all[k].clause == all[a].clause) {
          b = static_cast<int>(k);
          break;
        }
      }
      if (b < 0) continue;
      int lo = std::min(a, b), hi = std::max(a, b);
      PronominalLink link;
      link.kind = LinkKind::Reflexive;
      link.chain = {all[lo].occ, all[hi].occ};
      if (all[lo].node->head != Head::Word) continue;
      used[lo] = used[hi] = true;
      text.links.push_back(std::move(link));
      --links_left;
      continue;
    }
    int len = 2 + (rng.per_mille(250) ? 1 : 0);
    std::vector<int> picks;
    for (int t = 0; t < len * 6 && static_cast<int>(picks.size()) < len; ++t) {
      int k = rng.below(static_cast<int>(all.size()));
      if (used[k] || std::find(picks.begin(), picks.end(), k) != picks.end()) continue;
      picks.push_back(k);
    }
    if (static_cast<int>(picks.size()) < 2) continue;
    std::sort(picks.begin(), picks.end());
    if (all[picks[0]].node->head != Head::Word) continue;
    PronominalLink link;
    link.kind = LinkKind::Regular;
    for (int k : picks) link.chain.push_back(all[k].occ);
    bool distinct = true;
    for (std::size_t k = 1; k < link.chain.size(); ++k)
      if (!(link.chain[k - 1] < link.chain[k])) distinct = false;
    if (!distinct) continue;
    for (int k : picks) used[k] = true;
    text.links.push_back(std::move(link));
    --links_left;
  }
  std::sort(text.links.begin(), text.links.end(),
            [](const PronominalLink& a, const PronominalLink& b) {
              return a.chain.front() < b.chain.front();
            });
  return text;
}

}  // namespace textcirc
