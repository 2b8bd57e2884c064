#include <fstream>
#include <sstream>

#include "textcirc/hgt_io.hpp"

namespace textcirc {

namespace {

struct Sexp {
  bool atom = false;
  std::string text;
  std::vector<Sexp> kids;
};

struct Tokenizer {
  const std::string& src;
  std::size_t pos = 0;
  int line = 1;

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == ';') {  // comment to end of line
        while (pos < src.size() && src[pos] != '\n') ++pos;
      } else if (c == '\n') {
        ++line;
        ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos;
      } else {
        break;
      }
    }
  }
  bool done() {
    skip_ws();
    return pos >= src.size();
  }
  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }
};

bool parse_sexp(Tokenizer& t, Sexp& out, ValidationReport& report) {
  if (t.done()) {
    report.add(ErrorCode::ParseError, "unexpected end of input");
    return false;
  }
  char c = t.peek();
  if (c == '(') {
    ++t.pos;
    out.atom = false;
    while (true) {
      if (t.done()) {
        report.add(ErrorCode::ParseError, "missing ')'");
        return false;
      }
      if (t.peek() == ')') {
        ++t.pos;
        return true;
      }
      Sexp kid;
      if (!parse_sexp(t, kid, report)) return false;
      out.kids.push_back(std::move(kid));
    }
  }
  if (c == ')') {
    std::ostringstream msg;
    msg << "stray ')' at line " << t.line;
    report.add(ErrorCode::ParseError, msg.str());
    return false;
  }
  out.atom = true;
  t.skip_ws();
  while (t.pos < t.src.size()) {
    char a = t.src[t.pos];
    if (a == '(' || a == ')' || a == ' ' || a == '\t' || a == '\n' || a == '\r' || a == ';') break;
    out.text.push_back(a);
    ++t.pos;
  }
  return true;
}

struct Converter {
  ValidationReport& report;

  void fail(const std::string& message) { report.add(ErrorCode::ParseError, message); }

  bool head_is(const Sexp& s, const char* name) {
    return !s.atom && !s.kids.empty() && s.kids[0].atom && s.kids[0].text == name;
  }

  std::string head_of(const Sexp& s) {
    if (s.atom) return "<atom>";
    if (s.kids.empty() || !s.kids[0].atom) return "<list>";
    return s.kids[0].text;
  }

  bool atom_at(const Sexp& s, std::size_t i, std::string& out) {
    if (i >= s.kids.size() || !s.kids[i].atom) {
      fail("(" + head_of(s) + ") expects a word at position " + std::to_string(i));
      return false;
    }
    out = s.kids[i].text;
    return true;
  }

  bool arity(const Sexp& s, std::size_t n) {
    if (s.kids.size() != n + 1) {
      fail("(" + head_of(s) + ") expects " + std::to_string(n) + " parts, has " +
           std::to_string(s.kids.size() - 1));
      return false;
    }
    return true;
  }

  // Generic node: (head token? kids...), shape keyed by head name.
  bool node(const Sexp& s, DNode& out) {
    if (s.atom) {
      fail("expected a form, got atom '" + s.text + "'");
      return false;
    }
    std::string h = head_of(s);
    auto kid = [&](std::size_t i, DNode& k) { return node(s.kids[i], k); };

    if (h == "np") {
      std::string tok;
      if (!arity(s, 1) || !atom_at(s, 1, tok)) return false;
      out = DNode(Head::Word, tok);
      return true;
    }
    if (h == "who") { out = DNode(Head::Who); return true; }
    if (h == "blank") { out = DNode(Head::Blank); return true; }
    if (h == "pron") { out = DNode(Head::Pron); return true; }

    auto token_then_kids = [&](Head head, std::size_t nkids) {
      std::string tok;
      if (!arity(s, 1 + nkids) || !atom_at(s, 1, tok)) return false;
      out = DNode(head, tok);
      for (std::size_t i = 0; i < nkids; ++i) {
        DNode k;
        if (!node(s.kids[2 + i], k)) return false;
        out.kids.push_back(std::move(k));
      }
      return true;
    };
    auto kids_only = [&](Head head, std::size_t nkids) {
      if (!arity(s, nkids)) return false;
      out = DNode(head);
      for (std::size_t i = 0; i < nkids; ++i) {
        DNode k;
        if (!kid(1 + i, k)) return false;
        out.kids.push_back(std::move(k));
      }
      return true;
    };

    if (h == "adj") return token_then_kids(Head::Adj, 1);
    if (h == "adjf") return token_then_kids(Head::AdjFold, 1);
    if (h == "ing") return token_then_kids(Head::Ing, 1);
    if (h == "poss") return kids_only(Head::Poss, 1);
    if (h == "rel-who") return kids_only(Head::RelWho, 2);
    if (h == "rel-that") return kids_only(Head::RelThat, 2);
    if (h == "xl") return kids_only(Head::CrossL, 1);
    if (h == "xr") return kids_only(Head::CrossR, 1);
    if (h == "v") return token_then_kids(Head::V, 0);
    if (h == "vp") return token_then_kids(Head::VPsv, 0);
    if (h == "adv") return token_then_kids(Head::Adv, 1);
    if (h == "adpv") {
      // (adpv VP TOKEN NP)
      if (!arity(s, 3)) return false;
      DNode vp, np;
      std::string tok;
      if (!node(s.kids[1], vp) || !atom_at(s, 2, tok) || !node(s.kids[3], np)) return false;
      out = DNode(Head::AdpV, tok);
      out.kids.push_back(std::move(vp));
      out.kids.push_back(std::move(np));
      return true;
    }
    if (h == "o") return kids_only(Head::Obj, 2);
    if (h == "adpo") {
      if (!arity(s, 3)) return false;
      DNode tvo, np;
      std::string tok;
      if (!node(s.kids[1], tvo) || !atom_at(s, 2, tok) || !node(s.kids[3], np)) return false;
      out = DNode(Head::AdpO, tok);
      out.kids.push_back(std::move(tvo));
      out.kids.push_back(std::move(np));
      return true;
    }
    if (h == "iv") return kids_only(Head::SIv, 2);
    if (h == "tv") return kids_only(Head::STv, 2);
    if (h == "is") return kids_only(Head::SIs, 2);
    if (h == "scv") return kids_only(Head::SScv, 3);
    if (h == "cnj") return token_then_kids(Head::SCnj, 2);
    if (h == "amp") {
      if (s.kids.size() < 3) {
        fail("(amp) needs at least two sentences");
        return false;
      }
      out = DNode(Head::SAmp);
      for (std::size_t i = 1; i < s.kids.size(); ++i) {
        DNode k;
        if (!node(s.kids[i], k)) return false;
        out.kids.push_back(std::move(k));
      }
      return true;
    }
    if (h == "psv") return kids_only(Head::SPsv, 3);
    if (h == "np!") return kids_only(Head::SNp, 1);
    if (h == "who!") return kids_only(Head::SSpecial, 3);
    if (h == "scope") return kids_only(Head::Scope, 1);
    if (h == "padj") return token_then_kids(Head::PredAdj, 0);
    if (h == "ping") return token_then_kids(Head::PredIng, 0);

    fail("unknown form (" + h + ")");
    return false;
  }

  bool lexicon(const Sexp& s, Lexicon& out) {
    for (std::size_t i = 1; i < s.kids.size(); ++i) {
      const Sexp& e = s.kids[i];
      if (e.atom || e.kids.size() < 2 || !e.kids[0].atom) {
        fail("lexicon entry must be (WORD class) or (passive TV PARTICIPLE)");
        return false;
      }
      if (e.kids[0].text == "passive") {
        std::string tv, part;
        if (!atom_at(e, 1, tv) || !atom_at(e, 2, part)) return false;
        report.merge(out.add_passive(tv, part));
        continue;
      }
      std::string word, cls;
      if (!atom_at(e, 0, word) || !atom_at(e, 1, cls)) return false;
      auto c = word_class_from_name(cls);
      if (!c.has_value()) {
        fail("unknown word class '" + cls + "'");
        return false;
      }
      report.merge(out.add(word, *c));
    }
    return true;
  }

  bool link(const Sexp& s, PronominalLink& out) {
    if (s.kids.size() < 2 || !s.kids[1].atom) {
      fail("(link) expects a kind");
      return false;
    }
    const std::string& kind = s.kids[1].text;
    if (kind == "regular") out.kind = LinkKind::Regular;
    else if (kind == "reflexive") out.kind = LinkKind::Reflexive;
    else if (kind == "possessive") out.kind = LinkKind::Possessive;
    else {
      fail("unknown link kind '" + kind + "'");
      return false;
    }
    std::size_t i = 2;
    if (i < s.kids.size() && s.kids[i].atom) {
      if (s.kids[i].text == "fuse-subject") out.fuse = PronominalLink::FusePlan::Subject;
      else if (s.kids[i].text == "fuse-object") out.fuse = PronominalLink::FusePlan::Object;
      else {
        fail("unknown link marker '" + s.kids[i].text + "'");
        return false;
      }
      ++i;
    }
    for (; i < s.kids.size(); ++i) {
      const Sexp& occ = s.kids[i];
      if (occ.atom || occ.kids.size() != 2 || !occ.kids[0].atom || !occ.kids[1].atom) {
        fail("(link) occurrence must be (ITEM INDEX)");
        return false;
      }
      try {
        NounOccurrence o;
        o.item = std::stoi(occ.kids[0].text);
        o.index = std::stoi(occ.kids[1].text);
        out.chain.push_back(o);
      } catch (const std::exception&) {
        fail("(link) occurrence must be numeric");
        return false;
      }
    }
    return true;
  }
};

}  // namespace

HgtParseResult parse_hgt(const std::string& source) {
  HgtParseResult result;
  Tokenizer t{source};
  if (t.done()) return result;  // empty file: empty text

  Sexp root;
  if (!parse_sexp(t, root, result.report)) return result;
  if (!t.done()) {
    result.report.add(ErrorCode::ParseError, "trailing content after (text ...)");
    return result;
  }

  Converter conv{result.report};
  if (conv.head_of(root) != "text") {
    result.report.add(ErrorCode::ParseError, "top-level form must be (text ...)");
    return result;
  }
  for (std::size_t i = 1; i < root.kids.size(); ++i) {
    const Sexp& part = root.kids[i];
    std::string h = conv.head_of(part);
    if (h == "lexicon") {
      if (!conv.lexicon(part, result.text.lexicon)) return result;
    } else if (h == "s") {
      if (part.kids.size() != 2) {
        result.report.add(ErrorCode::ParseError, "(s ...) wraps exactly one derivation");
        return result;
      }
      DNode item;
      if (!conv.node(part.kids[1], item)) return result;
      result.text.items.push_back(std::move(item));
    } else if (h == "link") {
      PronominalLink link;
      if (!conv.link(part, link)) return result;
      result.text.links.push_back(std::move(link));
    } else {
      result.report.add(ErrorCode::ParseError, "unexpected form (" + h + ") in (text ...)");
      return result;
    }
  }
  return result;
}

HgtParseResult parse_hgt_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    HgtParseResult result;
    result.report.add(ErrorCode::ParseError, "cannot open '" + path + "'");
    return result;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_hgt(buf.str());
}

namespace {

void print_node(const DNode& n, std::ostream& out) {
  switch (n.head) {
    case Head::Word:
      out << "(np " << n.token << ")";
      return;
    case Head::Who:
      out << "(who)";
      return;
    case Head::Blank:
      out << "(blank)";
      return;
    case Head::Pron:
      out << "(pron)";
      return;
    case Head::AdpV:
    case Head::AdpO:
      out << "(" << (n.head == Head::AdpV ? "adpv" : "adpo") << " ";
      print_node(n.kids[0], out);
      out << " " << n.token << " ";
      print_node(n.kids[1], out);
      out << ")";
      return;
    default:
      break;
  }
  out << "(" << head_name(n.head);
  if (!n.token.empty()) out << " " << n.token;
  for (const DNode& k : n.kids) {
    out << " ";
    print_node(k, out);
  }
  out << ")";
}

}  // namespace

std::string print_derivation(const Derivation& item) {
  std::ostringstream out;
  print_node(item, out);
  return out.str();
}

std::string print_hgt(const HybridText& text) {
  std::ostringstream out;
  out << "(text\n";
  out << "  (lexicon";
  bool any = false;
  for (const auto& [word, cls] : text.lexicon.entries()) {
    if (word == Lexicon::kExists || word == Lexicon::kOwns) continue;  // built in
    out << "\n    (" << word << " " << word_class_name(cls) << ")";
    any = true;
  }
  for (const auto& [tv, part] : text.lexicon.passive_forms()) {
    out << "\n    (passive " << tv << " " << part << ")";
    any = true;
  }
  if (any) out << ")";
  else out << ")";
  out << "\n";
  for (const auto& item : text.items) {
    out << "  (s " << print_derivation(item) << ")\n";
  }
  for (const auto& link : text.links) {
    out << "  (link " << link_kind_name(link.kind);
    if (link.fuse == PronominalLink::FusePlan::Subject) out << " fuse-subject";
    if (link.fuse == PronominalLink::FusePlan::Object) out << " fuse-object";
    for (const auto& occ : link.chain) out << " (" << occ.item << " " << occ.index << ")";
    out << ")\n";
  }
  out << ")\n";
  return out.str();
}

}  // namespace textcirc
