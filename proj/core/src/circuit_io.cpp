#include <fstream>
#include <sstream>

#include "textcirc/circuit.hpp"

namespace textcirc {

namespace {

void write_block(const TextCircuit& c, std::ostream& out, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  out << pad << "wires " << c.wires.size() << "\n";
  for (std::size_t w = 0; w < c.wires.size(); ++w) {
    out << pad << "w " << w << " "
        << (c.wires[w].label.empty() ? std::string("-") : c.wires[w].label) << "\n";
  }
  for (const auto& inst : c.instances) {
    out << pad;
    if (inst.reflexive) out << "refl ";
    switch (inst.kind) {
      case Instance::Kind::Gate: {
        out << "gate ";
        switch (inst.gate.kind) {
          case GateCore::Kind::Adj: out << "adj"; break;
          case GateCore::Kind::Exists: out << "exists"; break;
          case GateCore::Kind::Verb: out << (inst.gate.verb_arity == 1 ? "iv" : "tv"); break;
        }
        out << " " << inst.gate.token;
        for (const auto& a : inst.gate.adverbs) out << " adv " << a;
        for (const auto& a : inst.gate.adpositions) out << " adp " << a;
        out << " args";
        for (int w : inst.pos_args) out << " " << w;
        out << "\n";
        break;
      }
      case Instance::Kind::Scv: {
        out << "box scv " << inst.token;
        for (const auto& a : inst.adverbs) out << " adv " << a;
        for (const auto& a : inst.adpositions) out << " adp " << a;
        out << " hole " << (inst.hole ? inst.hole->wires.size() : 0) << " args";
        for (int w : inst.pos_args) out << " " << w;
        out << " {\n";
        if (inst.hole) write_block(*inst.hole, out, depth + 1);
        out << pad << "}\n";
        break;
      }
      case Instance::Kind::Cnj: {
        out << "box cnj " << inst.token << " left " << (inst.left ? inst.left->wires.size() : 0)
            << " right " << (inst.right ? inst.right->wires.size() : 0) << " args";
        for (int w : inst.pos_args) out << " " << w;
        out << " {\n";
        if (inst.left) write_block(*inst.left, out, depth + 1);
        out << pad << "}\n" << pad << "{\n";
        if (inst.right) write_block(*inst.right, out, depth + 1);
        out << pad << "}\n";
        break;
      }
      case Instance::Kind::ReflexGroup: {
        out << "group args";
        for (int w : inst.pos_args) out << " " << w;
        out << " {\n";
        if (inst.group) write_block(*inst.group, out, depth + 1);
        out << pad << "}\n";
        break;
      }
    }
  }
}

struct LineReader {
  std::vector<std::vector<std::string>> lines;  // tokenized, blank lines dropped
  std::size_t pos = 0;

  explicit LineReader(const std::string& src) {
    std::istringstream in(src);
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::vector<std::string> toks;
      std::string t;
      while (ls >> t) toks.push_back(t);
      if (!toks.empty()) lines.push_back(std::move(toks));
    }
  }
  bool done() const { return pos >= lines.size(); }
  const std::vector<std::string>& peek() const { return lines[pos]; }
  const std::vector<std::string>& take() { return lines[pos++]; }
};

bool parse_int(const std::string& s, int& out) {
  try {
    std::size_t used = 0;
    out = std::stoi(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_block(LineReader& r, TextCircuit& c, ValidationReport& report) {
  auto fail = [&](const std::string& msg) {
    report.add(ErrorCode::ParseError, msg);
    return false;
  };
  if (r.done()) return fail("missing 'wires' line");
  {
    const auto& l = r.take();
    int n = 0;
    if (l.size() != 2 || l[0] != "wires" || !parse_int(l[1], n) || n < 0)
      return fail("expected 'wires <count>'");
    c.wires.resize(static_cast<std::size_t>(n));
    c.events.resize(c.wires.size());
  }
  for (std::size_t w = 0; w < c.wires.size(); ++w) {
    if (r.done()) return fail("missing wire line");
    const auto& l = r.take();
    int idx = 0;
    if (l.size() != 3 || l[0] != "w" || !parse_int(l[1], idx) ||
        idx != static_cast<int>(w))
      return fail("expected 'w <index> <label>'");
    c.wires[w].ref = static_cast<Ref>(w);
    c.wires[w].label = l[2] == "-" ? std::string() : l[2];
  }
  while (!r.done() && r.peek()[0] != "}") {
    auto l = r.take();
    std::size_t k = 0;
    Instance inst;
    if (l[k] == "refl") {
      inst.reflexive = true;
      ++k;
    }
    if (k >= l.size()) return fail("dangling 'refl'");
    if (l[k] == "gate") {
      ++k;
      if (k + 1 >= l.size()) return fail("short gate line");
      const std::string& gk = l[k++];
      inst.kind = Instance::Kind::Gate;
      if (gk == "adj") inst.gate.kind = GateCore::Kind::Adj;
      else if (gk == "exists") inst.gate.kind = GateCore::Kind::Exists;
      else if (gk == "iv") { inst.gate.kind = GateCore::Kind::Verb; inst.gate.verb_arity = 1; }
      else if (gk == "tv") { inst.gate.kind = GateCore::Kind::Verb; inst.gate.verb_arity = 2; }
      else return fail("unknown gate kind '" + gk + "'");
      inst.gate.token = l[k++];
      while (k + 1 < l.size() && (l[k] == "adv" || l[k] == "adp")) {
        if (l[k] == "adv") inst.gate.adverbs.push_back(l[k + 1]);
        else inst.gate.adpositions.push_back(l[k + 1]);
        k += 2;
      }
      if (k >= l.size() || l[k] != "args") return fail("gate line missing 'args'");
      ++k;
      for (; k < l.size(); ++k) {
        int w = 0;
        if (!parse_int(l[k], w)) return fail("bad gate argument");
        inst.pos_args.push_back(w);
      }
      c.push(std::move(inst));
      continue;
    }
    if (l[k] == "box") {
      ++k;
      if (k + 1 >= l.size()) return fail("short box line");
      const std::string& bk = l[k++];
      inst.token = l[k++];
      if (bk == "scv") {
        inst.kind = Instance::Kind::Scv;
        while (k + 1 < l.size() && (l[k] == "adv" || l[k] == "adp")) {
          if (l[k] == "adv") inst.adverbs.push_back(l[k + 1]);
          else inst.adpositions.push_back(l[k + 1]);
          k += 2;
        }
        int nhole = 0;
        if (k + 1 >= l.size() || l[k] != "hole" || !parse_int(l[k + 1], nhole))
          return fail("scv box missing 'hole <n>'");
        k += 2;
        if (k >= l.size() || l[k] != "args") return fail("box line missing 'args'");
        ++k;
        for (; k < l.size() && l[k] != "{"; ++k) {
          int w = 0;
          if (!parse_int(l[k], w)) return fail("bad box argument");
          inst.pos_args.push_back(w);
        }
        if (k >= l.size() || l[k] != "{") return fail("box missing '{'");
        TextCircuit hole;
        if (!parse_block(r, hole, report)) return false;
        if (r.done() || r.take()[0] != "}") return fail("box missing '}'");
        if (static_cast<int>(hole.wires.size()) != nhole)
          return fail("hole wire count mismatch");
        inst.hole = std::make_shared<const TextCircuit>(std::move(hole));
        c.push(std::move(inst));
        continue;
      }
      if (bk == "cnj") {
        inst.kind = Instance::Kind::Cnj;
        int nl = 0, nr = 0;
        if (k + 3 >= l.size() || l[k] != "left" || !parse_int(l[k + 1], nl) ||
            l[k + 2] != "right" || !parse_int(l[k + 3], nr))
          return fail("cnj box missing 'left <n> right <n>'");
        k += 4;
        if (k >= l.size() || l[k] != "args") return fail("box line missing 'args'");
        ++k;
        for (; k < l.size() && l[k] != "{"; ++k) {
          int w = 0;
          if (!parse_int(l[k], w)) return fail("bad box argument");
          inst.pos_args.push_back(w);
        }
        if (k >= l.size() || l[k] != "{") return fail("box missing '{'");
        TextCircuit left;
        if (!parse_block(r, left, report)) return false;
        if (r.done() || r.take()[0] != "}") return fail("box missing '}'");
        if (r.done() || r.take()[0] != "{") return fail("cnj box missing right '{'");
        TextCircuit right;
        if (!parse_block(r, right, report)) return false;
        if (r.done() || r.take()[0] != "}") return fail("box missing '}'");
        if (static_cast<int>(left.wires.size()) != nl ||
            static_cast<int>(right.wires.size()) != nr)
          return fail("conjunct wire count mismatch");
        inst.left = std::make_shared<const TextCircuit>(std::move(left));
        inst.right = std::make_shared<const TextCircuit>(std::move(right));
        c.push(std::move(inst));
        continue;
      }
      return fail("unknown box kind '" + bk + "'");
    }
    if (l[k] == "group") {
      ++k;
      inst.kind = Instance::Kind::ReflexGroup;
      inst.reflexive = true;
      if (k >= l.size() || l[k] != "args") return fail("group line missing 'args'");
      ++k;
      for (; k < l.size() && l[k] != "{"; ++k) {
        int w = 0;
        if (!parse_int(l[k], w)) return fail("bad group argument");
        inst.pos_args.push_back(w);
      }
      if (k >= l.size() || l[k] != "{") return fail("group missing '{'");
      TextCircuit group;
      if (!parse_block(r, group, report)) return false;
      if (r.done() || r.take()[0] != "}") return fail("group missing '}'");
      inst.group = std::make_shared<const TextCircuit>(std::move(group));
      c.push(std::move(inst));
      continue;
    }
    return fail("unexpected line '" + l[k] + " ...'");
  }
  return true;
}

}  // namespace

std::string serialize_circuit(const TextCircuit& c) {
  std::ostringstream out;
  out << "txc 1\n";
  write_block(c, out, 0);
  return out.str();
}

TxcParseResult parse_txc(const std::string& source) {
  TxcParseResult result;
  LineReader r(source);
  if (r.done()) return result;  // empty input: empty circuit
  {
    const auto& l = r.take();
    if (l.size() != 2 || l[0] != "txc" || l[1] != "1") {
      result.report.add(ErrorCode::ParseError, "expected 'txc 1' header");
      return result;
    }
  }
  if (!parse_block(r, result.circuit, result.report)) return result;
  if (!r.done()) result.report.add(ErrorCode::ParseError, "trailing content");
  if (result.report.ok()) result.report.merge(validate_circuit(result.circuit));
  return result;
}

TxcParseResult parse_txc_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    TxcParseResult result;
    result.report.add(ErrorCode::ParseError, "cannot open '" + path + "'");
    return result;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_txc(buf.str());
}

namespace {

void dot_block(const TextCircuit& c, std::ostream& out, const std::string& prefix, int& cluster) {
  // Wire heads.
  for (std::size_t w = 0; w < c.wires.size(); ++w) {
    out << "  " << prefix << "w" << w << " [shape=plaintext label=\""
        << (c.wires[w].label.empty() ? "?" : c.wires[w].label) << "\"];\n";
  }
  // Gates and boxes in stored order; edges follow per-wire event chains.
  for (std::size_t i = 0; i < c.instances.size(); ++i) {
    const Instance& inst = c.instances[i];
    std::string id = prefix + "i" + std::to_string(i);
    std::string label;
    std::string color = "black";
    switch (inst.kind) {
      case Instance::Kind::Gate:
        label = inst.gate.token;
        for (const auto& a : inst.gate.adpositions) label += "\\n" + a;
        for (const auto& a : inst.gate.adverbs) label += "\\n" + a;
        color = inst.gate.kind == GateCore::Kind::Adj ? "darkgreen" : "black";
        break;
      case Instance::Kind::Scv:
        label = inst.token;
        color = "blue";
        break;
      case Instance::Kind::Cnj:
        label = inst.token;
        color = "purple";
        break;
      case Instance::Kind::ReflexGroup:
        label = "refl";
        color = "red";
        break;
    }
    if (inst.reflexive && inst.kind != Instance::Kind::ReflexGroup) color = "red";
    out << "  " << id << " [shape=box color=" << color << " label=\"" << label << "\"];\n";

    const TextCircuit* subs[3] = {inst.hole.get(), inst.left.get(), inst.right.get()};
    const char* names[3] = {"hole", "left", "right"};
    if (inst.kind == Instance::Kind::ReflexGroup) subs[0] = inst.group.get();
    for (int s = 0; s < 3; ++s) {
      if (subs[s] == nullptr) continue;
      out << "  subgraph cluster_" << cluster++ << " {\n"
          << "  label=\"" << names[s] << "\"; style=dashed;\n";
      std::string sub_prefix = id + "_" + names[s] + "_";
      dot_block(*subs[s], out, sub_prefix, cluster);
      out << "  }\n";
      if (!subs[s]->wires.empty())
        out << "  " << id << " -> " << sub_prefix << "w0 [style=dotted];\n";
    }
  }
  for (std::size_t w = 0; w < c.events.size(); ++w) {
    std::string prev = prefix + "w" + std::to_string(w);
    for (int e : c.events[w]) {
      std::string cur = prefix + "i" + std::to_string(e);
      out << "  " << prev << " -> " << cur << ";\n";
      prev = cur;
    }
  }
}

}  // namespace

std::string render_dot(const TextCircuit& c) {
  std::ostringstream out;
  out << "digraph textcircuit {\n  rankdir=TB;\n";
  int cluster = 0;
  dot_block(c, out, "", cluster);
  out << "}\n";
  return out.str();
}

}  // namespace textcirc
