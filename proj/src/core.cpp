#include "zhuk/core.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "zhuk/algebra.hpp"

namespace zhuk {

using nlohmann::json;

bool canonical_less(Subset a, Subset b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.elements() < b.elements();
}

// ---------------------------------------------------------------- BinaryRelation

BinaryRelation BinaryRelation::product(int base_size, Subset left, Subset right) {
  BinaryRelation r(base_size);
  for (Element a : left.elements()) r.set_row(a, right);
  return r;
}

BinaryRelation BinaryRelation::diagonal(int base_size, Subset on) {
  BinaryRelation r(base_size);
  for (Element a : on.elements()) r.insert(a, a);
  return r;
}

BinaryRelation BinaryRelation::from_pairs(int base_size, std::span<const Pair> pairs) {
  BinaryRelation r(base_size);
  for (auto [a, b] : pairs) r.insert(a, b);
  return r;
}

Subset BinaryRelation::column(Element b) const {
  Subset s;
  for (std::size_t a = 0; a < rows_.size(); ++a)
    if (rows_[a].contains(b)) s.insert(static_cast<Element>(a));
  return s;
}

Subset BinaryRelation::left_projection() const {
  Subset s;
  for (std::size_t a = 0; a < rows_.size(); ++a)
    if (!rows_[a].empty()) s.insert(static_cast<Element>(a));
  return s;
}

Subset BinaryRelation::right_projection() const {
  Subset s;
  for (Subset r : rows_) s = s | r;
  return s;
}

int BinaryRelation::count() const {
  int c = 0;
  for (Subset r : rows_) c += r.size();
  return c;
}

bool BinaryRelation::empty() const {
  return std::all_of(rows_.begin(), rows_.end(), [](Subset r) { return r.empty(); });
}

std::vector<Pair> BinaryRelation::pairs() const {
  std::vector<Pair> out;
  for (std::size_t a = 0; a < rows_.size(); ++a)
    for (Element b : rows_[a].elements()) out.emplace_back(static_cast<Element>(a), b);
  return out;
}

BinaryRelation BinaryRelation::transposed() const {
  BinaryRelation t(base_size());
  for (std::size_t a = 0; a < rows_.size(); ++a)
    for (Element b : rows_[a].elements()) t.insert(b, static_cast<Element>(a));
  return t;
}

BinaryRelation BinaryRelation::restricted(Subset left, Subset right) const {
  BinaryRelation r(base_size());
  for (Element a : left.elements())
    if (a < base_size()) r.set_row(a, row(a) & right);
  return r;
}

BinaryRelation BinaryRelation::compose(const BinaryRelation& other) const {
  BinaryRelation r(base_size());
  for (std::size_t a = 0; a < rows_.size(); ++a) {
    Subset acc;
    for (Element c : rows_[a].elements()) acc = acc | other.row(c);
    r.set_row(static_cast<Element>(a), acc);
  }
  return r;
}

bool BinaryRelation::is_subset_of(const BinaryRelation& other) const {
  for (std::size_t a = 0; a < rows_.size(); ++a)
    if (!rows_[a].is_subset_of(other.rows_[a])) return false;
  return true;
}

BinaryRelation operator&(const BinaryRelation& a, const BinaryRelation& b) {
  BinaryRelation r(a.base_size());
  for (int x = 0; x < a.base_size(); ++x) r.set_row(x, a.row(x) & b.row(x));
  return r;
}

BinaryRelation operator|(const BinaryRelation& a, const BinaryRelation& b) {
  BinaryRelation r(a.base_size());
  for (int x = 0; x < a.base_size(); ++x) r.set_row(x, a.row(x) | b.row(x));
  return r;
}

bool operator<(const BinaryRelation& a, const BinaryRelation& b) { return a.pairs() < b.pairs(); }

// ---------------------------------------------------------------- OperationTable

OperationTable::OperationTable(int base_size, int arity, std::vector<Element> table)
    : base_size_(base_size), arity_(arity), table_(std::move(table)) {
  if (base_size < 1 || base_size > kMaxBaseSize) throw PreconditionError("base size out of range");
  if (arity < 1) throw PreconditionError("operation arity must be positive");
  std::size_t total = 1;
  for (int k = 0; k < arity; ++k) {
    total *= static_cast<std::size_t>(base_size);
    if (total > (std::size_t{1} << 26)) throw CapacityError("operation table too large");
  }
  if (table_.size() != total)
    throw PreconditionError("operation table has " + std::to_string(table_.size()) +
                            " entries, expected " + std::to_string(total));
  for (Element v : table_)
    if (v < 0 || v >= base_size) throw PreconditionError("operation value out of range");
}

std::size_t OperationTable::index_of(std::span<const Element> args) const {
  std::size_t idx = 0;
  for (Element a : args) idx = idx * static_cast<std::size_t>(base_size_) + static_cast<std::size_t>(a);
  return idx;
}

std::string Language::name_of(Element a) const {
  if (a >= 0 && static_cast<std::size_t>(a) < element_names.size()) return element_names[static_cast<std::size_t>(a)];
  return std::to_string(a);
}

// ---------------------------------------------------------------- predicates

ValidationReport validate_instance(const Instance& inst, const Language& lang) {
  ValidationReport rep;
  auto add = [&](std::string s) { rep.violations.push_back(std::move(s)); };
  const int l = inst.base_size;
  if (l != lang.base_size) add("instance base size differs from language base size");
  if (static_cast<int>(inst.domains.size()) != inst.n) add("domain count differs from n");
  const Subset base = Subset::full(l);
  for (std::size_t i = 0; i < inst.domains.size(); ++i) {
    Subset d = inst.domains[i];
    std::string where = "domain " + std::to_string(i);
    if (!d.is_subset_of(base)) add(where + ": element out of range");
    if (!d.empty() && lang.wnu.base_size() == l && !is_polymorphism(lang.wnu, d))
      add(where + ": relation not Ω-invariant");
  }
  for (const auto& [key, rel] : inst.edges) {
    auto [i, j] = key;
    std::string where = "edge (" + std::to_string(i) + "," + std::to_string(j) + ")";
    if (i < 0 || j < 0 || i >= inst.n || j >= inst.n) {
      add(where + ": variable out of range");
      continue;
    }
    if (rel.base_size() != l) {
      add(where + ": relation over wrong base");
      continue;
    }
    if (!rel.is_subset_of(BinaryRelation::product(l, inst.domains[static_cast<std::size_t>(i)],
                                                  inst.domains[static_cast<std::size_t>(j)])))
      add(where + ": tuple out of domain");
    if (!rel.empty() && lang.wnu.base_size() == l && !is_polymorphism(lang.wnu, rel))
      add(where + ": relation not Ω-invariant");
  }
  return rep;
}

bool is_solution(const Instance& inst, const Assignment& h) {
  if (static_cast<int>(h.size()) != inst.n) return false;
  for (int i = 0; i < inst.n; ++i) {
    Element v = h[static_cast<std::size_t>(i)];
    if (v < 0 || v >= inst.base_size || !inst.domains[static_cast<std::size_t>(i)].contains(v)) return false;
  }
  for (const auto& [key, rel] : inst.edges)
    if (!rel.contains(h[static_cast<std::size_t>(key.first)], h[static_cast<std::size_t>(key.second)])) return false;
  return true;
}

Instance restrict_instance(const Instance& inst, int i, Subset d) {
  if (i < 0 || i >= inst.n) throw PreconditionError("variable out of range");
  if (!d.is_subset_of(inst.domains[static_cast<std::size_t>(i)]))
    throw PreconditionError("restriction is not a subset of the current domain");
  Instance out = inst;
  out.domains[static_cast<std::size_t>(i)] = d;
  for (auto& [key, rel] : out.edges) {
    if (key.first != i && key.second != i) continue;
    rel = rel.restricted(out.domains[static_cast<std::size_t>(key.first)],
                         out.domains[static_cast<std::size_t>(key.second)]);
  }
  return out;
}

// ---------------------------------------------------------------- file format

namespace {

struct Reader {
  const json& root;
  std::vector<std::string> names;
  int l = 0;

  Element element(const json& v, const std::string& where) const {
    if (v.is_number_integer()) {
      auto x = v.get<long long>();
      if (x < 0 || x >= l) throw ParseError(where, "element out of range");
      return static_cast<Element>(x);
    }
    if (v.is_string()) {
      auto it = std::find(names.begin(), names.end(), v.get<std::string>());
      if (it == names.end()) throw ParseError(where, "unknown element name '" + v.get<std::string>() + "'");
      return static_cast<Element>(it - names.begin());
    }
    throw ParseError(where, "element must be an integer or a name");
  }

  Subset subset(const json& v, const std::string& where) const {
    if (!v.is_array()) throw ParseError(where, "expected a list of elements");
    Subset s;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const json& e = v[k];
      if (e.is_array()) {
        if (e.size() != 1) throw ParseError(where + "/" + std::to_string(k), "arity mismatch: expected 1");
        s.insert(element(e[0], where + "/" + std::to_string(k) + "/0"));
      } else {
        s.insert(element(e, where + "/" + std::to_string(k)));
      }
    }
    return s;
  }

  BinaryRelation relation(const json& v, const std::string& where) const {
    if (!v.is_array()) throw ParseError(where, "expected a list of pairs");
    BinaryRelation r(l);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const json& t = v[k];
      std::string at = where + "/" + std::to_string(k);
      if (!t.is_array() || t.size() != 2) throw ParseError(at, "arity mismatch: expected 2");
      r.insert(element(t[0], at + "/0"), element(t[1], at + "/1"));
    }
    return r;
  }
};

int require_int(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(where, std::string("missing field '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ParseError(where + "/" + key, "expected an integer");
  return v.get<int>();
}

json subset_json(Subset s) { return json(s.elements()); }

json relation_json(const BinaryRelation& r) {
  json out = json::array();
  for (auto [a, b] : r.pairs()) out.push_back({a, b});
  return out;
}

}  // namespace

ParsedFile parse_instance(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), std::string("syntax error: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("/", "top level must be an object");

  ParsedFile out;
  Language& lang = out.language;
  Instance& inst = out.instance;
  Reader rd{root, {}, 0};

  rd.l = require_int(root, "base_size", "");
  if (rd.l < 1 || rd.l > kMaxBaseSize) throw ParseError("/base_size", "base size out of range");
  lang.base_size = inst.base_size = rd.l;

  if (root.contains("element_names")) {
    const json& nm = root["element_names"];
    if (!nm.is_array() || static_cast<int>(nm.size()) != rd.l)
      throw ParseError("/element_names", "expected " + std::to_string(rd.l) + " names");
    for (const json& s : nm) {
      if (!s.is_string()) throw ParseError("/element_names", "names must be strings");
      rd.names.push_back(s.get<std::string>());
    }
  } else {
    for (int a = 0; a < rd.l; ++a) rd.names.push_back(std::to_string(a));
  }
  lang.element_names = rd.names;

  if (!root.contains("wnu") || !root["wnu"].is_object()) throw ParseError("", "missing object 'wnu'");
  const json& w = root["wnu"];
  int m = require_int(w, "arity", "/wnu");
  if (!w.contains("table") || !w["table"].is_array()) throw ParseError("/wnu", "missing list 'table'");
  std::vector<Element> table;
  for (std::size_t k = 0; k < w["table"].size(); ++k)
    table.push_back(rd.element(w["table"][k], "/wnu/table/" + std::to_string(k)));
  try {
    lang.wnu = OperationTable(rd.l, m, std::move(table));
  } catch (const Error& e) {
    throw ParseError("/wnu", e.what());
  }

  const bool has_unary = root.contains("unary");
  const bool has_binary = root.contains("binary");
  if (!has_unary && !has_binary) {
    Language built = build_invariant_language(rd.l, lang.wnu, rd.names);
    lang.unary = std::move(built.unary);
    lang.binary = std::move(built.binary);
    lang.generated = true;
  } else {
    if (has_unary) {
      const json& u = root["unary"];
      if (!u.is_array()) throw ParseError("/unary", "expected a list of relations");
      for (std::size_t k = 0; k < u.size(); ++k) lang.unary.push_back(rd.subset(u[k], "/unary/" + std::to_string(k)));
    }
    if (has_binary) {
      const json& b = root["binary"];
      if (!b.is_array()) throw ParseError("/binary", "expected a list of relations");
      for (std::size_t k = 0; k < b.size(); ++k)
        lang.binary.push_back(rd.relation(b[k], "/binary/" + std::to_string(k)));
    }
  }

  inst.n = root.contains("n") ? require_int(root, "n", "") : 0;
  if (inst.n < 0) throw ParseError("/n", "negative variable count");
  if (root.contains("domains")) {
    const json& ds = root["domains"];
    if (!ds.is_array() || static_cast<int>(ds.size()) != inst.n)
      throw ParseError("/domains", "expected " + std::to_string(inst.n) + " domains");
    for (std::size_t k = 0; k < ds.size(); ++k) inst.domains.push_back(rd.subset(ds[k], "/domains/" + std::to_string(k)));
  } else {
    inst.domains.assign(static_cast<std::size_t>(inst.n), Subset::full(rd.l));
  }
  if (root.contains("edges")) {
    const json& es = root["edges"];
    if (!es.is_array()) throw ParseError("/edges", "expected a list");
    for (std::size_t k = 0; k < es.size(); ++k) {
      std::string at = "/edges/" + std::to_string(k);
      const json& e = es[k];
      if (!e.is_object()) throw ParseError(at, "expected an object");
      int from = require_int(e, "from", at);
      int to = require_int(e, "to", at);
      if (from < 0 || from >= inst.n) throw ParseError(at + "/from", "variable out of range");
      if (to < 0 || to >= inst.n) throw ParseError(at + "/to", "variable out of range");
      if (!e.contains("tuples")) throw ParseError(at, "missing field 'tuples'");
      BinaryRelation r = rd.relation(e["tuples"], at + "/tuples");
      auto [it, fresh] = inst.edges.emplace(EdgeKey{from, to}, r);
      if (!fresh) it->second = it->second & r;
    }
  }
  return out;
}

ParsedFile load_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_instance(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + (e.where().empty() ? "" : ":" + e.where()), e.what());
  }
}

std::string serialize_instance(const Instance& inst, const Language& lang) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"base_size\": " << lang.base_size << ",\n";
  os << "  \"element_names\": " << json(lang.element_names).dump() << ",\n";
  os << "  \"wnu\": {\"arity\": " << lang.wnu.arity() << ", \"table\": " << json(lang.wnu.table()).dump() << "},\n";
  if (!lang.generated) {
    json u = json::array();
    for (Subset s : lang.unary) u.push_back(subset_json(s));
    os << "  \"unary\": " << u.dump() << ",\n";
    os << "  \"binary\": [";
    for (std::size_t k = 0; k < lang.binary.size(); ++k)
      os << (k ? ",\n    " : "\n    ") << relation_json(lang.binary[k]).dump();
    os << (lang.binary.empty() ? "],\n" : "\n  ],\n");
  }
  os << "  \"n\": " << inst.n << ",\n";
  json d = json::array();
  for (Subset s : inst.domains) d.push_back(subset_json(s));
  os << "  \"domains\": " << d.dump() << ",\n";
  os << "  \"edges\": [";
  bool first = true;
  for (const auto& [key, rel] : inst.edges) {
    os << (first ? "\n    " : ",\n    ");
    first = false;
    os << "{\"from\": " << key.first << ", \"to\": " << key.second << ", \"tuples\": " << relation_json(rel).dump() << "}";
  }
  os << (first ? "]\n" : "\n  ]\n");
  os << "}\n";
  return os.str();
}

std::string canonical_instance_json(const Instance& inst) {
  json j;
  j["base_size"] = inst.base_size;
  j["n"] = inst.n;
  json d = json::array();
  for (Subset s : inst.domains) d.push_back(subset_json(s));
  j["domains"] = d;
  json e = json::array();
  for (const auto& [key, rel] : inst.edges) e.push_back({key.first, key.second, relation_json(rel)});
  j["edges"] = e;
  return j.dump();
}

std::string format_subset(Subset s, const Language& lang) {
  std::string out = "{";
  bool first = true;
  for (Element a : s.elements()) {
    if (!first) out += ",";
    first = false;
    out += lang.name_of(a);
  }
  return out + "}";
}

std::string format_assignment(const Assignment& h, const Language& lang) {
  std::string out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) out += " ";
    out += "x" + std::to_string(i) + "=" + lang.name_of(h[i]);
  }
  return out;
}

}  // namespace zhuk
