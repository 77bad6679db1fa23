#include "zhuk/trace.hpp"

#include <array>
#include <cstdio>
#include <sstream>

#include <openssl/evp.h>

namespace zhuk {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 12> kKinds{"cc",         "irr",        "weak",       "ba",        "cr",     "pc",
                                             "lin_factor", "lin_gauss",  "lin_weaken", "lin_eq_add", "oracle", "answer"};

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof buf, "%02x", md[k]);
    hex += buf;
  }
  return hex;
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where, std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string string_field(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) throw ParseError(where + "/" + key, "expected a string");
  return v.get<std::string>();
}

}  // namespace

std::string instance_digest(const Instance& inst) { return sha256_hex(canonical_instance_json(inst)); }

bool is_step_kind(std::string_view kind) {
  for (const char* k : kKinds)
    if (kind == k) return true;
  return false;
}

json subset_json(Subset s) { return json(s.elements()); }

Subset subset_from_json(const json& j) {
  Subset s;
  for (const json& a : j) {
    const int v = a.get<int>();
    if (v < 0 || v >= kMaxBaseSize) throw ParseError("", "element out of range");
    s.insert(v);
  }
  return s;
}

json relation_json(const BinaryRelation& r) {
  json out = json::array();
  for (auto [a, b] : r.pairs()) out.push_back({a, b});
  return out;
}

BinaryRelation relation_from_json(const json& j, int base_size) {
  BinaryRelation r(base_size);
  for (const json& p : j) {
    const int a = p.at(0).get<int>();
    const int b = p.at(1).get<int>();
    if (a < 0 || b < 0 || a >= base_size || b >= base_size) throw ParseError("", "element out of range");
    r.insert(a, b);
  }
  return r;
}

json table_json(const OperationTable& op) {
  return {{"size", op.base_size()}, {"arity", op.arity()}, {"table", op.table()}};
}

OperationTable table_from_json(const json& j) {
  return OperationTable(j.at("size").get<int>(), j.at("arity").get<int>(), j.at("table").get<std::vector<Element>>());
}

json blocks_json(const Congruence& c) {
  json out = json::array();
  for (Subset b : c.blocks()) out.push_back(subset_json(b));
  return out;
}

Congruence congruence_from_json(const json& j) {
  std::vector<Subset> blocks;
  Subset carrier;
  for (const json& b : j) {
    blocks.push_back(subset_from_json(b));
    carrier = carrier | blocks.back();
  }
  return Congruence(carrier, blocks);
}

json assignment_json(const Assignment& h) { return json(h); }

json reduction_witness(const Reduction& r) {
  json w = {{"variable", r.variable}, {"domain", subset_json(r.domain)}};
  if (r.irreducibility) {
    const IrreducibilityInfo& info = *r.irreducibility;
    json parts = json::array();
    for (const auto& p : info.partitions) {
      json blocks = json::array();
      for (Subset b : p) blocks.push_back(subset_json(b));
      parts.push_back(blocks);
    }
    w["anchor"] = info.anchor;
    w["congruence"] = info.congruence;
    w["variables"] = info.variables;
    w["partitions"] = parts;
  }
  return w;
}

json instance_delta(const Instance& before, const Instance& after) {
  json domains = json::array();
  for (int i = 0; i < after.n; ++i)
    if (before.domains[static_cast<std::size_t>(i)] != after.domains[static_cast<std::size_t>(i)])
      domains.push_back({i, subset_json(after.domains[static_cast<std::size_t>(i)])});
  json edges = json::array();
  for (const auto& [key, rel] : before.edges) {
    auto it = after.edges.find(key);
    if (it == after.edges.end()) edges.push_back({key.first, key.second, nullptr});
    else if (!(it->second == rel)) edges.push_back({key.first, key.second, relation_json(it->second)});
  }
  for (const auto& [key, rel] : after.edges)
    if (!before.edges.count(key)) edges.push_back({key.first, key.second, relation_json(rel)});
  json out = json::object();
  if (!domains.empty()) out["domains"] = domains;
  if (!edges.empty()) out["edges"] = edges;
  return out;
}

Instance apply_delta(const Instance& before, const json& delta) {
  Instance out = before;
  if (!delta.is_object()) throw ParseError("delta", "expected an object");
  if (delta.contains("domains"))
    for (const json& d : delta.at("domains")) {
      const int i = d.at(0).get<int>();
      if (i < 0 || i >= out.n) throw ParseError("delta", "variable out of range");
      out.domains[static_cast<std::size_t>(i)] = subset_from_json(d.at(1));
    }
  if (delta.contains("edges"))
    for (const json& e : delta.at("edges")) {
      const EdgeKey key{e.at(0).get<int>(), e.at(1).get<int>()};
      if (key.first < 0 || key.second < 0 || key.first >= out.n || key.second >= out.n)
        throw ParseError("delta", "variable out of range");
      if (e.at(2).is_null()) out.edges.erase(key);
      else out.edges[key] = relation_from_json(e.at(2), out.base_size);
    }
  return out;
}

json step_to_json(const TraceStep& s, int index) {
  return {{"step", index}, {"kind", s.kind},   {"input", s.input},
          {"output", s.output}, {"delta", s.delta}, {"witness", s.witness}};
}

TraceStep step_from_json(const json& j, const std::string& where) {
  TraceStep s;
  s.kind = string_field(j, "kind", where);
  if (!is_step_kind(s.kind)) throw ParseError(where + "/kind", "unknown kind '" + s.kind + "'");
  s.input = string_field(j, "input", where);
  s.output = string_field(j, "output", where);
  s.delta = field(j, "delta", where);
  s.witness = field(j, "witness", where);
  if (!s.witness.is_object()) throw ParseError(where + "/witness", "expected an object");
  return s;
}

json steps_to_json(const std::vector<TraceStep>& steps) {
  json out = json::array();
  for (std::size_t k = 0; k < steps.size(); ++k) out.push_back(step_to_json(steps[k], static_cast<int>(k)));
  return out;
}

std::vector<TraceStep> steps_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array of steps");
  std::vector<TraceStep> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(step_from_json(j[k], where + "/" + std::to_string(k)));
  return out;
}

void check_chain(const std::string& start, const std::vector<TraceStep>& steps) {
  std::string prev = start;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].input != prev) throw ParseError("", "chain broken at step " + std::to_string(k));
    prev = steps[k].output;
  }
}

std::string serialize_trace(const Trace& t) {
  std::ostringstream os;
  json header = {{"format", kTraceFormat},
                 {"version", kTraceVersion},
                 {"instance_digest", t.instance},
                 {"digest", "sha256"},
                 {"steps", t.steps.size()}};
  os << header.dump() << '\n';
  for (std::size_t k = 0; k < t.steps.size(); ++k) os << step_to_json(t.steps[k], static_cast<int>(k)).dump() << '\n';
  return os.str();
}

Trace parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<json> records;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(lineno), e.what());
    }
  }
  if (records.empty()) throw ParseError("", "empty trace");
  const json& header = records.front();
  if (string_field(header, "format", "header") != kTraceFormat) throw ParseError("header/format", "unknown format");
  if (field(header, "version", "header") != kTraceVersion) throw ParseError("header/version", "unsupported version");
  Trace t;
  t.instance = string_field(header, "instance_digest", "header");
  for (std::size_t k = 1; k < records.size(); ++k) {
    const std::string where = "step " + std::to_string(k - 1);
    const json& idx = field(records[k], "step", where);
    if (idx != static_cast<int>(k - 1)) throw ParseError(where + "/step", "step index out of order");
    t.steps.push_back(step_from_json(records[k], where));
  }
  const json& count = field(header, "steps", "header");
  if (count != t.steps.size())
    throw ParseError("", "chain broken at step " + std::to_string(std::min<std::size_t>(t.steps.size(), count.get<std::size_t>())));
  check_chain(t.instance, t.steps);
  return t;
}

}  // namespace zhuk
