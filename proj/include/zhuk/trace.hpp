#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zhuk/algebra.hpp"
#include "zhuk/consistency.hpp"
#include "zhuk/core.hpp"

namespace zhuk {

inline constexpr const char* kTraceFormat = "zhuk-trace";
inline constexpr int kTraceVersion = 1;

// Hex SHA-256 of canonical_instance_json.
std::string instance_digest(const Instance& inst);

struct TraceStep {
  std::string kind;
  std::string input;   // digest before the step
  std::string output;  // digest after the step
  nlohmann::json delta = nlohmann::json::object();
  nlohmann::json witness = nlohmann::json::object();
  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct Trace {
  std::string instance;  // digest of the input instance
  std::vector<TraceStep> steps;
  friend bool operator==(const Trace&, const Trace&) = default;
};

bool is_step_kind(std::string_view kind);

// Changed domains and edges, as {"domains": [[i, [..]]], "edges": [[i, j, [[a,b]..] | null]]}.
nlohmann::json instance_delta(const Instance& before, const Instance& after);
Instance apply_delta(const Instance& before, const nlohmann::json& delta);

// Step objects without the leading "step" index; used for nested branch traces too.
nlohmann::json step_to_json(const TraceStep& s, int index);
TraceStep step_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json steps_to_json(const std::vector<TraceStep>& steps);
std::vector<TraceStep> steps_from_json(const nlohmann::json& j, const std::string& where);
// Throws ParseError("chain broken at step k") when consecutive digests disagree.
void check_chain(const std::string& start, const std::vector<TraceStep>& steps);

// One header line then one line per step; keys sorted.
std::string serialize_trace(const Trace& t);
Trace parse_trace(std::string_view text);

// Witness codecs.
nlohmann::json subset_json(Subset s);
Subset subset_from_json(const nlohmann::json& j);
nlohmann::json relation_json(const BinaryRelation& r);
BinaryRelation relation_from_json(const nlohmann::json& j, int base_size);
nlohmann::json table_json(const OperationTable& op);
OperationTable table_from_json(const nlohmann::json& j);
nlohmann::json blocks_json(const Congruence& c);
Congruence congruence_from_json(const nlohmann::json& j);
nlohmann::json assignment_json(const Assignment& h);
// Witness of a cc, irr or weak step.
nlohmann::json reduction_witness(const Reduction& r);

}  // namespace zhuk
