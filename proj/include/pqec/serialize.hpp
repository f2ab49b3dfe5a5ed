#pragma once

#include <string>

#include <json.hpp>

#include "pqec/codes.hpp"
#include "pqec/conditions.hpp"
#include "pqec/sim.hpp"

namespace pqec {

using Json = nlohmann::json;

// Matrix encoding: {"rows": n, "cols": m, "data": [[re, im], ...]} row-major.
Json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

// Channel encoding: {"in_dim": d, "out_dim": s, "kraus": [matrix, ...]}.
Json to_json(const Subchannel& c);
Subchannel subchannel_from_json(const Json& j);

// Scheme encoding: {"encoder": channel, "recovery": channel, "p": x, "residual": x}.
Json to_json(const Scheme& s);
Scheme scheme_from_json(const Json& j);

Json to_json(const ConditionDWitness& w);
ConditionDWitness witness_from_json(const Json& j);

Json to_json(const QubitCodeCircuit& c);
QubitCodeCircuit circuit_from_json(const Json& j);

Json to_json(const SimReport& r);

Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& j);

// Shortest representation that round-trips a double (used for CSV output).
std::string format_double(double x);

}  // namespace pqec
