#pragma once
// JSON wire format for matrices, maps, cones, verdicts and certificates.
//   ComplexMatrix  {"rows", "cols", "re": [row-major], "im": [row-major]}  ("im" optional;
//                  "re" may also be an array of rows)
//   BlockElement   {"n", "m", "flat": ComplexMatrix}
//   MatrixMap      {"k", "m", "kind": "choi"|"kraus"|"holevo", "data": ...}
//                  or {"k", "m", "kind": "builtin", "name": "identity"|"transpose"|"depolarizing"|"dephasing"}
//   GeneratedCone  {"dim", "generators": [[...]], "unit"} or {"dim", "oracle": "builtin:<name>", "unit"}

#include <string>
#include <vector>

#include "json.hpp"
#include "omaxcones/arch.hpp"
#include "omaxcones/cones.hpp"
#include "omaxcones/duality.hpp"
#include "omaxcones/ebclass.hpp"
#include "omaxcones/matcore.hpp"
#include "omaxcones/norms.hpp"

namespace omaxcones::io {

using Json = nlohmann::ordered_json;

Json to_json(std::span<const cplx> v);
std::vector<cplx> vector_from_json(const Json& j);

Json to_json(const ComplexMatrix& a);
ComplexMatrix matrix_from_json(const Json& j);

Json to_json(const BlockElement& b);
BlockElement block_from_json(const Json& j);

Json to_json(const MatrixMap& phi);
MatrixMap map_from_json(const Json& j);

Json to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);

Json to_json(const ConeVerdict& v);
ConeVerdict verdict_from_json(const Json& j);

Json to_json(const EBVerdict& v);
EBVerdict eb_verdict_from_json(const Json& j);

Json to_json(const NormReport& r);
Json to_json(const CertificateCheck& c);
Json to_json(const DualityReport& r);
Json to_json(const FalsifyReport& r);
Json to_json(const CoEBReport& r);

Json to_json(const GeneratedCone& c);
GeneratedCone cone_from_json(const Json& j);
Json to_json(const ArchResult& r);

ConeStatus cone_status_from_string(const std::string& s);
EBStatus eb_status_from_string(const std::string& s);

/// Parses text; syntax errors become InvalidInput with line/column in the message.
Json parse(const std::string& text);
/// Compact or two-space indented; deterministic for equal values.
std::string dump(const Json& j, bool pretty = true);

}  // namespace omaxcones::io
