#pragma once

// JSON conversion for the domain types and a writer that prints every float
// with 17 significant digits, so reports are byte-reproducible.

#include "nctheta/holomorphy.hpp"
#include "nctheta/manin_verify.hpp"

#include <json.hpp>

#include <string>

namespace nctheta {

using Json = nlohmann::json;

/// Serializes with sorted keys; floats use %.17g, non-finite values become null.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(cplx z);
Json to_json(const CMatrix& m);
Json to_json(const RMatrix& m);
Json to_json(const Index& k);

cplx complex_from_json(const Json& j);
CMatrix cmatrix_from_json(const Json& j);
RMatrix rmatrix_from_json(const Json& j);

/// {"radius": R, "coeffs": [{"k": [...], "re": x, "im": y}, ...]}, keys in lexicographic order.
Json to_json(const QuantumElement& x);
QuantumElement quantum_element_from_json(const EmbeddingMap& emb, const Json& j);

/// Either {"p","q","theta","Q","Delta"} (canonical) or {"p","q","phi"}.
EmbeddingMap embedding_from_json(const Json& j);
Json to_json(const EmbeddingMap& emb);

/// {"kind": "full"|"partial", "T1": [[...]], "T2": [[...]]}.
ComplexStructure complex_structure_from_json(const Json& j);

Json to_json(const HolomorphyResult& r);
Json to_json(const NonexistenceSearchReport& r);
Json to_json(const ThetaVectorResult& r);
Json to_json(const FunctionalEquationReport& r);
Json to_json(const CocycleReport& r);
Json to_json(const AdditivityReport& r);

}  // namespace nctheta
