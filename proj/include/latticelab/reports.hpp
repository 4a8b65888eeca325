#pragma once

#include "latticelab/constants.hpp"
#include "latticelab/convexgeom.hpp"
#include "latticelab/embedcert.hpp"
#include "latticelab/idealnorms.hpp"
#include "latticelab/io.hpp"
#include "latticelab/lorentz.hpp"

namespace llab {

// Field names follow the report structs.
Json to_json(const RearrangedStep& r);
Json to_json(const SandwichReport& r);
Json to_json(const EmbeddingLemmaReport& r);
Json to_json(const QConvexReport& r);
Json to_json(const LpinftyReport& r);
Json to_json(const DualityGapReport& r);
Json to_json(const PolarityReport& r);
Json to_json(const FactorizationReport& r);
Json to_json(const InterpolationReport& r);
Json to_json(const EmbeddingCertificate& c);
Json to_json(const T41Result& r);
Json to_json(const Example54Report& r);
Json to_json(const ThetaResult& r);
Json to_json(const EtaFactorization& r);
Json to_json(const MultiplierReport& r);
Json to_json(const StepFunction& f);

TensorRep rep_from_json(const Json& j);
Json rep_to_json(const TensorRep& rep);

}  // namespace llab
