#pragma once
// JSON encodings of the public data types. Doubles are written in their
// shortest round-trip form, so every phase is recovered exactly.

#include <json.hpp>

#include "sicgram/atlas.hpp"
#include "sicgram/calculus.hpp"
#include "sicgram/classify.hpp"
#include "sicgram/reconstruct.hpp"
#include "sicgram/refine.hpp"
#include "sicgram/weyl_heisenberg.hpp"

namespace sicgram {

using Json = nlohmann::json;

/// {"n": int, "phases": [...]}
Json encode(const PhaseVector& phases);
PhaseVector decode_phase_vector(const Json& j);

/// {"n": int, "re": [...], "im": [...]}
Json encode(const Fiducial& fiducial);
Fiducial decode_fiducial(const Json& j);

Json encode(const SolutionRecord& record);
/// Throws std::runtime_error for an unknown schema_version and
/// std::invalid_argument for malformed records.
SolutionRecord decode_solution_record(const Json& j);

Json encode(const BatchSummary& summary);
BatchSummary decode_batch_summary(const Json& j);

Json encode(const GeneratingSet& set);
Json encode(const ClassificationReport& report);
Json encode(const AutomorphismSummary& summary);
Json encode(const NullSpaceReport& report);
Json encode(const VectorSystem& system);
Json encode(const RefineResult& result);
Json encode(const VerifyReport& report);
Json encode(const AtlasReport& report);

}  // namespace sicgram
