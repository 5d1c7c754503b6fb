#pragma once

// JSON encodings shared by the CLI and the Python module. Rationals travel as
// "num/den" strings; matrices as arrays of integer rows (negative entries are
// reduced mod p on input). Objects keep insertion order so that identical
// runs serialize to identical bytes.

#include <string>

#include "json.hpp"
#include "popdiff/analysis.hpp"
#include "popdiff/counterexample.hpp"
#include "popdiff/threept.hpp"

namespace popdiff::io {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::string& path);

Json to_json(const Rational& r);
/// Accepts "num/den", decimal strings and JSON integers.
Rational rational_from_json(const Json& j);

Json to_json(const Vec& v);
Json to_json(const FpMatrix& m);
FpMatrix matrix_from_json(const Json& j, std::uint32_t p);
Vec vector_from_json(const Json& j, std::uint32_t p);

/// {"p":5,"k":2,"M1":[[1,0],[0,1]],"M2":[[0,-1],[1,0]]}; k may be omitted.
/// An integer in place of a matrix means that multiple of the identity.
PatternSpec pattern_spec_from_json(const Json& j);
Json to_json(const PatternSpec& spec);

/// {"p":5,"n":3,"linear":[[...]],"quadratic":[[[...]]],"skew":[[[...]]]}.
QuadraticFactor factor_from_json(const Json& j);
Json to_json(const QuadraticFactor& factor);

/// {"kind":"Z_N","N":101,"M1":2,"M2":3} or
/// {"kind":"vector","p":5,"k":2,"n":1,"M1":[[...]],"M2":[[...]]}.
FiniteGroupSpec group_spec_from_json(const Json& j);
FiniteGroup group_from_json(const Json& j);
Json to_json(const FiniteGroup& g);
Json to_json(const GroupMap& m);

Json to_json(const SubspaceBasis& s);
Json to_json(const PatternCountReport& r, bool with_beta = false);
Json to_json(const EquidistributionReport& r);
Json to_json(const StructuredAverage& r);

Json to_json(const BohrSet& b, bool with_elements = true);
Json to_json(const SmoothedCount& c);
/// Summary of the contracts; the three functions are included on request.
Json to_json(const RegularityDecomposition& d, bool with_functions = false);
Json to_json(const LiftReport& r);

Json to_json(const cex::CoreTable& t);
Json to_json(const cex::HypergraphExpectations& h);
Json to_json(const cex::MonteCarlo& m);
Json to_json(const cex::DressReport& r);
Json to_json(const cex::AssemblyReport& r);
Json to_json(const cex::CexReport& r);

}  // namespace popdiff::io
