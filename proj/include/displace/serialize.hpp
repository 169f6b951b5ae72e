#pragma once

#include "displace/calculus.hpp"
#include "displace/displacement.hpp"
#include "displace/gauge.hpp"
#include "displace/solver.hpp"

#include <json.hpp>

#include <string>

namespace displace {

using Json = nlohmann::ordered_json;

/// Compact JSON with every float printed to 17 significant digits; non-finite
/// numbers become null. Field order is insertion order.
std::string dump(const Json& j);

/// {"domain":[a,b],"density":"<expr in t>"|null,"jumps":[[tau,size],...],"flats":[[l,r],...]}
Gauge gauge_from_json(const Json& j);
/// Throws UnsupportedVariant when the density has no expression text.
Json gauge_to_json(const Gauge& g);

/**
 * {"domain":[a,b],"kind":"smooth|stieltjes|graph|angular","delta":"<expr>",
 *  "d2":"<expr>"|null,"gauge":{...},"weights":[[...]]}
 *
 * Only the fields of the given kind are read. Throws InvalidArgument on
 * structural problems and ParseError on bad expressions.
 */
DisplacementSpec spec_from_json(const Json& j);
Json spec_to_json(const DisplacementSpec& spec);

/// Reads and parses a file; I/O and JSON syntax problems raise InvalidArgument.
Json read_json_file(const std::string& path);

Json to_json(const AxiomReport& r);
Json to_json(const GammaEstimate& g);
Json to_json(const Ball& b);
Json to_json(const DerivativeResult& d);
Json to_json(const FtcReport& r);
Json to_json(const ResidualReport& r);
Json to_json(const IvpSolution& s);

/// "t,u" rows; a jump point appears twice, first with the pre-jump value.
std::string to_csv(const IvpSolution& s);

/// printf("%.17g").
std::string format_number(double v);

} // namespace displace
