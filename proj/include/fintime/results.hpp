#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fintime/ftle.hpp"
#include "fintime/nonlinear.hpp"
#include "fintime/rates.hpp"
#include "fintime/spectral.hpp"

namespace fintime {

// Key order is meaningful in result documents; plain json would sort.
using Json = nlohmann::ordered_json;

inline constexpr const char* kResultSchema = "fintime-result/1";
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit digest, lowercase hex; keys result documents to the exact
// configuration bytes that produced them.
std::string fnv1a_hex(std::string_view bytes);

// Deterministic serialization: stable key order (insertion order), doubles
// rendered %.12e, non-finite values rendered null.  Identical documents
// produce identical bytes on every platform this builds on.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const TimeSet& ts);
Json to_json(const Subspace& s);
Json to_json(const RateResult& r);
Json to_json(const DirectionRates& r);
Json to_json(const SubspaceRates& r);
Json to_json(const ExtremalRates& R);
Json to_json(const SpectrumResult& S);
Json to_json(const ConeClassification& c);
Json to_json(const DomainClassification& d);
Json to_json(const AttractionReport& a);
Json to_json(const FiberReport& f);
Json to_json(const OracleReport& r);
Json to_json(const FtleField& f);  // metadata; cell values go to CSV

std::string cone_csv(const ConeClassification& c);
std::string domain_csv(const DomainClassification& d);
std::string ftle_csv(const FtleField& f);
std::string m_curve_csv(const std::vector<std::pair<double, double>>& curve);

// Minimal interval diagram: spectrum segments on a horizontal axis with a
// zero marker; data-only output otherwise.
std::string spectrum_svg(const SpectrumResult& S);

}  // namespace fintime
