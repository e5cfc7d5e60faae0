#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "walsh3/algorithms.hpp"
#include "walsh3/forms.hpp"
#include "walsh3/outer.hpp"

namespace walsh3 {

// Insertion-ordered, so dumps are reproducible byte for byte.
using Json = nlohmann::ordered_json;

// Reals print as JSON numbers; p = ∞ as the string "inf".
Json exponent_json(double p);
double exponent_from_json(const Json& j);

Json to_json(cplx z);
cplx cplx_from_json(const Json& j);
Json to_json(const Vec& v);
Vec vec_from_json(const Json& j, int dim);

// {kind: scalar|sequence|schatten, p, d}
Json to_json(const BanachSpace& X);
BanachSpace space_from_json(const Json& j);
// scalar | seq:P:D | schatten:P:D
BanachSpace parse_space(const std::string& text);

// {kind: duality|product|trace, spaces: [X0, X1, X2]}
Json to_json(const TrilinearForm& pi);
TrilinearForm form_from_json(const Json& j);
// product | duality | trace over one space; the duality form takes (X, X*, ℂ).
TrilinearForm parse_form(const std::string& kind, const BanachSpace& X);

// {radix, fineScale, supportScale, space, cells}; cells[k] lists [re, im] per cell for coordinate k.
Json to_json(const StepFunction& f);
StepFunction step_from_json(const Json& j);

Json to_json(const TriadicInterval& I);
TriadicInterval interval_from_json(const Json& j);
// {timeScale, timeOffset, freqScale, freqOffset}
Json to_json(const Tritile& P);
Tritile tritile_from_json(const Json& j);

// {truncation: {fine, ambient}, space, entries: [{tritile, values: [v0, v1, v2]}]} over the support.
Json to_json(const TileFunction& F);
// Accepts the object above, or a bare entries array together with the truncation and space.
TileFunction tile_function_from_json(const Json& j, std::optional<Truncation> plane = std::nullopt,
                                     std::optional<BanachSpace> space = std::nullopt);

// {value, value_lower, value_upper, grid, mode, exact, cover_certificate: [generator tops]}
Json quasinorm_report(const Quasinorm& q, const OuterStructure& E);
// {generations: [[interval…]…], kSets, ratios, norm, strictNorm, lhs, rhs}
Json sparse_certificate(const SparseDecomposition& D);

Json to_json(const ExponentRegion& R);
Json to_json(const EmbeddingTable& T);
Json to_json(const BoundTable& T);

// Rows as CSV with a header line.
std::string embedding_csv(const EmbeddingTable& T);
std::string bound_csv(const BoundTable& T);
std::string region_csv(const ExponentRegion& R);

// Canonical text form of a JSON value: two-space indent, trailing newline.
std::string dump(const Json& j);

} // namespace walsh3
