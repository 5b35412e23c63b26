#pragma once

#include <memory>
#include <string>

#include "json.hpp"
#include "qvl/competitor.hpp"
#include "qvl/qfield.hpp"

namespace qvl {

using Json = nlohmann::ordered_json;

/// Flat array of Q arrays of n numbers, canonical sheet order.
Json qpoint_to_json(const QPoint& p);
QPoint qpoint_from_json(const Json& j);

Json grid_to_json(const GridDomain& g);
std::shared_ptr<const GridDomain> grid_from_json(const Json& j);

/// Field file layout: {"header": {m, kind, ..., Q, n}, "meta": {...},
/// "values": [...]} with node values in row-major index order.
Json qfield_to_json(const QField& f, const Json& meta = Json::object());
QField qfield_from_json(const Json& j);

void save_qfield(const QField& f, const std::string& path, const Json& meta = Json::object());
QField load_qfield(const std::string& path);

/// Per-node jet norm table: index, coordinates, triple-bar norm.
std::string jet_norm_csv(const QField& f);

Json gap_certificate_to_json(const GapCertificate& cert);
Json interpolation_report_to_json(const InterpolationReport& rep);

}  // namespace qvl
