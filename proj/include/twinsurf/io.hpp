#pragma once

// CSV serialization of fields on masked grids, JSON residual reports, Weierstrass CSV.

#include "twinsurf/conformal.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace twinsurf::io {

/// Header `x,y,v` for one field, `x,y,v1,...,vn` otherwise, unless names are given.
/// One row per masked node in row-major order, 17 significant digits.
std::string to_csv(const std::vector<ScalarField>& fields, std::vector<std::string> names = {});
void write_csv(const std::string& path, const std::vector<ScalarField>& fields, std::vector<std::string> names = {});

struct CsvTable {
    std::vector<std::string> columns;
    GridHandle grid;
    std::vector<ScalarField> fields;
};

/// Reconstructs the grid from the point set: spacing is the smallest gap between distinct
/// coordinates, the box is the bounding box, and the mask holds the listed points. The
/// anchor is the listed node nearest to (anchor_x, anchor_y), or to the box centre.
CsvTable parse_csv(std::istream& in, std::optional<std::pair<double, double>> anchor = std::nullopt);
CsvTable read_csv(const std::string& path, std::optional<std::pair<double, double>> anchor = std::nullopt);

nlohmann::json to_json(const ResidualReport& r);
ResidualReport report_from_json(const nlohmann::json& j);

/// `xi1,xi2,re_phi1,im_phi1,...` over the masked xi-nodes.
std::string weierstrass_csv(const WeierstrassData& w);

} // namespace twinsurf::io
