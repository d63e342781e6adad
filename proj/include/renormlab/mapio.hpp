#pragma once

#include <string>

#include "json.hpp"
#include "renormlab/map.hpp"

namespace renormlab {

using json = nlohmann::json;

// Reals are written as decimal strings with 17 significant digits.
std::string format_real(double x);
double parse_real(const json& j);

json node_to_json(const MapPtr& f);
MapPtr node_from_json(const json& j);

json circle_map_to_json(const CircleMap& f);
CircleMap circle_map_from_json(const json& j);

void save_map_file(const std::string& path, const CircleMap& f);
CircleMap load_map_file(const std::string& path);

}  // namespace renormlab
