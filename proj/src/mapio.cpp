#include "renormlab/mapio.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace renormlab {

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_real(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("malformed real: " + s);
        return v;
    }
    if (j.is_number()) return j.get<double>();
    throw std::invalid_argument("expected a real number");
}

json node_to_json(const MapPtr& f) {
    json j;
    j["kind"] = kind_name(f->kind());
    switch (f->kind()) {
        case Kind::affine: {
            auto& n = static_cast<const AffineNode&>(*f);
            j["a"] = format_real(n.a);
            j["b"] = format_real(n.b);
            break;
        }
        case Kind::moebius: {
            auto& n = static_cast<const MoebiusNode&>(*f);
            j["a"] = format_real(n.a);
            j["b"] = format_real(n.b);
            j["c"] = format_real(n.c);
            j["d"] = format_real(n.d);
            break;
        }
        case Kind::power_law: {
            auto& n = static_cast<const PowerLawNode&>(*f);
            j["p"] = format_real(n.p);
            j["c"] = format_real(n.c);
            j["a"] = format_real(n.a);
            break;
        }
        case Kind::sine_family: {
            auto& n = static_cast<const SineFamilyNode&>(*f);
            j["omega"] = format_real(n.omega);
            j["K"] = format_real(n.K);
            break;
        }
        case Kind::bump: {
            auto& n = static_cast<const BumpNode&>(*f);
            j["center"] = format_real(n.center);
            j["radius"] = format_real(n.radius);
            j["amplitude"] = format_real(n.amplitude);
            break;
        }
        case Kind::inverse_of: {
            auto& n = static_cast<const InverseNode&>(*f);
            j["of"] = node_to_json(n.inner);
            if (n.has_bracket()) {
                j["lo"] = format_real(n.lo);
                j["hi"] = format_real(n.hi);
            }
            break;
        }
        case Kind::composition: {
            auto& n = static_cast<const CompositionNode&>(*f);
            j["parts"] = json::array();
            for (auto& p : n.parts) j["parts"].push_back(node_to_json(p));
            break;
        }
        case Kind::iterate: {
            auto& n = static_cast<const IterateNode&>(*f);
            j["of"] = node_to_json(n.inner);
            j["count"] = n.count;
            if (n.translate != 0) j["translate"] = n.translate;
            if (n.reduce) j["reduce"] = true;
            break;
        }
        case Kind::windowed: {
            auto& n = static_cast<const WindowedNode&>(*f);
            j["of"] = node_to_json(n.inner);
            j["left"] = format_real(n.left);
            j["right"] = format_real(n.right);
            break;
        }
    }
    return j;
}

MapPtr node_from_json(const json& j) {
    Kind k = kind_from_name(j.at("kind").get<std::string>());
    auto r = [&](const char* key) { return parse_real(j.at(key)); };
    switch (k) {
        case Kind::affine: return affine(r("a"), r("b"));
        case Kind::moebius: return moebius(r("a"), r("b"), r("c"), r("d"));
        case Kind::power_law:
            return power_law(r("p"), j.contains("c") ? r("c") : 0.0, j.contains("a") ? r("a") : 0.0);
        case Kind::sine_family: return sine_family(r("omega"), j.contains("K") ? r("K") : 1.0);
        case Kind::bump: return bump(r("center"), r("radius"), r("amplitude"));
        case Kind::inverse_of:
            if (j.contains("lo")) return inverse_of(node_from_json(j.at("of")), r("lo"), r("hi"));
            return inverse_of(node_from_json(j.at("of")));
        case Kind::composition: {
            std::vector<MapPtr> parts;
            for (auto& p : j.at("parts")) parts.push_back(node_from_json(p));
            return compose(std::move(parts));
        }
        case Kind::iterate:
            return std::make_shared<IterateNode>(node_from_json(j.at("of")), j.at("count").get<std::int64_t>(),
                                                 j.value("translate", std::int64_t{0}), j.value("reduce", false));
        case Kind::windowed: return windowed(node_from_json(j.at("of")), r("left"), r("right"));
    }
    throw std::invalid_argument("unreachable map kind");
}

json circle_map_to_json(const CircleMap& f) {
    json j;
    j["schema"] = "mapnode/1";
    j["critical"] = format_real(f.critical);
    j["has_critical_point"] = f.has_critical_point;
    j["map"] = node_to_json(f.lift);
    return j;
}

CircleMap circle_map_from_json(const json& j) {
    if (j.value("schema", std::string()) != "mapnode/1") throw std::invalid_argument("map file: expected schema mapnode/1");
    CircleMap f;
    f.lift = node_from_json(j.at("map"));
    f.critical = j.contains("critical") ? parse_real(j.at("critical")) : 0.0;
    f.has_critical_point = j.value("has_critical_point", true);
    return f;
}

void save_map_file(const std::string& path, const CircleMap& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << circle_map_to_json(f).dump(2) << "\n";
}

CircleMap load_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return circle_map_from_json(json::parse(in));
}

}  // namespace renormlab
