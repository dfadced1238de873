#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "types.hpp"

// JSON encoding for every model type; complex numbers go as [re, im] pairs.
// ordered_json keeps emission order equal to declaration order so output is
// stable byte-for-byte.

namespace nlohmann {
template <>
struct adl_serializer<std::complex<double>> {
    template <class J>
    static void to_json(J& j, const std::complex<double>& z) {
        j = J::array({z.real(), z.imag()});
    }
    template <class J>
    static void from_json(const J& j, std::complex<double>& z) {
        if (!j.is_array() || j.size() != 2)
            throw sphfun::validation_error("complex value must be a [re, im] pair");
        z = {j.at(0).template get<double>(), j.at(1).template get<double>()};
    }
};
} // namespace nlohmann

namespace sphfun {

using json = nlohmann::ordered_json;

NLOHMANN_JSON_SERIALIZE_ENUM(Parity, {{Parity::even, "even"}, {Parity::odd, "odd"}})

inline void to_json(json& j, const SpectralParams& sp) {
    j = json{{"m", sp.m}, {"k", sp.k},     {"p", sp.p},
             {"a", sp.a}, {"tol", sp.tol}, {"N", sp.N}};
}

inline void from_json(const json& j, SpectralParams& sp) {
    j.at("m").get_to(sp.m);
    j.at("k").get_to(sp.k);
    j.at("p").get_to(sp.p);
    j.at("a").get_to(sp.a);
    j.at("tol").get_to(sp.tol);
    j.at("N").get_to(sp.N);
}

inline void to_json(json& j, const TrigSeriesRep& r) {
    j = json{{"params", r.params},
             {"lambda", r.lambda},
             {"right_coeffs", r.right_coeffs},
             {"left_coeffs", r.left_coeffs},
             {"scale", r.scale}};
}

inline void from_json(const json& j, TrigSeriesRep& r) {
    j.at("params").get_to(r.params);
    j.at("lambda").get_to(r.lambda);
    j.at("right_coeffs").get_to(r.right_coeffs);
    j.at("left_coeffs").get_to(r.left_coeffs);
    j.at("scale").get_to(r.scale);
}

inline void to_json(json& j, const PowerSeriesRep& r) {
    j = json{{"params", r.params},
             {"lambda", r.lambda},
             {"parity", r.parity},
             {"coeffs", r.coeffs}};
}

inline void from_json(const json& j, PowerSeriesRep& r) {
    j.at("params").get_to(r.params);
    j.at("lambda").get_to(r.lambda);
    j.at("parity").get_to(r.parity);
    j.at("coeffs").get_to(r.coeffs);
}

inline void to_json(json& j, const Diagnostics& d) {
    j = json{{"det_value", d.det_value},
             {"residual_max", d.residual_max},
             {"N_used", d.N_used},
             {"converged", d.converged}};
}

inline void from_json(const json& j, Diagnostics& d) {
    j.at("det_value").get_to(d.det_value);
    j.at("residual_max").get_to(d.residual_max);
    j.at("N_used").get_to(d.N_used);
    j.at("converged").get_to(d.converged);
}

inline void to_json(json& j, const EigenSolution& s) {
    json rep;
    if (std::holds_alternative<TrigSeriesRep>(s.rep)) {
        rep = std::get<TrigSeriesRep>(s.rep);
        rep["type"] = "trig";
    } else {
        rep = std::get<PowerSeriesRep>(s.rep);
        rep["type"] = "power";
    }
    // move the discriminator to the front for readability
    json rep2{{"type", rep.at("type")}};
    for (auto it = rep.begin(); it != rep.end(); ++it)
        if (it.key() != "type") rep2[it.key()] = it.value();
    j = json{{"lambda", s.lambda},
             {"node_count", s.node_count},
             {"rep", rep2},
             {"diagnostics", s.diagnostics}};
}

inline void from_json(const json& j, EigenSolution& s) {
    j.at("lambda").get_to(s.lambda);
    j.at("node_count").get_to(s.node_count);
    const json& rep = j.at("rep");
    const std::string type = rep.at("type").get<std::string>();
    if (type == "trig") {
        s.rep = rep.get<TrigSeriesRep>();
    } else if (type == "power") {
        s.rep = rep.get<PowerSeriesRep>();
    } else {
        throw validation_error("unknown representation type \"" + type + "\"");
    }
    j.at("diagnostics").get_to(s.diagnostics);
}

inline void to_json(json& j, const GridFunction& g) {
    j = json{{"xi", g.xi}, {"x", g.x}, {"dx", g.dx}};
}

inline void from_json(const json& j, GridFunction& g) {
    j.at("xi").get_to(g.xi);
    j.at("x").get_to(g.x);
    j.at("dx").get_to(g.dx);
}

inline void to_json(json& j, const RingConfig& rc) {
    j = json{{"m", rc.m},           {"U0", rc.U0},
             {"xi0", rc.xi0},       {"R", rc.R},
             {"lambda", rc.lambda}, {"E_range", json::array({rc.E_min, rc.E_max})},
             {"tol", rc.tol}};
}

inline void from_json(const json& j, RingConfig& rc) {
    j.at("m").get_to(rc.m);
    j.at("U0").get_to(rc.U0);
    j.at("xi0").get_to(rc.xi0);
    j.at("R").get_to(rc.R);
    j.at("lambda").get_to(rc.lambda);
    const json& er = j.at("E_range");
    if (!er.is_array() || er.size() != 2)
        throw validation_error("E_range must be a [min, max] pair");
    er.at(0).get_to(rc.E_min);
    er.at(1).get_to(rc.E_max);
    j.at("tol").get_to(rc.tol);
}

inline void to_json(json& j, const RingLevel& lv) {
    j = json{{"E", lv.E},
             {"s", lv.s},
             {"parity", lv.parity},
             {"mismatch", lv.mismatch},
             {"interior", lv.interior},
             {"exterior", lv.exterior}};
}

inline void from_json(const json& j, RingLevel& lv) {
    j.at("E").get_to(lv.E);
    j.at("s").get_to(lv.s);
    j.at("parity").get_to(lv.parity);
    j.at("mismatch").get_to(lv.mismatch);
    j.at("interior").get_to(lv.interior);
    j.at("exterior").get_to(lv.exterior);
}

} // namespace sphfun
