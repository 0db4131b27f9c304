#pragma once

// Command dispatch shared by the command-line tool, the golden store and the
// acceptance binary. Every command maps validated JSON parameters to a JSON payload.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "modpair/desing.hpp"
#include "modpair/grassmann.hpp"
#include "modpair/pairing.hpp"
#include "modpair/report.hpp"
#include "modpair/walls.hpp"
#include "modpair/witten.hpp"

namespace modpair {

struct RunConfig {
    std::string command;  // e.g. "pairing", "walls ray-test", "desing table"
    Json params = Json::object();
};

struct RunOutput {
    Json payload;
    std::optional<Table> table;  // set by tabular commands, for CSV output
};

namespace cli_detail {

template <class T>
T need(const Json& p, const char* key) {
    if (!p.contains(key)) throw DomainError(std::string("missing parameter: ") + key);
    try {
        return p.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw DomainError(std::string("parameter has the wrong type: ") + key);
    }
}

template <class T>
T get_or(const Json& p, const char* key, T fallback) {
    return p.contains(key) && !p.at(key).is_null() ? need<T>(p, key) : fallback;
}

inline std::string decimal(const Real& x, int digits = 30) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

inline EdgeSet parse_edges(const Json& s) {
    Json j = s.is_string() ? Json::parse(s.get<std::string>()) : s;
    if (!j.is_array()) throw DomainError("S must be a JSON list of pairs");
    EdgeSet out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw DomainError("each edge must be a pair of integers");
        out.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return out;
}

inline int vertex_count(const EdgeSet& s, const Json& p) {
    int M = 0;
    for (auto [i, j] : s) M = std::max({M, i, j});
    return get_or<int>(p, "M", M);
}

inline Json edges_json(const EdgeSet& s) {
    Json out = Json::array();
    for (auto [i, j] : s) out.push_back({i, j});
    return out;
}

inline Json point_json(const std::vector<Rational>& v) { return to_json_list(v); }

inline RunOutput pairing(const Json& p) {
    PairingSpec s;
    s.n = need<int>(p, "n");
    s.d = need<long>(p, "d");
    s.g = need<int>(p, "g");
    s.monomial = parse_monomial(get_or<std::string>(p, "mono", ""));
    s.covering_factor = get_or<bool>(p, "covering", false);
    if (p.contains("jacobian") && !p["jacobian"].is_null()) s.jacobian = need<bool>(p, "jacobian");
    std::string mode = get_or<std::string>(p, "mode", "coprime");
    RootData rd(s.n);
    if (p.contains("xi_prime") && !p["xi_prime"].is_null()) s.xi = default_xi(rd, need<long>(p, "xi_prime"));
    PairingResult r;
    if (mode == "coprime") {
        r = coprime_pairing(s);
    } else if (mode == "ih") {
        r = ih_pairing(s);
    } else if (mode == "perturbed") {
        r = perturbed_torus_pairing(s, s.xi ? *s.xi : default_xi(rd, 1009));
    } else if (mode == "periodicity") {
        r = periodicity_pairing(s);
    } else {
        throw DomainError("unknown pairing mode: " + mode);
    }
    Json out{{"mode", mode},
             {"n", s.n},
             {"d", s.d},
             {"g", s.g},
             {"mono", s.monomial.to_string()},
             {"value", to_json(r.value)},
             {"unit_marker", to_json(r.marker)},
             {"unit_marker_power", r.marker.i},
             {"degree_mismatch", r.degree_mismatch},
             {"note", r.note},
             {"xi_used", point_json(r.xi_used)}};
    return {out, std::nullopt};
}

inline RunOutput walls_ray_test(const Json& p) {
    EdgeSet s = parse_edges(p.at("S"));
    int M = vertex_count(s, p);
    check_edges(s, M);
    bool meets = ray_meets_wall(s, M);
    Json out{{"M", M}, {"meets", meets}, {"lp_meets", ray_meets_hull_lp(s, M)}};
    Json subs = Json::array();
    if (meets) {
        for (const auto& t : enumerate_minimal_subgraphs(s, M)) subs.push_back(edges_json(t));
    }
    out["minimal_subgraphs"] = subs.size();
    out["subgraphs"] = subs;
    return {out, std::nullopt};
}

inline WeightConfig config_from(const EdgeSet& s, const Json& p) {
    int M = vertex_count(s, p);
    std::vector<int> sizes = get_or<std::vector<int>>(p, "sizes", {M});
    std::vector<Rational> rho;
    if (p.contains("rho") && p.contains("rho_seed")) throw DomainError("give rho or rho_seed, not both");
    if (p.contains("rho")) {
        if (!p["rho"].is_array()) throw DomainError("rho must be a JSON list");
        for (const auto& x : p["rho"]) rho.push_back(rational_from_json(x));
    } else if (p.contains("rho_seed")) {
        rho = generic_rho(sizes.size(), need<unsigned>(p, "rho_seed"));
    } else {
        rho.assign(sizes.size(), Rational(1));
    }
    return WeightConfig(sizes, rho);
}

inline RunOutput walls_closest(const Json& p) {
    EdgeSet s = parse_edges(p.at("S"));
    WeightConfig cfg = config_from(s, p);
    WallInstance w = closest_point_beta(s, cfg);
    Json cells = Json::array();
    for (const auto& c : w.partition)
        cells.push_back({{"h", c.h}, {"m", c.m}, {"members", c.members}, {"r", to_json(c.r)}});
    Json rho = Json::array();
    for (const auto& x : cfg.rho) rho.push_back(to_json(x));
    Json out{{"edges", edges_json(w.edges)},
             {"sizes", cfg.block_sizes},
             {"rho", rho},
             {"rho_seed", p.contains("rho_seed") ? p["rho_seed"] : Json(nullptr)},
             {"beta", point_json(w.beta)},
             {"zero", w.zero},
             {"epsilon", point_json(w.epsilon)},
             {"partition", cells},
             {"partition_consistent", w.partition_consistent}};
    return {out, std::nullopt};
}

inline RunOutput witten_compare(const Json& p) {
    int g = need<int>(p, "g");
    Json out = Json::object();
    Table t{{"g", "k", "zeta_route", "residue_route", "equal"}, {}};
    for (const auto& row : polynomial_part_compare(g)) {
        out["k" + std::to_string(row.k)] = Json{{"equal", row.equal},
                                                {"zeta_route", to_json(row.zeta_route)},
                                                {"residue_route", to_json(row.residue_route)},
                                                {"transported_zeta_route", to_json(row.transported)}};
        std::ostringstream z, r;
        z << row.zeta_route;
        r << row.residue_route;
        t.rows.push_back({std::to_string(g), std::to_string(row.k), z.str(), r.str(), row.equal ? "true" : "false"});
    }
    return {out, t};
}

inline RunOutput witten_zeta(const Json& p) {
    int m = need<int>(p, "m");
    MarkedRational z = zeta_via_residue(m);
    Bounded direct = partial_zeta(2 * m, get_or<long>(p, "terms", 1000));
    Real value = numeric_value(z);
    Json out{{"m", m},
             {"value", to_json(z.value)},
             {"unit_marker", to_json(z.marker)},
             {"numeric", decimal(value)},
             {"partial_sum", decimal(direct.value)},
             {"partial_sum_error", decimal(direct.error, 5)},
             {"abs_difference", decimal(abs(value - direct.value), 5)}};
    return {out, std::nullopt};
}

inline RunOutput witten_z(const Json& p) {
    int g = need<int>(p, "g");
    Rational eps = rational_from_json(p.at("eps"));
    if (eps <= 0) throw DomainError("eps must be positive");
    long terms = get_or<long>(p, "terms", z_terms_for(eps, 40));
    Bounded z = z_eval(g, eps, terms);
    Real model = witten_expansion(g).evaluate(eps);
    Json out{{"g", g},
             {"eps", to_json(eps)},
             {"terms", terms},
             {"value", decimal(z.value)},
             {"error_bound", decimal(z.error, 5)},
             {"expansion", decimal(model)},
             {"remainder", decimal(z.value - model, 5)}};
    return {out, std::nullopt};
}

inline RunOutput witten_half_power(const Json& p) {
    int g = need<int>(p, "g");
    Json out{{"g", g},
             {"c1", to_json(witten_c1(g))},
             {"c2", to_json(witten_c2(g))},
             {"coefficient", to_json(half_power_coefficient(g))}};
    return {out, std::nullopt};
}

inline RunOutput desing_table_cmd(const Json& p) {
    int g = need<int>(p, "g");
    Table t{{"g", "m", "n", "main", "first_blowup", "second_blowup", "total", "second_blowup_direct", "total_direct"}, {}};
    for (const auto& r : desing_table(g))
        t.rows.push_back({std::to_string(g), std::to_string(r.m), std::to_string(r.n), to_string(r.main),
                          to_string(r.first), to_string(r.second), to_string(r.total), to_string(r.second_direct),
                          to_string(r.total_direct)});
    return {Json{{"g", g}, {"rows", t.json()}}, t};
}

inline RunOutput desing_value(const Json& p) {
    int g = need<int>(p, "g"), m = need<int>(p, "m"), n = need<int>(p, "n");
    DesingRow r = desing_row(g, m, n);
    Json out{{"g", g},
             {"m", m},
             {"n", n},
             {"main", to_json(r.main)},
             {"first_blowup", to_json(r.first)},
             {"second_blowup", to_json(r.second)},
             {"total", to_json(r.total)},
             {"second_blowup_direct", to_json(r.second_direct)},
             {"total_direct", to_json(r.total_direct)}};
    return {out, std::nullopt};
}

}  // namespace cli_detail

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"pairing",      "walls ray-test",    "walls closest",
                                                   "witten compare", "witten zeta",     "witten z",
                                                   "witten half-power", "desing table", "desing value"};
    return names;
}

// Throws DomainError for unknown commands and invalid parameters.
inline RunOutput run_command(const RunConfig& c) {
    using namespace cli_detail;
    if (c.command == "pairing") return pairing(c.params);
    if (c.command == "walls ray-test") return walls_ray_test(c.params);
    if (c.command == "walls closest") return walls_closest(c.params);
    if (c.command == "witten compare") return witten_compare(c.params);
    if (c.command == "witten zeta") return witten_zeta(c.params);
    if (c.command == "witten z") return witten_z(c.params);
    if (c.command == "witten half-power") return witten_half_power(c.params);
    if (c.command == "desing table") return desing_table_cmd(c.params);
    if (c.command == "desing value") return desing_value(c.params);
    throw DomainError("unknown command: " + c.command);
}

inline Json calibration_constants() {
    return Json{{"pair_orientation", kPairOrientation}, {"zeta_sign", kZetaResidueSign}};
}

// The regression set kept under the golden root.
struct GoldenCase {
    std::string name;
    RunConfig config;
    std::string source;
};

inline std::vector<GoldenCase> golden_cases() {
    return {
        {"pairing_ih_g2_a2_f2cubed", {"pairing", {{"mode", "ih"}, {"n", 2}, {"d", 0}, {"g", 2}, {"mono", "a2^1,f2^3"}}}, "oracle"},
        {"pairing_ih_g2_a2sq_f2", {"pairing", {{"mode", "ih"}, {"n", 2}, {"d", 0}, {"g", 2}, {"mono", "a2^2,f2^1"}}}, "oracle"},
        {"pairing_coprime_g2_volume", {"pairing", {{"mode", "coprime"}, {"n", 2}, {"d", 1}, {"g", 2}, {"mono", "f2^3"}}}, "oracle"},
        {"pairing_coprime_g3_a2_f2", {"pairing", {{"mode", "coprime"}, {"n", 2}, {"d", 1}, {"g", 3}, {"mono", "a2^1,f2^4"}}}, "oracle"},
        {"walls_ray_test_four_vertices", {"walls ray-test", {{"S", Json::parse("[[1,4],[2,4],[3,1],[3,2]]")}}}, "oracle"},
        {"walls_closest_four_vertices", {"walls closest", {{"S", Json::parse("[[1,4],[2,4],[3,1],[3,2]]")}}}, "oracle"},
        {"witten_compare_g2", {"witten compare", {{"g", 2}}}, "oracle"},
        {"witten_compare_g4", {"witten compare", {{"g", 4}}}, "oracle"},
        {"witten_half_power_g3", {"witten half-power", {{"g", 3}}}, "identity"},
        {"desing_table_g2", {"desing table", {{"g", 2}}}, "oracle"},
        {"desing_table_g3", {"desing table", {{"g", 3}}}, "oracle"},
        {"desing_first_blowup_g3", {"desing value", {{"g", 3}, {"m", 3}, {"n", 3}}}, "closed_form"},
    };
}

inline GoldenRecord golden_record(const GoldenCase& c) {
    return {c.name, c.config.command, c.config.params, run_command(c.config).payload, c.source, calibration_constants()};
}

}  // namespace modpair
