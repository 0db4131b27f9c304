#pragma once

// JSON/CSV emission and the write-once golden store.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "modpair/errors.hpp"
#include "modpair/rational.hpp"

namespace modpair {

using Json = nlohmann::ordered_json;

// Rationals travel as "p/q" strings, never as floats.
inline Json to_json(const Rational& q) { return to_string(q); }
inline Rational rational_from_json(const Json& j) {
    if (j.is_number_integer()) return rat(j.get<long>());
    if (!j.is_string()) throw DomainError("expected a rational as a \"p/q\" string");
    return parse_rational(j.get<std::string>());
}

inline Json to_json(const UnitMarker& m) { return Json{{"i", m.i}, {"pi", m.pi}, {"sqrt_pi", m.sqrt_pi}}; }
inline Json to_json(const MarkedRational& x) { return Json{{"value", to_json(x.value)}, {"unit_marker", to_json(x.marker)}}; }

template <class T>
Json to_json_list(const std::vector<T>& xs) {
    Json out = Json::array();
    for (const auto& x : xs) out.push_back(to_json(x));
    return out;
}

// A table with a fixed column order. Cells are strings already.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string csv() const {
        std::ostringstream os;
        for (size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
        os << "\n";
        for (const auto& r : rows) {
            for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << "\n";
        }
        return os.str();
    }
    Json json() const {
        Json out = Json::array();
        for (const auto& r : rows) {
            Json row = Json::object();
            for (size_t i = 0; i < columns.size(); ++i) row[columns[i]] = r[i];
            out.push_back(row);
        }
        return out;
    }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
    if (!text.empty() && text.back() != '\n') f << "\n";
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for reading");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// ---- golden store -----------------------------------------------------------

inline constexpr const char* kEngineVersion = "modpair 1.0";

struct GoldenRecord {
    std::string name;
    std::string command;
    Json params;
    Json result;
    // "closed_form": checked against a printed value; "oracle": frozen from an
    // independent computation; "identity": follows from a defining identity.
    std::string source;
    Json calibration;

    Json json() const {
        return Json{{"name", name},           {"command", command},         {"params", params},
                    {"digest", digest()},     {"result", result},           {"source", source},
                    {"engine", kEngineVersion}, {"calibration", calibration}};
    }
    // Canonical parameters: keys that only steer truncation or output form do
    // not change the mathematical result and are left out.
    std::string digest() const {
        Json canonical = params;
        for (const char* key : kNonSemanticKeys) canonical.erase(key);
        return command + " " + canonical.dump();
    }
    static constexpr const char* kNonSemanticKeys[] = {"terms", "format"};
    static GoldenRecord from_json(const Json& j) {
        return {j.at("name"), j.at("command"), j.at("params"), j.at("result"), j.at("source"), j.at("calibration")};
    }
};

enum class GoldenMode { write, verify };

struct GoldenStatus {
    bool ok = true;
    std::string message;
};

// Root from MODPAIR_GOLDEN_ROOT, else the given fallback.
inline std::filesystem::path golden_root(const std::filesystem::path& fallback) {
    const char* env = std::getenv("MODPAIR_GOLDEN_ROOT");
    return env && *env ? std::filesystem::path(env) : fallback;
}

inline std::filesystem::path golden_path(const std::filesystem::path& root, const std::string& name) {
    return root / (name + ".json");
}

// write: creates missing records; an existing record must match exactly.
// verify: every record must exist and match exactly.
inline GoldenStatus golden_store(const GoldenRecord& rec, GoldenMode mode, const std::filesystem::path& root) {
    auto path = golden_path(root, rec.name);
    if (!std::filesystem::exists(path)) {
        if (mode == GoldenMode::verify) return {false, rec.name + ": no golden record at " + path.string()};
        std::filesystem::create_directories(root);
        write_text(path, rec.json().dump(2) + "\n");
        return {true, rec.name + ": written"};
    }
    GoldenRecord stored = GoldenRecord::from_json(Json::parse(read_text(path)));
    if (stored.calibration != rec.calibration)
        return {false, rec.name + ": calibration differs: stored " + stored.calibration.dump() + ", current " +
                           rec.calibration.dump()};
    if (stored.digest() != rec.digest())
        return {false, rec.name + ": parameters differ: stored " + stored.digest() + ", current " + rec.digest()};
    if (stored.result != rec.result)
        return {false, rec.name + ": result differs: stored " + stored.result.dump() + ", current " + rec.result.dump()};
    return {true, rec.name + ": " + (mode == GoldenMode::write ? "unchanged" : "ok")};
}

}  // namespace modpair
