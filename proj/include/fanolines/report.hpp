#pragma once

// JSON report envelopes: every document carries schema: "fanolines/1" and a
// kind; keys are emitted in a fixed canonical order so equal reports are
// byte-equal.  Unbounded integers travel as decimal strings, word-sized ones
// as JSON numbers.  validate_report rejects unknown keys by name, missing
// schema versions, and kind mismatches; canonical_render re-emits a validated
// document in canonical key order.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "linespace.hpp"
#include "numerology.hpp"
#include "version.hpp"
#include "witness.hpp"

namespace fanolines {

using Json = nlohmann::ordered_json;

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

struct SchemaError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// --- report builders ----------------------------------------------------------

inline Json envelope(const char* kind) {
    Json j = Json::object();
    j["schema"] = kSchemaVersion;
    j["kind"] = kind;
    return j;
}

inline Json classify_report(const CIProfile& prof) {
    HypothesisReport rep = hypothesis_check(prof);
    Json j = envelope("classify");
    j["n"] = prof.n;
    j["degrees"] = prof.degrees;
    j["p"] = prof.p;
    j["fano_index"] = rep.index;
    Json flags = Json::object();
    flags["index_ge_2"] = rep.index_ge_2;
    flags["p_gt_max_degree"] = rep.p_gt_max_degree;
    flags["max_degree_ge_p"] = rep.max_degree_ge_p;
    flags["tuple_special"] = rep.tuple_special;
    j["flags"] = flags;
    j["conclusion"] = to_string(rep.conclusion);
    return j;
}

inline Json degrees_report(uint64_t d) {
    Json j = envelope("degrees");
    j["d"] = d;
    j["catalan"] = catalan_number(d).str();
    j["conic_degree"] = conic_degree(d).str();
    j["bad_primes"] = bad_primes_index_one(d);
    j["torsion_order_bound"] = pointed_line_degree({d}).str();
    return j;
}

inline Json vanishing_json(const VanishingReport& rep) {
    Json j = Json::object();
    j["computed_zero_set"] = rep.computed_zero_set;
    if (rep.predicted_zero_set) j["predicted_zero_set"] = *rep.predicted_zero_set;
    if (rep.agree) j["agree"] = *rep.agree;
    if (rep.verdict) j["verdict"] = *rep.verdict;
    return j;
}

inline Json smoothness_json(const SmoothnessVerdict& v) {
    Json j = Json::object();
    j["status"] = to_string(v.status);
    j["scanned_extension_degrees"] = v.scanned_extension_degrees;
    if (v.certificate) j["certificate"] = *v.certificate;
    if (v.witness_point) j["witness_point"] = *v.witness_point;
    if (v.witness_field) j["witness_field"] = *v.witness_field;
    return j;
}

inline Json witness_report(Family family, uint32_t n, uint32_t d, FieldPtr F,
                           uint32_t scan_kmax, unsigned threads) {
    uint32_t p = F->characteristic();
    MPoly g = family == Family::Fermat ? fermat_polynomial(n, d, F)
                                       : cyclic_witness(n, d, F);
    std::string branch =
        family == Family::Fermat
            ? "fermat"
            : (cyclic_needs_tilde(n, p) ? "cyclic-tilde" : "cyclic-plain");

    Json j = envelope("witness");
    j["family"] = to_string(family);
    j["family_branch"] = branch;
    j["n"] = n;
    j["d"] = d;
    j["field"] = F->designation();
    j["polynomial"] = g.render();

    Json spec = Json::object();
    PAdic val = p_adic_valuation(d, p);
    spec["d_valuation"] = Json::array({val.valuation, val.unit});
    spec["d_speciality"] = to_string(classify_speciality(d, p));
    spec["d_plus_1_speciality"] = to_string(classify_speciality(d + 1, p));
    j["speciality"] = spec;

    j["smoothness"] = smoothness_json(jacobian_singular_scan({g}, n, F, scan_kmax, threads));
    j["vanishing"] = vanishing_json(analyze_vanishing(g, family));
    return j;
}

inline Json freeness_json(const FreenessReport& rep,
                          const std::vector<MPoly>& polys,
                          const std::optional<std::map<std::vector<uint32_t>, uint64_t>>&
                              census) {
    Json j = envelope("lines");
    j["n"] = rep.n;
    j["degrees"] = rep.degrees;
    Json polys_j = Json::array();
    for (const auto& g : polys) polys_j.push_back(g.render());
    j["polynomials"] = polys_j;
    Json fields = Json::array();
    for (const auto& pf : rep.fields) {
        Json f = Json::object();
        f["field"] = pf.field;
        f["lines_in_space"] = pf.lines_in_space;
        f["lines_on_variety"] = pf.lines_on_variety;
        f["free_lines"] = pf.free_lines;
        Json hist = Json::object();
        for (const auto& [type, count] : pf.splitting_histogram) hist[type] = count;
        f["splitting_histogram"] = hist;
        fields.push_back(f);
    }
    j["fields"] = fields;
    if (census) {
        // String keys sorted lexicographically so canonicalization is the
        // identity on generated documents.
        std::map<std::string, uint64_t> by_key;
        for (const auto& [pt, count] : *census) {
            std::string key;
            for (size_t i = 0; i < pt.size(); ++i) {
                if (i) key += ":";
                key += std::to_string(pt[i]);
            }
            by_key[key] = count;
        }
        Json cj = Json::object();
        for (const auto& [key, count] : by_key) cj[key] = count;
        j["point_census"] = cj;
    }
    return j;
}

inline Json error_report(const std::string& code, const std::string& message) {
    Json j = envelope("error");
    j["code"] = code;
    j["message"] = message;
    return j;
}

// --- validation ----------------------------------------------------------------

namespace detail {

struct KeySpec {
    std::set<std::string> required;
    std::set<std::string> optional;
};

inline void check_keys(const Json& j, const KeySpec& spec, const std::string& where) {
    if (!j.is_object()) throw SchemaError(where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!spec.required.count(key) && !spec.optional.count(key))
            throw SchemaError("unknown key \"" + key + "\" in " + where);
    }
    for (const auto& key : spec.required)
        if (!j.contains(key)) throw SchemaError("missing key \"" + key + "\" in " + where);
}

}  // namespace detail

// Validates the envelope and the per-kind key sets; throws SchemaError with
// the offending key by name.  Returns the report kind.
inline std::string validate_report(const Json& j) {
    if (!j.is_object()) throw SchemaError("report must be a JSON object");
    if (!j.contains("schema")) throw SchemaError("missing schema version");
    if (!j["schema"].is_string() || j["schema"].get<std::string>() != kSchemaVersion)
        throw SchemaError("unsupported schema version");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw SchemaError("missing report kind");
    std::string kind = j["kind"].get<std::string>();

    using detail::KeySpec, detail::check_keys;
    if (kind == "classify") {
        check_keys(j, KeySpec{{"schema", "kind", "n", "degrees", "p", "fano_index",
                               "flags", "conclusion"},
                              {}},
                   "classify report");
        check_keys(j["flags"],
                   KeySpec{{"index_ge_2", "p_gt_max_degree", "max_degree_ge_p",
                            "tuple_special"},
                           {}},
                   "flags");
    } else if (kind == "degrees") {
        check_keys(j, KeySpec{{"schema", "kind", "d", "catalan", "conic_degree",
                               "bad_primes", "torsion_order_bound"},
                              {}},
                   "degrees report");
    } else if (kind == "witness") {
        check_keys(j, KeySpec{{"schema", "kind", "family", "family_branch", "n", "d",
                               "field", "polynomial", "speciality", "smoothness",
                               "vanishing"},
                              {}},
                   "witness report");
        check_keys(j["speciality"],
                   KeySpec{{"d_valuation", "d_speciality", "d_plus_1_speciality"}, {}},
                   "speciality");
        check_keys(j["smoothness"],
                   KeySpec{{"status", "scanned_extension_degrees"},
                           {"certificate", "witness_point", "witness_field"}},
                   "smoothness");
        check_keys(j["vanishing"],
                   KeySpec{{"computed_zero_set"},
                           {"predicted_zero_set", "agree", "verdict"}},
                   "vanishing");
    } else if (kind == "lines") {
        check_keys(j, KeySpec{{"schema", "kind", "n", "degrees", "polynomials", "fields"},
                              {"point_census"}},
                   "lines report");
        if (!j["fields"].is_array()) throw SchemaError("fields must be an array");
        for (const auto& f : j["fields"])
            check_keys(f,
                       KeySpec{{"field", "lines_in_space", "lines_on_variety",
                                "free_lines", "splitting_histogram"},
                               {}},
                       "lines field entry");
    } else if (kind == "manifest") {
        check_keys(j, KeySpec{{"schema", "kind", "artifact_version", "command", "argv",
                               "threads", "outputs"},
                              {"seed"}},
                   "manifest");
        if (!j["outputs"].is_array()) throw SchemaError("outputs must be an array");
        for (const auto& o : j["outputs"])
            check_keys(o, KeySpec{{"path", "sha256", "bytes"}, {}}, "manifest output");
    } else if (kind == "error") {
        check_keys(j, KeySpec{{"schema", "kind", "code", "message"}, {}}, "error report");
    } else if (kind == "replay") {
        check_keys(j, KeySpec{{"schema", "kind", "manifest", "ok", "outputs"}, {}},
                   "replay report");
        if (!j["outputs"].is_array()) throw SchemaError("outputs must be an array");
        for (const auto& o : j["outputs"])
            check_keys(o,
                       KeySpec{{"path", "expected_sha256", "actual_sha256", "match"}, {}},
                       "replay output");
    } else {
        throw SchemaError("unknown report kind \"" + kind + "\"");
    }
    return kind;
}

// Fixed rendering: two-space indent plus trailing newline.  Reports are
// emitted with keys already in canonical order, so rendering is canonical.
inline std::string render_report(const Json& j) { return j.dump(2) + "\n"; }

namespace detail {

// Rebuilds an object with the given keys first (in order, skipping absent
// ones) and any remaining keys sorted; validation has already bounded the key
// set, so "remaining" only occurs for free-form maps.
inline Json reorder(const Json& src, std::initializer_list<const char*> order) {
    Json out = Json::object();
    for (const char* key : order)
        if (src.contains(key)) out[key] = src[key];
    return out;
}

inline Json sort_object(const Json& src) {
    std::map<std::string, Json> sorted;
    for (const auto& [key, value] : src.items()) sorted[key] = value;
    Json out = Json::object();
    for (const auto& [key, value] : sorted) out[key] = value;
    return out;
}

}  // namespace detail

// Canonical key order for a validated report, independent of input order.
inline Json canonicalize_report(const Json& j) {
    std::string kind = validate_report(j);
    using detail::reorder, detail::sort_object;
    if (kind == "classify") {
        Json out = reorder(j, {"schema", "kind", "n", "degrees", "p", "fano_index"});
        out["flags"] = reorder(j["flags"], {"index_ge_2", "p_gt_max_degree",
                                            "max_degree_ge_p", "tuple_special"});
        out["conclusion"] = j["conclusion"];
        return out;
    }
    if (kind == "degrees")
        return reorder(j, {"schema", "kind", "d", "catalan", "conic_degree",
                           "bad_primes", "torsion_order_bound"});
    if (kind == "witness") {
        Json out = reorder(j, {"schema", "kind", "family", "family_branch", "n", "d",
                               "field", "polynomial"});
        out["speciality"] = reorder(j["speciality"],
                                    {"d_valuation", "d_speciality", "d_plus_1_speciality"});
        out["smoothness"] = reorder(j["smoothness"],
                                    {"status", "scanned_extension_degrees", "certificate",
                                     "witness_point", "witness_field"});
        out["vanishing"] = reorder(j["vanishing"],
                                   {"computed_zero_set", "predicted_zero_set", "agree",
                                    "verdict"});
        return out;
    }
    if (kind == "lines") {
        Json out = reorder(j, {"schema", "kind", "n", "degrees", "polynomials"});
        Json fields = Json::array();
        for (const auto& f : j["fields"]) {
            Json fo = reorder(f, {"field", "lines_in_space", "lines_on_variety",
                                  "free_lines"});
            fo["splitting_histogram"] = sort_object(f["splitting_histogram"]);
            fields.push_back(fo);
        }
        out["fields"] = fields;
        if (j.contains("point_census")) out["point_census"] = sort_object(j["point_census"]);
        return out;
    }
    if (kind == "manifest") {
        Json out = reorder(j, {"schema", "kind", "artifact_version", "command", "argv",
                               "seed", "threads"});
        Json outputs = Json::array();
        for (const auto& o : j["outputs"])
            outputs.push_back(reorder(o, {"path", "sha256", "bytes"}));
        out["outputs"] = outputs;
        return out;
    }
    if (kind == "replay") {
        Json out = reorder(j, {"schema", "kind", "manifest", "ok"});
        Json outputs = Json::array();
        for (const auto& o : j["outputs"])
            outputs.push_back(
                reorder(o, {"path", "expected_sha256", "actual_sha256", "match"}));
        out["outputs"] = outputs;
        return out;
    }
    return reorder(j, {"schema", "kind", "code", "message"});
}

// Parse + validate + canonical re-render round trip.
inline Json parse_report(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("report is not valid JSON: ") + e.what());
    }
    validate_report(j);
    return j;
}

}  // namespace fanolines
