#pragma once

// Command line driver.  run() is the whole CLI: subcommands classify,
// degrees, witness, lines, report, writing one JSON document to the output
// stream.  Exit codes: 0 success, 1 domain error (error JSON on stdout),
// 2 usage error (message on stderr).  This lives in a header so tests can
// drive subcommands in-process and byte-compare documents.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "report.hpp"

namespace fanolines {
namespace cli {

struct OutputRecord {
    std::string path;
    std::string sha256;
    uint64_t bytes = 0;
};

namespace detail_cli {

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string fresh_temp_path(const std::string& tag, const std::string& ext) {
    static std::atomic<uint64_t> counter{0};
    auto dir = std::filesystem::temp_directory_path();
    std::string name = "fanolines-" + tag + "-" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter.fetch_add(1)) + ext;
    return (dir / name).string();
}

inline std::vector<MPoly> read_poly_file(const std::string& path, uint32_t n,
                                         const FieldPtr& F) {
    std::istringstream in(read_file(path));
    std::vector<MPoly> polys;
    std::string line;
    while (std::getline(in, line)) {
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        polys.push_back(MPoly::parse(line, n + 1, F));
    }
    if (polys.empty())
        throw std::invalid_argument("polynomial file has no polynomials: " + path);
    return polys;
}

inline uint64_t ipow_checked(uint64_t base, uint32_t e, uint64_t cap) {
    uint64_t out = 1;
    for (uint32_t i = 0; i < e; ++i) {
        if (out > cap / base) return cap + 1;
        out *= base;
    }
    return out;
}

inline std::string lines_csv(const std::vector<Line>& lines) {
    std::string out;
    for (const Line& L : lines) {
        std::string row;
        for (Fq a : L.row0) { row += std::to_string(a.v); row += ","; }
        for (size_t j = 0; j < L.row1.size(); ++j) {
            row += std::to_string(L.row1[j].v);
            row += (j + 1 < L.row1.size()) ? "," : "";
        }
        out += row;
        out += "\n";
    }
    return out;
}

}  // namespace detail_cli

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err);

namespace detail_cli {

// Re-runs a manifest's command with file outputs redirected to temp paths and
// compares the regenerated digests against the recorded ones.
inline Json replay_manifest(const std::string& manifest_path) {
    Json manifest = parse_report(read_file(manifest_path));
    if (manifest["kind"].get<std::string>() != "manifest")
        throw std::invalid_argument("not a manifest document: " + manifest_path);

    std::vector<std::string> argv;
    std::map<std::string, std::string> redirect;  // original path -> temp path
    const auto& stored = manifest["argv"];
    for (size_t i = 0; i < stored.size(); ++i) {
        std::string tok = stored[i].get<std::string>();
        argv.push_back(tok);
        if (tok == "--json-out" || tok == "--csv-out" || tok == "--manifest-out") {
            if (i + 1 >= stored.size())
                throw std::invalid_argument("manifest argv ends after " + tok);
            std::string original = stored[++i].get<std::string>();
            std::string temp = fresh_temp_path(
                "replay", std::filesystem::path(original).extension().string());
            redirect[original] = temp;
            argv.push_back(temp);
        }
    }

    std::ostringstream run_out, run_err;
    int code = run(argv, run_out, run_err);
    if (code != 0)
        throw std::invalid_argument("replayed command failed with exit code " +
                                    std::to_string(code));

    bool all_match = true;
    Json outputs = Json::array();
    for (const auto& rec : manifest["outputs"]) {
        std::string original = rec["path"].get<std::string>();
        std::string expected = rec["sha256"].get<std::string>();
        auto it = redirect.find(original);
        if (it == redirect.end())
            throw std::invalid_argument("manifest output not produced by argv: " + original);
        std::string actual = sha256_hex(read_file(it->second));
        bool match = actual == expected;
        all_match = all_match && match;
        Json o = Json::object();
        o["path"] = original;
        o["expected_sha256"] = expected;
        o["actual_sha256"] = actual;
        o["match"] = match;
        outputs.push_back(o);
    }
    for (const auto& [original, temp] : redirect) {
        std::error_code ec;
        std::filesystem::remove(temp, ec);
    }

    Json j = envelope("replay");
    j["manifest"] = manifest_path;
    j["ok"] = all_match;
    j["outputs"] = outputs;
    return j;
}

}  // namespace detail_cli

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
    CLI::App app{"line geometry of Fano complete intersections over finite fields"};
    app.name("fanolines");
    app.require_subcommand(1);
    // global options may follow the subcommand; subcommands inherit this
    app.fallthrough();

    std::string json_out, csv_out, manifest_out;
    unsigned threads = 1;
    std::optional<uint64_t> seed;
    app.add_option("--json-out", json_out, "also write the JSON document to this file");
    app.add_option("--csv-out", csv_out, "write canonical line rows as CSV (lines only)");
    app.add_option("--manifest-out", manifest_out, "write an analysis manifest to this file");
    app.add_option("--threads", threads, "worker threads (output is thread-count independent)")
        ->check(CLI::Range(1u, 256u));
    uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "seed recorded in the manifest");

    auto* classify = app.add_subcommand("classify", "hypothesis triage for a profile");
    uint32_t cl_n = 0;
    std::vector<uint64_t> cl_degrees;
    uint64_t cl_p = 0;
    classify->add_option("--n", cl_n, "ambient projective dimension")->required();
    classify->add_option("--degrees", cl_degrees, "complete intersection degrees")
        ->required()
        ->delimiter(',');
    classify->add_option("--p", cl_p, "field characteristic")->required();

    auto* degrees = app.add_subcommand("degrees", "enumerative degrees for index-1 hypersurfaces");
    uint64_t dg_d = 0;
    degrees->add_option("--d", dg_d, "hypersurface degree (>= 4)")->required();

    auto* witness = app.add_subcommand("witness", "witness hypersurface analysis");
    std::string wt_family, wt_field;
    uint32_t wt_n = 0, wt_d = 0, wt_kmax = 1;
    witness->add_option("--family", wt_family, "fermat or cyclic")
        ->required()
        ->check(CLI::IsMember({"fermat", "cyclic"}));
    witness->add_option("--n", wt_n, "ambient projective dimension")->required();
    witness->add_option("--d", wt_d, "hypersurface degree")->required();
    witness->add_option("--field", wt_field, "coefficient field, e.g. 3, 9, 2^3")->required();
    witness->add_option("--scan-kmax", wt_kmax, "scan extensions up to this multiple")
        ->check(CLI::Range(1u, 16u));

    auto* lines = app.add_subcommand("lines", "line census for a complete intersection");
    std::string ln_polyfile, ln_field;
    uint32_t ln_n = 0;
    bool ln_census = false;
    lines->add_option("--poly-file", ln_polyfile, "file with one polynomial per line")
        ->required();
    lines->add_option("--n", ln_n, "ambient projective dimension")->required();
    lines->add_option("--field", ln_field, "coefficient field, e.g. 3, 9, 2^3")->required();
    lines->add_flag("--census", ln_census, "include the per-point line census");

    auto* report = app.add_subcommand("report", "validate, canonicalize, or replay");
    std::string rp_in, rp_replay;
    report->add_option("--in", rp_in, "validate and canonically re-emit this document");
    report->add_option("--replay", rp_replay, "re-run this manifest and compare digests");

    std::vector<std::string> argv_for_manifest = args;
    std::vector<const char*> argv;
    argv.push_back("fanolines");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::ParseError& e) {
            err << "usage error: " << e.what() << "\n";
            return 2;
        }
        if (seed_opt->count() > 0) seed = seed_value;

        Json doc;
        std::string csv_payload;
        bool have_csv = false;

        if (classify->parsed()) {
            doc = classify_report(CIProfile{cl_n, cl_degrees, cl_p});
        } else if (degrees->parsed()) {
            doc = degrees_report(dg_d);
        } else if (witness->parsed()) {
            FieldPtr F = Field::parse(wt_field);
            Family family = wt_family == "fermat" ? Family::Fermat : Family::Cyclic;
            doc = witness_report(family, wt_n, wt_d, F, wt_kmax, threads);
        } else if (lines->parsed()) {
            FieldPtr F = Field::parse(ln_field);
            if (ln_n < 1) throw std::invalid_argument("lines need n >= 1");
            if (detail_cli::ipow_checked(F->size(), ln_n + 1, 10'000'000) > 10'000'000)
                throw std::invalid_argument(
                    "line enumeration out of supported range (q^(n+1) <= 1e7)");
            std::vector<MPoly> polys = detail_cli::read_poly_file(ln_polyfile, ln_n, F);
            if (polys.size() >= ln_n)
                throw std::invalid_argument("codimension must be below n");
            FreenessReport rep = freeness_census(polys, ln_n, {F}, threads);
            std::optional<std::map<std::vector<uint32_t>, uint64_t>> census;
            if (ln_census) census = point_fiber_census(polys, ln_n, F, threads);
            doc = freeness_json(rep, polys, census);
            if (!csv_out.empty()) {
                csv_payload = detail_cli::lines_csv(lines_on_variety(polys, ln_n, F, threads));
                have_csv = true;
            }
        } else if (report->parsed()) {
            if (rp_in.empty() == rp_replay.empty())
                throw std::invalid_argument("report needs exactly one of --in, --replay");
            if (!rp_in.empty()) {
                doc = canonicalize_report(parse_report(detail_cli::read_file(rp_in)));
            } else {
                doc = detail_cli::replay_manifest(rp_replay);
            }
        }

        std::string text = render_report(doc);
        out << text;

        std::vector<OutputRecord> outputs;
        if (!json_out.empty()) {
            detail_cli::write_file(json_out, text);
            outputs.push_back({json_out, sha256_hex(text), text.size()});
        }
        if (have_csv) {
            detail_cli::write_file(csv_out, csv_payload);
            outputs.push_back({csv_out, sha256_hex(csv_payload), csv_payload.size()});
        }
        if (!manifest_out.empty()) {
            std::string command = classify->parsed()   ? "classify"
                                  : degrees->parsed()  ? "degrees"
                                  : witness->parsed()  ? "witness"
                                  : lines->parsed()    ? "lines"
                                                       : "report";
            Json m = envelope("manifest");
            m["artifact_version"] = kArtifactVersion;
            m["command"] = command;
            m["argv"] = argv_for_manifest;
            if (seed) m["seed"] = *seed;
            m["threads"] = threads;
            Json outj = Json::array();
            for (const auto& rec : outputs) {
                Json o = Json::object();
                o["path"] = rec.path;
                o["sha256"] = rec.sha256;
                o["bytes"] = rec.bytes;
                outj.push_back(o);
            }
            m["outputs"] = outj;
            detail_cli::write_file(manifest_out, render_report(m));
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        out << render_report(error_report("domain", e.what()));
        return 1;
    } catch (const std::out_of_range& e) {
        out << render_report(error_report("domain", e.what()));
        return 1;
    } catch (const std::exception& e) {
        out << render_report(error_report("internal", e.what()));
        return 1;
    }
}

}  // namespace cli
}  // namespace fanolines
