// serialization.hpp
// JSON formats for codes, transcripts, and exclusion results, plus atomic
// file writes (temp file + rename, so failures never leave partial output).
//
// Code files: {"dimension": d, "label": str, "vectors": [[[re, im], ...], ...]}
// with every vector validated to unit norm within 1e-8 on read.

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <system_error>

#include <json.hpp>

#include "adkit/antidist.hpp"
#include "adkit/codes.hpp"
#include "adkit/protocols.hpp"

namespace adkit {

// Shortest decimal form that round-trips back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    const std::to_chars_result r = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, r.ptr);
}

inline nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json entries = nlohmann::json::array();
    for (const Complex& x : v) entries.push_back({x.real(), x.imag()});
    return entries;
}

inline Vector vector_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::invalid_argument("vector_from_json: expected an array");
    Vector v;
    v.reserve(j.size());
    for (const nlohmann::json& entry : j) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
            !entry[1].is_number()) {
            throw std::invalid_argument("vector_from_json: entries must be [re, im] pairs");
        }
        v.emplace_back(entry[0].get<double>(), entry[1].get<double>());
    }
    return v;
}

inline nlohmann::json states_to_json(std::span<const Vector> states) {
    nlohmann::json out = nlohmann::json::array();
    for (const Vector& v : states) out.push_back(vector_to_json(v));
    return out;
}

inline nlohmann::json code_to_json(const SphericalCode& code) {
    return nlohmann::json{{"dimension", code.dimension},
                          {"label", code.label},
                          {"vectors", states_to_json(code.vectors)}};
}

inline SphericalCode code_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("vectors")) {
        throw std::invalid_argument("code_from_json: need \"dimension\" and \"vectors\"");
    }
    SphericalCode code;
    code.dimension = j.at("dimension").get<int>();
    if (code.dimension < 1) throw std::invalid_argument("code_from_json: dimension must be positive");
    code.label = j.value("label", std::string{});
    for (const nlohmann::json& vj : j.at("vectors")) {
        Vector v = vector_from_json(vj);
        if (static_cast<int>(v.size()) != code.dimension) {
            throw std::invalid_argument("code_from_json: vector length does not match dimension");
        }
        if (!is_unit(v, 1e-8)) {
            throw std::invalid_argument("code_from_json: vector " +
                                        std::to_string(code.vectors.size() + 1) +
                                        " is not unit norm within 1e-8");
        }
        code.vectors.push_back(std::move(v));
    }
    return code;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < m.dim(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m.dim(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json transcript_to_json(const Transcript& t) {
    nlohmann::json messages = nlohmann::json::array();
    for (const Message& m : t.messages) {
        messages.push_back({{"sender", m.sender}, {"payload", m.payload}, {"bits", m.bits}});
    }
    return nlohmann::json{
        {"protocol", to_string(t.protocol)},
        {"inputs",
         {{"size", t.inputs.size},
          {"i", t.inputs.alice_input},
          {"triple", t.inputs.bob_triple}}},
        {"messages", std::move(messages)},
        {"output", t.output},
        {"total_bits", t.total_bits},
        {"relation_satisfied", t.relation_satisfied}};
}

inline nlohmann::json exclusion_result_to_json(const ExclusionResult& res,
                                               bool include_certificates = false) {
    nlohmann::json j{{"status", to_string(res.status)},
                     {"primal_value", res.primal_value},
                     {"dual_value", res.dual_value},
                     {"duality_gap", res.duality_gap},
                     {"residuals",
                      {{"povm_min_eigenvalue", res.povm_min_eig},
                       {"povm_completeness_error", res.povm_completeness},
                       {"dual_max_violation", res.dual_max_violation}}},
                     {"iterations", res.iterations},
                     {"converged", res.converged}};
    if (include_certificates) {
        if (res.povm) {
            nlohmann::json elems = nlohmann::json::array();
            for (const Matrix& e : res.povm->elements) elems.push_back(matrix_to_json(e));
            j["povm"] = std::move(elems);
        }
        if (res.dual_certificate) j["dual_certificate"] = matrix_to_json(*res.dual_certificate);
    }
    return j;
}

inline void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write_file_atomic: write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw std::runtime_error("write_file_atomic: rename to " + path + " failed: " +
                                 ec.message());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline SphericalCode load_code(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("load_code: " + path + " is not valid JSON: " + e.what());
    }
    return code_from_json(j);
}

inline void save_code(const SphericalCode& code, const std::string& path) {
    write_file_atomic(path, code_to_json(code).dump(2) + "\n");
}

} // namespace adkit
