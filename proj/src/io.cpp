#include "fpspec/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fpspec/errors.hpp"

namespace fpspec::io {

namespace {

Matrix matrix_from_json(const Json& rows, int d, const char* name) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != d)
        throw InputError(std::string("model: \"") + name + "\" must be an array of " + std::to_string(d) + " rows");
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != d)
            throw InputError(std::string("model: row ") + std::to_string(i) + " of \"" + name + "\" must have " +
                             std::to_string(d) + " entries");
        for (int j = 0; j < d; ++j) {
            const auto& v = row[static_cast<std::size_t>(j)];
            if (!v.is_number()) throw InputError(std::string("model: non-numeric entry in \"") + name + "\"");
            m(i, j) = v.get<double>();
        }
    }
    return m;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

ModelMatrices model_from_json(const Json& doc) {
    if (!doc.is_object()) throw InputError("model: document must be a JSON object");
    for (const char* key : {"d", "C", "D"})
        if (!doc.contains(key)) throw InputError(std::string("model: missing key \"") + key + "\"");
    if (!doc["d"].is_number_integer() || doc["d"].get<long long>() < 1)
        throw InputError("model: \"d\" must be a positive integer");
    const int d = doc["d"].get<int>();
    return {matrix_from_json(doc["C"], d, "C"), matrix_from_json(doc["D"], d, "D")};
}

Json model_to_json(const Matrix& drift, const Matrix& diffusion) {
    return Json{{"d", drift.rows()}, {"C", matrix_to_json(drift)}, {"D", matrix_to_json(diffusion)}};
}

Json violations_to_json(const std::vector<Violation>& violations) {
    Json out = Json::array();
    for (const auto& v : violations) out.push_back({{"condition", v.condition}, {"detail", v.detail}});
    return out;
}

CoeffVector coeffs_from_json(const Json& doc) {
    if (!doc.is_array() || doc.empty()) throw InputError("coefficients: expected a non-empty JSON list");
    int dim = -1;
    std::set<MultiIndex> seen;
    std::optional<CoeffVector> out;
    for (const auto& entry : doc) {
        if (!entry.is_object() || !entry.contains("alpha") || !entry.contains("value"))
            throw InputError("coefficients: each entry needs \"alpha\" and \"value\"");
        const auto& a = entry["alpha"];
        if (!a.is_array() || a.empty()) throw InputError("coefficients: \"alpha\" must be a non-empty list");
        std::vector<int> idx;
        for (const auto& k : a) {
            if (!k.is_number_integer() || k.get<long long>() < 0)
                throw InputError("coefficients: \"alpha\" entries must be nonnegative integers");
            idx.push_back(k.get<int>());
        }
        if (dim < 0) {
            dim = static_cast<int>(idx.size());
            out.emplace(dim);
        } else if (static_cast<int>(idx.size()) != dim) {
            throw InputError("coefficients: multi-index lengths are not uniform");
        }
        if (!entry["value"].is_number()) throw InputError("coefficients: \"value\" must be a number");
        MultiIndex alpha(std::move(idx));
        if (!seen.insert(alpha).second) {
            std::ostringstream os;
            os << "coefficients: duplicate multi-index " << alpha;
            throw InputError(os.str());
        }
        out->set(alpha, entry["value"].get<double>());
    }
    return *out;
}

Json coeffs_to_json(const CoeffVector& f) {
    Json out = Json::array();
    for (const auto& [alpha, v] : f) out.push_back({{"alpha", alpha.entries()}, {"value", v}});
    if (out.empty()) out.push_back({{"alpha", MultiIndex::zero(f.dim()).entries()}, {"value", 0.0}});
    return out;
}

Json block_to_json(const GeneratorBlock& block) {
    Json basis = Json::array();
    for (const auto& a : block.basis) basis.push_back(a.entries());
    return Json{{"m", block.order}, {"basis", basis}, {"B", matrix_to_json(block.matrix)}};
}

std::string format_double(double value) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
}

void write_decay_csv(std::ostream& os, const DecayReport& report) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < report.times.size(); ++i) {
        const double ratio = report.bound[i] > 0.0 ? report.fisher[i] / report.bound[i] : 0.0;
        rows.push_back({report.times[i], report.fisher[i], report.bound[i], report.envelope[i], ratio});
    }
    write_csv(os, {"t", "fisher", "bound", "envelope", "ratio"}, rows);
}

Json decay_to_json(const DecayReport& report, const std::string& model_hash,
                   const std::optional<std::string>& timestamp) {
    Json meta{{"model_hash", model_hash}, {"m", report.m},           {"mu", report.mu},
              {"n", report.defect},       {"fitted_Cm", report.fitted_cm}, {"fisher0", report.fisher0}};
    if (timestamp) meta["timestamp"] = *timestamp;
    return Json{{"metadata", meta},
                {"t", report.times},
                {"fisher", report.fisher},
                {"bound", report.bound},
                {"envelope", report.envelope}};
}

std::string model_hash(const Matrix& drift, const Matrix& diffusion) {
    std::string text = std::to_string(drift.rows());
    for (const Matrix* m : {&drift, &diffusion})
        for (Eigen::Index i = 0; i < m->rows(); ++i)
            for (Eigen::Index j = 0; j < m->cols(); ++j) text += ',' + format_double((*m)(i, j));
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write file " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw InputError("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace fpspec::io
