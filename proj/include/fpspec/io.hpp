#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpspec/functionals.hpp"
#include "fpspec/generator.hpp"
#include "fpspec/hermite.hpp"
#include "fpspec/model.hpp"

namespace fpspec::io {

using Json = nlohmann::json;

/// Raw (C, D) as read from a model document; not yet validated.
struct ModelMatrices {
    Matrix drift;
    Matrix diffusion;
};

/// {"d": int, "C": [[...]], "D": [[...]]}, row-major. Throws InputError on schema problems.
ModelMatrices model_from_json(const Json& doc);
Json model_to_json(const Matrix& drift, const Matrix& diffusion);

/// [{"condition": "A"|"B"|"C"|"normalized", "detail": string}, ...]
Json violations_to_json(const std::vector<Violation>& violations);

/// [{"alpha": [ints], "value": real}, ...]; dimension is taken from the alpha length.
CoeffVector coeffs_from_json(const Json& doc);
Json coeffs_to_json(const CoeffVector& f);

/// {"m": int, "basis": [[ints]], "B": [[row-major reals]]}
Json block_to_json(const GeneratorBlock& block);

/// 17 significant digits, '.' separator, independent of the global locale.
std::string format_double(double value);

/// CSV: header "t,fisher,bound,envelope,ratio" then one row per sample.
void write_decay_csv(std::ostream& os, const DecayReport& report);
/// Columns plus {"metadata": {model_hash, m, mu, n, fitted_Cm[, timestamp]}}.
Json decay_to_json(const DecayReport& report, const std::string& model_hash,
                   const std::optional<std::string>& timestamp);

/// Generic CSV with a header row; cells are formatted with format_double.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// FNV-1a 64 of the canonical model text, as 16 hex digits.
std::string model_hash(const Matrix& drift, const Matrix& diffusion);

std::string read_file(const std::filesystem::path& path);
Json parse_json(const std::string& text);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace fpspec::io
