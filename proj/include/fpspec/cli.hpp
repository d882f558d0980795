#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fpspec::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,      // invalid model, or a cross-check outside tolerance
    kInputError = 2,       // unreadable or malformed input, bad flags
    kBoundViolation = 3,
    kDegenerateTime = 4,
    kNumericalError = 5,
};

enum class Command { Validate, Spectrum, Evolve, Decay, Sharpness, GreensCheck };
enum class Format { Csv, Json };

struct RunConfig {
    Command command = Command::Validate;
    std::string model_path;
    std::optional<std::string> f0_path;
    double t_max = 1.0;
    int samples = 50;
    std::optional<int> truncation;
    int m = 1;
    int quad_order = 40;
    double t_star = 1.0;
    std::optional<std::string> output_path;
    Format format = Format::Csv;
    bool timestamp = true;
};

/// Parses argv-style arguments (without the program name) and runs the command.
/// Results go to --out (or `out` when absent); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fpspec::cli
