#include "fpspec/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "fpspec/errors.hpp"
#include "fpspec/evolution.hpp"
#include "fpspec/functionals.hpp"
#include "fpspec/generator.hpp"
#include "fpspec/io.hpp"
#include "fpspec/parallel.hpp"

namespace fpspec::cli {

namespace {

/// Carries an exit code out of a command after its message has been printed.
struct Exit {
    int code;
};

constexpr double kGreensTolerance = 1e-6;
constexpr int kGreensGridPoints = 10;

class Runner {
public:
    Runner(RunConfig cfg, std::ostream& out, std::ostream& err) : cfg_(std::move(cfg)), out_(out), err_(err) {}

    int run() {
        switch (cfg_.command) {
        case Command::Validate: return validate();
        case Command::Spectrum: return spectrum();
        case Command::Evolve: return evolve();
        case Command::Decay: return decay();
        case Command::Sharpness: return sharpness();
        case Command::GreensCheck: return greens_check();
        }
        return kInputError;
    }

private:
    io::ModelMatrices load_matrices() const {
        return io::model_from_json(io::parse_json(io::read_file(cfg_.model_path)));
    }

    ModelSpec load_model() {
        const auto mats = load_matrices();
        auto result = fpspec::validate(mats.drift, mats.diffusion);
        if (!result.ok()) {
            err_ << "invalid model:\n" << io::violations_to_json(result.violations).dump(2) << '\n';
            throw Exit{kCheckFailed};
        }
        hash_ = io::model_hash(mats.drift, mats.diffusion);
        return *result.model;
    }

    CoeffVector load_f0(int dim) const {
        if (!cfg_.f0_path) throw InputError("this command requires --f0");
        auto f0 = io::coeffs_from_json(io::parse_json(io::read_file(*cfg_.f0_path)));
        if (f0.dim() != dim) throw InputError("initial data dimension does not match the model");
        return f0;
    }

    int truncation_for(const CoeffVector& f0) const {
        const int needed = std::max({1, cfg_.m, f0.max_order()});
        if (!cfg_.truncation) return needed;
        if (*cfg_.truncation < f0.max_order())
            throw InputError("initial data has order " + std::to_string(f0.max_order()) + " above --truncation " +
                             std::to_string(*cfg_.truncation));
        return *cfg_.truncation;
    }

    // Uniform grid on [0, t_max] including both endpoints.
    std::vector<double> time_grid() const {
        std::vector<double> t(static_cast<std::size_t>(cfg_.samples));
        for (int i = 0; i < cfg_.samples; ++i)
            t[static_cast<std::size_t>(i)] = cfg_.t_max * i / (cfg_.samples - 1);
        return t;
    }

    std::optional<std::string> timestamp() const {
        if (!cfg_.timestamp) return std::nullopt;
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
        return std::string(buf);
    }

    void emit(const std::string& content) {
        if (cfg_.output_path) io::write_file_atomic(*cfg_.output_path, content);
        else out_ << content;
    }

    static io::Json complex_list(const std::vector<std::complex<double>>& values) {
        io::Json out = io::Json::array();
        for (const auto& z : values) out.push_back({z.real(), z.imag()});
        return out;
    }

    int validate() {
        const auto mats = load_matrices();
        const auto result = fpspec::validate(mats.drift, mats.diffusion);
        io::Json doc;
        if (!result.ok()) {
            doc = {{"valid", false}, {"violations", io::violations_to_json(result.violations)}};
            emit(doc.dump(2) + "\n");
            for (const auto& v : result.violations) err_ << "condition " << v.condition << ": " << v.detail << '\n';
            return kCheckFailed;
        }
        const auto summary = spectral_summary(*result.model);
        doc = {{"valid", true},
               {"d", result.model->dim()},
               {"rank_D", result.model->diffusion_rank()},
               {"eigenvalues", complex_list(summary.eigenvalues)},
               {"mu", summary.mu},
               {"n", summary.defect}};
        emit(doc.dump(2) + "\n");
        return kOk;
    }

    int spectrum() {
        const auto model = load_model();
        const auto summary = spectral_summary(model);
        const int top = cfg_.truncation.value_or(std::max(1, cfg_.m));
        const auto blocks = build_blocks(model, top, default_thread_count());
        std::vector<double> mismatch;
        for (const auto& b : blocks) mismatch.push_back(verify_spectrum(b, summary));
        if (cfg_.format == Format::Csv) {
            std::ostringstream os;
            std::vector<std::vector<double>> rows;
            for (std::size_t k = 0; k < blocks.size(); ++k)
                rows.push_back({static_cast<double>(blocks[k].order), static_cast<double>(blocks[k].size()), mismatch[k]});
            io::write_csv(os, {"m", "side", "spectral_mismatch"}, rows);
            emit(os.str());
        } else {
            io::Json jb = io::Json::array();
            for (std::size_t k = 0; k < blocks.size(); ++k) {
                auto j = io::block_to_json(blocks[k]);
                j["spectral_mismatch"] = mismatch[k];
                jb.push_back(std::move(j));
            }
            io::Json clusters = io::Json::array();
            for (const auto& c : summary.clusters)
                clusters.push_back({{"value", {c.value.real(), c.value.imag()}},
                                    {"algebraic", c.algebraic},
                                    {"largest_block", c.largest_block}});
            io::Json doc{{"eigenvalues", complex_list(summary.eigenvalues)},
                         {"clusters", clusters},
                         {"mu", summary.mu},
                         {"n", summary.defect},
                         {"blocks", jb}};
            emit(doc.dump(2) + "\n");
        }
        return kOk;
    }

    int evolve() {
        const auto model = load_model();
        const auto f0 = load_f0(model.dim());
        const double mass = f0[MultiIndex::zero(model.dim())];
        MassConvention convention;
        if (std::abs(mass - 1.0) <= 1e-12) convention = MassConvention::UnitMass;
        else if (std::abs(mass) <= 1e-12) convention = MassConvention::Deviation;
        else throw InputError("evolve: initial data must have unit mass (d_0 = 1) or be a deviation (d_0 = 0)");

        const SpectralSolver solver(model, truncation_for(f0), default_thread_count());
        const auto start = solver.initial_state(f0);
        const auto times = time_grid();
        if (cfg_.format == Format::Csv) {
            std::vector<std::vector<double>> rows;
            for (double t : times) {
                const auto s = solver.propagate(start, t);
                rows.push_back({t, s.coeffs[MultiIndex::zero(model.dim())], entropy_e2(s.coeffs, convention),
                                fisher_I2(s.coeffs)});
            }
            std::ostringstream os;
            io::write_csv(os, {"t", "mass", "e2", "fisher"}, rows);
            emit(os.str());
        } else {
            io::Json samples = io::Json::array();
            for (double t : times) {
                const auto s = solver.propagate(start, t);
                samples.push_back({{"t", t},
                                   {"e2", entropy_e2(s.coeffs, convention)},
                                   {"fisher", fisher_I2(s.coeffs)},
                                   {"coeffs", io::coeffs_to_json(s.coeffs)}});
            }
            io::Json meta{{"model_hash", hash_}, {"truncation", solver.truncation()}};
            if (auto ts = timestamp()) meta["timestamp"] = *ts;
            emit(io::Json{{"metadata", meta}, {"samples", samples}}.dump(2) + "\n");
        }
        return kOk;
    }

    int decay() {
        const auto model = load_model();
        const auto f0 = load_f0(model.dim());
        const SpectralSolver solver(model, truncation_for(f0), default_thread_count());
        const auto report = decay_experiment(solver, f0, cfg_.m, time_grid());
        if (cfg_.format == Format::Csv) {
            std::ostringstream os;
            io::write_decay_csv(os, report);
            emit(os.str());
        } else {
            emit(io::decay_to_json(report, hash_, timestamp()).dump(2) + "\n");
        }
        if (const auto bad = report.first_bound_violation()) {
            err_ << "bound violated at sample " << *bad << ": t = " << io::format_double(report.times[*bad])
                 << ", fisher = " << io::format_double(report.fisher[*bad])
                 << ", bound = " << io::format_double(report.bound[*bad]) << '\n';
            return kBoundViolation;
        }
        return kOk;
    }

    int sharpness() {
        const auto model = load_model();
        if (cfg_.t_star <= 0.0) throw InputError("--t-star must be positive");
        const auto w = sharpness_witness(model, cfg_.m, cfg_.t_star);
        const SpectralSolver solver(model, cfg_.m, default_thread_count());
        const auto end = solver.propagate(solver.initial_state(w.f0), cfg_.t_star);
        const double ratio = fisher_I2(end.coeffs) / fisher_I2(w.f0);
        const double bound = std::pow(exp_norm(model, cfg_.t_star), 2.0 * cfg_.m);
        err_ << "witness m = " << cfg_.m << ", t_star = " << io::format_double(cfg_.t_star)
             << ": fisher ratio = " << io::format_double(ratio) << ", bound = " << io::format_double(bound)
             << (w.unique ? "" : " (top singular value not simple; maximizer non-unique)") << '\n';
        emit(io::coeffs_to_json(w.f0).dump(2) + "\n");
        return kOk;
    }

    // Sample times t_max * k / samples, k = 1..samples: the kernel is singular at t = 0.
    int greens_check() {
        const auto model = load_model();
        const auto f0 = load_f0(model.dim());
        const SpectralSolver solver(model, truncation_for(f0), default_thread_count());
        GreensOptions opts;
        opts.quad_order = cfg_.quad_order;
        const auto grid = uniform_grid(model.dim(), kGreensGridPoints, -3.0, 3.0);
        std::vector<std::vector<double>> rows;
        for (int k = 1; k <= cfg_.samples; ++k) {
            const double t = cfg_.t_max * k / cfg_.samples;
            try {
                const GreensKernel kernel(model, t, opts);
                if (kernel.accuracy_warning(f0))
                    err_ << "warning: quad order " << cfg_.quad_order << " is below degree/2 + 1 for this f0\n";
                rows.push_back({t, max_greens_discrepancy(solver, f0, t, grid, opts)});
            } catch (const DegenerateTimeError& e) {
                err_ << e.what() << '\n' << "smallest safe t: " << io::format_double(e.smallest_safe_t()) << '\n';
                throw Exit{kDegenerateTime};
            }
        }
        double worst = 0.0;
        for (const auto& r : rows) worst = std::max(worst, r[1]);
        if (cfg_.format == Format::Csv) {
            std::ostringstream os;
            io::write_csv(os, {"t", "max_discrepancy"}, rows);
            emit(os.str());
        } else {
            io::Json t = io::Json::array(), disc = io::Json::array();
            for (const auto& r : rows) {
                t.push_back(r[0]);
                disc.push_back(r[1]);
            }
            io::Json meta{{"model_hash", hash_}, {"quad_order", cfg_.quad_order}, {"tolerance", kGreensTolerance}};
            if (auto ts = timestamp()) meta["timestamp"] = *ts;
            emit(io::Json{{"metadata", meta}, {"t", t}, {"max_discrepancy", disc}}.dump(2) + "\n");
        }
        if (!(worst <= kGreensTolerance)) {
            err_ << "Green's/spectral discrepancy " << io::format_double(worst) << " exceeds "
                 << io::format_double(kGreensTolerance) << '\n';
            return kCheckFailed;
        }
        return kOk;
    }

    RunConfig cfg_;
    std::ostream& out_;
    std::ostream& err_;
    std::string hash_;
};

void check_config(const RunConfig& c) {
    if (!(c.t_max > 0.0)) throw InputError("--tmax must be > 0");
    if (c.samples < 2) throw InputError("--samples must be >= 2");
    if (c.m < 1) throw InputError("--m must be >= 1");
    if (c.truncation && *c.truncation < c.m) throw InputError("--truncation must be >= --m");
    if (c.quad_order < 4) throw InputError("--quad-order must be >= 4");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hermite-spectral laboratory for degenerate Fokker-Planck equations", "fpspec"};
    RunConfig cfg;
    const std::map<std::string, Command> commands{{"validate", Command::Validate},   {"spectrum", Command::Spectrum},
                                                  {"evolve", Command::Evolve},       {"decay", Command::Decay},
                                                  {"sharpness", Command::Sharpness}, {"greens-check", Command::GreensCheck}};
    const std::map<std::string, Format> formats{{"csv", Format::Csv}, {"json", Format::Json}};
    int truncation = -1;
    std::string f0_path, out_path;
    bool no_timestamp = false;

    app.add_option("command", cfg.command, "validate | spectrum | evolve | decay | sharpness | greens-check")
        ->required()
        ->transform(CLI::CheckedTransformer(commands, CLI::ignore_case));
    app.add_option("--model", cfg.model_path, "model JSON {\"d\", \"C\", \"D\"}")->required();
    app.add_option("--f0", f0_path, "initial data as a coefficient JSON list");
    app.add_option("--tmax", cfg.t_max, "final sample time");
    app.add_option("--samples", cfg.samples, "number of sample times");
    app.add_option("--truncation", truncation, "largest block order carried");
    app.add_option("--m", cfg.m, "vanishing-moment order of f0 / witness order");
    app.add_option("--quad-order", cfg.quad_order, "Gauss-Hermite points per axis");
    app.add_option("--t-star", cfg.t_star, "time at which the sharpness witness is extremal");
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--format", cfg.format, "csv | json")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp field from JSON output");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    if (!f0_path.empty()) cfg.f0_path = f0_path;
    if (!out_path.empty()) cfg.output_path = out_path;
    if (truncation >= 0) cfg.truncation = truncation;
    cfg.timestamp = !no_timestamp;

    try {
        check_config(cfg);
        return Runner(std::move(cfg), out, err).run();
    } catch (const Exit& e) {
        return e.code;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const ConfigurationError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const SizeError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const DegenerateTimeError& e) {
        err << "error: " << e.what() << '\n';
        return kDegenerateTime;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
}

} // namespace fpspec::cli
