// Copyright 2026 The qler Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qler: logical-error-rate estimation for quantum error-correction circuits.
//
// Subcommands:
//   gen       generate a repetition- or surface-code memory circuit
//   estimate  staged fixed-weight sampling + S-curve fit + extrapolation
//   baseline  naive i.i.d. fault-injection sampling
//   fit       offline S-curve fitting of a saved subspace CSV
//   compare   relative difference between two report JSONs
//
// Exit codes: 0 success, 2 configuration error, 3 budget exhausted with
// partial results, 4 I/O or file-format error, 5 internal invariant violation.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qler/qler.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitIo = 4;
constexpr int kExitInternal = 5;

// ---------------------------------------------------------------------------
// Small file / manifest plumbing
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    qler::require(static_cast<bool>(in), qler::ErrorKind::IoError, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    qler::require(static_cast<bool>(in), qler::ErrorKind::IoError, "cannot read " + path);
    return buffer.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    qler::require(static_cast<bool>(out), qler::ErrorKind::IoError, "cannot open " + path +
                                                                        " for writing");
    out << contents;
    out.flush();
    qler::require(static_cast<bool>(out), qler::ErrorKind::IoError, "cannot write " + path);
}

std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
    std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buffer;
}

/// Collects everything a run manifest records. Timestamps live here and only
/// here, so every other artifact is byte-reproducible.
class ManifestWriter {
  public:
    ManifestWriter(int argc, char** argv) : start_(std::chrono::system_clock::now()) {
        for (int i = 0; i < argc; ++i) {
            command_.push_back(argv[i]);
        }
    }

    void set_seed(std::uint64_t seed) { seed_ = seed; }
    void set_threads(int threads) { threads_ = threads; }
    void add_input(const std::string& path) { inputs_.push_back(path); }
    void add_output(const std::string& path) { outputs_.push_back(path); }

    void write(const std::string& manifest_path) const {
        auto digest_entry = [](const std::string& path) {
            return json{{"path", path}, {"sha256", qler::sha256_hex(read_file(path))}};
        };
        json inputs = json::array();
        for (const std::string& p : inputs_) {
            inputs.push_back(digest_entry(p));
        }
        json outputs = json::array();
        for (const std::string& p : outputs_) {
            outputs.push_back(digest_entry(p));
        }
        auto end = std::chrono::system_clock::now();
        json manifest{
            {"schema_version", "qler-manifest-v1"},
            {"tool", {{"name", "qler"}, {"version", qler::kVersion}}},
            {"command", command_},
            {"started_utc", utc_timestamp(start_)},
            {"finished_utc", utc_timestamp(end)},
            {"duration_seconds", std::chrono::duration<double>(end - start_).count()},
            {"threads", threads_},
            {"inputs", inputs},
            {"outputs", outputs},
        };
        if (seed_) {
            manifest["seed"] = *seed_;
        }
        write_file(manifest_path, manifest.dump(2) + "\n");
    }

  private:
    std::chrono::system_clock::time_point start_;
    std::vector<std::string> command_;
    std::optional<std::uint64_t> seed_;
    int threads_ = 1;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
};

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

int default_threads() {
    if (const char* env = std::getenv("QLER_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) {
            return n;
        }
    }
    return 1;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag_seed) {
    if (flag_seed) {
        return *flag_seed;
    }
    std::random_device rd;
    std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cout << "seed: " << seed << " (generated; pass --seed to reproduce)\n";
    return seed;
}

struct CircuitFlags {
    std::string circuit_path;
    std::string code = "surface";
    int distance = 0;
    int rounds = 0;
};

void add_circuit_flags(CLI::App* cmd, CircuitFlags& flags, bool code_only = false) {
    if (!code_only) {
        cmd->add_option("--circuit", flags.circuit_path,
                        "Path of a circuit text file (alternative to --code)");
    }
    cmd->add_option("--code", flags.code, "Code family to generate: repetition or surface")
        ->check(CLI::IsMember({"repetition", "surface"}));
    cmd->add_option("--distance", flags.distance, "Code distance (odd, >= 3)");
    cmd->add_option("--rounds", flags.rounds,
                    "Measurement rounds (default: 3*distance for surface, 1 for repetition)");
}

qler::CodeFamily parse_family(const std::string& name) {
    return name == "repetition" ? qler::CodeFamily::Repetition : qler::CodeFamily::Surface;
}

int effective_rounds(const CircuitFlags& flags) {
    if (flags.rounds > 0) {
        return flags.rounds;
    }
    return parse_family(flags.code) == qler::CodeFamily::Repetition ? 1 : 3 * flags.distance;
}

/// Materializes the circuit requested on the command line, either by reading
/// a file or by generating a code, and records the input for the manifest.
qler::Circuit resolve_circuit(const CircuitFlags& flags, ManifestWriter& manifest) {
    if (!flags.circuit_path.empty()) {
        manifest.add_input(flags.circuit_path);
        return qler::parse_circuit(read_file(flags.circuit_path));
    }
    qler::require(flags.distance > 0, qler::ErrorKind::ConfigError,
                  "need either --circuit or --code with --distance");
    if (parse_family(flags.code) == qler::CodeFamily::Repetition) {
        return qler::generate_repetition_memory(flags.distance, effective_rounds(flags));
    }
    return qler::generate_surface_memory_z(flags.distance, effective_rounds(flags));
}

qler::DecoderKind parse_decoder(const std::string& name) {
    if (name == "auto") {
        return qler::DecoderKind::Auto;
    }
    if (name == "lookup") {
        return qler::DecoderKind::Lookup;
    }
    if (name == "matching") {
        return qler::DecoderKind::Matching;
    }
    qler::fail(qler::ErrorKind::ConfigError, "unknown decoder '" + name + "'");
}

struct ModelChoice {
    qler::ModelVariant variant = qler::ModelVariant::PowerTail;
    double shape = 0.5;
};

/// Accepted variant tokens: ours | ibm | generalized:<s> | power_tail | weibull.
ModelChoice parse_model(const std::string& token) {
    if (token == "ours" || token == "power_tail") {
        return {qler::ModelVariant::PowerTail, 0.5};
    }
    if (token == "ibm" || token == "weibull") {
        return {qler::ModelVariant::Weibull, 0.5};
    }
    constexpr std::string_view prefix = "generalized:";
    if (token.rfind(prefix, 0) == 0) {
        std::string digits = token.substr(prefix.size());
        char* end = nullptr;
        double s = std::strtod(digits.c_str(), &end);
        qler::require(end != nullptr && *end == '\0' && std::isfinite(s) && s > 0,
                      qler::ErrorKind::ConfigError,
                      "bad shape exponent in '" + token + "' (want generalized:<s> with s > 0)");
        return {qler::ModelVariant::PowerTail, s};
    }
    qler::fail(qler::ErrorKind::ConfigError,
               "unknown model '" + token + "' (want ours, ibm, or generalized:<s>)");
}

/// Compiles the circuit, optionally through an on-disk table cache keyed by
/// the circuit digest. A stale cache is recompiled and overwritten.
qler::PropagationTable compile_with_cache(const qler::Circuit& circuit,
                                          const std::string& cache_path) {
    std::string digest = qler::sha256_hex(qler::serialize_circuit(circuit));
    if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
        std::ifstream in(cache_path, std::ios::binary);
        qler::require(static_cast<bool>(in), qler::ErrorKind::IoError,
                      "cannot open " + cache_path);
        try {
            return qler::load_propagation_table(in, digest);
        } catch (const qler::Error& e) {
            if (e.kind() != qler::ErrorKind::FormatError) {
                throw;
            }
            std::cerr << "note: table cache " << cache_path << " is stale; recompiling\n";
        }
    }
    qler::PropagationTable table = qler::compile_circuit(circuit);
    if (!cache_path.empty()) {
        std::ofstream out(cache_path, std::ios::binary);
        qler::require(static_cast<bool>(out), qler::ErrorKind::IoError,
                      "cannot open " + cache_path + " for writing");
        qler::dump_propagation_table(table, out);
    }
    return table;
}

std::string manifest_path_for(const std::string& out_path) {
    return out_path + ".manifest.json";
}

/// Writes the manifest next to the first file the command produced (or at the
/// explicit --manifest path). Commands that only print to stdout write none.
void finish_manifest(const ManifestWriter& manifest, const std::string& explicit_path,
                     std::initializer_list<std::string> produced) {
    std::string anchor = explicit_path;
    if (anchor.empty()) {
        for (const std::string& path : produced) {
            if (!path.empty()) {
                anchor = manifest_path_for(path);
                break;
            }
        }
    }
    if (!anchor.empty()) {
        manifest.write(anchor);
    }
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
    CircuitFlags circuit;
    std::string out_path;
    std::string manifest_path;
};

int cmd_gen(const GenArgs& args, ManifestWriter& manifest) {
    qler::require(args.circuit.distance > 0, qler::ErrorKind::ConfigError,
                  "--distance is required");
    qler::CodeSpec spec{parse_family(args.circuit.code), args.circuit.distance,
                        effective_rounds(args.circuit)};
    qler::Circuit circuit = qler::generate_code(spec);
    std::string text = qler::serialize_circuit(circuit);

    std::size_t locations = qler::enumerate_fault_locations(circuit).size();
    std::cout << "code: " << args.circuit.code << " distance " << spec.distance << ", "
              << spec.rounds << " rounds\n"
              << "qubits: " << circuit.num_qubits << "\n"
              << "detectors: " << circuit.detectors.size() << "\n"
              << "observables: " << circuit.observables.size() << "\n"
              << "locations: " << locations << "\n";

    if (args.out_path.empty()) {
        std::cout << text;
        return kExitOk;
    }
    write_file(args.out_path, text);
    manifest.add_output(args.out_path);
    finish_manifest(manifest, args.manifest_path, {args.out_path});
    return kExitOk;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
    CircuitFlags circuit;
    int t_override = -1;
    std::string decoder = "auto";
    std::string model = "ours";
    std::optional<std::uint64_t> seed;
    qler::PipelineConfig config;
    bool unweighted = false;
    std::string out_path;
    std::string csv_path;
    std::string svg_path;
    std::string manifest_path;
    std::string table_cache;
};

std::string render_estimate_svg(const qler::EstimateReport& report) {
    qler::SvgCurve curve;
    curve.label = std::string("fit (") + qler::model_variant_name(report.fit.model.variant) + ")";
    double w_lo = static_cast<double>(report.t) + 1.0;
    double w_hi = static_cast<double>(report.w_err);
    for (const qler::SubspaceRecord& s : report.subspaces) {
        w_hi = std::max(w_hi, static_cast<double>(s.stats.weight));
    }
    for (int i = 0; i <= 200; ++i) {
        double w = w_lo + (w_hi - w_lo) * i / 200.0;
        curve.points.push_back({w, qler::eval_f(report.fit.model, w)});
    }
    qler::SvgSeries series;
    series.label = "sampled subspaces";
    for (const qler::SubspaceRecord& s : report.subspaces) {
        series.points.push_back({static_cast<double>(s.stats.weight), s.stats.p_hat()});
    }
    qler::SvgOptions options;
    options.title = "Per-weight logical error probability";
    options.x_label = "fault weight w";
    options.y_label = "log10 f(w)";
    options.log_y = true;
    return qler::render_svg({curve}, {series}, options);
}

int cmd_estimate(const EstimateArgs& args, ManifestWriter& manifest) {
    qler::PipelineConfig cfg = args.config;
    cfg.seed = resolve_seed(args.seed);
    cfg.weighted_fit = !args.unweighted;
    ModelChoice model = parse_model(args.model);
    cfg.variant = model.variant;
    cfg.shape = model.shape;
    manifest.set_seed(cfg.seed);
    manifest.set_threads(cfg.threads);

    qler::Circuit circuit = resolve_circuit(args.circuit, manifest);
    int t = args.t_override;
    if (t < 0) {
        qler::require(args.circuit.distance > 0, qler::ErrorKind::ConfigError,
                      "need --t or --distance to fix the fault-tolerant threshold");
        t = (args.circuit.distance - 1) / 2;
    }

    qler::PropagationTable table = compile_with_cache(circuit, args.table_cache);
    if (!args.table_cache.empty()) {
        manifest.add_output(args.table_cache);
    }
    std::unique_ptr<qler::Decoder> decoder =
        qler::make_decoder(table, parse_decoder(args.decoder), cfg.p);

    qler::EstimateReport report =
        qler::run_estimation(table, *decoder, static_cast<std::uint32_t>(t), cfg);

    std::cout << "locations: " << report.num_locations
              << ", detectors: " << report.num_detectors << ", t = " << report.t << "\n"
              << "w_err = " << report.w_err << ", w_sat = " << report.w_sat << "\n"
              << "fit: mu = " << report.fit.model.mu << ", alpha = " << report.fit.model.alpha
              << ", beta = " << report.fit.model.beta << " (R2_y = " << report.fit.r2_y << ")\n"
              << "p_l = " << report.estimate.p_l << " over weights [" << report.estimate.w_min
              << ", " << report.estimate.w_max << "]\n"
              << "total shots: " << report.total_shots << ", total errors: "
              << report.total_errors << "\n";
    if (report.budget_exhausted) {
        std::cout << "warning: at least one subspace exhausted its shot budget; "
                     "estimate is partial\n";
    }

    std::string report_text = qler::to_json(report).dump(2) + "\n";
    if (args.out_path.empty()) {
        std::cout << report_text;
    } else {
        write_file(args.out_path, report_text);
        manifest.add_output(args.out_path);
    }
    if (!args.csv_path.empty()) {
        std::vector<qler::SubspaceStats> rows;
        for (const qler::SubspaceRecord& s : report.subspaces) {
            rows.push_back(s.stats);
        }
        std::ostringstream csv;
        qler::write_subspace_csv(csv, rows);
        write_file(args.csv_path, csv.str());
        manifest.add_output(args.csv_path);
    }
    if (!args.svg_path.empty()) {
        write_file(args.svg_path, render_estimate_svg(report));
        manifest.add_output(args.svg_path);
    }
    finish_manifest(manifest, args.manifest_path,
                    {args.out_path, args.csv_path, args.svg_path});
    return report.budget_exhausted ? kExitBudget : kExitOk;
}

// ---------------------------------------------------------------------------
// baseline
// ---------------------------------------------------------------------------

struct BaselineArgs {
    CircuitFlags circuit;
    std::string decoder = "auto";
    std::optional<std::uint64_t> seed;
    double p = 5e-4;
    int threads = 1;
    std::uint32_t batch = 1000;
    qler::BaselineStop stop;
    std::string out_path;
    std::string csv_path;
    std::string manifest_path;
};

int cmd_baseline(const BaselineArgs& args, ManifestWriter& manifest) {
    qler::require(args.p > 0 && args.p < 1, qler::ErrorKind::ConfigError,
                  "--p must satisfy 0 < p < 1");
    qler::SamplerConfig sampler;
    sampler.seed = resolve_seed(args.seed);
    sampler.threads = args.threads;
    sampler.batch = args.batch;
    manifest.set_seed(sampler.seed);
    manifest.set_threads(sampler.threads);

    qler::Circuit circuit = resolve_circuit(args.circuit, manifest);
    qler::PropagationTable table = qler::compile_circuit(circuit);
    std::unique_ptr<qler::Decoder> decoder =
        qler::make_decoder(table, parse_decoder(args.decoder), args.p);

    qler::BaselineResult result =
        qler::sample_baseline(table, *decoder, args.p, args.stop, sampler);

    std::cout << "shots: " << result.shots << ", errors: " << result.errors
              << ", p_l = " << result.p_l() << "\n"
              << "stop reason: " << qler::stop_reason_name(result.stop_reason) << "\n";

    std::string report_text =
        qler::to_json(result, args.p, sampler.seed, table.circuit_digest, table.num_locations)
            .dump(2) +
        "\n";
    if (args.out_path.empty()) {
        std::cout << report_text;
    } else {
        write_file(args.out_path, report_text);
        manifest.add_output(args.out_path);
    }
    if (!args.csv_path.empty()) {
        std::ostringstream csv;
        csv << "weight,shots\n";
        for (const auto& [w, count] : result.weight_histogram) {
            csv << w << ',' << count << '\n';
        }
        write_file(args.csv_path, csv.str());
        manifest.add_output(args.csv_path);
    }
    finish_manifest(manifest, args.manifest_path, {args.out_path, args.csv_path});
    return kExitOk;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
    std::string csv_path;
    std::string model = "ours";
    double t = 0;
    double gamma = 1.0;
    bool unweighted = false;
    std::string out_path;
    std::string svg_path;
    std::string manifest_path;
};

std::string render_fit_svg(const qler::FitResult& fit, const std::vector<qler::FitPoint>& points) {
    qler::SvgSeries series;
    series.label = "data (Y domain)";
    double w_lo = 0, w_hi = 0;
    bool first = true;
    for (const qler::FitPoint& pt : points) {
        double p = pt.p_hat();
        if (!(p > 0.0 && p < 0.5)) {
            continue;
        }
        if (fit.model.variant == qler::ModelVariant::PowerTail && !(pt.w > fit.model.t)) {
            continue;
        }
        series.points.push_back({pt.w, qler::y_transform(p)});
        w_lo = first ? pt.w : std::min(w_lo, pt.w);
        w_hi = first ? pt.w : std::max(w_hi, pt.w);
        first = false;
    }
    qler::SvgCurve curve;
    curve.label = std::string("fit (") + qler::model_variant_name(fit.model.variant) + ")";
    if (!first) {
        for (int i = 0; i <= 200; ++i) {
            double w = w_lo + (w_hi - w_lo) * i / 200.0;
            curve.points.push_back({w, qler::y_value(fit.model, w)});
        }
    }
    qler::SvgOptions options;
    options.title = "Y-domain fit";
    options.x_label = "fault weight w";
    options.y_label = "y = ln(1/(2p) - 1)";
    return qler::render_svg({curve}, {series}, options);
}

int cmd_fit(const FitArgs& args, ManifestWriter& manifest) {
    manifest.add_input(args.csv_path);
    std::istringstream csv(read_file(args.csv_path));
    std::vector<qler::SubspaceStats> rows = qler::read_subspace_csv(csv);
    std::vector<qler::FitPoint> points;
    for (const qler::SubspaceStats& row : rows) {
        points.push_back(qler::FitPoint{static_cast<double>(row.weight), row.shots, row.errors});
    }
    ModelChoice model = parse_model(args.model);
    qler::FitOptions options;
    options.weighted = !args.unweighted;
    qler::FitResult fit =
        qler::fit_scurve(points, model.variant, args.t, model.shape, options);

    json out{
        {"schema_version", "qler-fit-v1"},
        {"points", points.size()},
        {"fit", qler::to_json(fit)},
    };
    if (fit.model.variant == qler::ModelVariant::PowerTail) {
        out["w_sweet"] = qler::compute_w_sweet(fit.model, args.gamma);
        out["gamma"] = args.gamma;
    }
    qler::WSatResult w_sat = qler::compute_w_sat(fit.model);
    out["w_sat"] = {{"w", w_sat.w}, {"capped", w_sat.capped}};

    std::cout << "fit: mu = " << fit.model.mu << ", alpha = " << fit.model.alpha
              << ", beta = " << fit.model.beta << ", shape = " << fit.model.shape << "\n"
              << "usable points: " << fit.usable_points << ", R2_y = " << fit.r2_y
              << ", R2_p = " << fit.r2_p << "\n";

    std::string text = out.dump(2) + "\n";
    if (args.out_path.empty()) {
        std::cout << text;
    } else {
        write_file(args.out_path, text);
        manifest.add_output(args.out_path);
    }
    if (!args.svg_path.empty()) {
        write_file(args.svg_path, render_fit_svg(fit, points));
        manifest.add_output(args.svg_path);
    }
    finish_manifest(manifest, args.manifest_path, {args.out_path, args.svg_path});
    return kExitOk;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct ReportSummary {
    double p_l = 0;
    std::optional<std::pair<double, double>> ci95;  // Wilson interval when counts exist
};

ReportSummary summarize_report(const json& report, const std::string& path) {
    ReportSummary out;
    std::string schema = report.value("schema_version", "");
    if (schema == "qler-estimate-v1") {
        out.p_l = report.at("estimate").at("p_l").get<double>();
        return out;
    }
    if (schema == "qler-baseline-v1") {
        out.p_l = report.at("totals").at("p_l").get<double>();
        double shots = report.at("totals").at("shots").get<double>();
        double errors = report.at("totals").at("errors").get<double>();
        if (shots > 0) {
            // Wilson 95% interval.
            double z = 1.959963984540054;
            double phat = errors / shots;
            double denom = 1.0 + z * z / shots;
            double center = (phat + z * z / (2 * shots)) / denom;
            double half = z *
                          std::sqrt(phat * (1 - phat) / shots +
                                    z * z / (4 * shots * shots)) /
                          denom;
            out.ci95 = {center - half, center + half};
        }
        return out;
    }
    qler::fail(qler::ErrorKind::FormatError,
               path + " has unknown schema_version '" + schema + "'");
}

int cmd_compare(const std::string& path_a, const std::string& path_b, ManifestWriter& manifest) {
    manifest.add_input(path_a);
    manifest.add_input(path_b);
    ReportSummary a = summarize_report(json::parse(read_file(path_a)), path_a);
    ReportSummary b = summarize_report(json::parse(read_file(path_b)), path_b);

    std::cout << "a: " << a.p_l << " (" << path_a << ")\n";
    std::cout << "b: " << b.p_l << " (" << path_b << ")\n";
    if (b.p_l == 0) {
        std::cout << "baseline saw no errors; no relative error defined\n";
        return kExitOk;
    }
    double rel = (a.p_l - b.p_l) / b.p_l;
    std::ostringstream pct;
    pct.setf(std::ios::fixed);
    pct.precision(1);
    pct << 100.0 * rel;
    std::cout << "relative difference: " << pct.str() << "%\n";
    if (b.ci95) {
        bool inside = a.p_l >= b.ci95->first && a.p_l <= b.ci95->second;
        std::cout << "b 95% CI: [" << b.ci95->first << ", " << b.ci95->second << "], a "
                  << (inside ? "inside" : "outside") << "\n";
    } else if (a.ci95) {
        bool inside = b.p_l >= a.ci95->first && b.p_l <= a.ci95->second;
        std::cout << "a 95% CI: [" << a.ci95->first << ", " << a.ci95->second << "], b "
                  << (inside ? "inside" : "outside") << "\n";
    } else {
        std::cout << "confidence overlap: n/a (no counted report)\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// main
// ---------------------------------------------------------------------------

int dispatch(int argc, char** argv) {
    CLI::App app{"logical error rate estimation via fixed-weight fault injection"};
    app.set_version_flag("--version", std::string("qler ") + qler::kVersion);
    app.require_subcommand(1);
    ManifestWriter manifest(argc, argv);

    // gen
    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a memory-experiment circuit");
    add_circuit_flags(gen_cmd, gen.circuit, /*code_only=*/true);
    gen_cmd->add_option("--out", gen.out_path, "Write the circuit here (stdout if omitted)");
    gen_cmd->add_option("--manifest", gen.manifest_path,
                        "Manifest path (default: <out>.manifest.json)");

    // estimate
    EstimateArgs est;
    CLI::App* est_cmd =
        app.add_subcommand("estimate", "Staged fixed-weight estimation of the logical error rate");
    add_circuit_flags(est_cmd, est.circuit);
    est_cmd->add_option("--t", est.t_override,
                        "Fault-tolerant threshold override (default (distance-1)/2)");
    est_cmd->add_option("--p", est.config.p, "Physical per-location error rate")
        ->capture_default_str();
    est_cmd->add_option("--seed", est.seed, "RNG seed (generated and printed if omitted)");
    est.config.threads = default_threads();
    est_cmd->add_option("--threads", est.config.threads, "Worker threads")
        ->capture_default_str();
    est_cmd->add_option("--batch", est.config.batch, "Shots per stop-rule batch")
        ->capture_default_str();
    est_cmd
        ->add_option("--errors-per-subspace", est.config.errors_per_subspace,
                     "Sample each subspace until its errors exceed this")
        ->capture_default_str();
    est_cmd
        ->add_option("--max-shots-per-subspace", est.config.max_shots_per_subspace,
                     "Per-subspace shot budget")
        ->capture_default_str();
    est_cmd->add_option("--probe-shots", est.config.probe_shots, "Shots per search-stage probe")
        ->capture_default_str();
    est_cmd->add_option("--gamma", est.config.gamma, "Sweet-point strictness Gamma")
        ->capture_default_str();
    est_cmd->add_option("--max-subspaces", est.config.max_subspaces, "Planned-subspace budget")
        ->capture_default_str();
    est_cmd->add_option("--model", est.model, "S-curve family: ours | ibm | generalized:<s>")
        ->capture_default_str();
    est_cmd->add_option("--decoder", est.decoder, "Decoder: auto | lookup | matching")
        ->capture_default_str();
    est_cmd->add_flag("--unweighted", est.unweighted, "Unweighted Y-domain fit");
    est_cmd->add_option("--out", est.out_path, "Report JSON path (stdout if omitted)");
    est_cmd->add_option("--csv", est.csv_path, "Also write the per-subspace CSV here");
    est_cmd->add_option("--svg", est.svg_path, "Also write an S-curve SVG plot here");
    est_cmd->add_option("--manifest", est.manifest_path,
                        "Manifest path (default: <out>.manifest.json)");
    est_cmd->add_option("--table-cache", est.table_cache,
                        "Cache the compiled propagation table at this path");

    // baseline
    BaselineArgs base;
    CLI::App* base_cmd =
        app.add_subcommand("baseline", "Naive i.i.d. fault-injection sampling");
    add_circuit_flags(base_cmd, base.circuit);
    base_cmd->add_option("--p", base.p, "Physical per-location error rate")
        ->capture_default_str();
    base_cmd->add_option("--seed", base.seed, "RNG seed (generated and printed if omitted)");
    base.threads = default_threads();
    base_cmd->add_option("--threads", base.threads, "Worker threads")->capture_default_str();
    base_cmd->add_option("--batch", base.batch, "Shots per stop-rule batch")
        ->capture_default_str();
    base_cmd->add_option("--max-errors", base.stop.max_errors, "Stop after this many errors")
        ->capture_default_str();
    base_cmd->add_option("--max-shots", base.stop.max_shots, "Shot budget");
    base_cmd->add_option("--max-seconds", base.stop.max_seconds,
                         "Wall-clock budget (0 disables; not reproducible)");
    base_cmd->add_option("--decoder", base.decoder, "Decoder: auto | lookup | matching")
        ->capture_default_str();
    base_cmd->add_option("--out", base.out_path, "Report JSON path (stdout if omitted)");
    base_cmd->add_option("--csv", base.csv_path, "Weight-histogram CSV path");
    base_cmd->add_option("--manifest", base.manifest_path,
                         "Manifest path (default: <out>.manifest.json)");

    // fit
    FitArgs fit;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit an S-curve to a saved subspace CSV");
    fit_cmd->add_option("--csv", fit.csv_path, "Input CSV (weight,samples,errors,p_hat)")
        ->required();
    fit_cmd->add_option("--model", fit.model, "S-curve family: ours | ibm | generalized:<s>")
        ->capture_default_str();
    fit_cmd->add_option("--t", fit.t, "Fault-tolerant threshold t")->required();
    fit_cmd->add_option("--gamma", fit.gamma, "Gamma for the reported sweet point")
        ->capture_default_str();
    fit_cmd->add_flag("--unweighted", fit.unweighted, "Unweighted Y-domain fit");
    fit_cmd->add_option("--out", fit.out_path, "Fit JSON path (stdout if omitted)");
    fit_cmd->add_option("--svg", fit.svg_path, "Y-domain SVG plot path");
    fit_cmd->add_option("--manifest", fit.manifest_path,
                        "Manifest path (default: <out>.manifest.json)");

    // compare
    std::string cmp_a, cmp_b;
    CLI::App* cmp_cmd =
        app.add_subcommand("compare", "Relative difference between two report JSONs");
    cmp_cmd->add_option("a", cmp_a, "First report (typically the estimate)")->required();
    cmp_cmd->add_option("b", cmp_b, "Second report (typically the baseline reference)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (gen_cmd->parsed()) {
        return cmd_gen(gen, manifest);
    }
    if (est_cmd->parsed()) {
        return cmd_estimate(est, manifest);
    }
    if (base_cmd->parsed()) {
        return cmd_baseline(base, manifest);
    }
    if (fit_cmd->parsed()) {
        return cmd_fit(fit, manifest);
    }
    return cmd_compare(cmp_a, cmp_b, manifest);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const qler::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case qler::ErrorKind::IoError:
            case qler::ErrorKind::FormatError:
            case qler::ErrorKind::UnknownInstruction:
            case qler::ErrorKind::BadRecordReference:
            case qler::ErrorKind::ArityError:
                return kExitIo;
            case qler::ErrorKind::Internal:
                return kExitInternal;
            default:
                return kExitConfig;
        }
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
