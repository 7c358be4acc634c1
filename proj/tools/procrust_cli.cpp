// Command-line front end: single runs, parameter sweeps, closed-form
// verification, and standalone weak-value evaluation.
//
// Exit codes: 0 ok, 1 verification failure, 2 input validation,
// 3 physical-regime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <procrust/scenario.hpp>
#include <procrust/verify.hpp>

namespace {

using namespace procrust;

std::string fmt_human(const ResultValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>)
                return "-";
            else if constexpr (std::is_same_v<T, double>) {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.12g", v);
                return buf;
            } else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else
                return v;
        },
        value);
}

void print_record_table(const ResultRecord& rec) {
    std::size_t width = 0;
    for (const auto& [key, value] : rec.fields)
        width = std::max(width, key.size());
    for (const auto& [key, value] : rec.fields)
        std::cout << key << std::string(width - key.size() + 2, ' ') << fmt_human(value)
                  << "\n";
}

void print_rows_table(const std::vector<ResultRecord>& rows) {
    if (rows.empty())
        return;
    const std::size_t cols = rows.front().fields.size();
    std::vector<std::size_t> width(cols);
    for (std::size_t i = 0; i < cols; ++i)
        width[i] = rows.front().fields[i].first.size();
    std::vector<std::vector<std::string>> cells;
    for (const ResultRecord& row : rows) {
        std::vector<std::string> line;
        for (std::size_t i = 0; i < cols; ++i) {
            line.push_back(fmt_human(row.fields[i].second));
            width[i] = std::max(width[i], line.back().size());
        }
        cells.push_back(std::move(line));
    }
    for (std::size_t i = 0; i < cols; ++i)
        std::cout << (i ? "  " : "") << rows.front().fields[i].first
                  << std::string(width[i] - rows.front().fields[i].first.size(), ' ');
    std::cout << "\n";
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < cols; ++i)
            std::cout << (i ? "  " : "") << line[i]
                      << std::string(width[i] - line[i].size(), ' ');
        std::cout << "\n";
    }
}

std::string machine_text(const std::vector<ResultRecord>& records, bool single,
                         const std::string& format) {
    if (format == "csv")
        return records_to_csv(records);
    if (single)
        return record_to_json(records.front()).dump(2) + "\n";
    OrderedJson arr = OrderedJson::array();
    for (const ResultRecord& rec : records)
        arr.push_back(record_to_json(rec));
    return arr.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot write output file '" + path + "'");
    out << text;
    if (!out)
        throw ValidationError("short write to output file '" + path + "'");
}

struct IoOptions {
    std::string out_path;  // empty: stdout only
    std::string format;    // empty: human table on stdout
    int n_max = -1;        // -1: keep the scenario's value
    bool analytic = false;
};

void apply_overrides(Scenario& scenario, const IoOptions& io) {
    if (io.n_max >= 0)
        scenario.config.cutoff = Cutoff(io.n_max, scenario.config.cutoff.tail_tol);
    if (io.analytic)
        scenario.config.use_analytic_weak_value = true;
    scenario.config.validate();
}

// Emits to stdout (human table unless --format is given) and optionally to
// --out in the machine format (default json-like for single runs, csv for
// sweeps).
void emit(const std::vector<ResultRecord>& records, bool single, const IoOptions& io) {
    if (!io.format.empty()) {
        std::cout << machine_text(records, single, io.format);
    } else if (single) {
        print_record_table(records.front());
    } else {
        print_rows_table(records);
    }
    if (!io.out_path.empty()) {
        const std::string fmt = io.format.empty() ? (single ? "json-like" : "csv") : io.format;
        write_file(io.out_path, machine_text(records, single, fmt));
    }
}

int cmd_simulate(const std::string& file, const IoOptions& io) {
    Scenario scenario = load_scenario_file(file);
    apply_overrides(scenario, io);
    emit({run_single(scenario)}, true, io);
    return 0;
}

int cmd_sweep(const std::string& file, const IoOptions& io) {
    Scenario scenario = load_scenario_file(file);
    if (scenario.sweep.empty())
        throw ValidationError("sweep: scenario file has no sweep section");
    apply_overrides(scenario, io);
    emit(run_sweep(scenario), false, io);
    return 0;
}

int cmd_verify() {
    const std::vector<CheckResult> results = verification_suite();
    std::size_t width = 0;
    for (const CheckResult& r : results)
        width = std::max(width, r.name.size());
    int failed = 0;
    for (const CheckResult& r : results) {
        failed += r.passed ? 0 : 1;
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name
                  << std::string(width - r.name.size() + 2, ' ') << r.detail << "\n";
    }
    std::cout << (results.size() - std::size_t(failed)) << " of " << results.size()
              << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

struct WeakValueArgs {
    std::string scheme;
    double alpha = 0.0;
    std::optional<double> beta_mag;
    double beta_phase = 0.0;
    std::optional<double> x;
    double phi = 0.0;
    std::optional<double> r;
    std::string convention = "plus";
};

int cmd_weakvalue(const WeakValueArgs& args, const IoOptions& io) {
    AncillaSpec post = [&]() -> AncillaSpec {
        if (args.scheme == "coherent") {
            if (!args.beta_mag)
                throw ValidationError("weakvalue coherent: --beta-mag is required");
            return CoherentAncilla{*args.beta_mag, args.beta_phase};
        }
        if (args.scheme == "quadrature") {
            if (!args.x)
                throw ValidationError("weakvalue quadrature: --x is required");
            const QuadraturePhase conv = args.convention == "minus" ? QuadraturePhase::minus
                                                                    : QuadraturePhase::plus;
            return QuadratureAncilla{*args.x, args.phi, conv};
        }
        if (!args.r)
            throw ValidationError("weakvalue squeezed: --r is required");
        return SqueezedAncilla{*args.r, args.phi};
    }();

    const AncillaSpec pre = CoherentAncilla{args.alpha, 0.0};
    Cutoff cutoff = io.n_max >= 0 ? Cutoff(io.n_max)
                                  : fitted_cutoff(pre, 1e-12); // tail-guard default
    if (io.n_max < 0 && !std::holds_alternative<QuadratureAncilla>(post))
        cutoff = Cutoff(std::max(cutoff.n_max, fitted_cutoff(post, 1e-12).n_max),
                        cutoff.tail_tol);

    const FockVector ket = make_pre_state(pre, cutoff);
    const WeakValue numeric =
        weak_value_numeric(ket, PostSelector::from_spec(post, cutoff));
    const Complex closed = number_weak_value_closed_form(post, args.alpha);

    ResultRecord rec;
    rec.add("scheme", std::string(scheme_name(post)));
    rec.add("alpha", args.alpha);
    rec.add("n_max", double(cutoff.n_max));
    rec.add("weak_value_re", numeric.value.real());
    rec.add("weak_value_im", numeric.value.imag());
    rec.add("closed_form_re", closed.real());
    rec.add("closed_form_im", closed.imag());
    rec.add("overlap_mag", numeric.overlap_mag);
    // the concentration direction for any positive coupling
    rec.add("success_condition_met", numeric.value.imag() > 0.0);
    emit({rec}, true, io);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak-measurement entanglement concentration toolkit"};
    app.require_subcommand(1);

    IoOptions io;
    const auto add_io = [&](CLI::App* cmd, bool with_out) {
        if (with_out)
            cmd->add_option("--out", io.out_path, "write machine-format output to this file");
        cmd->add_option("--format", io.format, "machine format for stdout")
            ->check(CLI::IsMember({"csv", "json-like"}));
        cmd->add_option("--n-max", io.n_max, "override the Fock-space cutoff")
            ->check(CLI::NonNegativeNumber);
    };

    std::string sim_file;
    CLI::App* sim = app.add_subcommand("simulate", "run one scenario file");
    sim->add_option("file", sim_file, "scenario file (JSON)")->required();
    add_io(sim, true);
    sim->add_flag("--analytic-weak-value", io.analytic,
                  "drive the prediction with the closed-form weak value");

    std::string sweep_file;
    CLI::App* swp = app.add_subcommand("sweep", "run the scenario's parameter sweep");
    swp->add_option("file", sweep_file, "scenario file (JSON) with a sweep section")->required();
    add_io(swp, true);
    swp->add_flag("--analytic-weak-value", io.analytic,
                  "drive the prediction with the closed-form weak value");

    CLI::App* ver = app.add_subcommand("verify", "run the closed-form verification suite");

    WeakValueArgs wv;
    CLI::App* wvc = app.add_subcommand("weakvalue",
                                       "weak value of the photon number for one scheme");
    wvc->add_option("scheme", wv.scheme, "post-selection scheme")
        ->required()
        ->check(CLI::IsMember({"coherent", "quadrature", "squeezed"}));
    wvc->add_option("--alpha", wv.alpha, "pre-selected coherent amplitude (> 0)")->required();
    wvc->add_option("--beta-mag", wv.beta_mag, "post-selection coherent magnitude");
    wvc->add_option("--beta-phase", wv.beta_phase, "post-selection coherent phase (radians)");
    wvc->add_option("--x", wv.x, "quadrature outcome");
    wvc->add_option("--phi", wv.phi, "quadrature or squeezing phase (radians)");
    wvc->add_option("--r", wv.r, "squeezing strength");
    wvc->add_option("--convention", wv.convention, "quadrature phase convention")
        ->check(CLI::IsMember({"plus", "minus"}));
    add_io(wvc, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // bad arguments are input-validation failures
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_file, io);
        if (swp->parsed())
            return cmd_sweep(sweep_file, io);
        if (ver->parsed())
            return cmd_verify();
        return cmd_weakvalue(wv, io);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const PhysicalRegimeError& e) {
        std::cerr << "physical-regime error: " << e.what() << "\n";
        return 3;
    }
}
