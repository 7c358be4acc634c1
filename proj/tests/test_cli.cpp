// End-to-end checks of the command-line binary: exit codes, output
// formats, determinism.  argv[1] = path to the binary, argv[2] = directory
// with the sample scenario files.

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

namespace {

int g_failures = 0;

void check(bool ok, const std::string& label) {
    std::cout << (ok ? "ok   " : "FAIL ") << label << "\n";
    if (!ok)
        ++g_failures;
}

struct RunResult {
    int exit_code;
    std::string output; // stdout + stderr
};

RunResult run_cmd(const std::string& cmd) {
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    if (!pipe)
        return {-1, "popen failed"};
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        out.append(buf.data(), n);
    const int status = pclose(pipe);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, out};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

std::string scenario_with(const std::string& lambda, const std::string& extra = "") {
    return "{\"protocol\": {\"lambda\": " + lambda +
           ", \"kappa_T\": 0.05}, \"ancilla\": {\"pre\": {\"type\": \"coherent\", "
           "\"alpha\": 1.0}, \"post\": {\"type\": \"coherent\", \"beta_mag\": 1.0, "
           "\"beta_phase\": 4.71238898038469}}, \"numerics\": {\"n_max\": 60}" +
           extra + "}";
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: test_cli <binary> <scenarios_dir>\n";
        return 2;
    }
    const std::string bin = argv[1];
    const std::string dir = argv[2];

    // ---- single runs ----
    {
        const RunResult r =
            run_cmd(bin + " simulate " + dir + "/baseline_coherent.json --format json-like");
        check(r.exit_code == 0, "baseline simulate exits 0");
        const auto doc = nlohmann::json::parse(r.output, nullptr, false);
        check(!doc.is_discarded(), "baseline simulate emits valid JSON");
        if (!doc.is_discarded()) {
            check(doc.at("success").get<bool>(), "baseline run satisfies the success condition");
            check(doc.at("majorized").get<bool>(), "baseline output majorized by input");
            check(std::abs(doc.at("success_prob").get<double>() - 0.14024282935645346) < 1e-12,
                  "baseline success probability reproduced");
            check(doc.at("entropy_gain").get<double>() > 0.09, "baseline entropy gain positive");
        }
    }
    {
        const RunResult r =
            run_cmd(bin + " simulate " + dir + "/violated_phase.json --format json-like");
        check(r.exit_code == 0, "violated-condition simulate still exits 0");
        const auto doc = nlohmann::json::parse(r.output, nullptr, false);
        if (!doc.is_discarded()) {
            check(!doc.at("success").get<bool>(), "violated run reports no success");
            check(doc.at("entropy_gain").get<double>() < 0.0, "violated run dilutes entanglement");
            check(!doc.at("majorized").get<bool>(), "violated output not majorized");
        }
    }
    {
        write_file("cli_tmp_zero_coupling.json", scenario_with("0.5").c_str());
        // kappa_T = 0: the filter is the identity, nothing changes
        std::string text = scenario_with("0.5");
        const std::string from = "\"kappa_T\": 0.05";
        text.replace(text.find(from), from.size(), "\"kappa_T\": 0.0");
        write_file("cli_tmp_zero_coupling.json", text);
        const RunResult r =
            run_cmd(bin + " simulate cli_tmp_zero_coupling.json --format json-like");
        check(r.exit_code == 0, "zero-coupling simulate exits 0");
        const auto doc = nlohmann::json::parse(r.output, nullptr, false);
        if (!doc.is_discarded()) {
            check(std::abs(doc.at("entropy_gain").get<double>()) < 1e-12,
                  "zero coupling leaves the entropy unchanged");
            check(std::abs(doc.at("fidelity").get<double>() - 1.0) < 1e-12,
                  "zero coupling has unit prediction fidelity");
            check(!doc.at("success").get<bool>(), "zero coupling cannot concentrate");
        }
        std::remove("cli_tmp_zero_coupling.json");
    }

    // ---- validation failures: exit 2 ----
    {
        write_file("cli_tmp_bad_lambda.json", scenario_with("1.0"));
        const RunResult r = run_cmd(bin + " simulate cli_tmp_bad_lambda.json");
        check(r.exit_code == 2, "lambda = 1.0 rejected with exit 2");
        check(r.output.find("lambda") != std::string::npos,
              "rejection message names the offending parameter");
        std::remove("cli_tmp_bad_lambda.json");
    }
    {
        write_file("cli_tmp_unknown_key.json",
                   scenario_with("0.5", ", \"plotting\": {\"color\": \"red\"}"));
        const RunResult r = run_cmd(bin + " simulate cli_tmp_unknown_key.json");
        check(r.exit_code == 2, "unknown scenario section rejected with exit 2");
        std::remove("cli_tmp_unknown_key.json");
    }
    {
        write_file("cli_tmp_garbage.json", "{ this is not json");
        const RunResult r = run_cmd(bin + " simulate cli_tmp_garbage.json");
        check(r.exit_code == 2, "malformed JSON rejected with exit 2");
        std::remove("cli_tmp_garbage.json");
    }
    {
        const RunResult r = run_cmd(bin + " simulate " + dir + "/does_not_exist.json");
        check(r.exit_code == 2, "missing scenario file rejected with exit 2");
    }
    {
        const RunResult r = run_cmd(bin + " sweep " + dir + "/baseline_coherent.json");
        check(r.exit_code == 2, "sweep without a sweep section rejected with exit 2");
    }
    {
        const RunResult r = run_cmd(bin + " weakvalue quadrature --alpha 1.0");
        check(r.exit_code == 2, "weakvalue without required scheme argument exits 2");
    }
    {
        const RunResult r = run_cmd(bin + " nonsense");
        check(r.exit_code == 2, "unknown subcommand exits 2");
    }

    // ---- physical-regime failures: exit 3 ----
    {
        write_file("cli_tmp_orthogonal.json",
                   "{\"protocol\": {\"lambda\": 0.001, \"kappa_T\": 0.05}, "
                   "\"ancilla\": {\"pre\": {\"type\": \"fock\", \"amplitudes\": [1.0]}, "
                   "\"post\": {\"type\": \"fock\", \"amplitudes\": [0.0, 1.0]}}, "
                   "\"numerics\": {\"n_max\": 30}}");
        const RunResult r = run_cmd(bin + " simulate cli_tmp_orthogonal.json");
        check(r.exit_code == 3, "orthogonal post-selection exits 3");
        std::remove("cli_tmp_orthogonal.json");
    }

    // ---- sweeps ----
    {
        const RunResult r =
            run_cmd(bin + " sweep " + dir + "/coherent_phase_sweep.json --format csv");
        check(r.exit_code == 0, "phase sweep exits 0");
        std::istringstream lines(r.output);
        std::string header;
        std::getline(lines, header);
        check(header.rfind("post.beta_phase,", 0) == 0, "sweep csv header starts with the axis");
        int rows = 0, agree = 0;
        for (std::string line; std::getline(lines, line);) {
            ++rows;
            std::istringstream cells(line);
            std::string phase_s, im_s, success_s;
            std::getline(cells, phase_s, ',');
            std::getline(cells, im_s, ',');
            std::getline(cells, success_s, ',');
            const double phase = std::stod(phase_s);
            const bool expect = std::sin(phase) < 0.0; // success on (pi, 2 pi)
            if ((success_s == "true") == expect)
                ++agree;
        }
        check(rows == 25, "phase sweep emits one row per grid point");
        check(agree == rows, "success flag matches the (pi, 2 pi) phase window on every row");
    }
    {
        const RunResult a =
            run_cmd(bin + " sweep " + dir + "/quadrature_x_sweep.json --format csv");
        const RunResult b =
            run_cmd(bin + " sweep " + dir + "/quadrature_x_sweep.json --format csv");
        check(a.exit_code == 0 && b.exit_code == 0, "quadrature sweep exits 0");
        check(a.output == b.output, "repeated sweeps are byte-identical");
        check(a.output.find("true") != std::string::npos &&
                  a.output.find("false") != std::string::npos,
              "quadrature sweep crosses the success threshold");
    }
    {
        // --out writes exactly the bytes that --format prints
        const RunResult direct =
            run_cmd(bin + " sweep " + dir + "/coupling_sweep.json --format csv");
        const RunResult with_out = run_cmd(bin + " sweep " + dir +
                                           "/coupling_sweep.json --out cli_tmp_out.csv");
        check(direct.exit_code == 0 && with_out.exit_code == 0, "file output path exits 0");
        std::ifstream f("cli_tmp_out.csv");
        std::stringstream written;
        written << f.rdbuf();
        check(written.str() == direct.output, "--out file matches --format stdout bytes");
        std::remove("cli_tmp_out.csv");
    }

    // ---- weakvalue ----
    {
        const RunResult r = run_cmd(bin +
                                    " weakvalue coherent --alpha 1.0 --beta-mag 1.0 "
                                    "--beta-phase 4.71238898038469 --format json-like");
        check(r.exit_code == 0, "weakvalue coherent exits 0");
        const auto doc = nlohmann::json::parse(r.output, nullptr, false);
        if (!doc.is_discarded()) {
            check(std::abs(doc.at("weak_value_im").get<double>() - 1.0) < 1e-9,
                  "weakvalue matches the closed-form imaginary part");
            check(doc.at("success_condition_met").get<bool>(),
                  "weakvalue reports the concentration direction");
        }
    }

    // ---- verify ----
    {
        const RunResult r = run_cmd(bin + " verify");
        const bool any_fail = r.output.find("FAIL") != std::string::npos;
        check(r.exit_code == (any_fail ? 1 : 0),
              "verify exit code agrees with its printed pass/fail lines");
        check(r.output.find("checks passed") != std::string::npos,
              "verify prints a summary line");
        const RunResult again = run_cmd(bin + " verify");
        check(r.output == again.output, "verify output is deterministic");
    }

    std::cout << (g_failures == 0 ? "all cli checks passed\n"
                                  : std::to_string(g_failures) + " cli checks failed\n");
    return g_failures == 0 ? 0 : 1;
}
