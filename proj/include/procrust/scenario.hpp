#pragma once

// Scenario files in, result records out.  A scenario is a JSON document
// with four fixed sections (protocol, ancilla, numerics, options) plus an
// optional sweep block; unknown keys anywhere are rejected so that typos
// fail loudly instead of silently running defaults.  Results flatten into
// ordered key/value records where every value is a finite number, a
// boolean, a short token string, or an explicit absent marker.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "concentration.hpp"
#include "errors.hpp"
#include "hilbert.hpp"

namespace procrust {

using OrderedJson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// result records

// monostate encodes "absent": serialized as null in JSON and NA in CSV.
using ResultValue = std::variant<std::monostate, double, bool, std::string>;

struct ResultRecord {
    std::vector<std::pair<std::string, ResultValue>> fields;

    void add(std::string key, ResultValue value) {
        fields.emplace_back(std::move(key), std::move(value));
    }
    void add_optional(std::string key, std::optional<double> value) {
        if (value)
            fields.emplace_back(std::move(key), *value);
        else
            fields.emplace_back(std::move(key), std::monostate{});
    }
    const ResultValue* find(const std::string& key) const {
        for (const auto& [k, v] : fields)
            if (k == key)
                return &v;
        return nullptr;
    }

    bool operator==(const ResultRecord&) const = default;
};

namespace detail {

// Shortest representation that parses back to the same double.
inline std::string round_trip_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace detail

inline OrderedJson record_to_json(const ResultRecord& record) {
    OrderedJson doc = OrderedJson::object();
    for (const auto& [key, value] : record.fields) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::monostate>)
                    doc[key] = nullptr;
                else
                    doc[key] = v;
            },
            value);
    }
    return doc;
}

inline ResultRecord record_from_json(const OrderedJson& doc) {
    if (!doc.is_object())
        throw ValidationError("record_from_json: expected an object");
    ResultRecord record;
    for (const auto& [key, value] : doc.items()) {
        if (value.is_null())
            record.add(key, std::monostate{});
        else if (value.is_boolean())
            record.add(key, value.get<bool>());
        else if (value.is_number())
            record.add(key, value.get<double>());
        else if (value.is_string())
            record.add(key, value.get<std::string>());
        else
            throw ValidationError("record_from_json: field '" + key +
                                  "' is not a scalar");
    }
    return record;
}

// CSV with a header row.  Every record must share the header's key order.
inline std::string records_to_csv(const std::vector<ResultRecord>& records) {
    if (records.empty())
        return "";
    std::ostringstream out;
    const ResultRecord& head = records.front();
    for (std::size_t i = 0; i < head.fields.size(); ++i)
        out << (i ? "," : "") << head.fields[i].first;
    out << "\n";
    for (const ResultRecord& rec : records) {
        if (rec.fields.size() != head.fields.size())
            throw ValidationError("records_to_csv: ragged record set");
        for (std::size_t i = 0; i < rec.fields.size(); ++i) {
            if (rec.fields[i].first != head.fields[i].first)
                throw ValidationError("records_to_csv: inconsistent field order");
            if (i)
                out << ",";
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>)
                        out << "NA";
                    else if constexpr (std::is_same_v<T, double>)
                        out << detail::round_trip_double(v);
                    else if constexpr (std::is_same_v<T, bool>)
                        out << (v ? "true" : "false");
                    else
                        out << v;
                },
                rec.fields[i].second);
        }
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// scenario parsing

struct SweepAxis {
    std::string parameter;
    double from;
    double to;
    int steps; // grid points, endpoints included
};

struct Scenario {
    ProtocolConfig config;
    std::optional<double> acceptance_window; // quadrature posts only
    std::vector<SweepAxis> sweep;            // empty: single run
};

namespace detail {

inline void expect_keys(const OrderedJson& obj, const std::string& where,
                        std::initializer_list<const char*> allowed) {
    if (!obj.is_object())
        throw ValidationError(where + ": expected an object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k)
                ok = true;
        if (!ok)
            throw ValidationError(where + ": unknown key '" + item.key() + "'");
    }
}

inline const OrderedJson& need(const OrderedJson& obj, const std::string& where,
                               const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw ValidationError(where + ": missing required key '" + key + "'");
    return *it;
}

inline double need_number(const OrderedJson& obj, const std::string& where, const char* key) {
    const OrderedJson& v = need(obj, where, key);
    if (!v.is_number())
        throw ValidationError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline double number_or(const OrderedJson& obj, const std::string& where, const char* key,
                        double fallback) {
    const auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_number())
        throw ValidationError(where + "." + key + ": expected a number");
    return it->get<double>();
}

inline int need_int(const OrderedJson& obj, const std::string& where, const char* key) {
    const OrderedJson& v = need(obj, where, key);
    if (!v.is_number_integer())
        throw ValidationError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

inline Complex parse_amplitude(const OrderedJson& v, const std::string& where) {
    if (v.is_number())
        return Complex{v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return Complex{v[0].get<double>(), v[1].get<double>()};
    throw ValidationError(where + ": amplitudes must be numbers or [re, im] pairs");
}

inline QuadraturePhase parse_convention(const OrderedJson& obj, const std::string& where) {
    const auto it = obj.find("convention");
    if (it == obj.end())
        return QuadraturePhase::plus;
    if (!it->is_string())
        throw ValidationError(where + ".convention: expected \"plus\" or \"minus\"");
    const std::string s = it->get<std::string>();
    if (s == "plus")
        return QuadraturePhase::plus;
    if (s == "minus")
        return QuadraturePhase::minus;
    throw ValidationError(where + ".convention: expected \"plus\" or \"minus\", got '" + s +
                          "'");
}

inline AncillaSpec parse_ancilla(const OrderedJson& obj, const std::string& where,
                                 bool is_post) {
    if (!obj.is_object())
        throw ValidationError(where + ": expected an object");
    const OrderedJson& type = need(obj, where, "type");
    if (!type.is_string())
        throw ValidationError(where + ".type: expected a string");
    const std::string t = type.get<std::string>();

    if (t == "coherent") {
        if (is_post) {
            expect_keys(obj, where, {"type", "beta_mag", "beta_phase"});
            return CoherentAncilla{need_number(obj, where, "beta_mag"),
                                   number_or(obj, where, "beta_phase", 0.0)};
        }
        expect_keys(obj, where, {"type", "alpha"});
        return CoherentAncilla{need_number(obj, where, "alpha"), 0.0};
    }
    if (t == "squeezed") {
        expect_keys(obj, where, {"type", "r", "phi"});
        return SqueezedAncilla{need_number(obj, where, "r"),
                               number_or(obj, where, "phi", 0.0)};
    }
    if (t == "quadrature") {
        if (!is_post)
            throw ValidationError(where + ": quadrature functionals cannot be prepared");
        expect_keys(obj, where, {"type", "x", "phi", "convention"});
        return QuadratureAncilla{need_number(obj, where, "x"),
                                 number_or(obj, where, "phi", 0.0),
                                 parse_convention(obj, where)};
    }
    if (t == "fock") {
        expect_keys(obj, where, {"type", "amplitudes"});
        const OrderedJson& amps = need(obj, where, "amplitudes");
        if (!amps.is_array() || amps.empty())
            throw ValidationError(where + ".amplitudes: expected a non-empty array");
        FockAncilla f;
        for (const auto& a : amps)
            f.amplitudes.push_back(parse_amplitude(a, where + ".amplitudes"));
        return f;
    }
    throw ValidationError(where + ".type: unknown scheme '" + t + "'");
}

} // namespace detail

// Parameter paths a sweep may vary.  Scheme-specific paths must match the
// configured scheme.
inline void apply_parameter(ProtocolConfig& config, const std::string& path, double value) {
    if (path == "lambda") {
        config.lambda = value;
        return;
    }
    if (path == "kappa_T") {
        config.kappa_T = value;
        return;
    }
    const auto fail = [&]() -> void {
        throw ValidationError("sweep parameter '" + path +
                              "' does not name a sweepable parameter of this scenario");
    };
    if (path == "pre.alpha") {
        if (auto* c = std::get_if<CoherentAncilla>(&config.pre)) {
            c->magnitude = value;
            return;
        }
        fail();
    }
    if (path == "pre.r") {
        if (auto* s = std::get_if<SqueezedAncilla>(&config.pre)) {
            s->r = value;
            return;
        }
        fail();
    }
    if (path == "pre.phi") {
        if (auto* s = std::get_if<SqueezedAncilla>(&config.pre)) {
            s->phi = value;
            return;
        }
        fail();
    }
    if (path == "post.beta_mag") {
        if (auto* c = std::get_if<CoherentAncilla>(&config.post)) {
            c->magnitude = value;
            return;
        }
        fail();
    }
    if (path == "post.beta_phase") {
        if (auto* c = std::get_if<CoherentAncilla>(&config.post)) {
            c->phase = value;
            return;
        }
        fail();
    }
    if (path == "post.r") {
        if (auto* s = std::get_if<SqueezedAncilla>(&config.post)) {
            s->r = value;
            return;
        }
        fail();
    }
    if (path == "post.phi") {
        if (auto* s = std::get_if<SqueezedAncilla>(&config.post)) {
            s->phi = value;
            return;
        }
        if (auto* q = std::get_if<QuadratureAncilla>(&config.post)) {
            q->phi = value;
            return;
        }
        fail();
    }
    if (path == "post.x") {
        if (auto* q = std::get_if<QuadratureAncilla>(&config.post)) {
            q->x = value;
            return;
        }
        fail();
    }
    fail();
}

inline Scenario parse_scenario(const OrderedJson& doc) {
    detail::expect_keys(doc, "scenario",
                        {"protocol", "ancilla", "numerics", "options", "sweep"});

    const OrderedJson& protocol = detail::need(doc, "scenario", "protocol");
    detail::expect_keys(protocol, "protocol", {"lambda", "kappa_T"});
    const double lambda = detail::need_number(protocol, "protocol", "lambda");
    const double kappa = detail::need_number(protocol, "protocol", "kappa_T");

    const OrderedJson& ancilla = detail::need(doc, "scenario", "ancilla");
    detail::expect_keys(ancilla, "ancilla", {"pre", "post"});
    AncillaSpec pre = detail::parse_ancilla(detail::need(ancilla, "ancilla", "pre"),
                                            "ancilla.pre", false);
    AncillaSpec post = detail::parse_ancilla(detail::need(ancilla, "ancilla", "post"),
                                             "ancilla.post", true);

    const OrderedJson& numerics = detail::need(doc, "scenario", "numerics");
    detail::expect_keys(numerics, "numerics",
                        {"n_max", "tail_tol", "ortho_threshold", "acceptance_window"});
    const int n_max = detail::need_int(numerics, "numerics", "n_max");
    const double tail_tol = detail::number_or(numerics, "numerics", "tail_tol", 1e-10);
    const double ortho = detail::number_or(numerics, "numerics", "ortho_threshold", 1e-8);

    bool analytic = false;
    if (const auto it = doc.find("options"); it != doc.end()) {
        detail::expect_keys(*it, "options", {"analytic_weak_value"});
        if (const auto flag = it->find("analytic_weak_value"); flag != it->end()) {
            if (!flag->is_boolean())
                throw ValidationError("options.analytic_weak_value: expected a boolean");
            analytic = flag->get<bool>();
        }
    }

    Scenario scenario{
        ProtocolConfig{lambda, kappa, std::move(pre), std::move(post), Cutoff(n_max, tail_tol),
                       ortho, analytic},
        std::nullopt,
        {}};

    if (const auto it = numerics.find("acceptance_window"); it != numerics.end()) {
        if (!it->is_number() || !(it->get<double>() > 0.0))
            throw ValidationError("numerics.acceptance_window: expected a positive number");
        if (!std::holds_alternative<QuadratureAncilla>(scenario.config.post))
            throw ValidationError(
                "numerics.acceptance_window: only meaningful for a quadrature post-selection");
        scenario.acceptance_window = it->get<double>();
    }

    if (const auto it = doc.find("sweep"); it != doc.end()) {
        detail::expect_keys(*it, "sweep", {"axes"});
        const OrderedJson& axes = detail::need(*it, "sweep", "axes");
        if (!axes.is_array() || axes.empty() || axes.size() > 2)
            throw ValidationError("sweep.axes: expected an array of 1 or 2 axes");
        for (const auto& axis : axes) {
            detail::expect_keys(axis, "sweep.axes[]", {"parameter", "from", "to", "steps"});
            const OrderedJson& name = detail::need(axis, "sweep.axes[]", "parameter");
            if (!name.is_string())
                throw ValidationError("sweep.axes[].parameter: expected a string");
            SweepAxis sa{name.get<std::string>(),
                         detail::need_number(axis, "sweep.axes[]", "from"),
                         detail::need_number(axis, "sweep.axes[]", "to"),
                         detail::need_int(axis, "sweep.axes[]", "steps")};
            if (sa.steps < 2)
                throw ValidationError("sweep.axes[].steps: need at least 2 grid points");
            // reject unknown parameter paths before any run starts
            ProtocolConfig probe = scenario.config;
            apply_parameter(probe, sa.parameter, sa.from);
            scenario.sweep.push_back(std::move(sa));
        }
    }

    scenario.config.validate();
    return scenario;
}

inline Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open scenario file '" + path + "'");
    OrderedJson doc;
    try {
        doc = OrderedJson::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_scenario(doc);
}

// ---------------------------------------------------------------------------
// flattening

// Full record for a single run: configuration echo plus every observable.
inline ResultRecord flatten_result(const ProtocolConfig& config, const ConcentrationResult& res,
                                   std::optional<double> windowed_success = std::nullopt) {
    ResultRecord rec;
    rec.add("lambda", config.lambda);
    rec.add("kappa_T", config.kappa_T);
    rec.add("pre_scheme", std::string(scheme_name(config.pre)));
    rec.add("post_scheme", std::string(scheme_name(config.post)));
    rec.add("n_max", double(config.cutoff.n_max));
    rec.add("tail_tol", config.cutoff.tail_tol);
    rec.add("ortho_threshold", config.ortho_threshold);
    rec.add("analytic_weak_value", config.use_analytic_weak_value);

    rec.add("weak_value_re", res.weak_numeric.value.real());
    rec.add("weak_value_im", res.weak_numeric.value.imag());
    rec.add("overlap_mag", res.weak_numeric.overlap_mag);
    if (res.weak_analytic) {
        rec.add("weak_value_analytic_re", res.weak_analytic->real());
        rec.add("weak_value_analytic_im", res.weak_analytic->imag());
    } else {
        rec.add("weak_value_analytic_re", std::monostate{});
        rec.add("weak_value_analytic_im", std::monostate{});
    }
    rec.add("weak_value_used_re", res.weak_used.real());
    rec.add("weak_value_used_im", res.weak_used.imag());

    rec.add("lambda_prime_re", res.lambda_prime.real());
    rec.add("lambda_prime_im", res.lambda_prime.imag());
    rec.add("lambda_prime_mag", std::abs(res.lambda_prime));

    rec.add("success", res.success);
    rec.add("success_prob", res.exact.success_prob);
    rec.add("is_density", res.exact.is_density);
    rec.add_optional("success_prob_windowed", windowed_success);

    rec.add("entropy_in", res.verdict.entropy_in);
    rec.add("entropy_out", res.verdict.entropy_out);
    rec.add("entropy_gain", res.verdict.entropy_out - res.verdict.entropy_in);
    rec.add("purity_in", res.verdict.purity_in);
    rec.add("purity_out", res.verdict.purity_out);
    rec.add("mean_photons_in", res.verdict.mean_photons_in);
    rec.add("mean_photons_out", res.verdict.mean_photons_out);
    rec.add("majorized", res.verdict.majorized);

    rec.add_optional("fidelity", res.fidelity);
    if (res.predicted_failure)
        rec.add("predicted_failure", *res.predicted_failure);
    else
        rec.add("predicted_failure", std::monostate{});

    rec.add("max_residual", res.weakness.max_abs_damped);
    rec.add("argmax_residual", double(res.weakness.argmax_damped));
    rec.add("max_residual_undamped", res.weakness.max_abs);
    return rec;
}

// Compact per-grid-point row for sweeps.
inline ResultRecord sweep_row(const std::vector<std::pair<std::string, double>>& axis_values,
                              const ConcentrationResult* res, bool is_density,
                              const std::string& note = "") {
    ResultRecord rec;
    for (const auto& [name, value] : axis_values)
        rec.add(name, value);
    if (res) {
        rec.add("img_n_w", res->weak_used.imag());
        rec.add("success", res->success);
        rec.add("success_prob", res->exact.success_prob);
        rec.add("entropy_gain", res->verdict.entropy_out - res->verdict.entropy_in);
        rec.add_optional("fidelity", res->fidelity);
        rec.add("max_residual", res->weakness.max_abs_damped);
    } else {
        rec.add("img_n_w", std::monostate{});
        rec.add("success", false);
        rec.add("success_prob", std::monostate{});
        rec.add("entropy_gain", std::monostate{});
        rec.add("fidelity", std::monostate{});
        rec.add("max_residual", std::monostate{});
    }
    rec.add("is_density", is_density);
    if (note.empty())
        rec.add("note", std::monostate{});
    else
        rec.add("note", note);
    return rec;
}

inline ResultRecord run_single(const Scenario& scenario) {
    const ConcentrationResult res = run(scenario.config);
    std::optional<double> windowed;
    if (scenario.acceptance_window)
        windowed = windowed_success_probability(scenario.config, *scenario.acceptance_window);
    return flatten_result(scenario.config, res, windowed);
}

// Grid execution in row-major axis order.  Physical-regime failures at a
// grid point produce an absent-valued row with a note; validation failures
// abort the sweep.
inline std::vector<ResultRecord> run_sweep(const Scenario& scenario) {
    if (scenario.sweep.empty())
        throw ValidationError("run_sweep: scenario has no sweep block");
    const bool is_density = std::holds_alternative<QuadratureAncilla>(scenario.config.post);

    std::vector<std::vector<double>> grids;
    for (const SweepAxis& axis : scenario.sweep) {
        std::vector<double> g(static_cast<std::size_t>(axis.steps));
        for (int k = 0; k < axis.steps; ++k)
            g[static_cast<std::size_t>(k)] =
                axis.from + (axis.to - axis.from) * double(k) / double(axis.steps - 1);
        grids.push_back(std::move(g));
    }

    std::vector<ResultRecord> rows;
    const std::size_t outer = grids[0].size();
    const std::size_t inner = grids.size() == 2 ? grids[1].size() : 1;
    for (std::size_t i = 0; i < outer; ++i) {
        for (std::size_t j = 0; j < inner; ++j) {
            ProtocolConfig config = scenario.config;
            std::vector<std::pair<std::string, double>> axis_values;
            apply_parameter(config, scenario.sweep[0].parameter, grids[0][i]);
            axis_values.emplace_back(scenario.sweep[0].parameter, grids[0][i]);
            if (grids.size() == 2) {
                apply_parameter(config, scenario.sweep[1].parameter, grids[1][j]);
                axis_values.emplace_back(scenario.sweep[1].parameter, grids[1][j]);
            }
            try {
                const ConcentrationResult res = run(config);
                rows.push_back(sweep_row(axis_values, &res, is_density));
            } catch (const PhysicalRegimeError& e) {
                rows.push_back(sweep_row(axis_values, nullptr, is_density, e.what()));
            }
        }
    }
    return rows;
}

} // namespace procrust
