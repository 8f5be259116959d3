// Command-line front end over the C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "apos.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitUsage = 2;

struct UsageFailure {
    std::string message;
};

Json parse_params(const std::vector<std::string>& items) {
    Json params = Json::object();
    for (const std::string& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageFailure{"--param expects key=value, got '" + item + "'"};
        const std::string key = item.substr(0, eq);
        const std::string text = item.substr(eq + 1);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size()) throw UsageFailure{"--param " + key + ": '" + text + "' is not a number"};
        params[key] = value;
    }
    return params;
}

std::vector<double> parse_rect(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        std::size_t used = 0;
        try {
            out.push_back(std::stod(piece, &used));
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != piece.size()) throw UsageFailure{"--rect: '" + piece + "' is not a number"};
    }
    if (out.size() != 4) throw UsageFailure{"--rect expects reL,reR,imB,imT"};
    return out;
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageFailure{"cannot write '" + path + "'"};
    out << text;
}

using Call = apos_status (*)(apos_session*, const char*, char**);

// Runs one C API call and maps its status to the exit code.
int run(Call call, const Json& request, const std::string& out_path) {
    std::unique_ptr<apos_session, decltype(&apos_session_free)> session(apos_session_new(), apos_session_free);
    if (!session) return 4;
    char* out = nullptr;
    const apos_status status = call(session.get(), request.dump().c_str(), &out);
    const std::string text = out ? out : "";
    apos_string_free(out);
    if (status != APOS_OK && status != APOS_ERR_FAILED_CRITERIA)
        std::fprintf(stderr, "error: %s\n", apos_last_error(session.get()));
    if (!text.empty() && (status == APOS_OK || status == APOS_ERR_NUMERICAL)) write_output(text, out_path);
    return static_cast<int>(status);
}

int run_certify(const Json& request, bool json) {
    std::unique_ptr<apos_session, decltype(&apos_session_free)> session(apos_session_new(), apos_session_free);
    if (!session) return 4;
    char* out = nullptr;
    const apos_status status = apos_certify(session.get(), request.dump().c_str(), &out);
    const std::string text = out ? out : "";
    apos_string_free(out);
    if (text.empty()) {
        std::fprintf(stderr, "error: %s\n", apos_last_error(session.get()));
        return static_cast<int>(status);
    }
    if (json) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return static_cast<int>(status);
    }
    const Json report = Json::parse(text);
    int passed = 0;
    for (const Json& c : report.at("criteria")) {
        const bool ok = c.at("passed").get<bool>();
        passed += ok;
        std::printf("%s %2d  %-55s %8.2f s  %s\n", ok ? "PASS" : "FAIL", c.at("id").get<int>(),
                    c.at("name").get<std::string>().c_str(), c.at("seconds").get<double>(),
                    c.at("detail").get<std::string>().c_str());
    }
    std::printf("%d/%zu criteria passed\n", passed, report.at("criteria").size());
    return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Positivity analysis of matrix semigroups and discretized operators"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(apos_version()));

    std::string out_path;
    std::vector<std::string> params;

    auto* analyze = app.add_subcommand("analyze", "Classify a named model or a matrix file");
    std::string model;
    std::string matrix;
    std::string u;
    std::string p;
    double tol_cluster = 0.0;
    std::int64_t seed = 0;
    analyze->add_option("--model", model, "Model name (see `models`)");
    analyze->add_option("--param", params, "Model parameter key=value")->allow_extra_args(false);
    analyze->add_option("--matrix", matrix, "JSON file {\"n\", \"re\", \"im\"}, row-major");
    analyze->add_option("--u", u, "Reference vector: ones, dist, dist2 or a JSON file");
    analyze->add_option("--p", p, "Lattice exponent: 1, 2 or inf");
    analyze->add_option("--tol-cluster", tol_cluster, "Eigenvalue cluster radius");
    analyze->add_option("--seed", seed, "Seed for the random resolvent test vectors")->check(CLI::NonNegativeNumber);
    analyze->add_option("--out", out_path, "Write the report here instead of standard output");

    auto* simulate = app.add_subcommand("simulate", "Simulate the delay equation or the network flow");
    double t_end = 0.0;
    double step = 0.0;
    std::string init;
    int record_every = 1;
    simulate->add_option("--model", model, "delay or network_flow")->required();
    simulate->add_option("--T", t_end, "Final time")->required();
    simulate->add_option("--step", step, "Time step (network_flow defaults to 1/N)");
    simulate->add_option("--init", init, "hat | constant (delay), bump | fixed (network_flow), or a JSON file");
    simulate->add_option("--param", params, "Model parameter key=value")->allow_extra_args(false);
    simulate->add_option("--record-every", record_every, "Record every k-th step")->check(CLI::PositiveNumber);
    simulate->add_option("--out", out_path, "Write the CSV trace here instead of standard output");

    auto* roots = app.add_subcommand("roots", "Locate roots of a characteristic function");
    std::string function;
    std::string rect;
    roots->add_option("--function", function, "delay_char, network_char or bose_k0")->required();
    roots->add_option("--rect", rect, "reL,reR,imB,imT");
    roots->add_option("--param", params, "Parameter key=value")->allow_extra_args(false);
    roots->add_option("--out", out_path, "Write the root set here instead of standard output");

    auto* certify = app.add_subcommand("certify", "Run the acceptance suite");
    bool quick = false;
    bool json = false;
    std::vector<int> criteria;
    certify->add_flag("--quick", quick, "Matrix-only subset");
    certify->add_flag("--json", json, "Print the JSON table");
    certify->add_option("--criterion", criteria, "Run only these criteria")->allow_extra_args(false);

    auto* models = app.add_subcommand("models", "List model names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*analyze) {
            Json request = Json::object();
            if (!model.empty()) request["model"] = model;
            if (!params.empty()) request["params"] = parse_params(params);
            if (!matrix.empty()) request["matrix"] = matrix;
            if (!u.empty()) request["u"] = u;
            if (!p.empty()) request["p"] = p;
            if (analyze->count("--tol-cluster")) request["tol_cluster"] = tol_cluster;
            request["seed"] = seed;
            return run(apos_analyze, request, out_path);
        }
        if (*simulate) {
            Json request{{"model", model}, {"T", t_end}, {"record_every", record_every}};
            if (simulate->count("--step")) request["step"] = step;
            if (!init.empty()) request["init"] = init;
            if (!params.empty()) request["params"] = parse_params(params);
            return run(apos_simulate, request, out_path);
        }
        if (*roots) {
            Json request{{"function", function}};
            if (!rect.empty()) request["rect"] = parse_rect(rect);
            if (!params.empty()) request["params"] = parse_params(params);
            return run(apos_roots, request, out_path);
        }
        if (*certify) {
            Json request{{"quick", quick}};
            if (!criteria.empty()) request["criteria"] = criteria;
            return run_certify(request, json);
        }
        if (*models) return run(apos_models, Json::object(), out_path);
    } catch (const UsageFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return kExitUsage;
    }
    return kExitUsage;
}
