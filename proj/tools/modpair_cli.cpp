// Exit codes: 0 success, 1 computation or regression failure, 2 usage error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "modpair/cli.hpp"

using namespace modpair;

namespace {

struct Invocation {
    RunConfig config;
    std::string format = "json";
};

Json parse_json_option(const std::string& name, const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        throw DomainError("--" + name + " is not valid JSON");
    }
}

int emit(const RunOutput& out, const std::string& format) {
    if (format == "csv") {
        if (!out.table) throw DomainError("this command has no CSV form");
        std::cout << out.table->csv();
    } else {
        std::cout << out.payload.dump(2) << "\n";
    }
    return 0;
}

int run_golden(const std::string& action, const std::string& root) {
    GoldenMode mode = action == "write" ? GoldenMode::write : GoldenMode::verify;
    int failures = 0;
    for (const auto& c : golden_cases()) {
        GoldenStatus st = golden_store(golden_record(c), mode, root);
        std::cout << (st.ok ? "ok   " : "FAIL ") << st.message << "\n";
        if (!st.ok) ++failures;
    }
    std::cout << failures << " failure(s) over " << golden_cases().size() << " record(s)\n";
    return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"modpair: exact intersection pairings on moduli of bundles"};
    app.require_subcommand(1);
    Invocation inv;
    Json& p = inv.config.params;

    // Options are collected as optionals and only copied into params when given.
    std::optional<int> n, g, m, M;
    std::optional<long> d, xi_prime, terms;
    std::optional<std::string> mono, S, sizes, rho, eps, jacobian, config_file;
    bool covering = false;
    std::string mode, golden_action;
    std::optional<std::string> golden_dir;
    std::optional<unsigned> rho_seed;

    auto* pairing = app.add_subcommand("pairing", "evaluate a pairing");
    pairing->add_option("mode", mode, "coprime | ih | perturbed | periodicity")
        ->required()
        ->check(CLI::IsMember({"coprime", "ih", "perturbed", "periodicity"}));
    pairing->add_option("--n", n, "rank")->required();
    pairing->add_option("--d", d, "degree")->required();
    pairing->add_option("--g", g, "genus")->required();
    pairing->add_option("--mono", mono, "monomial, e.g. a2^1,f2^3");
    pairing->add_option("--xi-prime", xi_prime, "prime for the default perturbation");
    pairing->add_option("--jacobian", jacobian, "true | false")->check(CLI::IsMember({"true", "false"}));
    pairing->add_flag("--covering", covering, "multiply by n^{2g}");

    auto* walls = app.add_subcommand("walls", "wall geometry");
    walls->require_subcommand(1);
    auto* ray = walls->add_subcommand("ray-test", "does the ray meet the hull of S");
    ray->add_option("--S", S, "edges as a JSON list of pairs")->required();
    ray->add_option("--M", M, "vertex count");
    auto* closest = walls->add_subcommand("closest", "closest point to the origin and its partition");
    closest->add_option("--S", S, "edges as a JSON list of pairs")->required();
    closest->add_option("--M", M, "vertex count");
    closest->add_option("--sizes", sizes, "block sizes as a JSON list");
    closest->add_option("--rho", rho, "block norms as a JSON list of \"p/q\"");
    closest->add_option("--rho-seed", rho_seed, "generic block norms from a seed")->excludes("--rho");

    auto* witten = app.add_subcommand("witten", "rank 2 Gaussian partition function");
    witten->require_subcommand(1);
    auto* compare = witten->add_subcommand("compare", "polynomial part by two routes");
    compare->add_option("--g", g, "genus")->required();
    auto* zeta = witten->add_subcommand("zeta", "zeta(2m) from residues and partial sums");
    zeta->add_option("--m", m, "m >= 1")->required();
    zeta->add_option("--terms", terms, "partial sum length");
    auto* z = witten->add_subcommand("z", "evaluate Z(eps) with a tail bound");
    z->add_option("--g", g, "genus")->required();
    z->add_option("--eps", eps, "eps as p/q")->required();
    z->add_option("--terms", terms, "series length");
    auto* half = witten->add_subcommand("half-power", "eps^{g-3/2} coefficient");
    half->add_option("--g", g, "genus")->required();

    auto* desing = app.add_subcommand("desing", "rank 2 desingularisation pairings");
    desing->require_subcommand(1);
    auto* table = desing->add_subcommand("table", "all (m, n) with 2m + n = 4g - 3");
    table->add_option("--g", g, "genus")->required();
    auto* value = desing->add_subcommand("value", "one (m, n)");
    value->add_option("--g", g, "genus")->required();
    value->add_option("--m", m, "power of a_2")->required();
    value->add_option("--n", n, "power of f_2")->required();

    auto* golden = app.add_subcommand("golden", "write or verify the regression records");
    golden->add_option("action", golden_action, "write | verify")->required()->check(CLI::IsMember({"write", "verify"}));
    golden->add_option("--root", golden_dir, "golden directory (default: $MODPAIR_GOLDEN_ROOT, else tests/golden)");

    auto* run = app.add_subcommand("run", "run a {command, params} JSON config file");
    run->add_option("config", config_file, "path")->required()->check(CLI::ExistingFile);

    for (auto* sub : {pairing, ray, closest, compare, zeta, z, half, table, value, run})
        sub->add_option("--format", inv.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (golden->parsed())
            return run_golden(golden_action, golden_dir ? *golden_dir : golden_root("tests/golden").string());

        if (pairing->parsed()) {
            inv.config.command = "pairing";
            p["mode"] = mode;
            p["n"] = *n;
            p["d"] = *d;
            p["g"] = *g;
            if (mono) p["mono"] = *mono;
            if (xi_prime) p["xi_prime"] = *xi_prime;
            if (jacobian) p["jacobian"] = *jacobian == "true";
            p["covering"] = covering;
        } else if (ray->parsed() || closest->parsed()) {
            inv.config.command = ray->parsed() ? "walls ray-test" : "walls closest";
            p["S"] = parse_json_option("S", *S);
            if (M) p["M"] = *M;
            if (sizes) p["sizes"] = parse_json_option("sizes", *sizes);
            if (rho) p["rho"] = parse_json_option("rho", *rho);
            if (rho_seed) p["rho_seed"] = *rho_seed;
        } else if (compare->parsed() || half->parsed()) {
            inv.config.command = compare->parsed() ? "witten compare" : "witten half-power";
            p["g"] = *g;
        } else if (zeta->parsed()) {
            inv.config.command = "witten zeta";
            p["m"] = *m;
            if (terms) p["terms"] = *terms;
        } else if (z->parsed()) {
            inv.config.command = "witten z";
            p["g"] = *g;
            p["eps"] = *eps;
            if (terms) p["terms"] = *terms;
        } else if (table->parsed()) {
            inv.config.command = "desing table";
            p["g"] = *g;
        } else if (value->parsed()) {
            inv.config.command = "desing value";
            p["g"] = *g;
            p["m"] = *m;
            p["n"] = *n;
        } else if (run->parsed()) {
            Json cfg = parse_json_option("config", read_text(*config_file));
            if (!cfg.contains("command") || !cfg["command"].is_string())
                throw DomainError("config needs a string \"command\"");
            inv.config.command = cfg["command"];
            inv.config.params = cfg.value("params", Json::object());
        }
        return emit(run_command(inv.config), inv.format);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "computation failed: " << e.what() << "\n";
        return 1;
    }
}
